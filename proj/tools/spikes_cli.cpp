#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "spikes/asymptotics.hpp"
#include "spikes/errors.hpp"
#include "spikes/ledger.hpp"
#include "spikes/run_config.hpp"

using namespace spikes;

namespace {

constexpr int kUsage = 64;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~Timer()
    {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "wall time %.3f s\n", s);
    }
};

std::string in_output_dir(const RunConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

std::shared_ptr<const GroundState> ground_state_for(const RunConfig& cfg)
{
    bool hit = false;
    auto gs = cached_ground_state(cfg.dim(), cfg.p, cfg.ground_state_radius(), cfg.tol_ode,
                                  resolve_cache_dir(cfg.cache_dir), &hit);
    if (hit)
        std::fprintf(stderr, "ground state: cache hit\n");
    return gs;
}

int cmd_ground_state(int dim, double p, double rmax, double tol, const std::string& out, const std::string& cache)
{
    if (rmax <= 0.0)
        rmax = dim == 1 ? 60.0 : 50.0;
    bool hit = false;
    auto gs = cached_ground_state(dim, p, rmax, tol, resolve_cache_dir(cache), &hit);
    if (hit)
        std::fprintf(stderr, "ground state: cache hit\n");
    write_json(out, to_json(*gs));
    std::printf("w(0) = %.15g\nA_n = %.15g\nI_w = %.15g\ngamma = %.15g\nlambda1 = %.15g\n", gs->center_value(),
                gs->amplitude, gs->energy, gs->gamma, gs->lambda1);
    return 0;
}

int cmd_reduce(const RunConfig& cfg, const std::string& out)
{
    Ansatz ansatz(ground_state_for(cfg), cfg.domain, cfg.h);
    const ReducedSolution r = reduce(ansatz, cfg.configuration(), cfg.reduction_options());
    write_json(out.empty() ? in_output_dir(cfg, "reduced.json") : out, to_json(r));
    std::printf("k = %zu  iterations = %d  |phi|_* = %.6e  c_max = %.6e\n", r.config.k(), r.iterations,
                r.star_norm_phi, r.c_max());
    return 0;
}

int cmd_energy(const RunConfig& cfg, const std::string& out)
{
    Ansatz ansatz(ground_state_for(cfg), cfg.domain, cfg.h);
    const EnergyReport e = reduced_energy(ansatz, cfg.configuration(), cfg.reduction_options());
    write_json(out.empty() ? in_output_dir(cfg, "energy.json") : out, to_json(e));
    append_csv(in_output_dir(cfg, "ledger.csv"), run_summary("energy", config_hash(cfg), e.k, e.M, e.discrepancy, true));
    std::printf("M_eps = %.15g  k*I_h = %.15g  interaction = %.6e  discrepancy = %.6e\n", e.M,
                static_cast<double>(e.k) * e.I_lattice, e.interaction, e.discrepancy);
    return 0;
}

int cmd_ladder(const RunConfig& cfg, const std::string& out)
{
    Ansatz ansatz(ground_state_for(cfg), cfg.domain, cfg.h);
    const std::size_t k_max = cfg.ladder ? cfg.k_max : cfg.k_target;
    const LadderResult L = run_ladder(ansatz, cfg.rho, k_max, cfg.search_options(), cfg.certificate_options());
    const std::string hash = config_hash(cfg);
    write_csv(out.empty() ? in_output_dir(cfg, "ladder.csv") : out, ladder_table(L, hash, cfg.dim()));

    nlohmann::json finals = nlohmann::json::array();
    for (const auto& s : L.steps) {
        nlohmann::json j = to_json(s.state.config);
        j["epsilon"] = cfg.domain.epsilon;
        j["k"] = s.k;
        j["M_eps"] = s.state.M;
        j["margins"] = {{"pair", format_number(s.interior.pair_margin)},
                        {"reflect", format_number(s.interior.reflect_margin)}};
        j["certificate"] = to_json(s.certificate);
        finals.push_back(j);
    }
    write_json(in_output_dir(cfg, "ladder_configurations.json"), {{"config_hash", hash}, {"steps", finals}});

    for (const auto& s : L.steps)
        std::printf("k=%zu  M=%.12f  step=%+.3e  threshold=%.3e  %s  interior %s  certificate %s\n", s.k, s.state.M,
                    s.step.step, s.step.threshold, s.step.pass ? "PASS" : "FAIL", s.interior.pass ? "PASS" : "FAIL",
                    s.certificate.pass ? "PASS" : "FAIL");
    std::printf("stopped: %s\n", L.stop_reason.c_str());
    const bool pass = L.all_steps_pass();
    append_csv(in_output_dir(cfg, "ledger.csv"),
               run_summary("ladder", hash, L.steps.size(), L.steps.empty() ? 0.0 : L.steps.back().state.M,
                           static_cast<double>(L.steps.size()), pass));
    return pass ? 0 : 1;
}

int cmd_verify_asymptotics(const RunConfig& cfg, const std::string& out)
{
    Ansatz ansatz(ground_state_for(cfg), cfg.domain, cfg.h);
    const AsymptoticsReport rep = verify_asymptotics(ansatz, cfg.rho);
    CsvTable t;
    t.header = {"kind", "distance", "B", "w", "ratio", "gamma", "literal_prediction", "rel_error", "envelope", "pass"};
    for (const auto& r : rep.rows) {
        t.rows.push_back({r.kind, format_number(r.distance), format_number(r.B), format_number(r.w_at),
                          format_number(r.ratio), format_number(rep.gamma), format_number(r.literal),
                          format_number(r.rel_error), format_number(r.envelope), r.pass ? "1" : "0"});
        std::printf("%-10s  %6.2f  B/w = %.6f  gamma = %.6f  rel = %+.3e%s\n", r.kind.c_str(), r.distance, r.ratio,
                    rep.gamma, r.rel_error, r.envelope > 0 ? (r.pass ? "  PASS" : "  FAIL") : "");
    }
    write_csv(out.empty() ? in_output_dir(cfg, "asymptotics.csv") : out, t);
    return rep.pass() ? 0 : 1;
}

int cmd_certify(const RunConfig& cfg, const std::string& out)
{
    Ansatz ansatz(ground_state_for(cfg), cfg.domain, cfg.h);
    const ReducedSolution r = reduce(ansatz, cfg.configuration(), cfg.reduction_options());
    const SolutionCertificate c = certify(ansatz, r, cfg.certificate_options(), cfg.reduction_options());
    write_json(out.empty() ? in_output_dir(cfg, "certificate.json") : out, to_json(c));
    append_csv(in_output_dir(cfg, "ledger.csv"),
               run_summary("certify", config_hash(cfg), c.k, energy(ansatz.grid(), r.u(), cfg.p), c.c_max, c.pass));
    std::printf("certificate %s: residual %.3e (%d Newton steps), c_max %.3e, maxima %zu/%zu, min u %.3e\n",
                c.pass ? "PASS" : "FAIL", c.newton_residual, c.newton_iterations, c.c_max, c.maxima, c.k, c.min_u);
    return c.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-spike solutions of the singularly perturbed Neumann problem"};
    app.require_subcommand(1);

    int dim = 1;
    double p = 3.0, rmax = 0.0, tol = 1e-10;
    std::string gs_out = "ground_state.json", cache;
    auto* gs_cmd = app.add_subcommand("ground-state", "Solve for the radial ground state and write its table");
    gs_cmd->add_option("--dim", dim, "Space dimension")->required()->check(CLI::Range(1, 2));
    gs_cmd->add_option("--p", p, "Exponent p > 1")->required();
    gs_cmd->add_option("--rmax", rmax, "Table radius (default 60 in 1D, 50 in 2D)");
    gs_cmd->add_option("--tol", tol, "ODE residual tolerance")->capture_default_str();
    gs_cmd->add_option("--out", gs_out, "Output JSON")->capture_default_str();
    gs_cmd->add_option("--cache-dir", cache, "Ground-state cache (default $SPIKES_CACHE_DIR)");

    std::string config_path, out;
    int jobs = 0;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
        cmd->add_option("--out", out, "Output file (default inside output_dir)");
        cmd->add_option("--jobs", jobs, "Concurrent reduce evaluations (overrides the config)");
    };
    auto* reduce_cmd = app.add_subcommand("reduce", "Run the reduction at the configured spike positions");
    auto* energy_cmd = app.add_subcommand("energy", "Reduced energy and interaction terms");
    auto* ladder_cmd = app.add_subcommand("ladder", "Greedy insertion ladder with maximisation and certificates");
    auto* asym_cmd = app.add_subcommand("verify-asymptotics", "Interaction sweeps against their asymptotic laws");
    auto* cert_cmd = app.add_subcommand("certify", "Certify the configured positions as a solution");
    for (auto* c : {reduce_cmd, energy_cmd, ladder_cmd, asym_cmd, cert_cmd})
        add_common(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    Timer timer;
    try {
        if (*gs_cmd)
            return cmd_ground_state(dim, p, rmax, tol, gs_out, cache);
        RunConfig cfg = load_run_config(config_path);
        if (jobs > 0)
            cfg.jobs = jobs;
        if (*reduce_cmd)
            return cmd_reduce(cfg, out);
        if (*energy_cmd)
            return cmd_energy(cfg, out);
        if (*ladder_cmd)
            return cmd_ladder(cfg, out);
        if (*asym_cmd)
            return cmd_verify_asymptotics(cfg, out);
        if (*cert_cmd)
            return cmd_certify(cfg, out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kUsage;
}
