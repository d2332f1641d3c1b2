#include "spikes/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "spikes/errors.hpp"

namespace spikes {

ReductionOptions RunConfig::reduction_options() const
{
    ReductionOptions o;
    o.eta = eta;
    o.tol_fp = tol_fp;
    o.tol_orth = tol_orth;
    o.max_iterations = max_iterations;
    o.rho_min = rho_min;
    return o;
}

SearchOptions RunConfig::search_options() const
{
    SearchOptions o;
    o.reduction = reduction_options();
    o.delta = delta;
    o.budget = search_budget;
    o.jobs = jobs;
    return o;
}

CertificateOptions RunConfig::certificate_options() const
{
    CertificateOptions o;
    o.c_bar = c_bar;
    o.residual_bar = residual_bar;
    return o;
}

Configuration RunConfig::configuration() const
{
    Configuration c;
    c.rho = rho;
    c.points = points;
    return c;
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key) && !j.at(key).is_null())
        out = j.at(key).get<T>();
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError(what);
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j)
{
    RunConfig c;
    try {
        require(j.is_object(), "run configuration must be a JSON object");
        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            c.domain = domain_from_json(d);
            read(d, "h", c.h);
        }
        read(j, "p", c.p);
        read(j, "rho", c.rho);
        read(j, "eta", c.eta);
        if (j.contains("delta") && !j.at("delta").is_null())
            c.delta = j.at("delta").get<double>();
        if (j.contains("k_target")) {
            const auto& k = j.at("k_target");
            if (k.is_string()) {
                require(k.get<std::string>() == "ladder", "k_target must be an integer or \"ladder\"");
                c.ladder = true;
            } else {
                c.ladder = false;
                c.k_target = k.get<std::size_t>();
            }
        }
        read(j, "k_max", c.k_max);
        if (j.contains("points"))
            for (const auto& q : j.at("points")) {
                const auto v = q.get<std::vector<double>>();
                require(!v.empty() && v.size() <= 2, "points must have one or two coordinates");
                c.points.push_back({v[0], v.size() == 2 ? v[1] : 0.0});
            }
        read(j, "r_max", c.r_max);
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            read(t, "ode", c.tol_ode);
            read(t, "fixed_point", c.tol_fp);
            read(t, "orthogonality", c.tol_orth);
            read(t, "max_iterations", c.max_iterations);
            read(t, "rho_min", c.rho_min);
            read(t, "c_bar", c.c_bar);
            read(t, "residual_bar", c.residual_bar);
            read(t, "search_budget", c.search_budget);
        }
        read(j, "output_dir", c.output_dir);
        read(j, "seed", c.seed);
        read(j, "cache_dir", c.cache_dir);
        read(j, "jobs", c.jobs);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed run configuration: ") + e.what());
    }

    require(c.domain.epsilon > 0.0 && c.domain.epsilon <= 0.5, "epsilon must lie in (0, 0.5]");
    require(c.h > 0.0, "h must be positive");
    require(c.p > 1.0, "p must exceed 1");
    require(c.rho > 1.0, "rho must exceed 1");
    require(c.eta > 0.0 && c.eta < 1.0, "eta must lie in (0, 1)");
    require(std::isnan(c.delta) || c.delta > 0.0, "delta must be positive");
    require(c.tol_ode > 0.0 && c.tol_fp > 0.0 && c.tol_orth > 0.0, "tolerances must be positive");
    require(c.max_iterations > 0 && c.search_budget > 0, "iteration budgets must be positive");
    require(c.jobs >= 1, "jobs must be at least 1");
    require(c.r_max >= 0.0, "r_max must be non-negative");
    return c;
}

nlohmann::json to_json(const RunConfig& c)
{
    nlohmann::json domain = to_json(c.domain);
    domain["h"] = c.h;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& q : c.points) {
        if (c.dim() == 1)
            pts.push_back({q[0]});
        else
            pts.push_back({q[0], q[1]});
    }
    nlohmann::json j = {{"domain", domain},
                        {"p", c.p},
                        {"rho", c.rho},
                        {"eta", c.eta},
                        {"delta", std::isnan(c.delta) ? nlohmann::json(nullptr) : nlohmann::json(c.delta)},
                        {"k_max", c.k_max},
                        {"points", pts},
                        {"r_max", c.r_max},
                        {"tolerances",
                         {{"ode", c.tol_ode},
                          {"fixed_point", c.tol_fp},
                          {"orthogonality", c.tol_orth},
                          {"max_iterations", c.max_iterations},
                          {"rho_min", c.rho_min},
                          {"c_bar", c.c_bar},
                          {"residual_bar", c.residual_bar},
                          {"search_budget", c.search_budget}}},
                        {"output_dir", c.output_dir},
                        {"seed", c.seed},
                        {"cache_dir", c.cache_dir},
                        {"jobs", c.jobs}};
    if (c.ladder)
        j["k_target"] = "ladder";
    else
        j["k_target"] = c.k_target;
    return j;
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const RunConfig& c)
{
    nlohmann::json j = to_json(c);
    // Locations and parallelism do not change any computed number.
    j.erase("output_dir");
    j.erase("cache_dir");
    j.erase("jobs");
    return fnv1a_hex(j.dump());
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open run configuration " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return run_config_from_json(j);
}

std::string resolve_cache_dir(const std::string& configured)
{
    if (!configured.empty())
        return configured;
    if (const char* env = std::getenv("SPIKES_CACHE_DIR"))
        return env;
    return {};
}

std::shared_ptr<const GroundState> cached_ground_state(int dim, double p, double r_max, double tol,
                                                       const std::string& cache_dir, bool* hit)
{
    if (hit)
        *hit = false;
    std::string path;
    if (!cache_dir.empty()) {
        const nlohmann::json key = {{"dim", dim}, {"p", p}, {"r_max", r_max}, {"tol", tol}, {"version", 1}};
        path = (std::filesystem::path(cache_dir) / ("ground_state_" + fnv1a_hex(key.dump()) + ".json")).string();
        std::ifstream in(path);
        if (in) {
            try {
                nlohmann::json j;
                in >> j;
                auto gs = std::make_shared<GroundState>(ground_state_from_json(j));
                if (gs->dim == dim && gs->p == p) {
                    if (hit)
                        *hit = true;
                    return gs;
                }
            } catch (const std::exception&) {
                // Unreadable cache entries are replaced by a fresh solve.
            }
        }
    }
    auto gs = std::make_shared<GroundState>(solve_ground_state(dim, p, r_max, tol));
    if (!path.empty()) {
        std::filesystem::create_directories(cache_dir);
        std::ofstream out(path, std::ios::trunc);
        out << to_json(*gs).dump();
    }
    return gs;
}

}  // namespace spikes
