#include "spikes/ledger.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "spikes/errors.hpp"

namespace spikes {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string join(const std::vector<std::string>& cells)
{
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            line += ',';
        line += cells[i];
    }
    return line;
}

}  // namespace

void CsvTable::write(std::ostream& os) const
{
    os << join(header) << '\n';
    for (const auto& r : rows)
        os << join(r) << '\n';
}

void append_csv(const std::string& path, const CsvTable& table)
{
    std::string existing;
    {
        std::ifstream in(path);
        if (in)
            std::getline(in, existing);
    }
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw ConfigError("cannot write ledger " + path);
    if (existing.empty())
        out << join(table.header) << '\n';
    else if (existing != join(table.header))
        throw ConfigError("ledger " + path + " has a different column layout");
    for (const auto& r : table.rows)
        out << join(r) << '\n';
}

void write_csv(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write " + path);
    table.write(out);
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

CsvTable ladder_table(const LadderResult& ladder, const std::string& hash, int dim)
{
    CsvTable t;
    t.header = {"config_hash", "k",          "rho",           "epsilon",        "M_eps",         "k_I_w",
                "k_I_lattice", "self_sum",  "pair_sum",      "expansion",      "discrepancy",   "energy_step",
                "threshold",   "step_pass", "pair_margin",   "reflect_margin", "interior_pass", "c_max",
                "dominance",   "newton_residual", "newton_iterations", "local_maxima", "min_u", "certificate_pass",
                "evaluations", "positions", "energy_step_continuum"};
    for (const auto& s : ladder.steps) {
        const auto& e = s.energy;
        const auto& c = s.certificate;
        std::string pos;
        for (const auto& q : s.state.config.points) {
            if (!pos.empty())
                pos += ';';
            pos += format_number(q[0]);
            if (dim == 2)
                pos += ' ' + format_number(q[1]);
        }
        const double kd = static_cast<double>(s.k);
        t.rows.push_back({hash,
                          std::to_string(s.k),
                          format_number(e.rho),
                          format_number(e.epsilon),
                          format_number(s.state.M),
                          format_number(kd * e.I_w),
                          format_number(kd * e.I_lattice),
                          format_number(e.self_sum),
                          format_number(e.pair_sum),
                          format_number(e.expansion),
                          format_number(e.discrepancy),
                          format_number(s.step.step),
                          format_number(s.step.threshold),
                          s.step.pass ? "1" : "0",
                          format_number(s.interior.pair_margin),
                          format_number(s.interior.reflect_margin),
                          s.interior.pass ? "1" : "0",
                          format_number(c.c_max),
                          format_number(c.dominance_ratio),
                          format_number(c.newton_residual),
                          std::to_string(c.newton_iterations),
                          std::to_string(c.maxima),
                          format_number(c.min_u),
                          c.pass ? "1" : "0",
                          std::to_string(s.state.evaluations),
                          pos,
                          format_number(s.step.rejected ? std::numeric_limits<double>::quiet_NaN()
                                                        : s.step.C_k1 - s.step.C_k - e.I_w)});
    }
    return t;
}

CsvTable run_summary(const std::string& command, const std::string& hash, std::size_t k, double M, double metric,
                     bool pass)
{
    CsvTable t;
    t.header = {"command", "config_hash", "k", "M_eps", "metric", "pass"};
    t.rows.push_back({command, hash, std::to_string(k), format_number(M), format_number(metric), pass ? "1" : "0"});
    return t;
}

}  // namespace spikes
