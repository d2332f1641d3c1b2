#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "spikes/domain_grid.hpp"
#include "spikes/ladder.hpp"

namespace spikes {

/// Everything a CLI run needs, read from a JSON document such as
///
///   {"domain": {"shape": "interval", "extents": [0, 4], "epsilon": 0.02, "h": 0.1},
///    "p": 3, "rho": 8, "k_target": "ladder", "k_max": 12}
///
/// Missing keys take the defaults below.
struct RunConfig {
    Domain domain = Domain::interval(0.0, 4.0, 0.02);
    double h = 0.1;
    double p = 3.0;
    double rho = 8.0;
    double eta = 0.5;
    double delta = std::numeric_limits<double>::quiet_NaN();  ///< null → volume default
    bool ladder = true;         ///< "k_target": "ladder"
    std::size_t k_target = 0;   ///< used when ladder is false
    std::size_t k_max = 64;
    std::vector<Point> points;  ///< explicit configuration for reduce/energy/certify

    double r_max = 0.0;  ///< ground-state table radius, 0 → 60 (1D) / 50 (2D)
    double tol_ode = 1e-10;
    double tol_fp = 1e-10;
    double tol_orth = 1e-9;
    int max_iterations = 60;
    double rho_min = 8.0;
    double c_bar = 1e-6;
    double residual_bar = 1e-10;
    int search_budget = 20000;

    std::string output_dir = ".";
    std::uint64_t seed = 0;
    std::string cache_dir;
    int jobs = 1;

    int dim() const { return domain.dim(); }
    double ground_state_radius() const { return r_max > 0.0 ? r_max : (dim() == 1 ? 60.0 : 50.0); }
    ReductionOptions reduction_options() const;
    SearchOptions search_options() const;
    CertificateOptions certificate_options() const;
    Configuration configuration() const;
};

/// Throws ConfigError on malformed input or out-of-range values.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a over the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);
std::string fnv1a_hex(const std::string& text);

RunConfig load_run_config(const std::string& path);

/// Cache directory for ground-state tables: the explicit argument if set,
/// otherwise $SPIKES_CACHE_DIR, otherwise none (empty string).
std::string resolve_cache_dir(const std::string& configured);

/// Ground state for (dim, p, r_max, tol), read from `cache_dir` when a table
/// for exactly these parameters exists and written there after a fresh
/// solve. `hit` reports which path was taken.
std::shared_ptr<const GroundState> cached_ground_state(int dim, double p, double r_max, double tol,
                                                       const std::string& cache_dir, bool* hit = nullptr);

}  // namespace spikes
