#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "spikes/energy.hpp"

namespace spikes {

struct SearchOptions {
    ReductionOptions reduction;
    /// Packing budget δ in k ≤ δ/(ρε)ⁿ; NaN selects |Ω|·2ⁿ/|B₁|, the
    /// count of disjoint balls of radius ρε/2 that fit by volume.
    double delta = std::numeric_limits<double>::quiet_NaN();
    int budget = 20000;  ///< M_ε evaluations per local_maximize call
    int jobs = 1;        ///< concurrent trial evaluations
    /// Minimum accepted gain, relative to |M_ε|.
    double gain_floor = 1e-14;
};

double packing_delta(const Domain& domain, const SearchOptions& opts);

/// M_ε with memoisation by lattice configuration. Infeasible
/// configurations evaluate to −∞.
class EnergyLandscape {
public:
    EnergyLandscape(const Ansatz& ansatz, const SearchOptions& opts) : ansatz_(&ansatz), opts_(opts) {}

    double operator()(const Configuration& config) const;
    /// Evaluates a batch, up to `jobs` at a time; results in input order.
    std::vector<double> evaluate(const std::vector<Configuration>& configs) const;
    int evaluations() const;

    const Ansatz& ansatz() const { return *ansatz_; }
    const SearchOptions& options() const { return opts_; }

private:
    const Ansatz* ansatz_;
    SearchOptions opts_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<LatticeIndex>, double> cache_;
    mutable int evaluations_ = 0;
};

struct ClearanceMap {
    std::vector<int> nodes;          ///< candidate grid nodes
    std::vector<double> clearance;   ///< physical distance to spikes and ∂Ω
    int stride = 1;
};

/// Candidates are grid nodes on a sub-lattice of spacing ≈ ρε/4 that
/// contains the node nearest the domain centre.
ClearanceMap clearance_map(const Ansatz& ansatz, const Configuration& config);

struct SearchState {
    Configuration config;
    double M = 0.0;
    Feasibility margins;
    int evaluations = 0;
    int moves = 0;
    std::vector<double> history;  ///< M after each accepted move
};

/// Adds Q_{k+1} at the clearance maximiser (ties: smallest coordinates
/// first). Throws PackingBudgetExceeded when k+1 exceeds δ/(ρε)ⁿ and
/// NoClearance when no candidate clears 3ρε.
Configuration insert_spike(const Ansatz& ansatz, const Configuration& config, const SearchOptions& opts = {});

/// Coordinate ascent on M_ε by one-cell moves along the axes; moves that
/// leave Λ_k are rejected. A direction that improves is followed while it
/// keeps improving. Stops after a full cycle with no accepted move or when
/// the evaluation budget runs out.
SearchState local_maximize(const EnergyLandscape& landscape, const Configuration& start);

struct EnergyStepReport {
    std::size_t k = 0;
    double C_k = 0.0;
    double C_k1 = 0.0;
    double step = 0.0;       ///< C_{k+1} − C_k − I
    double threshold = 0.0;  ///< −(γ/4)e^{−ρ}
    bool rejected = false;   ///< the (k+1)-configuration was outside Λ_{k+1}
    bool pass = false;
};

/// Energy step against the lattice reference energy I_h.
EnergyStepReport verify_energy_step(const Ansatz& ansatz, const SearchState& state_k, const SearchState& state_k1);

struct InteriorReport {
    bool pass = false;
    double pair_margin = 0.0;     ///< min |Q_i − Q_j|/(ρε)
    double reflect_margin = 0.0;  ///< min |Q_i − Q_j*|/(ρε)
    std::string active;           ///< description of the binding constraint on failure
};

InteriorReport verify_interior_maximizer(const Ansatz& ansatz, const SearchState& state);

/// Greedy insertion without optimisation until NoClearance or the packing
/// budget stops it; returns the number of spikes placed.
std::size_t packing_count(const Ansatz& ansatz, double rho, const SearchOptions& opts = {});

}  // namespace spikes
