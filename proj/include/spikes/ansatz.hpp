#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <shared_mutex>
#include <vector>

#include <Eigen/Dense>

#include "spikes/domain_grid.hpp"
#include "spikes/ground_state.hpp"
#include "spikes/lattice_profile.hpp"

namespace spikes {

/// Spike centres Q₁…Q_k in physical coordinates plus the separation scale ρ.
struct Configuration {
    double rho = 8.0;
    std::vector<Point> points;

    std::size_t k() const { return points.size(); }
};

nlohmann::json to_json(const Configuration& c);
Configuration configuration_from_json(const nlohmann::json& j);

/// Λ_k membership data. Margins are clearances divided by ρε; both are
/// +∞ when the corresponding constraint is vacuous.
struct Feasibility {
    bool feasible = true;
    double pair_margin = std::numeric_limits<double>::infinity();
    double reflect_margin = std::numeric_limits<double>::infinity();
    int pair_i = -1, pair_j = -1;        ///< closest pair
    int reflect_i = -1, reflect_j = -1;  ///< Q_i closest to the reflection Q_j*
    std::vector<double> boundary_distance;
    std::vector<Point> reflected;
};

/// Evaluates the Λ_k constraints. A rectangle point whose nearest boundary
/// point lies within one mesh cell (h·ε) of a corner must clear both of its
/// reflections by ρε + h·ε.
Feasibility check_feasibility(const Domain& domain, const Configuration& config, double h);

struct SpikeField {
    enum class Kind { CorrectedSpike, Sum, Correction, Solution, Other };
    Kind kind = Kind::Other;
    Eigen::VectorXd values;
};

/// One corrected spike: the free lattice profile ŵ(· − Q/ε), the Neumann
/// solution v = w_{ε,Q} of (1 − Δ)v = ŵᵖ, and φ_{ε,Q} = ŵ − v.
struct CorrectedSpike {
    LatticeIndex center;
    Eigen::VectorXd free;
    Eigen::VectorXd corrected;
    Eigen::VectorXd correction;
};

/// Cut-off χ_i and the fields Z_ij = ∂_j ŵ(· − Q_i/ε)·χ_i, stored in the
/// order (i, j) → i·dim + j.
struct ProjectionSet {
    int dim = 1;
    double support_radius = 0.0;  ///< ρ²/(2(ρ+1)) in rescaled units
    double transition_start = 0.0;  ///< value of t where χ starts to drop
    double transition_end = 0.0;    ///< ρ²/(ρ²−1)
    std::vector<Eigen::VectorXd> Z;
    std::vector<Eigen::VectorXd> chi;
};

/// χ as a function of t = 2|x − q|/(ρ − 1): 1 up to ρ²/(ρ²−1) − 1/ρ, then a
/// C² quintic step down to 0 at ρ²/(ρ²−1).
double cutoff(double t, double rho);

/// Everything that depends on (ground state, domain, mesh) but not on the
/// configuration. Caches corrected spikes by lattice node; safe for
/// concurrent readers.
class Ansatz {
public:
    Ansatz(std::shared_ptr<const GroundState> gs, const Domain& domain, double h);

    const GroundState& ground_state() const { return *gs_; }
    const Domain& domain() const { return domain_; }
    const Grid& grid() const { return grid_; }
    const LatticeProfile& profile() const { return *profile_; }
    double epsilon() const { return domain_.epsilon; }

    /// Lattice node nearest to Q/ε; throws PointOutsideDomain when it is
    /// not a grid node.
    LatticeIndex node_index(const Point& q) const;
    /// Q moved onto the nearest grid node (physical coordinates).
    Point snap(const Point& q) const;
    Configuration snapped(const Configuration& c) const;
    /// Rescaled centre Q/ε of a snapped point.
    Point rescaled(const Point& q) const;
    /// Physical coordinates of a lattice node.
    Point physical(const LatticeIndex& idx) const;

    /// ŵ(· − Q/ε) sampled on the grid.
    Eigen::VectorXd free_spike(const LatticeIndex& center) const;
    /// ∂_axis ŵ(· − Q/ε) by central differences on the lattice.
    Eigen::VectorXd free_spike_derivative(const LatticeIndex& center, int axis) const;

    std::shared_ptr<const CorrectedSpike> corrected_spike(const Point& q) const;
    std::size_t cache_size() const;

private:
    std::shared_ptr<const GroundState> gs_;
    Domain domain_;
    Grid grid_;
    std::shared_ptr<const LatticeProfile> profile_;
    mutable std::shared_mutex mutex_;
    mutable std::map<LatticeIndex, std::shared_ptr<const CorrectedSpike>> cache_;
};

/// w_{ε,𝐐} = Σ w_{ε,Q_i}. Throws InfeasibleConfiguration outside Λ_k.
SpikeField multi_spike_sum(const Ansatz& ansatz, const Configuration& config);
/// Σ ŵ(· − Q_i/ε), the uncorrected sum.
Eigen::VectorXd free_spike_sum(const Ansatz& ansatz, const Configuration& config);

ProjectionSet projection_set(const Ansatz& ansatz, const Configuration& config);

/// sup |f|/W with W = Σ e^{−η|x − Q_i/ε|}. With no spikes the weight is
/// empty: the norm is 0 for the zero field and +∞ otherwise.
double star_norm(const Grid& grid, const Eigen::VectorXd& field, const std::vector<Point>& centers,
                 double eta);
/// The weight W itself on the grid nodes.
Eigen::VectorXd star_weight(const Grid& grid, const std::vector<Point>& centers, double eta);
/// Rescaled spike centres of a configuration.
std::vector<Point> rescaled_centers(const Ansatz& ansatz, const Configuration& config);

/// Node dump "x,y,value" (rescaled coordinates) for plotting.
void write_field_csv(std::ostream& os, const Grid& grid, const Eigen::VectorXd& field);

}  // namespace spikes
