#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "spikes/ansatz.hpp"

namespace spikes {

struct ReductionOptions {
    double eta = 0.5;
    double tol_fp = 1e-10;
    double tol_orth = 1e-9;
    int max_iterations = 60;
    double rho_min = 8.0;
};

/// Bordered saddle system for  Lφ = h + Σ c_ij Z_ij,  ∫φ Z_ij = 0, with
/// L = Δ − 1 + p·w^{p−1}. Assembled in the symmetric mass-weighted form
///   [ −K + M·diag(p w^{p−1})   −M Z ] [φ]   [M h]
///   [ −(M Z)ᵀ                     0  ] [c] = [ 0 ]
/// (K = stiffness + mass) and factorised once.
class ProjectedLinearSystem {
public:
    ProjectedLinearSystem(const Grid& grid, const Eigen::VectorXd& w, double p, ProjectionSet projections);

    struct Solution {
        Eigen::VectorXd phi;
        Eigen::VectorXd c;  ///< index i·dim + j
    };
    /// Throws LinearSolveFailed when the back-substitution misses 1e-8.
    Solution solve(const Eigen::VectorXd& h) const;

    /// max |Lφ − h − Σ c Z| over the grid.
    double residual(const Solution& s, const Eigen::VectorXd& h) const;
    /// Lφ, pointwise.
    Eigen::VectorXd apply_operator(const Eigen::VectorXd& phi) const;
    /// max_ij |∫φ Z_ij|.
    double orthogonality_defect(const Eigen::VectorXd& phi) const;

    const ProjectionSet& projections() const { return proj_; }
    const Grid& grid() const { return *grid_; }
    const Eigen::VectorXd& potential() const { return potential_; }
    /// The bordered matrix itself (used by the dense cross-check).
    const Eigen::SparseMatrix<double>& matrix() const { return A_; }

private:
    const Grid* grid_;
    ProjectionSet proj_;
    Eigen::VectorXd potential_;  // p·w₊^{p−1}
    Eigen::SparseMatrix<double> A_;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

ProjectedLinearSystem::Solution solve_projected_linear(const ProjectedLinearSystem& sys, const Eigen::VectorXd& h);

/// Discrete S(w) = Δw − w + w₊ᵖ for w = w_{ε,𝐐}; equals w₊ᵖ − Σ ŵ_iᵖ since
/// each corrected spike solves its linear problem exactly.
SpikeField error_field(const Ansatz& ansatz, const Configuration& config);

/// N(φ) = (w + φ)₊ᵖ − w₊ᵖ − p w₊^{p−1} φ, pointwise.
SpikeField nonlinear_remainder(const Eigen::VectorXd& w, const Eigen::VectorXd& phi, double p);

struct ReducedSolution {
    Configuration config;
    Eigen::VectorXd w;    ///< w_{ε,𝐐}
    Eigen::VectorXd phi;  ///< φ_{ε,𝐐}
    Eigen::VectorXd c;    ///< c_ij, index i·dim + j
    double star_norm_phi = 0.0;
    double star_norm_error = 0.0;  ///< ‖S(w)‖_*
    int iterations = 0;
    std::vector<double> residual_trace;  ///< ‖φ_{m+1} − φ_m‖_*
    double orthogonality_defect = 0.0;   ///< worst over all iterates
    double pde_residual = 0.0;  ///< max |Δu − u + u₊ᵖ − Σ c Z| at the end
    /// ‖φ‖_*/‖S‖_*, the measured stability constant of the projected inverse.
    double stability_constant = 0.0;

    Eigen::VectorXd u() const { return w + phi; }
    double c_max() const { return c.size() ? c.cwiseAbs().maxCoeff() : 0.0; }
};

nlohmann::json to_json(const ReducedSolution& r);

/// Fixed point φ_{m+1} = A(S + N(φ_m)) from φ₀ (zero unless given).
/// Stops at ‖φ_{m+1} − φ_m‖_* < tol_fp, or once the step sits at the
/// rounding floor of the iterate. Throws ContractionFailed after two
/// consecutive increases of the step above that floor, or when the
/// iteration cap is hit; InfeasibleConfiguration below ρ_min or outside Λ_k.
ReducedSolution reduce(const Ansatz& ansatz, const Configuration& config, const ReductionOptions& opts = {},
                       const Eigen::VectorXd* phi_start = nullptr);

struct IncrementalReport {
    double h1_norm_sq = 0.0;       ///< ∫|∇φ_{k+1}|² + φ_{k+1}²
    std::vector<double> c;         ///< coefficients against χ_i φ₀(· − Q_i/ε)
    std::vector<double> d;         ///< coefficients against Z_ij
    std::vector<double> c_bound;   ///< e^{−ρ/2} e^{−η|Q_i − Q_{k+1}|/ε}
    double psi_h1_norm_sq = 0.0;   ///< remainder after removing the fitted span
};

/// φ_{k+1} = u(Q₁…Q_{k+1}) − u(Q₁…Q_k) − u(Q_{k+1}), its H¹ norm and the
/// least-squares decomposition against span{χ_iφ₀, Z_ij}.
IncrementalReport incremental_difference_diagnostic(const Ansatz& ansatz, const Configuration& config_k,
                                                    const Point& q_new, const ReductionOptions& opts = {});

/// Smallest eigenvalue of −L on the (mass-weighted) orthogonal complement
/// of span{χ_iφ₀, Z_ij}. Dense; intended for grids of a few thousand nodes.
double coercivity_constant(const Ansatz& ansatz, const ReducedSolution& r);

}  // namespace spikes
