#pragma once

#include <vector>

#include "spikes/reduction.hpp"

namespace spikes {

struct MultiplierAudit {
    /// A[(s,l),(i,j)] = ∫ Z_sl · ∂(w + φ)/∂Q_ij, central differences over one cell.
    Eigen::MatrixXd matrix;
    double dominance_ratio = 0.0;  ///< min|diag| / max off-diagonal row sum (+∞ if none)
    double c_max = 0.0;
    /// −ε⁻¹∫(∂_1 ŵ)², the predicted diagonal entry.
    double predicted_diagonal = 0.0;
};

MultiplierAudit multiplier_audit(const Ansatz& ansatz, const ReducedSolution& reduced,
                                 const ReductionOptions& opts = {});

struct NewtonOptions {
    double tolerance = 1e-11;
    int max_iterations = 20;
};

struct NewtonResult {
    Eigen::VectorXd u;
    double initial_residual = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// max |Δu − u + u₊ᵖ|.
double pde_residual(const Grid& grid, const Eigen::VectorXd& u, double p);

/// Newton on the unprojected discrete equation. Returns immediately when
/// the start already meets the tolerance. Throws NewtonDiverged when the
/// residual blows up or the iteration cap is reached.
NewtonResult newton_polish(const Grid& grid, const Eigen::VectorXd& u_init, double p, const NewtonOptions& opts = {});

struct LocalMaxima {
    std::size_t count = 0;
    std::vector<int> nodes;
    double min_value = 0.0;
};

/// Strict local maxima over face and diagonal neighbours; equal
/// neighbours disqualify each other.
LocalMaxima count_local_maxima(const Grid& grid, const Eigen::VectorXd& u);

struct CertificateOptions {
    double residual_bar = 1e-10;
    double c_bar = 1e-6;
    NewtonOptions newton;
};

struct SolutionCertificate {
    std::size_t k = 0;
    double c_max = 0.0;
    double dominance_ratio = 0.0;
    double newton_residual = 0.0;
    int newton_iterations = 0;
    bool newton_converged = false;
    double polish_change = 0.0;  ///< ‖u − u_init‖_∞
    std::size_t maxima = 0;
    std::vector<Point> maxima_locations;  ///< rescaled
    double max_location_error = 0.0;      ///< distance of each maximum to the nearest Q_i/ε
    std::size_t maxima_before_polish = 0;
    double min_u = 0.0;
    bool pass = false;
};

nlohmann::json to_json(const SolutionCertificate& c);

SolutionCertificate certify(const Ansatz& ansatz, const ReducedSolution& reduced, const CertificateOptions& opts = {},
                            const ReductionOptions& reduction = {});

}  // namespace spikes
