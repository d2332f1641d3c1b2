#pragma once

#include <vector>

#include "spikes/reduction.hpp"

namespace spikes {

/// J(u) = ½ uᵀ(K)u − Σ V u₊^{p+1}/(p+1), K = stiffness + mass. The gradient
/// part uses the grid's own bilinear form, so discrete integration by parts
/// is exact.
double energy(const Grid& grid, const Eigen::VectorXd& u, double p);

struct PairTerm {
    int i = 0, j = 0;
    double value = 0.0;       ///< B(Q_i, Q_j) = ∫ŵ_iᵖ ŵ_j
    double separation = 0.0;  ///< |Q_i − Q_j|/ε
    double prediction_separation = 0.0;  ///< γ·w(|Q_i − Q_j|/ε)
    double prediction_boundary = 0.0;    ///< γ·w(2d(Q_j)/ε), as literally stated
};

struct SelfTerm {
    double value = 0.0;      ///< B(Q_j) = −∫ŵ_jᵖ φ_{ε,Q_j}
    double distance = 0.0;   ///< 2d(Q_j,∂Ω)/ε
    double prediction = 0.0; ///< γ·w(2d/ε)
};

struct EnergyReport {
    std::size_t k = 0;
    double rho = 0.0;
    double epsilon = 0.0;
    double J = 0.0;  ///< J_ε(w_{ε,𝐐}) before the correction φ
    double M = 0.0;  ///< M_ε(𝐐) = J_ε(w + φ)
    double I_w = 0.0;          ///< continuum I(w)
    double I_lattice = 0.0;    ///< lattice I_h, the reference used in comparisons
    std::vector<SelfTerm> self_terms;
    std::vector<PairTerm> pair_terms;
    double self_sum = 0.0;  ///< Σ B(Q_j)
    double pair_sum = 0.0;  ///< Σ_{i<j} B(Q_i, Q_j)
    double expansion = 0.0;  ///< k·I_h − ½ΣB(Q_j) − ΣB(Q_i,Q_j)
    double discrepancy = 0.0;  ///< M − expansion
    double interaction = 0.0;  ///< ½ΣB(Q_j) + ΣB(Q_i,Q_j)
    double c_max = 0.0;
};

nlohmann::json to_json(const EnergyReport& r);

/// Self and pair interaction terms with the asymptotic predictions.
EnergyReport interaction_terms(const Ansatz& ansatz, const Configuration& config);

/// Runs reduce and evaluates M_ε with the interaction expansion attached.
EnergyReport reduced_energy(const Ansatz& ansatz, const Configuration& config,
                            const ReductionOptions& opts = {});
/// Same, reusing a finished reduction.
EnergyReport reduced_energy(const Ansatz& ansatz, const ReducedSolution& reduced);

}  // namespace spikes
