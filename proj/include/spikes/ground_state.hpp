#pragma once

#include <utility>
#include <vector>

#include "json.hpp"

namespace spikes {

/// Radial ground state w of  Δw − w + wᵖ = 0  on ℝⁿ, tabulated on a uniform
/// radial grid, together with the scalars derived from it.
///
/// Beyond the handover radius the table holds the exact decaying solution of
/// the linearized tail equation, A₀·K(r), where K is the fundamental solution
/// of −Δ + 1. Its leading-order form is A_n r^{−(n−1)/2} e^{−r}.
struct GroundState {
    int dim = 1;
    double p = 3.0;
    std::vector<double> r_grid;
    std::vector<double> w_vals;
    std::vector<double> dw_vals;
    double amplitude = 0.0;        ///< A_n in w ≈ A_n r^{-(n-1)/2} e^{-r}
    double green_amplitude = 0.0;  ///< A₀ in w ≈ A₀ K(r)
    double handover_radius = 0.0;
    double energy = 0.0;           ///< I(w)
    double gamma = 0.0;            ///< ∫ wᵖ(y) e^{-y₁} dy
    double lambda1 = 0.0;
    std::vector<double> phi0_vals;
    double max_ode_residual = 0.0;

    double dr() const { return r_grid.size() > 1 ? r_grid[1] - r_grid[0] : 0.0; }
    double r_max() const { return r_grid.empty() ? 0.0 : r_grid.back(); }
    double center_value() const { return w_vals.front(); }

    /// w(r) for any r ≥ 0: cubic Hermite on the table, tail formula beyond it.
    double value(double r) const;
    /// w′(r), same evaluation rules.
    double derivative(double r) const;
    /// Principal eigenfunction φ₀(r) (max φ₀ = 1), zero beyond the table.
    double phi0(double r) const;
};

struct GroundStateOptions {
    double dr = 0.01;
    double ode_tolerance = 1e-15;         ///< integrator abs/rel tolerance
    double handover_nonlinearity = 1e-8;  ///< tail starts once p·w^{p−1} drops below this
    int max_bisection = 400;
    int max_eigen_iterations = 20000;
};

/// Shooting on w(0) with bisection. Throws NoDecayBracket when no decaying
/// solution can be bracketed, ToleranceNotMet when the table misses `tol`
/// or r_max is too short for the tail to fall below 1e-12.
GroundState solve_ground_state(int dim, double p, double r_max, double tol,
                               const GroundStateOptions& opts = {});

/// γ = ∫ wᵖ(y) e^{-y₁} dy, by radial quadrature against the spherical mean
/// of e^{-y₁}.
double compute_gamma(const GroundState& gs);

/// ∫ wᵖ(x) w(x + s e₁) dx by direct quadrature (dim 1 and 2).
double two_center_integral(const GroundState& gs, double s);
/// e^{s} s^{(n−1)/2} ∫ wᵖ(x) w(x + s e₁) dx / A_n, which tends to γ as s → ∞.
double convolution_ratio(const GroundState& gs, double s);

/// I(w) = ½∫(|∇w|² + w²) − 1/(p+1) ∫ w^{p+1}.
double compute_energy(const GroundState& gs);

/// The two sides of  ∫(|∇w|² + w²) = ∫ w^{p+1}.
std::pair<double, double> pohozaev_sides(const GroundState& gs);

/// Largest eigenvalue of Δ − 1 + p w^{p−1} restricted to radial functions and
/// its eigenfunction on gs.r_grid, normalised to max = 1. Shifted inverse
/// iteration; Richardson-extrapolated over two radial resolutions.
std::pair<double, std::vector<double>> principal_eigenpair(const GroundState& gs,
                                                           int max_iterations = 20000);

/// Fundamental solution K of −Δ + 1 in ℝⁿ and its radial derivative.
double fundamental_solution(int dim, double r);
double fundamental_solution_derivative(int dim, double r);

/// Surface measure of the unit sphere S^{n−1} (2 for n = 1).
double unit_sphere_area(int dim);
/// Volume of the unit ball B₁ in ℝⁿ.
double unit_ball_volume(int dim);

/// Versioned JSON table {version, dim, p, r_grid, w, dw, A_n, I_w, gamma, lambda1, phi0, ...}.
nlohmann::json to_json(const GroundState& gs);
GroundState ground_state_from_json(const nlohmann::json& j);

}  // namespace spikes
