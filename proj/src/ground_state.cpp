#include "spikes/ground_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "spikes/errors.hpp"

namespace spikes {

namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

enum class ShotOutcome { Crossed, TurnedUp, Reached };

struct Shot {
    ShotOutcome outcome = ShotOutcome::Reached;
    std::vector<double> w;   // node values, index 0 = r = 0
    std::vector<double> dw;
};

struct StopShot {
    ShotOutcome outcome;
};

double positive_power(double u, double p) { return u > 0.0 ? std::pow(u, p) : 0.0; }

// Integrates the radial ODE from the series start out to node `last`, stopping
// at the first node where w < 0 (too high) or w' > 0 (too low).
Shot shoot(int dim, double p, double w0, double dr, std::size_t last, double tol)
{
    Shot shot;
    shot.w.push_back(w0);
    shot.dw.push_back(0.0);

    const double r0 = 1e-4;
    const double curvature = (w0 - std::pow(w0, p)) / dim;
    State y{w0 + 0.5 * curvature * r0 * r0, curvature * r0};

    auto rhs = [dim, p](const State& s, State& ds, double r) {
        ds[0] = s[1];
        ds[1] = -(dim - 1) / r * s[1] + s[0] - positive_power(s[0], p);
    };

    std::vector<double> times;
    times.reserve(last + 1);
    times.push_back(r0);
    for (std::size_t i = 1; i <= last; ++i)
        times.push_back(static_cast<double>(i) * dr);

    auto observer = [&](const State& s, double r) {
        if (r == r0)
            return;
        if (s[0] < 0.0)
            throw StopShot{ShotOutcome::Crossed};
        if (s[1] > 0.0)
            throw StopShot{ShotOutcome::TurnedUp};
        shot.w.push_back(s[0]);
        shot.dw.push_back(s[1]);
    };

    try {
        odeint::integrate_times(odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>()),
                                rhs, y, times.begin(), times.end(), 1e-3, observer);
        shot.outcome = ShotOutcome::Reached;
    } catch (const StopShot& stop) {
        shot.outcome = stop.outcome;
    }
    return shot;
}

// Radially growing partner of K, used to strip the growing mode when fitting
// the tail amplitude.
double growing_solution(int dim, double r)
{
    if (dim == 1)
        return std::cosh(r);
    const double nu = 0.5 * dim - 1.0;
    return std::pow(r, -nu) * std::cyl_bessel_i(nu, r);
}

double growing_solution_derivative(int dim, double r)
{
    if (dim == 1)
        return std::sinh(r);
    const double nu = 0.5 * dim - 1.0;
    return std::pow(r, -nu) * std::cyl_bessel_i(nu + 1.0, r);
}

// Spherical mean of e^{-y₁} over |y| = r, times the sphere area.
double sphere_integral_exp(int dim, double r)
{
    if (dim == 1)
        return 2.0 * std::cosh(r);
    if (r == 0.0)
        return unit_sphere_area(dim);
    const double nu = 0.5 * dim - 1.0;
    return std::pow(2.0 * std::numbers::pi, 0.5 * dim) * std::pow(r, -nu) * std::cyl_bessel_i(nu, r);
}

std::vector<double> simpson_weights(std::size_t n_nodes, double dr)
{
    std::vector<double> wts(n_nodes, 0.0);
    if (n_nodes < 2)
        return wts;
    std::size_t intervals = n_nodes - 1;
    std::size_t simpson_end = intervals - (intervals % 2);
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        wts[i] += dr / 3.0;
        wts[i + 1] += 4.0 * dr / 3.0;
        wts[i + 2] += dr / 3.0;
    }
    if (simpson_end < intervals) {
        wts[simpson_end] += 0.5 * dr;
        wts[intervals] += 0.5 * dr;
    }
    return wts;
}

// Symmetric finite-volume discretisation of the radial operator
// Δ − 1 + p w^{p−1} on nodes r_i = i·Δ: T x = λ V x.
struct RadialOperator {
    std::vector<double> diag, upper, volume;
};

RadialOperator radial_operator(int dim, double p, const std::vector<double>& w, double delta)
{
    const std::size_t n = w.size();
    RadialOperator op;
    op.diag.assign(n, 0.0);
    op.upper.assign(n > 0 ? n - 1 : 0, 0.0);
    op.volume.assign(n, 0.0);
    auto face = [&](double r) { return dim == 1 ? 1.0 : std::pow(r, dim - 1); };
    for (std::size_t i = 0; i < n; ++i) {
        const double r = static_cast<double>(i) * delta;
        const double lo = i == 0 ? 0.0 : r - 0.5 * delta;
        const double hi = i + 1 == n ? r : r + 0.5 * delta;
        op.volume[i] = (std::pow(hi, dim) - std::pow(lo, dim)) / dim;
        const double a_lo = i == 0 ? 0.0 : face(lo) / delta;
        const double a_hi = i + 1 == n ? 0.0 : face(hi) / delta;
        op.diag[i] = -(a_lo + a_hi) + op.volume[i] * (-1.0 + p * std::pow(w[i], p - 1.0));
        if (i + 1 < n)
            op.upper[i] = a_hi;
    }
    return op;
}

// Solves the symmetric tridiagonal system (σV − T) y = b.
std::vector<double> solve_shifted(const RadialOperator& op, double sigma, const std::vector<double>& b)
{
    const std::size_t n = b.size();
    std::vector<double> c(n, 0.0), d(n, 0.0), y(n, 0.0);
    auto a_diag = [&](std::size_t i) { return sigma * op.volume[i] - op.diag[i]; };
    double denom = a_diag(0);
    c[0] = n > 1 ? -op.upper[0] / denom : 0.0;
    d[0] = b[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        const double sub = -op.upper[i - 1];
        denom = a_diag(i) - sub * c[i - 1];
        c[i] = i + 1 < n ? -op.upper[i] / denom : 0.0;
        d[i] = (b[i] - sub * d[i - 1]) / denom;
    }
    y[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        y[i] = d[i] - c[i] * y[i + 1];
    return y;
}

std::pair<double, std::vector<double>> inverse_iteration(const RadialOperator& op, double sigma,
                                                         int max_iterations)
{
    const std::size_t n = op.diag.size();
    std::vector<double> x(n, 1.0), vx(n);
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i)
            vx[i] = op.volume[i] * x[i];
        std::vector<double> y = solve_shifted(op, sigma, vx);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ty = op.diag[i] * y[i];
            if (i > 0)
                ty += op.upper[i - 1] * y[i - 1];
            if (i + 1 < n)
                ty += op.upper[i] * y[i + 1];
            num += y[i] * ty;
            den += op.volume[i] * y[i] * y[i];
        }
        const double next = num / den;
        const double scale = 1.0 / std::sqrt(den);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = y[i] * scale;
        if (it > 2 && std::abs(next - lambda) <= 1e-14 * std::max(1.0, std::abs(next))) {
            lambda = next;
            return {lambda, x};
        }
        lambda = next;
    }
    throw IterationDiverged("principal eigenpair: inverse iteration did not converge in " +
                            std::to_string(max_iterations) + " iterations");
}

double max_ode_residual(const GroundState& gs)
{
    const auto& w = gs.w_vals;
    const auto& dw = gs.dw_vals;
    const double dr = gs.dr();
    double worst = 0.0;
    // Eighth-order central difference of w′.
    constexpr double c1 = 4.0 / 5.0, c2 = -1.0 / 5.0, c3 = 4.0 / 105.0, c4 = -1.0 / 280.0;
    for (std::size_t i = 4; i + 4 < w.size(); ++i) {
        const double ddw = (c1 * (dw[i + 1] - dw[i - 1]) + c2 * (dw[i + 2] - dw[i - 2]) +
                            c3 * (dw[i + 3] - dw[i - 3]) + c4 * (dw[i + 4] - dw[i - 4])) /
                           dr;
        const double r = gs.r_grid[i];
        const double res = ddw + (gs.dim - 1) / r * dw[i] - w[i] + positive_power(w[i], gs.p);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace

double unit_sphere_area(int dim)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double unit_ball_volume(int dim)
{
    return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

double fundamental_solution(int dim, double r)
{
    if (dim == 1)
        return 0.5 * std::exp(-r);
    const double nu = 0.5 * dim - 1.0;
    return std::pow(2.0 * std::numbers::pi, -0.5 * dim) * std::pow(r, -nu) * std::cyl_bessel_k(nu, r);
}

double fundamental_solution_derivative(int dim, double r)
{
    if (dim == 1)
        return -0.5 * std::exp(-r);
    const double nu = 0.5 * dim - 1.0;
    return -std::pow(2.0 * std::numbers::pi, -0.5 * dim) * std::pow(r, -nu) *
           std::cyl_bessel_k(nu + 1.0, r);
}

double GroundState::value(double r) const
{
    r = std::abs(r);
    if (r >= r_max())
        return green_amplitude * fundamental_solution(dim, r);
    const double h = dr();
    const auto i = static_cast<std::size_t>(r / h);
    const double t = (r - r_grid[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * w_vals[i] + h10 * h * dw_vals[i] + h01 * w_vals[i + 1] + h11 * h * dw_vals[i + 1];
}

double GroundState::derivative(double r) const
{
    r = std::abs(r);
    if (r >= r_max())
        return green_amplitude * fundamental_solution_derivative(dim, r);
    const double h = dr();
    const auto i = static_cast<std::size_t>(r / h);
    const double t = (r - r_grid[i]) / h;
    const double d00 = 6 * t * t - 6 * t;
    const double d10 = 3 * t * t - 4 * t + 1;
    const double d01 = -6 * t * t + 6 * t;
    const double d11 = 3 * t * t - 2 * t;
    return (d00 * w_vals[i] + d01 * w_vals[i + 1]) / h + d10 * dw_vals[i] + d11 * dw_vals[i + 1];
}

double GroundState::phi0(double r) const
{
    r = std::abs(r);
    if (phi0_vals.empty() || r >= r_max())
        return 0.0;
    const double h = dr();
    const auto i = static_cast<std::size_t>(r / h);
    const double t = (r - r_grid[i]) / h;
    return (1 - t) * phi0_vals[i] + t * phi0_vals[i + 1];
}

GroundState solve_ground_state(int dim, double p, double r_max, double tol, const GroundStateOptions& opts)
{
    if (dim < 1)
        throw NoDecayBracket("dimension must be at least 1");
    if (!(p > 1.0) || (dim >= 3 && p >= (dim + 2.0) / (dim - 2.0)))
        throw NoDecayBracket("exponent p = " + std::to_string(p) + " is not subcritical for n = " +
                             std::to_string(dim));

    const double dr = opts.dr;
    const auto last = static_cast<std::size_t>(std::llround(r_max / dr));
    if (last < 16)
        throw ToleranceNotMet("r_max too small for the radial table");

    // Bracket the decaying solution: below it the profile turns back up,
    // above it the profile crosses zero.
    double lo = 1.0 + 1e-9;
    if (shoot(dim, p, lo, dr, last, opts.ode_tolerance).outcome != ShotOutcome::TurnedUp)
        throw NoDecayBracket("lower shooting bound does not turn up");
    double hi = 2.0;
    int grow = 0;
    while (shoot(dim, p, hi, dr, last, opts.ode_tolerance).outcome != ShotOutcome::Crossed) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 60)
            throw NoDecayBracket("no zero-crossing shooting bound found");
    }
    for (int it = 0; it < opts.max_bisection; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const ShotOutcome out = shoot(dim, p, mid, dr, last, opts.ode_tolerance).outcome;
        if (out == ShotOutcome::Crossed)
            hi = mid;
        else if (out == ShotOutcome::TurnedUp)
            lo = mid;
        else {
            lo = hi = mid;
            break;
        }
    }

    const Shot low = shoot(dim, p, lo, dr, last, opts.ode_tolerance);
    const Shot high = shoot(dim, p, hi, dr, last, opts.ode_tolerance);
    const std::size_t common = std::min(low.w.size(), high.w.size());

    // The true profile lies between the two bracketing trajectories; past
    // the point where they separate the table is unreliable.
    std::size_t reliable = common;
    for (std::size_t i = 1; i < common; ++i) {
        const double avg = 0.5 * (low.w[i] + high.w[i]);
        if (std::abs(low.w[i] - high.w[i]) > 1e-3 * avg) {
            reliable = i;
            break;
        }
    }
    std::size_t handover = 0;
    for (std::size_t i = 1; i < reliable; ++i) {
        const double avg = 0.5 * (low.w[i] + high.w[i]);
        if (p * std::pow(avg, p - 1.0) < opts.handover_nonlinearity) {
            handover = i;
            break;
        }
    }
    if (handover == 0) {
        if (reliable < 8 || reliable >= last)
            throw ToleranceNotMet("shooting never reached the linear tail regime before r_max");
        handover = reliable - 4;
    }

    GroundState gs;
    gs.dim = dim;
    gs.p = p;
    gs.r_grid.resize(last + 1);
    gs.w_vals.resize(last + 1);
    gs.dw_vals.resize(last + 1);
    for (std::size_t i = 0; i <= last; ++i)
        gs.r_grid[i] = static_cast<double>(i) * dr;
    for (std::size_t i = 0; i <= handover; ++i) {
        gs.w_vals[i] = 0.5 * (low.w[i] + high.w[i]);
        gs.dw_vals[i] = 0.5 * (low.dw[i] + high.dw[i]);
    }

    // Strip the growing mode with the Wronskian of (K, G) at the handover.
    const double rh = gs.r_grid[handover];
    const double wh = gs.w_vals[handover];
    const double dwh = gs.dw_vals[handover];
    const double K = fundamental_solution(dim, rh), dK = fundamental_solution_derivative(dim, rh);
    const double G = growing_solution(dim, rh), dG = growing_solution_derivative(dim, rh);
    gs.green_amplitude = (wh * dG - dwh * G) / (K * dG - dK * G);
    const double growing = (wh * dK - dwh * K) / (G * dK - dG * K);
    for (std::size_t i = 1; i <= handover; ++i) {
        gs.w_vals[i] -= growing * growing_solution(dim, gs.r_grid[i]);
        gs.dw_vals[i] -= growing * growing_solution_derivative(dim, gs.r_grid[i]);
    }
    gs.handover_radius = rh;
    gs.amplitude = gs.green_amplitude * std::pow(2.0 * std::numbers::pi, -0.5 * dim) *
                   std::sqrt(0.5 * std::numbers::pi);
    for (std::size_t i = handover + 1; i <= last; ++i) {
        gs.w_vals[i] = gs.green_amplitude * fundamental_solution(dim, gs.r_grid[i]);
        gs.dw_vals[i] = gs.green_amplitude * fundamental_solution_derivative(dim, gs.r_grid[i]);
    }

    if (gs.w_vals.back() >= 1e-12)
        throw ToleranceNotMet("r_max = " + std::to_string(r_max) + " leaves w(r_max) = " +
                              std::to_string(gs.w_vals.back()) + " above 1e-12");

    gs.max_ode_residual = max_ode_residual(gs);
    if (gs.max_ode_residual > tol)
        throw ToleranceNotMet("ground-state ODE residual " + std::to_string(gs.max_ode_residual) +
                              " exceeds tolerance " + std::to_string(tol));

    gs.energy = compute_energy(gs);
    gs.gamma = compute_gamma(gs);
    auto [lambda, phi0] = principal_eigenpair(gs, opts.max_eigen_iterations);
    gs.lambda1 = lambda;
    gs.phi0_vals = std::move(phi0);
    return gs;
}

std::pair<double, double> pohozaev_sides(const GroundState& gs)
{
    const auto wts = simpson_weights(gs.r_grid.size(), gs.dr());
    const double area = unit_sphere_area(gs.dim);
    double quadratic = 0.0, power = 0.0;
    for (std::size_t i = 0; i < wts.size(); ++i) {
        const double r = gs.r_grid[i];
        const double jac = area * (gs.dim == 1 ? 1.0 : std::pow(r, gs.dim - 1)) * wts[i];
        const double w = gs.w_vals[i], dw = gs.dw_vals[i];
        quadratic += jac * (dw * dw + w * w);
        power += jac * std::pow(w, gs.p + 1.0);
    }
    return {quadratic, power};
}

double compute_energy(const GroundState& gs)
{
    auto [quadratic, power] = pohozaev_sides(gs);
    return 0.5 * quadratic - power / (gs.p + 1.0);
}

double compute_gamma(const GroundState& gs)
{
    // Integrand ~ e^{-(p-1) r}; continue past the table with the tail form
    // until it is negligible.
    const double dr = gs.dr();
    auto integrand = [&](double r) {
        const double jac = gs.dim == 1 ? 1.0 : std::pow(r, gs.dim - 1);
        return std::pow(gs.value(r), gs.p) * sphere_integral_exp(gs.dim, r) * jac;
    };
    double total = 0.0;
    double peak = 0.0;
    double r = 0.0;
    // Composite Simpson on panels of two cells.
    for (int panel = 0; panel < 10'000'000; ++panel) {
        const double f0 = integrand(r), f1 = integrand(r + dr), f2 = integrand(r + 2 * dr);
        total += dr / 3.0 * (f0 + 4 * f1 + f2);
        peak = std::max({peak, f0, f1, f2});
        r += 2 * dr;
        if (r > gs.r_max() && f2 < 1e-17 * peak)
            return total;
        if (!std::isfinite(total))
            break;
    }
    throw ToleranceNotMet("gamma quadrature did not converge");
}

double two_center_integral(const GroundState& gs, double s)
{
    using boost::math::quadrature::gauss;
    const double p = gs.p;
    // Panels of unit width in the radius of the wᵖ factor, out to where
    // wᵖ has decayed by 1e-18.
    double r_cut = 1.0;
    while (std::pow(gs.value(r_cut) / gs.center_value(), p) > 1e-18)
        r_cut += 1.0;
    if (gs.dim == 1) {
        auto f = [&](double x) { return std::pow(gs.value(std::abs(x)), p) * gs.value(std::abs(x + s)); };
        double total = 0.0;
        for (double a = -r_cut; a < r_cut; a += 0.5) {
            // Split at the kink of w(|x + s|).
            if (a < -s && -s < a + 0.5) {
                total += gauss<double, 30>::integrate(f, a, -s) + gauss<double, 30>::integrate(f, -s, a + 0.5);
                continue;
            }
            total += gauss<double, 30>::integrate(f, a, a + 0.5);
        }
        return total;
    }
    if (gs.dim != 2)
        throw ToleranceNotMet("two-centre quadrature implemented for dim 1 and 2");
    // Polar coordinates about the wᵖ centre; the integrand is even in θ.
    auto inner = [&](double r) {
        auto g = [&](double theta) {
            return gs.value(std::sqrt(std::max(0.0, r * r + s * s + 2.0 * r * s * std::cos(theta))));
        };
        double t = 0.0;
        for (int k = 0; k < 16; ++k) {
            const double a = std::numbers::pi * k / 16.0, b = std::numbers::pi * (k + 1) / 16.0;
            t += gauss<double, 30>::integrate(g, a, b);
        }
        return 2.0 * t * r * std::pow(gs.value(r), p);
    };
    double total = 0.0;
    for (double a = 0.0; a < r_cut; a += 0.5)
        total += gauss<double, 20>::integrate(inner, a, a + 0.5);
    return total;
}

double convolution_ratio(const GroundState& gs, double s)
{
    return std::exp(s) * std::pow(s, 0.5 * (gs.dim - 1)) * two_center_integral(gs, s) / gs.amplitude;
}

std::pair<double, std::vector<double>> principal_eigenpair(const GroundState& gs, int max_iterations)
{
    const double sigma = gs.p * std::pow(gs.center_value(), gs.p - 1.0) + 1.0;

    const RadialOperator fine = radial_operator(gs.dim, gs.p, gs.w_vals, gs.dr());
    auto [lambda_fine, vec] = inverse_iteration(fine, sigma, max_iterations);

    std::vector<double> coarse_w;
    for (std::size_t i = 0; i < gs.w_vals.size(); i += 2)
        coarse_w.push_back(gs.w_vals[i]);
    const RadialOperator coarse = radial_operator(gs.dim, gs.p, coarse_w, 2.0 * gs.dr());
    const double lambda_coarse = inverse_iteration(coarse, sigma, max_iterations).first;

    double peak = 0.0;
    for (double v : vec)
        if (std::abs(v) > std::abs(peak))
            peak = v;
    for (double& v : vec)
        v /= peak;
    return {(4.0 * lambda_fine - lambda_coarse) / 3.0, vec};
}

nlohmann::json to_json(const GroundState& gs)
{
    return nlohmann::json{
        {"version", 1},
        {"dim", gs.dim},
        {"p", gs.p},
        {"r_grid", gs.r_grid},
        {"w", gs.w_vals},
        {"dw", gs.dw_vals},
        {"A_n", gs.amplitude},
        {"A_0", gs.green_amplitude},
        {"handover_radius", gs.handover_radius},
        {"I_w", gs.energy},
        {"gamma", gs.gamma},
        {"lambda1", gs.lambda1},
        {"phi0", gs.phi0_vals},
        {"max_ode_residual", gs.max_ode_residual},
    };
}

GroundState ground_state_from_json(const nlohmann::json& j)
{
    if (j.value("version", 0) != 1)
        throw ConfigError("unsupported ground-state table version");
    GroundState gs;
    gs.dim = j.at("dim").get<int>();
    gs.p = j.at("p").get<double>();
    gs.r_grid = j.at("r_grid").get<std::vector<double>>();
    gs.w_vals = j.at("w").get<std::vector<double>>();
    gs.dw_vals = j.at("dw").get<std::vector<double>>();
    gs.amplitude = j.at("A_n").get<double>();
    gs.green_amplitude = j.at("A_0").get<double>();
    gs.handover_radius = j.at("handover_radius").get<double>();
    gs.energy = j.at("I_w").get<double>();
    gs.gamma = j.at("gamma").get<double>();
    gs.lambda1 = j.at("lambda1").get<double>();
    gs.phi0_vals = j.at("phi0").get<std::vector<double>>();
    gs.max_ode_residual = j.value("max_ode_residual", 0.0);
    return gs;
}

}  // namespace spikes
