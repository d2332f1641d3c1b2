#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "spikes/errors.hpp"
#include "spikes/reduction.hpp"
#include "spikes/verify.hpp"

using namespace spikes;

namespace {

const Ansatz& line()
{
    static const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 4, 0.02), 0.1);
    return a;
}

// 80 nodes: small enough for a dense cross-check.
const Ansatz& coarse()
{
    static const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 1, 0.05), 0.25);
    return a;
}

Configuration pair(const Ansatz& a, double rho, int first)
{
    const int d = static_cast<int>(std::lround(rho / a.grid().h));
    Configuration c;
    c.rho = rho;
    c.points = {fixtures::from_left(a, first), fixtures::from_left(a, first + d)};
    return c;
}

ProjectedLinearSystem system_for(const Ansatz& a, const Configuration& c)
{
    return ProjectedLinearSystem(a.grid(), multi_spike_sum(a, c).values, 3.0, projection_set(a, c));
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("homogeneous projected problem has only the zero solution")
{
    Configuration c;
    c.rho = 8.0;
    c.points = {coarse().physical({40, 0})};
    const ProjectedLinearSystem sys = system_for(coarse(), c);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(coarse().grid().size()));
    const auto s = sys.solve(zero);
    CHECK(s.phi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projected solve agrees with an independent dense solve")
{
    Configuration c;
    c.rho = 8.0;
    c.points = {coarse().physical({40, 0})};
    const Grid& g = coarse().grid();
    const Eigen::VectorXd w = multi_spike_sum(coarse(), c).values;
    const ProjectionSet P = projection_set(coarse(), c);
    const ProjectedLinearSystem sys(g, w, 3.0, P);
    const auto N = static_cast<Eigen::Index>(g.size());

    // [L  −Z; ZᵀM  0] assembled directly from the Laplacian.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
    A.topLeftCorner(N, N) = Eigen::MatrixXd(g.laplacian);
    for (Eigen::Index i = 0; i < N; ++i) {
        A(i, i) += -1.0 + 3.0 * w[i] * w[i];
        A(i, N) = -P.Z[0][i];
        A(N, i) = g.weights[static_cast<std::size_t>(i)] * P.Z[0][i];
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);

    for (int which = 0; which < 3; ++which) {
        Eigen::VectorXd h = which == 0 ? P.Z[0] : which == 1 ? fixtures::random_field(g.size(), 5) : w;
        const auto s = sys.solve(h);
        CHECK(sys.residual(s, h) < 1e-8 * std::max(1.0, h.cwiseAbs().maxCoeff()));
        CHECK(sys.orthogonality_defect(s.phi) < 1e-10);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
        rhs.head(N) = h;
        const Eigen::VectorXd x = lu.solve(rhs);
        CHECK((x.head(N) - s.phi).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(x[N] - s.c[0]) < 1e-8);
    }
}

TEST_CASE("multipliers stay bounded for data away from the spike")
{
    // h supported away from the spike with ‖h‖_* = 1: |c| ≤ C(e^{−ρ/4} + 1).
    Configuration c;
    c.rho = 8.0;
    c.points = {fixtures::from_left(line(), 1000)};
    const ProjectedLinearSystem sys = system_for(line(), c);
    const auto centres = rescaled_centers(line(), c);
    Eigen::VectorXd h = star_weight(line().grid(), centres, 0.5);
    for (std::size_t n = 0; n < line().grid().size(); ++n)
        if (distance(line().grid().nodes[n], centres[0]) < 10.0)
            h[static_cast<Eigen::Index>(n)] = 0.0;
    const auto s = sys.solve(h);
    CHECK(std::abs(s.c[0]) < 1.0);
    CHECK(sys.residual(s, h) < 1e-8);
}

TEST_CASE("error field")
{
    Configuration empty;
    CHECK(error_field(line(), empty).values.cwiseAbs().maxCoeff() == 0.0);

    // Pair at separation ρ: ‖S‖_* decays with ρ and tracks w(ρ).
    std::vector<double> rhos, logs;
    const auto gs = fixtures::ground_state(1);
    for (double rho : {8.0, 10.0, 12.0}) {
        const Configuration c = pair(line(), rho, 900);
        const double s = star_norm(line().grid(), error_field(line(), c).values, rescaled_centers(line(), c), 0.5);
        rhos.push_back(rho);
        logs.push_back(std::log(s));
        const double law = 3.0 * gs->center_value() * gs->center_value() * gs->value(rho);
        CHECK(s / law > 0.25);
        CHECK(s / law < 4.0);
    }
    CHECK(slope(rhos, logs) <= -0.5);
}

TEST_CASE("nonlinear remainder")
{
    const Eigen::VectorXd w = multi_spike_sum(line(), pair(line(), 8.0, 900)).values;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(w.size());
    CHECK(nonlinear_remainder(w, zero, 3.0).values.cwiseAbs().maxCoeff() == 0.0);

    // p = 2 and w + φ ≥ 0: N(φ) = φ².
    const Eigen::VectorXd phi = 0.01 * fixtures::random_field(w.size(), 9);
    const Eigen::VectorXd shifted = w.array() + 0.02;
    const Eigen::VectorXd N2 = nonlinear_remainder(shifted, phi, 2.0).values;
    CHECK((N2 - phi.cwiseProduct(phi)).cwiseAbs().maxCoeff() < 1e-15);

    // Exponent of ‖N(tφ)‖_* in t is at least min(2, p).
    const auto centres = rescaled_centers(line(), pair(line(), 8.0, 900));
    const Eigen::VectorXd base = 0.1 * star_weight(line().grid(), centres, 0.5);
    std::vector<double> lt, ln;
    for (double t : {1e-1, 1e-2, 1e-3}) {
        lt.push_back(std::log(t));
        ln.push_back(std::log(star_norm(line().grid(), nonlinear_remainder(w, t * base, 3.0).values, centres, 0.5)));
    }
    CHECK(slope(lt, ln) >= 2.0);
}

TEST_CASE("reduce: empty configuration")
{
    const ReducedSolution r = reduce(line(), Configuration{});
    CHECK(r.phi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.iterations <= 1);
    CHECK(r.c.size() == 0);
}

TEST_CASE("reduce: solitary deep spike agrees with an unprojected Newton solve")
{
    const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 2, 0.05), 0.1);
    Configuration c;
    c.rho = 12.0;
    c.points = {a.physical({200, 0})};
    const ReducedSolution r = reduce(a, c);
    CHECK(r.star_norm_phi < 1e-4 * a.profile().center_value());
    const NewtonResult n = newton_polish(a.grid(), r.w, 3.0);
    CHECK((n.u - r.u()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("reduce: invariants of the fixed point")
{
    ReductionOptions opts;
    const Configuration c = pair(line(), 8.0, 900);
    const ReducedSolution r = reduce(line(), c, opts);
    CHECK(r.orthogonality_defect < opts.tol_orth);
    CHECK(r.pde_residual < 10.0 * opts.tol_fp);
    CHECK(std::isfinite(r.star_norm_phi));
    REQUIRE(r.residual_trace.size() >= 2);
    // Strict decrease until the step reaches the rounding floor.
    for (std::size_t m = 2; m < r.residual_trace.size(); ++m)
        if (r.residual_trace[m - 1] > 1e-13)
            CHECK(r.residual_trace[m] < r.residual_trace[m - 1]);
    CHECK(r.stability_constant > 0.0);

    const auto j = to_json(r);
    CHECK(j.contains("c_ij"));
    CHECK(j.contains("residual_trace"));
    CHECK(j.contains("orthogonality_defect"));
}

TEST_CASE("reduce: same fixed point from a perturbed start")
{
    const Configuration c = pair(line(), 8.0, 900);
    const ReducedSolution a = reduce(line(), c);
    const auto centres = rescaled_centers(line(), c);
    const Eigen::VectorXd start = 1e-6 * fixtures::random_field(line().grid().size(), 21).cwiseProduct(
                                             star_weight(line().grid(), centres, 0.5));
    const ReducedSolution b = reduce(line(), c, {}, &start);
    CHECK(star_norm(line().grid(), a.phi - b.phi, centres, 0.5) < 10.0 * 1e-10);
}

TEST_CASE("reduce: correction decays with the separation")
{
    std::vector<double> rhos, logs;
    for (double rho : {8.0, 10.0, 12.0}) {
        rhos.push_back(rho);
        logs.push_back(std::log(reduce(line(), pair(line(), rho, 900)).star_norm_phi));
    }
    CHECK(slope(rhos, logs) <= -0.5);
}

TEST_CASE("reduce: below the minimum separation the contraction is refused")
{
    CHECK_THROWS_AS(reduce(line(), pair(line(), 6.0, 900)), ContractionFailed);
}

TEST_CASE("incremental difference")
{
    // k = 0: the difference vanishes identically.
    const IncrementalReport none = incremental_difference_diagnostic(line(), Configuration{}, fixtures::from_left(line(), 1000));
    CHECK(none.h1_norm_sq == 0.0);

    // A far newcomer barely interacts.
    Configuration one;
    one.rho = 8.0;
    one.points = {fixtures::from_left(line(), 400)};
    const IncrementalReport far = incremental_difference_diagnostic(line(), one, fixtures::from_left(line(), 1400));
    CHECK(std::sqrt(far.h1_norm_sq) < 1e-6);

    // At distance ρ: H¹ norm² decays at rate ≥ 1, coefficients within their bound.
    std::vector<double> rhos, logs;
    for (double rho : {8.0, 10.0, 12.0}) {
        Configuration c;
        c.rho = rho;
        c.points = {fixtures::from_left(line(), 900)};
        const int d = static_cast<int>(std::lround(rho / 0.1));
        const IncrementalReport r = incremental_difference_diagnostic(line(), c, fixtures::from_left(line(), 900 + d));
        rhos.push_back(rho);
        logs.push_back(std::log(r.h1_norm_sq));
        REQUIRE(r.c.size() == 2);
        CHECK(r.psi_h1_norm_sq <= r.h1_norm_sq);
    }
    CHECK(-slope(rhos, logs) >= 1.0);
}

TEST_CASE("linearised operator is coercive off the approximate kernel")
{
    const Configuration c = pair(coarse(), 8.0, 20);
    const ReducedSolution r = reduce(coarse(), c);
    CHECK(coercivity_constant(coarse(), r) > 0.0);
}
