#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "spikes/errors.hpp"

using namespace spikes;

namespace {

double worst_row_sum(const Grid& g)
{
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
    return (g.laplacian * ones).cwiseAbs().maxCoeff();
}

// Max error of the Helmholtz solve for u = Π cos(π(x − x₀)/L).
double manufactured_error(const Domain& d, double h)
{
    const Grid g = build_grid(d, h);
    const int n = d.dim();
    auto exact = [&](const Point& x) {
        double v = 1.0;
        for (int a = 0; a < n; ++a) {
            const double L = (d.upper[a] - d.lower[a]) / d.epsilon;
            v *= std::cos(M_PI * (x[a] - d.lower[a] / d.epsilon) / L);
        }
        return v;
    };
    double k2 = 0.0;
    for (int a = 0; a < n; ++a) {
        const double L = (d.upper[a] - d.lower[a]) / d.epsilon;
        k2 += (M_PI / L) * (M_PI / L);
    }
    Eigen::VectorXd f(static_cast<Eigen::Index>(g.size())), u(f.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        u[static_cast<Eigen::Index>(i)] = exact(g.nodes[i]);
        f[static_cast<Eigen::Index>(i)] = (1.0 + k2) * u[static_cast<Eigen::Index>(i)];
    }
    return (g.solve_helmholtz(f) - u).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("rectangle grid: node count, weights, row sums")
{
    const Grid g = build_grid(Domain::rectangle({0, 0}, {1, 1}, 0.05), 0.25);
    CHECK(g.size() == 6400);
    CHECK(std::abs(g.total_weight() / 400.0 - 1.0) < 1e-8);
    CHECK(worst_row_sum(g) < 1e-10);
}

TEST_CASE("interval grid")
{
    const Grid g = build_grid(Domain::interval(0, 4, 0.02), 0.1);
    CHECK(g.size() == 2000);
    CHECK(std::abs(g.total_weight() / 200.0 - 1.0) < 1e-8);
    CHECK(worst_row_sum(g) < 1e-10);
}

TEST_CASE("disk grid: area and row sums")
{
    const Domain d = Domain::disk({0, 0}, 1.0, 0.1);
    const Grid g = build_grid(d, 0.25);
    CHECK(std::abs(g.total_weight() / (M_PI / 0.01) - 1.0) < 1e-3);
    CHECK(worst_row_sum(g) < 1e-10);
    CHECK(d.measure() == doctest::Approx(M_PI));
    // The centre is a node.
    CHECK(g.node_at({0, 0}).has_value());
}

TEST_CASE("operator is symmetric in the weighted inner product")
{
    for (const Domain& d : {Domain::interval(0, 1, 0.05), Domain::rectangle({0, 0}, {1, 0.5}, 0.05),
                            Domain::disk({0, 0}, 1.0, 0.1)}) {
        const Grid g = build_grid(d, 0.25);
        const Eigen::VectorXd u = fixtures::random_field(g.size(), 1), v = fixtures::random_field(g.size(), 2);
        const double a = g.inner(g.laplacian * u, v), b = g.inner(u, g.laplacian * v);
        CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
        const Eigen::SparseMatrix<double> asym = g.stiffness - Eigen::SparseMatrix<double>(g.stiffness.transpose());
        CHECK(asym.norm() < 1e-12 * g.stiffness.norm());
    }
}

TEST_CASE("constants are the lowest Helmholtz mode")
{
    const Grid g = build_grid(Domain::rectangle({0, 0}, {1, 1}, 0.25), 0.25);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
    CHECK((g.solve_helmholtz(ones) - ones).cwiseAbs().maxCoeff() < 1e-12);

    // Power iteration on (1 − Δ)⁻¹ converges to eigenvalue 1.
    Eigen::VectorXd v = fixtures::random_field(g.size(), 3).cwiseAbs();
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        const Eigen::VectorXd next = g.solve_helmholtz(v);
        lambda = g.inner(next, v) / g.inner(v, v);
        v = next / std::sqrt(g.inner(next, next));
    }
    CHECK(lambda == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("second-order convergence on a manufactured solution")
{
    for (const Domain& d : {Domain::interval(0, 1, 0.125), Domain::rectangle({0, 0}, {1, 1}, 0.125)}) {
        const double e1 = manufactured_error(d, 0.25);
        const double e2 = manufactured_error(d, 0.125);
        const double e3 = manufactured_error(d, 0.0625);
        CHECK(std::log2(e1 / e2) > 1.8);
        CHECK(std::log2(e2 / e3) > 1.8);
    }
}

TEST_CASE("mesh validation")
{
    CHECK_THROWS_AS(build_grid(Domain::interval(0, 1, 0.1), 0.5), MeshTooCoarse);
    CHECK_THROWS_AS(build_grid(Domain::interval(0, 1, 0.1), 0.15), InvalidMesh);
    CHECK_THROWS_AS(build_grid(Domain::rectangle({0, 0}, {1, 0.73}, 0.1), 0.25), InvalidMesh);
    // 2π·2/0.25 ≈ 50 boundary cells is too few.
    CHECK_THROWS_AS(build_grid(Domain::disk({0, 0}, 1.0, 0.5), 0.25), InvalidMesh);
}

TEST_CASE("reflection examples")
{
    const BoundaryGeometry a = reflect_point(Domain::interval(0, 1, 0.05), {0.3, 0});
    CHECK(a.distance == doctest::Approx(0.3));
    CHECK(a.reflected[0] == doctest::Approx(-0.3));

    const BoundaryGeometry b = reflect_point(Domain::disk({0, 0}, 1.0, 0.05), {0.5, 0});
    CHECK(b.distance == doctest::Approx(0.5));
    CHECK(b.reflected[0] == doctest::Approx(1.5));
    CHECK(b.reflected[1] == doctest::Approx(0.0));

    const BoundaryGeometry c = reflect_point(Domain::rectangle({0, 0}, {1, 1}, 0.05), {0.5, 0.2});
    CHECK(c.distance == doctest::Approx(0.2));
    CHECK(c.reflected[0] == doctest::Approx(0.5));
    CHECK(c.reflected[1] == doctest::Approx(-0.2));
    CHECK(c.normal[1] == doctest::Approx(-1.0));

    const BoundaryGeometry corner = reflect_point(Domain::rectangle({0, 0}, {1, 1}, 0.05), {0.1, 0.1005}, 0.01);
    CHECK(corner.near_corner);
    CHECK(corner.reflected[0] == doctest::Approx(-0.1));
    CHECK(corner.corner_reflected[1] == doctest::Approx(-0.1005));
}

TEST_CASE("reflection invariants on random points")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Domain domains[] = {Domain::interval(-1, 2, 0.05), Domain::rectangle({0, 0}, {2, 1}, 0.05),
                              Domain::disk({0.3, -0.2}, 0.8, 0.05)};
    for (const Domain& d : domains)
        for (int t = 0; t < 200; ++t) {
            Point q;
            if (d.shape == Shape::Disk) {
                const double r = d.radius * std::sqrt(u(rng)) * 0.999, th = 2.0 * M_PI * u(rng);
                q = {d.center[0] + r * std::cos(th), d.center[1] + r * std::sin(th)};
            } else {
                q = {d.lower[0] + (d.upper[0] - d.lower[0]) * u(rng),
                     d.dim() == 2 ? d.lower[1] + (d.upper[1] - d.lower[1]) * u(rng) : 0.0};
            }
            const BoundaryGeometry g = reflect_point(d, q);
            REQUIRE(std::abs(distance(q, g.reflected) - 2.0 * g.distance) < 1e-12);
            REQUIRE(std::abs(0.5 * (q[0] + g.reflected[0]) - g.nearest[0]) < 1e-12);
            REQUIRE(std::abs(0.5 * (q[1] + g.reflected[1]) - g.nearest[1]) < 1e-12);
        }
}

TEST_CASE("points outside the domain are rejected")
{
    CHECK_THROWS_AS(reflect_point(Domain::interval(0, 1, 0.05), {1.5, 0}), PointOutsideDomain);
    CHECK_THROWS_AS(reflect_point(Domain::disk({0, 0}, 1, 0.05), {0.8, 0.8}), PointOutsideDomain);
}

TEST_CASE("domain JSON round trip")
{
    for (const Domain& d : {Domain::interval(0, 4, 0.02), Domain::rectangle({0, 0}, {1, 2}, 0.05),
                            Domain::disk({0.5, 0.5}, 1, 0.1)}) {
        const Domain back = domain_from_json(to_json(d));
        CHECK(back.shape == d.shape);
        CHECK(back.epsilon == d.epsilon);
        CHECK(back.measure() == d.measure());
    }
}
