#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "spikes/errors.hpp"
#include "spikes/search.hpp"

using namespace spikes;

namespace {

const Ansatz& disk()
{
    static const Ansatz a(fixtures::ground_state(2), Domain::disk({0, 0}, 0.6, 0.05), 0.25);
    return a;
}

const Ansatz& line()
{
    static const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 4, 0.02), 0.1);
    return a;
}

Configuration at(const Ansatz& a, std::vector<LatticeIndex> idx, double rho = 8.0)
{
    Configuration c;
    c.rho = rho;
    for (const auto& i : idx)
        c.points.push_back(a.physical(i));
    return c;
}

}  // namespace

TEST_CASE("first insertion in a disk lands on the centre")
{
    // Radius 25 rescaled units, so the centre clears 3ρε = 24 units.
    const Ansatz big(fixtures::ground_state(2), Domain::disk({0, 0}, 1.0, 0.04), 0.25);
    Configuration empty;
    empty.rho = 8.0;
    const Configuration c = insert_spike(big, empty);
    REQUIRE(c.k() == 1);
    CHECK(std::abs(c.points[0][0]) < 1e-15);
    CHECK(std::abs(c.points[0][1]) < 1e-15);
}

TEST_CASE("clearance map")
{
    const Configuration c = at(line(), {{1000, 0}});
    const ClearanceMap map = clearance_map(line(), c);
    CHECK(map.stride == 20);
    bool hit = false;
    for (std::size_t a = 0; a < map.nodes.size(); ++a) {
        REQUIRE(map.clearance[a] >= 0.0);
        if (line().grid().index[static_cast<std::size_t>(map.nodes[a])] == LatticeIndex{1000, 0}) {
            CHECK(map.clearance[a] == 0.0);
            hit = true;
        } else {
            CHECK(map.clearance[a] > 0.0);
        }
    }
    CHECK(hit);
}

TEST_CASE("insertion clears 3 rho epsilon until it cannot")
{
    // Unit interval, ε = 0.02, ρ = 8: at least ⌊1/(3ρε)⌋ − 1 spikes.
    const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 1, 0.02), 0.1);
    Configuration c;
    c.rho = 8.0;
    const double need = 3.0 * 8.0 * 0.02;
    for (;;) {
        Configuration next;
        try {
            next = insert_spike(a, c);
        } catch (const NoClearance&) {
            break;
        }
        const Point& q = next.points.back();
        CHECK(reflect_point(a.domain(), q).distance >= need * (1.0 - 1e-12));
        for (const auto& p : c.points)
            CHECK(distance(p, q) >= need * (1.0 - 1e-12));
        c = next;
    }
    CHECK(c.k() >= static_cast<std::size_t>(std::floor(1.0 / need)) - 1);
    CHECK_THROWS_AS(insert_spike(a, c), NoClearance);

    SearchOptions tight;
    tight.delta = 0.5 * 8.0 * 0.02;
    Configuration empty;
    empty.rho = 8.0;
    CHECK_THROWS_AS(insert_spike(a, empty, tight), PackingBudgetExceeded);
}

TEST_CASE("landscape memoises and rejects infeasible points")
{
    EnergyLandscape L(line(), {});
    const Configuration c = at(line(), {{1000, 0}});
    const double m = L(c);
    const int n = L.evaluations();
    CHECK(L(c) == m);
    CHECK(L.evaluations() == n);
    CHECK(std::isinf(L(at(line(), {{500, 0}, {540, 0}}))));

    SearchOptions par;
    par.jobs = 3;
    EnergyLandscape P(line(), par);
    const std::vector<Configuration> batch = {at(line(), {{900, 0}}), at(line(), {{40, 0}}), at(line(), {{45, 0}}),
                                              at(line(), {{800, 0}, {880, 0}})};
    const auto a = P.evaluate(batch);
    for (std::size_t i = 0; i < batch.size(); ++i)
        CHECK(a[i] == L(batch[i]));
}

TEST_CASE("single spike in a disk: the centre is a fixed point of the search")
{
    EnergyLandscape L(disk(), {});
    const SearchState s = local_maximize(L, at(disk(), {{0, 0}}));
    CHECK(s.moves == 0);
    CHECK(s.config.points[0] == Point{0.0, 0.0});
}

TEST_CASE("single spike in a disk climbs to the centre")
{
    EnergyLandscape L(disk(), {});
    const Configuration start = at(disk(), {{3, -2}});
    const double m0 = L(start);
    const SearchState s = local_maximize(L, start);
    CHECK(s.M >= m0);
    CHECK(std::abs(s.config.points[0][0]) < 1e-15);
    CHECK(std::abs(s.config.points[0][1]) < 1e-15);
    for (std::size_t i = 1; i < s.history.size(); ++i)
        CHECK(s.history[i] > s.history[i - 1]);

    // Central-difference gradient over one cell.
    const double step = 0.25 * 0.05;
    const double gx = (L(at(disk(), {{1, 0}})) - L(at(disk(), {{-1, 0}}))) / (2.0 * step);
    const double gy = (L(at(disk(), {{0, 1}})) - L(at(disk(), {{0, -1}}))) / (2.0 * step);
    CHECK(std::hypot(gx, gy) < 1e-6 * fixtures::ground_state(2)->energy / 0.05);

    // Radial scan: M decreases away from the centre.
    double prev = s.M;
    for (int r = 4; r <= 24; r += 4) {
        const double m = L(at(disk(), {{r, 0}}));
        CHECK(m < prev);
        prev = m;
    }

    const InteriorReport in = verify_interior_maximizer(disk(), s);
    CHECK(in.pass);
}

TEST_CASE("two spikes in a disk balance boundary and mutual repulsion")
{
    EnergyLandscape L(disk(), {});
    const SearchState s = local_maximize(L, at(disk(), {{-20, 0}, {20, 0}}));
    const auto gs = fixtures::ground_state(2);
    const double eps = 0.05;
    const double sep = distance(s.config.points[0], s.config.points[1]) / eps;
    const double two_d = 2.0 * reflect_point(disk().domain(), s.config.points[0]).distance / eps;
    CHECK(std::abs(gs->value(sep) / gs->value(two_d) - 1.0) < 0.25);
    // Symmetric about the centre.
    CHECK(std::abs(s.config.points[0][0] + s.config.points[1][0]) < 1e-12);
    CHECK(std::abs(s.config.points[0][1] + s.config.points[1][1]) < 1e-12);

    // Scan over the symmetric family ±a agrees with the search.
    int best = 0;
    double best_m = -1e300;
    for (int a = 16; a <= 32; ++a) {
        const double m = L(at(disk(), {{-a, 0}, {a, 0}}));
        if (m > best_m) {
            best_m = m;
            best = a;
        }
    }
    CHECK(std::abs(s.config.points[1][0] - disk().physical({best, 0})[0]) < 1e-12);
    CHECK(verify_interior_maximizer(disk(), s).pass);
}

TEST_CASE("a clamped pair is not interior")
{
    SearchState s;
    s.config = at(line(), {{900, 0}, {980, 0}});
    const InteriorReport r = verify_interior_maximizer(line(), s);
    CHECK_FALSE(r.pass);
    CHECK(r.pair_margin == doctest::Approx(1.0));
    CHECK(r.active.find("pair 0,1") != std::string::npos);
}

TEST_CASE("energy step")
{
    EnergyLandscape L(line(), {});
    SearchState zero;
    zero.config.rho = 8.0;
    const SearchState one = local_maximize(L, at(line(), {{1000, 0}}));
    const EnergyStepReport r = verify_energy_step(line(), zero, one);
    CHECK(r.pass);
    CHECK_FALSE(r.rejected);
    CHECK(std::abs(r.step) < 1e-10);
    CHECK(r.threshold == doctest::Approx(-0.25 * fixtures::ground_state(1)->gamma * std::exp(-8.0)));

    // An infeasible (k+1)-configuration is rejected before comparison.
    SearchState bad;
    bad.config = at(line(), {{1000, 0}, {1040, 0}});
    bad.M = 10.0;
    const EnergyStepReport rej = verify_energy_step(line(), one, bad);
    CHECK(rej.rejected);
    CHECK_FALSE(rej.pass);
}

TEST_CASE("packing count scales with 1/epsilon")
{
    std::vector<double> counts;
    for (double eps : {0.04, 0.02, 0.01}) {
        const Ansatz a(fixtures::ground_state(1), Domain::interval(0, 20, eps), 0.1);
        counts.push_back(static_cast<double>(packing_count(a, 8.0)));
    }
    CHECK(std::abs(counts[1] / counts[0] / 2.0 - 1.0) < 0.15);
    CHECK(std::abs(counts[2] / counts[1] / 2.0 - 1.0) < 0.15);
}

TEST_CASE("default packing budget is the volume bound")
{
    CHECK(packing_delta(Domain::interval(0, 2, 0.05), {}) == doctest::Approx(2.0));
    CHECK(packing_delta(Domain::disk({0, 0}, 1.0, 0.05), {}) == doctest::Approx(4.0));
    SearchOptions o;
    o.delta = 0.3;
    CHECK(packing_delta(Domain::interval(0, 2, 0.05), o) == 0.3);
}
