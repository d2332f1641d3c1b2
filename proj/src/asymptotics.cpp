#include "spikes/asymptotics.hpp"

#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {

bool AsymptoticsReport::pass() const
{
    for (const auto& r : rows)
        if (!r.pass)
            return false;
    return true;
}

namespace {

SweepRow make_row(const std::string& kind, double distance, double B, const GroundState& gs, double envelope)
{
    SweepRow r;
    r.kind = kind;
    r.distance = distance;
    r.B = B;
    r.w_at = gs.value(distance);
    r.ratio = B / r.w_at;
    r.rel_error = r.ratio / gs.gamma - 1.0;
    r.envelope = envelope;
    r.pass = envelope <= 0.0 || std::abs(r.rel_error) <= envelope;
    return r;
}

}  // namespace

AsymptoticsReport verify_asymptotics(const Ansatz& ansatz, double rho)
{
    const Grid& grid = ansatz.grid();
    const Domain& domain = ansatz.domain();
    const GroundState& gs = ansatz.ground_state();
    const double eps = ansatz.epsilon();
    const double h = grid.h;
    AsymptoticsReport rep;
    rep.gamma = gs.gamma;

    const Point centre = domain.shape == Shape::Disk
                             ? domain.center
                             : Point{0.5 * (domain.lower[0] + domain.upper[0]), 0.5 * (domain.lower[1] + domain.upper[1])};
    const LatticeIndex c0 = grid.nearest_index({centre[0] / eps, centre[1] / eps});
    auto node = [&](LatticeIndex idx) {
        if (!grid.node_at(idx))
            throw PointOutsideDomain("sweep point falls outside the grid; enlarge the domain");
        return ansatz.physical(idx);
    };

    for (double D : {8.0, 10.0, 12.0}) {
        const int n = static_cast<int>(std::lround(D / h));
        Configuration c;
        c.rho = std::min(rho, n * h);
        c.points = {node({c0[0] - n / 2, c0[1]}), node({c0[0] + n - n / 2, c0[1]})};
        const EnergyReport e = interaction_terms(ansatz, c);
        SweepRow row = make_row("pair", e.pair_terms.at(0).separation, e.pair_terms.at(0).value, gs, D == 12.0 ? 0.15 : 0.0);
        row.literal = e.pair_terms.at(0).prediction_boundary;
        rep.rows.push_back(row);
    }

    for (double D : {8.0, 10.0, 12.0}) {
        LatticeIndex idx{0, c0[1]};
        if (domain.shape == Shape::Disk)
            idx[0] = -static_cast<int>(std::lround((domain.radius / eps - 0.5 * D) / h));
        else
            idx[0] = grid.index.front()[0] + static_cast<int>(std::lround((0.5 * D - 0.5 * h) / h));
        Configuration c;
        c.points = {node(idx)};
        const double two_d = 2.0 * reflect_point(domain, c.points[0]).distance / eps;
        c.rho = std::min(rho, two_d);
        const EnergyReport e = interaction_terms(ansatz, c);
        rep.rows.push_back(make_row("boundary", two_d, e.self_terms.at(0).value, gs, D == 10.0 ? 0.20 : 0.0));
    }

    for (double D : {8.0, 10.0, 12.0}) {
        SweepRow r = make_row("free_space", D, 0.0, gs, 0.0);
        r.ratio = convolution_ratio(gs, D);
        r.B = two_center_integral(gs, D);
        r.rel_error = r.ratio / gs.gamma - 1.0;
        r.envelope = D == 12.0 ? 0.10 : 0.0;
        r.pass = r.envelope <= 0.0 || std::abs(r.rel_error) <= r.envelope;
        rep.rows.push_back(r);
    }
    return rep;
}

}  // namespace spikes
