#include "spikes/energy.hpp"

#include <cmath>

namespace spikes {

double energy(const Grid& grid, const Eigen::VectorXd& u, double p)
{
    double potential = 0.0;
    for (Eigen::Index n = 0; n < u.size(); ++n)
        if (u[n] > 0.0)
            potential += grid.weights[n] * std::pow(u[n], p + 1.0);
    return 0.5 * (u.dot(grid.stiffness * u) + grid.inner(u, u)) - potential / (p + 1.0);
}

nlohmann::json to_json(const EnergyReport& r)
{
    nlohmann::json self = nlohmann::json::array();
    for (const auto& s : r.self_terms)
        self.push_back({{"B", s.value}, {"two_d_over_eps", s.distance}, {"prediction", s.prediction}});
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& t : r.pair_terms)
        pairs.push_back({{"i", t.i},
                         {"j", t.j},
                         {"B", t.value},
                         {"separation", t.separation},
                         {"prediction_separation", t.prediction_separation},
                         {"prediction_boundary", t.prediction_boundary}});
    return {{"k", r.k},
            {"rho", r.rho},
            {"epsilon", r.epsilon},
            {"J_w", r.J},
            {"M_eps", r.M},
            {"I_w", r.I_w},
            {"I_lattice", r.I_lattice},
            {"self_terms", self},
            {"pair_terms", pairs},
            {"self_sum", r.self_sum},
            {"pair_sum", r.pair_sum},
            {"expansion", r.expansion},
            {"discrepancy", r.discrepancy},
            {"interaction", r.interaction},
            {"c_max", r.c_max}};
}

EnergyReport interaction_terms(const Ansatz& ansatz, const Configuration& config_in)
{
    const Configuration config = ansatz.snapped(config_in);
    const Grid& grid = ansatz.grid();
    const GroundState& gs = ansatz.ground_state();
    const double p = gs.p;
    const double eps = ansatz.epsilon();

    EnergyReport r;
    r.k = config.k();
    r.rho = config.rho;
    r.epsilon = eps;
    r.I_w = gs.energy;
    r.I_lattice = ansatz.profile().energy();

    const Feasibility f = check_feasibility(ansatz.domain(), config, grid.h);
    std::vector<std::shared_ptr<const CorrectedSpike>> spikes;
    std::vector<Eigen::VectorXd> powers;
    for (const auto& q : config.points) {
        spikes.push_back(ansatz.corrected_spike(q));
        powers.push_back(spikes.back()->free.unaryExpr([p](double v) { return v > 0.0 ? std::pow(v, p) : 0.0; }));
    }
    for (std::size_t j = 0; j < config.k(); ++j) {
        SelfTerm s;
        s.value = -grid.inner(powers[j], spikes[j]->correction);
        s.distance = 2.0 * f.boundary_distance[j] / eps;
        s.prediction = gs.gamma * gs.value(s.distance);
        r.self_sum += s.value;
        r.self_terms.push_back(s);
    }
    for (std::size_t i = 0; i < config.k(); ++i)
        for (std::size_t j = i + 1; j < config.k(); ++j) {
            PairTerm t;
            t.i = static_cast<int>(i);
            t.j = static_cast<int>(j);
            t.value = grid.inner(powers[i], spikes[j]->free);
            t.separation = distance(config.points[i], config.points[j]) / eps;
            t.prediction_separation = gs.gamma * gs.value(t.separation);
            t.prediction_boundary = gs.gamma * gs.value(2.0 * f.boundary_distance[j] / eps);
            r.pair_sum += t.value;
            r.pair_terms.push_back(t);
        }
    r.interaction = 0.5 * r.self_sum + r.pair_sum;
    r.expansion = static_cast<double>(r.k) * r.I_lattice - r.interaction;
    return r;
}

EnergyReport reduced_energy(const Ansatz& ansatz, const ReducedSolution& reduced)
{
    EnergyReport r = interaction_terms(ansatz, reduced.config);
    const double p = ansatz.ground_state().p;
    r.J = energy(ansatz.grid(), reduced.w, p);
    r.M = energy(ansatz.grid(), reduced.u(), p);
    r.discrepancy = r.M - r.expansion;
    r.c_max = reduced.c_max();
    return r;
}

EnergyReport reduced_energy(const Ansatz& ansatz, const Configuration& config, const ReductionOptions& opts)
{
    return reduced_energy(ansatz, reduce(ansatz, config, opts));
}

}  // namespace spikes
