#include "spikes/search.hpp"

#include <cmath>
#include <future>
#include <limits>

#include "spikes/errors.hpp"

namespace spikes {

double packing_delta(const Domain& domain, const SearchOptions& opts)
{
    if (!std::isnan(opts.delta))
        return opts.delta;
    const int n = domain.dim();
    return domain.measure() * std::pow(2.0, n) / unit_ball_volume(n);
}

double EnergyLandscape::operator()(const Configuration& config) const
{
    std::vector<LatticeIndex> key;
    for (const auto& q : config.points)
        key.push_back(ansatz_->node_index(q));
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second;
    }
    const Configuration snapped = ansatz_->snapped(config);
    double M = -std::numeric_limits<double>::infinity();
    if (check_feasibility(ansatz_->domain(), snapped, ansatz_->grid().h).feasible)
        M = reduced_energy(*ansatz_, snapped, opts_.reduction).M;
    std::lock_guard lock(mutex_);
    ++evaluations_;
    cache_.emplace(std::move(key), M);
    return M;
}

std::vector<double> EnergyLandscape::evaluate(const std::vector<Configuration>& configs) const
{
    std::vector<double> out(configs.size());
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, opts_.jobs));
    for (std::size_t start = 0; start < configs.size(); start += jobs) {
        const std::size_t stop = std::min(configs.size(), start + jobs);
        if (stop - start == 1) {
            out[start] = (*this)(configs[start]);
            continue;
        }
        std::vector<std::future<double>> futures;
        for (std::size_t i = start; i < stop; ++i)
            futures.push_back(std::async(std::launch::async, [this, &configs, i] { return (*this)(configs[i]); }));
        for (std::size_t i = start; i < stop; ++i)
            out[i] = futures[i - start].get();
    }
    return out;
}

int EnergyLandscape::evaluations() const
{
    std::lock_guard lock(mutex_);
    return evaluations_;
}

namespace {

Point domain_center(const Domain& d)
{
    if (d.shape == Shape::Disk)
        return d.center;
    return {0.5 * (d.lower[0] + d.upper[0]), 0.5 * (d.lower[1] + d.upper[1])};
}

int floor_mod(int a, int b)
{
    const int r = a % b;
    return r < 0 ? r + b : r;
}

bool lex_less(const Point& a, const Point& b)
{
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
}

}  // namespace

ClearanceMap clearance_map(const Ansatz& ansatz, const Configuration& config)
{
    const Grid& grid = ansatz.grid();
    const Domain& domain = ansatz.domain();
    const double eps = ansatz.epsilon();
    ClearanceMap map;
    map.stride = std::max(1, static_cast<int>(std::lround(config.rho / (4.0 * grid.h))));
    const Point c = domain_center(domain);
    const LatticeIndex c0 = grid.nearest_index({c[0] / eps, c[1] / eps});
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const LatticeIndex& idx = grid.index[n];
        bool on = floor_mod(idx[0] - c0[0], map.stride) == 0;
        if (grid.dim == 2)
            on = on && floor_mod(idx[1] - c0[1], map.stride) == 0;
        if (!on)
            continue;
        const Point q = ansatz.physical(idx);
        if (!domain.contains(q))
            continue;
        double d = reflect_point(domain, q).distance;
        for (const auto& s : config.points)
            d = std::min(d, distance(q, s));
        map.nodes.push_back(static_cast<int>(n));
        map.clearance.push_back(d);
    }
    return map;
}

Configuration insert_spike(const Ansatz& ansatz, const Configuration& config, const SearchOptions& opts)
{
    const int n = ansatz.grid().dim;
    const double scale = config.rho * ansatz.epsilon();
    const double allowed = packing_delta(ansatz.domain(), opts) / std::pow(scale, n);
    if (static_cast<double>(config.k() + 1) > allowed)
        throw PackingBudgetExceeded("k + 1 = " + std::to_string(config.k() + 1) + " exceeds the packing budget " +
                                    std::to_string(allowed));
    const ClearanceMap map = clearance_map(ansatz, config);
    const double tie = 1e-12 * scale;
    int best = -1;
    Point best_q{0.0, 0.0};
    for (std::size_t a = 0; a < map.nodes.size(); ++a) {
        const Point q = ansatz.physical(ansatz.grid().index[static_cast<std::size_t>(map.nodes[a])]);
        if (best < 0 || map.clearance[a] > map.clearance[static_cast<std::size_t>(best)] + tie ||
            (std::abs(map.clearance[a] - map.clearance[static_cast<std::size_t>(best)]) <= tie && lex_less(q, best_q))) {
            best = static_cast<int>(a);
            best_q = q;
        }
    }
    if (best < 0 || map.clearance[static_cast<std::size_t>(best)] < 3.0 * scale * (1.0 - 1e-12))
        throw NoClearance("no candidate clears 3*rho*epsilon");
    Configuration out = config;
    out.points.push_back(best_q);
    return out;
}

namespace {

std::optional<Configuration> moved(const Ansatz& ansatz, const Configuration& config, std::size_t i, int axis,
                                   int dir)
{
    LatticeIndex idx = ansatz.node_index(config.points[i]);
    idx[static_cast<std::size_t>(axis)] += dir;
    if (!ansatz.grid().node_at(idx))
        return std::nullopt;
    Configuration out = config;
    out.points[i] = ansatz.physical(idx);
    if (!ansatz.domain().contains(out.points[i]))
        return std::nullopt;
    if (!check_feasibility(ansatz.domain(), out, ansatz.grid().h).feasible)
        return std::nullopt;
    return out;
}

}  // namespace

SearchState local_maximize(const EnergyLandscape& landscape, const Configuration& start)
{
    const Ansatz& ansatz = landscape.ansatz();
    const SearchOptions& opts = landscape.options();
    const int first = landscape.evaluations();
    SearchState s;
    s.config = ansatz.snapped(start);
    s.M = landscape(s.config);
    if (!std::isfinite(s.M))
        throw InfeasibleConfiguration("local search started outside the configuration space");
    auto spent = [&] { return landscape.evaluations() - first; };
    auto improves = [&](double m) { return m > s.M + opts.gain_floor * std::max(1.0, std::abs(s.M)); };

    const int dim = ansatz.grid().dim;
    bool accepted = true;
    while (accepted && spent() < opts.budget) {
        accepted = false;
        for (std::size_t i = 0; i < s.config.k() && spent() < opts.budget; ++i) {
            std::vector<Configuration> trials;
            std::vector<std::pair<int, int>> moves;
            for (int axis = 0; axis < dim; ++axis)
                for (int dir : {1, -1})
                    if (auto t = moved(ansatz, s.config, i, axis, dir)) {
                        trials.push_back(std::move(*t));
                        moves.emplace_back(axis, dir);
                    }
            const std::vector<double> values = landscape.evaluate(trials);
            int pick = -1;
            for (std::size_t a = 0; a < values.size(); ++a)
                if (improves(values[a]) && (pick < 0 || values[a] > values[static_cast<std::size_t>(pick)]))
                    pick = static_cast<int>(a);
            if (pick < 0)
                continue;
            const auto [axis, dir] = moves[static_cast<std::size_t>(pick)];
            s.config = trials[static_cast<std::size_t>(pick)];
            s.M = values[static_cast<std::size_t>(pick)];
            s.history.push_back(s.M);
            ++s.moves;
            accepted = true;
            // Keep walking while the same direction pays.
            while (spent() < opts.budget) {
                auto next = moved(ansatz, s.config, i, axis, dir);
                if (!next)
                    break;
                const double m = landscape(*next);
                if (!improves(m))
                    break;
                s.config = std::move(*next);
                s.M = m;
                s.history.push_back(m);
                ++s.moves;
            }
        }
    }
    s.evaluations = spent();
    s.margins = check_feasibility(ansatz.domain(), s.config, ansatz.grid().h);
    return s;
}

EnergyStepReport verify_energy_step(const Ansatz& ansatz, const SearchState& state_k, const SearchState& state_k1)
{
    EnergyStepReport r;
    r.k = state_k.config.k();
    r.C_k = state_k.M;
    r.C_k1 = state_k1.M;
    const double rho = state_k1.config.rho;
    r.threshold = -0.25 * ansatz.ground_state().gamma * std::exp(-rho);
    const bool feasible = state_k1.config.k() == r.k + 1 &&
                          check_feasibility(ansatz.domain(), state_k1.config, ansatz.grid().h).feasible &&
                          std::isfinite(state_k1.M);
    if (!feasible) {
        r.rejected = true;
        return r;
    }
    r.step = r.C_k1 - r.C_k - ansatz.profile().energy();
    r.pass = r.step > r.threshold;
    return r;
}

InteriorReport verify_interior_maximizer(const Ansatz& ansatz, const SearchState& state)
{
    const Feasibility f = check_feasibility(ansatz.domain(), state.config, ansatz.grid().h);
    InteriorReport r;
    r.pair_margin = f.pair_margin;
    r.reflect_margin = f.reflect_margin;
    const double bar = 1.0 + 1e-6;
    const bool pair_ok = f.pair_margin > bar;
    const bool reflect_ok = f.reflect_margin > bar;
    r.pass = pair_ok && reflect_ok;
    if (!pair_ok)
        r.active = "pair " + std::to_string(f.pair_i) + "," + std::to_string(f.pair_j) + " at separation rho*eps";
    if (!reflect_ok) {
        if (!r.active.empty())
            r.active += "; ";
        r.active += "spike " + std::to_string(f.reflect_i) + " against reflection of spike " +
                    std::to_string(f.reflect_j);
    }
    return r;
}

std::size_t packing_count(const Ansatz& ansatz, double rho, const SearchOptions& opts)
{
    Configuration c;
    c.rho = rho;
    for (;;) {
        try {
            c = insert_spike(ansatz, c, opts);
        } catch (const NoClearance&) {
            break;
        } catch (const PackingBudgetExceeded&) {
            break;
        }
    }
    return c.k();
}

}  // namespace spikes
