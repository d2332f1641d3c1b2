#include "spikes/ansatz.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>

#include "spikes/errors.hpp"

namespace spikes {

nlohmann::json to_json(const Configuration& c)
{
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& q : c.points)
        pts.push_back({q[0], q[1]});
    return {{"rho", c.rho}, {"Q", pts}};
}

Configuration configuration_from_json(const nlohmann::json& j)
{
    Configuration c;
    c.rho = j.at("rho").get<double>();
    for (const auto& q : j.at("Q")) {
        const auto v = q.get<std::vector<double>>();
        if (v.empty() || v.size() > 2)
            throw ConfigError("spike centre must have one or two coordinates");
        c.points.push_back({v[0], v.size() == 2 ? v[1] : 0.0});
    }
    return c;
}

Feasibility check_feasibility(const Domain& domain, const Configuration& config, double h)
{
    Feasibility f;
    const double eps = domain.epsilon;
    const double scale = config.rho * eps;
    const double near = 10.0 * eps * std::abs(std::log(eps));
    const std::size_t k = config.k();
    const double slack = 1.0 - 1e-12;

    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double m = distance(config.points[i], config.points[j]) / scale;
            if (m < f.pair_margin) {
                f.pair_margin = m;
                f.pair_i = static_cast<int>(i);
                f.pair_j = static_cast<int>(j);
            }
        }

    for (std::size_t j = 0; j < k; ++j) {
        if (!domain.contains(config.points[j]))
            throw PointOutsideDomain("spike centre outside the domain");
        const BoundaryGeometry g = reflect_point(domain, config.points[j], h * eps);
        f.boundary_distance.push_back(g.distance);
        f.reflected.push_back(g.reflected);
        if (g.distance > near)
            continue;
        std::vector<Point> images{g.reflected};
        double required = scale;
        if (g.near_corner) {
            images.push_back(g.corner_reflected);
            required += h * eps;
        }
        for (const Point& img : images)
            for (std::size_t i = 0; i < k; ++i) {
                const double m = distance(config.points[i], img) / required;
                if (m < f.reflect_margin) {
                    f.reflect_margin = m;
                    f.reflect_i = static_cast<int>(i);
                    f.reflect_j = static_cast<int>(j);
                }
            }
    }
    f.feasible = f.pair_margin >= slack && f.reflect_margin >= slack;
    return f;
}

double cutoff(double t, double rho)
{
    const double t_end = rho * rho / (rho * rho - 1.0);
    const double t_start = t_end - 1.0 / rho;
    if (t <= t_start)
        return 1.0;
    if (t >= t_end)
        return 0.0;
    const double s = (t - t_start) / (t_end - t_start);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

Ansatz::Ansatz(std::shared_ptr<const GroundState> gs, const Domain& domain, double h)
    : gs_(std::move(gs)), domain_(domain), grid_(build_grid(domain, h))
{
    if (gs_->dim != domain.dim())
        throw ConfigError("ground state dimension does not match the domain");
    profile_ = std::make_shared<LatticeProfile>(*gs_, h);
}

LatticeIndex Ansatz::node_index(const Point& q) const
{
    if (!domain_.contains(q))
        throw PointOutsideDomain("point outside the domain");
    const double eps = domain_.epsilon;
    const LatticeIndex idx = grid_.nearest_index({q[0] / eps, q[1] / eps});
    if (!grid_.node_at(idx))
        throw PointOutsideDomain("point does not snap to a grid node");
    return idx;
}

Point Ansatz::snap(const Point& q) const
{
    return physical(node_index(q));
}

Configuration Ansatz::snapped(const Configuration& c) const
{
    Configuration out = c;
    for (auto& q : out.points)
        q = snap(q);
    return out;
}

Point Ansatz::rescaled(const Point& q) const
{
    return grid_.lattice_point(node_index(q));
}

Point Ansatz::physical(const LatticeIndex& idx) const
{
    const Point x = grid_.lattice_point(idx);
    return {x[0] * domain_.epsilon, x[1] * domain_.epsilon};
}

Eigen::VectorXd Ansatz::free_spike(const LatticeIndex& c) const
{
    Eigen::VectorXd f(grid_.size());
    for (std::size_t n = 0; n < grid_.size(); ++n)
        f[n] = profile_->value(grid_.index[n][0] - c[0], grid_.index[n][1] - c[1]);
    return f;
}

Eigen::VectorXd Ansatz::free_spike_derivative(const LatticeIndex& c, int axis) const
{
    Eigen::VectorXd f(grid_.size());
    for (std::size_t n = 0; n < grid_.size(); ++n)
        f[n] = profile_->derivative(grid_.index[n][0] - c[0], grid_.index[n][1] - c[1], axis);
    return f;
}

std::shared_ptr<const CorrectedSpike> Ansatz::corrected_spike(const Point& q) const
{
    const LatticeIndex idx = node_index(q);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(idx); it != cache_.end())
            return it->second;
    }
    auto s = std::make_shared<CorrectedSpike>();
    s->center = idx;
    s->free = free_spike(idx);
    const double p = gs_->p;
    const Eigen::VectorXd src = s->free.unaryExpr([p](double v) { return std::pow(std::max(v, 0.0), p); });
    s->corrected = grid_.solve_helmholtz(src);
    s->correction = s->free - s->corrected;
    std::unique_lock lock(mutex_);
    auto [it, inserted] = cache_.emplace(idx, std::move(s));
    return it->second;
}

std::size_t Ansatz::cache_size() const
{
    std::shared_lock lock(mutex_);
    return cache_.size();
}

namespace {

void require_feasible(const Ansatz& ansatz, const Configuration& config)
{
    const Feasibility f = check_feasibility(ansatz.domain(), config, ansatz.grid().h);
    if (!f.feasible)
        throw InfeasibleConfiguration("configuration violates the separation constraints");
}

}  // namespace

SpikeField multi_spike_sum(const Ansatz& ansatz, const Configuration& config)
{
    require_feasible(ansatz, config);
    SpikeField f;
    f.kind = SpikeField::Kind::Sum;
    f.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ansatz.grid().size()));
    for (const auto& q : config.points)
        f.values += ansatz.corrected_spike(q)->corrected;
    if (config.k() == 1)
        f.kind = SpikeField::Kind::CorrectedSpike;
    return f;
}

Eigen::VectorXd free_spike_sum(const Ansatz& ansatz, const Configuration& config)
{
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ansatz.grid().size()));
    for (const auto& q : config.points)
        f += ansatz.corrected_spike(q)->free;
    return f;
}

ProjectionSet projection_set(const Ansatz& ansatz, const Configuration& config)
{
    require_feasible(ansatz, config);
    const Grid& grid = ansatz.grid();
    const double rho = config.rho;
    ProjectionSet ps;
    ps.dim = grid.dim;
    ps.transition_end = rho * rho / (rho * rho - 1.0);
    ps.transition_start = ps.transition_end - 1.0 / rho;
    ps.support_radius = rho * rho / (2.0 * (rho + 1.0));
    for (const auto& q : config.points) {
        const LatticeIndex c = ansatz.node_index(q);
        const Point x0 = grid.lattice_point(c);
        Eigen::VectorXd chi(grid.size());
        for (std::size_t n = 0; n < grid.size(); ++n)
            chi[n] = cutoff(2.0 * distance(grid.nodes[n], x0) / (rho - 1.0), rho);
        for (int j = 0; j < grid.dim; ++j)
            ps.Z.push_back(ansatz.free_spike_derivative(c, j).cwiseProduct(chi));
        ps.chi.push_back(std::move(chi));
    }
    return ps;
}

Eigen::VectorXd star_weight(const Grid& grid, const std::vector<Point>& centers, double eta)
{
    Eigen::VectorXd W = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t n = 0; n < grid.size(); ++n)
        for (const auto& c : centers)
            W[n] += std::exp(-eta * distance(grid.nodes[n], c));
    return W;
}

double star_norm(const Grid& grid, const Eigen::VectorXd& field, const std::vector<Point>& centers,
                 double eta)
{
    if (centers.empty())
        return field.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const Eigen::VectorXd W = star_weight(grid, centers, eta);
    double s = 0.0;
    for (Eigen::Index n = 0; n < field.size(); ++n)
        s = std::max(s, std::abs(field[n]) / W[n]);
    return s;
}

std::vector<Point> rescaled_centers(const Ansatz& ansatz, const Configuration& config)
{
    std::vector<Point> out;
    for (const auto& q : config.points)
        out.push_back(ansatz.rescaled(q));
    return out;
}

void write_field_csv(std::ostream& os, const Grid& grid, const Eigen::VectorXd& field)
{
    os << "x,y,value\n" << std::setprecision(17);
    for (std::size_t n = 0; n < grid.size(); ++n)
        os << grid.nodes[n][0] << ',' << grid.nodes[n][1] << ',' << field[n] << '\n';
}

}  // namespace spikes
