#include "spikes/verify.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "spikes/errors.hpp"

namespace spikes {

namespace {

double positive_pow(double v, double p)
{
    return v > 0.0 ? std::pow(v, p) : 0.0;
}

}  // namespace

MultiplierAudit multiplier_audit(const Ansatz& ansatz, const ReducedSolution& reduced, const ReductionOptions& opts)
{
    const Grid& grid = ansatz.grid();
    const Configuration& config = reduced.config;
    const int dim = grid.dim;
    const auto b = static_cast<Eigen::Index>(config.k() * static_cast<std::size_t>(dim));
    const double step = grid.h * ansatz.epsilon();
    MultiplierAudit audit;
    audit.c_max = reduced.c_max();
    audit.predicted_diagonal = -ansatz.profile().gradient_norm_sq() / ansatz.epsilon();
    audit.matrix = Eigen::MatrixXd::Zero(b, b);
    if (b == 0) {
        audit.dominance_ratio = std::numeric_limits<double>::infinity();
        return audit;
    }
    const ProjectionSet ps = projection_set(ansatz, config);
    const Eigen::VectorXd u0 = reduced.u();

    auto shifted = [&](std::size_t i, int axis, int dir) -> std::optional<Eigen::VectorXd> {
        LatticeIndex idx = ansatz.node_index(config.points[i]);
        idx[static_cast<std::size_t>(axis)] += dir;
        if (!grid.node_at(idx))
            return std::nullopt;
        Configuration c = config;
        c.points[i] = ansatz.physical(idx);
        if (!check_feasibility(ansatz.domain(), c, grid.h).feasible)
            return std::nullopt;
        return reduce(ansatz, c, opts).u();
    };

    for (std::size_t i = 0; i < config.k(); ++i)
        for (int j = 0; j < dim; ++j) {
            const auto plus = shifted(i, j, 1);
            const auto minus = shifted(i, j, -1);
            Eigen::VectorXd du;
            if (plus && minus)
                du = (*plus - *minus) / (2.0 * step);
            else if (plus)
                du = (*plus - u0) / step;
            else if (minus)
                du = (u0 - *minus) / step;
            else
                throw InfeasibleConfiguration("no admissible shift for the multiplier audit");
            const auto col = static_cast<Eigen::Index>(i * static_cast<std::size_t>(dim)) + j;
            for (Eigen::Index row = 0; row < b; ++row)
                audit.matrix(row, col) = grid.inner(ps.Z[static_cast<std::size_t>(row)], du);
        }

    double min_diag = std::numeric_limits<double>::infinity();
    double max_off = 0.0;
    for (Eigen::Index r = 0; r < b; ++r) {
        min_diag = std::min(min_diag, std::abs(audit.matrix(r, r)));
        double off = 0.0;
        for (Eigen::Index c = 0; c < b; ++c)
            if (c != r)
                off += std::abs(audit.matrix(r, c));
        max_off = std::max(max_off, off);
    }
    audit.dominance_ratio = max_off > 0.0 ? min_diag / max_off : std::numeric_limits<double>::infinity();
    return audit;
}

double pde_residual(const Grid& grid, const Eigen::VectorXd& u, double p)
{
    const Eigen::VectorXd r = grid.laplacian * u - u + u.unaryExpr([p](double v) { return positive_pow(v, p); });
    return r.cwiseAbs().maxCoeff();
}

NewtonResult newton_polish(const Grid& grid, const Eigen::VectorXd& u_init, double p, const NewtonOptions& opts)
{
    NewtonResult res;
    res.u = u_init;
    const Eigen::SparseMatrix<double> lap = grid.laplacian;
    const auto N = static_cast<Eigen::Index>(grid.size());
    auto F = [&](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(lap * u - u + u.unaryExpr([p](double v) { return positive_pow(v, p); }));
    };
    Eigen::VectorXd f = F(res.u);
    res.initial_residual = res.residual = f.cwiseAbs().maxCoeff();
    while (res.residual >= opts.tolerance) {
        if (res.iterations >= opts.max_iterations)
            throw NewtonDiverged("Newton polish did not reach the tolerance within the iteration cap");
        Eigen::SparseMatrix<double> J = lap;
        for (Eigen::Index n = 0; n < N; ++n)
            J.coeffRef(n, n) += -1.0 + p * positive_pow(res.u[n], p - 1.0);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
        if (lu.info() != Eigen::Success)
            throw NewtonDiverged("singular Jacobian in Newton polish");
        res.u -= lu.solve(f);
        f = F(res.u);
        res.residual = f.cwiseAbs().maxCoeff();
        ++res.iterations;
        if (!std::isfinite(res.residual) || res.residual > 1e6)
            throw NewtonDiverged("Newton polish diverged");
    }
    return res;
}

LocalMaxima count_local_maxima(const Grid& grid, const Eigen::VectorXd& u)
{
    LocalMaxima lm;
    lm.min_value = u.minCoeff();
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const auto& nb = grid.all_neighbors[n];
        if (nb.empty())
            continue;
        bool strict = true;
        for (int m : nb)
            if (!(u[static_cast<Eigen::Index>(n)] > u[m])) {
                strict = false;
                break;
            }
        if (strict)
            lm.nodes.push_back(static_cast<int>(n));
    }
    lm.count = lm.nodes.size();
    return lm;
}

nlohmann::json to_json(const SolutionCertificate& c)
{
    nlohmann::json locs = nlohmann::json::array();
    for (const auto& x : c.maxima_locations)
        locs.push_back({x[0], x[1]});
    return {{"k", c.k},
            {"c_max", c.c_max},
            {"dominance_ratio", std::isfinite(c.dominance_ratio) ? nlohmann::json(c.dominance_ratio)
                                                                  : nlohmann::json("inf")},
            {"newton_residual", c.newton_residual},
            {"newton_iterations", c.newton_iterations},
            {"newton_converged", c.newton_converged},
            {"polish_change", c.polish_change},
            {"local_maxima", c.maxima},
            {"local_maxima_before_polish", c.maxima_before_polish},
            {"maxima_locations", locs},
            {"max_location_error", c.max_location_error},
            {"min_u", c.min_u},
            {"pass", c.pass}};
}

SolutionCertificate certify(const Ansatz& ansatz, const ReducedSolution& reduced, const CertificateOptions& opts,
                            const ReductionOptions& reduction)
{
    const Grid& grid = ansatz.grid();
    const double p = ansatz.ground_state().p;
    SolutionCertificate cert;
    cert.k = reduced.config.k();
    const MultiplierAudit audit = multiplier_audit(ansatz, reduced, reduction);
    cert.c_max = audit.c_max;
    cert.dominance_ratio = audit.dominance_ratio;

    const Eigen::VectorXd u0 = reduced.u();
    cert.maxima_before_polish = count_local_maxima(grid, u0).count;
    Eigen::VectorXd u = u0;
    try {
        const NewtonResult nr = newton_polish(grid, u0, p, opts.newton);
        u = nr.u;
        cert.newton_residual = nr.residual;
        cert.newton_iterations = nr.iterations;
        cert.newton_converged = true;
    } catch (const NewtonDiverged&) {
        cert.newton_residual = pde_residual(grid, u0, p);
        cert.newton_converged = false;
    }
    cert.polish_change = (u - u0).cwiseAbs().maxCoeff();

    const LocalMaxima lm = count_local_maxima(grid, u);
    cert.maxima = lm.count;
    cert.min_u = lm.min_value;
    const auto centers = rescaled_centers(ansatz, reduced.config);
    for (int n : lm.nodes) {
        const Point& x = grid.nodes[static_cast<std::size_t>(n)];
        cert.maxima_locations.push_back(x);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers)
            best = std::min(best, distance(x, c));
        cert.max_location_error = std::max(cert.max_location_error, best);
    }
    cert.pass = cert.newton_converged && cert.newton_residual < opts.residual_bar && cert.c_max < opts.c_bar &&
                cert.maxima == cert.k && cert.min_u > 0.0;
    return cert;
}

}  // namespace spikes
