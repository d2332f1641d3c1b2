#include "spikes/reduction.hpp"

#include <cfloat>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "spikes/errors.hpp"

namespace spikes {

namespace {

double positive_pow(double v, double p)
{
    return v > 0.0 ? std::pow(v, p) : 0.0;
}

}  // namespace

ProjectedLinearSystem::ProjectedLinearSystem(const Grid& grid, const Eigen::VectorXd& w, double p,
                                             ProjectionSet projections)
    : grid_(&grid), proj_(std::move(projections))
{
    const auto N = static_cast<Eigen::Index>(grid.size());
    const auto b = static_cast<Eigen::Index>(proj_.Z.size());
    potential_ = w.unaryExpr([p](double v) { return p * positive_pow(v, p - 1.0); });

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(grid.stiffness.nonZeros() + N) + 2 * proj_.Z.size() * 64);
    for (Eigen::Index col = 0; col < grid.stiffness.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(grid.stiffness, col); it; ++it)
            trips.emplace_back(it.row(), it.col(), -it.value());
    for (Eigen::Index n = 0; n < N; ++n)
        trips.emplace_back(n, n, grid.weights[n] * (potential_[n] - 1.0));
    for (Eigen::Index a = 0; a < b; ++a)
        for (Eigen::Index n = 0; n < N; ++n) {
            const double z = proj_.Z[a][n];
            if (z == 0.0)
                continue;
            trips.emplace_back(n, N + a, -grid.weights[n] * z);
            trips.emplace_back(N + a, n, -grid.weights[n] * z);
        }
    A_.resize(N + b, N + b);
    A_.setFromTriplets(trips.begin(), trips.end());
    A_.makeCompressed();

    lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(A_);
    lu_->factorize(A_);
    if (lu_->info() != Eigen::Success)
        throw SaddleSingular("bordered projected system is singular: " + lu_->lastErrorMessage());
}

Eigen::VectorXd ProjectedLinearSystem::apply_operator(const Eigen::VectorXd& phi) const
{
    return grid_->laplacian * phi - phi + potential_.cwiseProduct(phi);
}

double ProjectedLinearSystem::residual(const Solution& s, const Eigen::VectorXd& h) const
{
    Eigen::VectorXd r = apply_operator(s.phi) - h;
    for (std::size_t a = 0; a < proj_.Z.size(); ++a)
        r -= s.c[static_cast<Eigen::Index>(a)] * proj_.Z[a];
    return r.cwiseAbs().maxCoeff();
}

double ProjectedLinearSystem::orthogonality_defect(const Eigen::VectorXd& phi) const
{
    double d = 0.0;
    for (const auto& z : proj_.Z)
        d = std::max(d, std::abs(grid_->inner(phi, z)));
    return d;
}

ProjectedLinearSystem::Solution ProjectedLinearSystem::solve(const Eigen::VectorXd& h) const
{
    const auto N = static_cast<Eigen::Index>(grid_->size());
    const auto b = static_cast<Eigen::Index>(proj_.Z.size());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + b);
    rhs.head(N) = grid_->apply_mass(h);
    const Eigen::VectorXd x = lu_->solve(rhs);
    if (lu_->info() != Eigen::Success || !x.allFinite())
        throw LinearSolveFailed("bordered solve failed");
    Solution s{x.head(N), x.tail(b)};
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (residual(s, h) > 1e-8 * scale)
        throw LinearSolveFailed("bordered solve missed the back-substitution tolerance");
    return s;
}

ProjectedLinearSystem::Solution solve_projected_linear(const ProjectedLinearSystem& sys, const Eigen::VectorXd& h)
{
    return sys.solve(h);
}

SpikeField error_field(const Ansatz& ansatz, const Configuration& config)
{
    const double p = ansatz.ground_state().p;
    SpikeField S;
    S.kind = SpikeField::Kind::Other;
    const Eigen::VectorXd w = multi_spike_sum(ansatz, config).values;
    S.values = w.unaryExpr([p](double v) { return positive_pow(v, p); });
    for (const auto& q : config.points)
        S.values -= ansatz.corrected_spike(q)->free.unaryExpr([p](double v) { return positive_pow(v, p); });
    return S;
}

SpikeField nonlinear_remainder(const Eigen::VectorXd& w, const Eigen::VectorXd& phi, double p)
{
    SpikeField N;
    N.kind = SpikeField::Kind::Other;
    N.values.resize(w.size());
    for (Eigen::Index n = 0; n < w.size(); ++n)
        N.values[n] = positive_pow(w[n] + phi[n], p) - positive_pow(w[n], p) -
                      p * positive_pow(w[n], p - 1.0) * phi[n];
    return N;
}

nlohmann::json to_json(const ReducedSolution& r)
{
    return {{"configuration", to_json(r.config)},
            {"c_ij", std::vector<double>(r.c.data(), r.c.data() + r.c.size())},
            {"star_norm", r.star_norm_phi},
            {"star_norm_error", r.star_norm_error},
            {"iterations", r.iterations},
            {"residual_trace", r.residual_trace},
            {"orthogonality_defect", r.orthogonality_defect},
            {"pde_residual", r.pde_residual},
            {"stability_constant", r.stability_constant}};
}

ReducedSolution reduce(const Ansatz& ansatz, const Configuration& config_in, const ReductionOptions& opts,
                       const Eigen::VectorXd* phi_start)
{
    const Grid& grid = ansatz.grid();
    const double p = ansatz.ground_state().p;
    const auto N = static_cast<Eigen::Index>(grid.size());

    ReducedSolution r;
    r.config = ansatz.snapped(config_in);
    if (r.config.k() == 0) {
        r.w = r.phi = Eigen::VectorXd::Zero(N);
        r.iterations = 1;
        r.residual_trace = {0.0};
        return r;
    }
    if (r.config.rho < opts.rho_min)
        throw ContractionFailed("rho = " + std::to_string(r.config.rho) + " is below the contraction threshold " +
                                std::to_string(opts.rho_min));

    r.w = multi_spike_sum(ansatz, r.config).values;
    const Eigen::VectorXd S = error_field(ansatz, r.config).values;
    const auto centers = rescaled_centers(ansatz, r.config);
    const Eigen::VectorXd W = star_weight(grid, centers, opts.eta);
    auto star = [&W](const Eigen::VectorXd& f) { return (f.cwiseAbs().array() / W.array()).maxCoeff(); };
    r.star_norm_error = star(S);

    ProjectedLinearSystem sys(grid, r.w, p, projection_set(ansatz, r.config));

    Eigen::VectorXd phi = phi_start ? *phi_start : Eigen::VectorXd::Zero(N);
    Eigen::VectorXd c;
    int increases = 0;
    bool converged = false;
    for (int m = 0; m < opts.max_iterations; ++m) {
        const Eigen::VectorXd h = -(S + nonlinear_remainder(r.w, phi, p).values);
        auto sol = sys.solve(h);
        const double step = star(sol.phi - phi);
        const double size = star(sol.phi);
        r.orthogonality_defect = std::max(r.orthogonality_defect, sys.orthogonality_defect(sol.phi));
        phi = std::move(sol.phi);
        c = std::move(sol.c);
        r.iterations = m + 1;
        const double floor = 64.0 * DBL_EPSILON * std::max(size, r.star_norm_error);
        if (!r.residual_trace.empty() && step > r.residual_trace.back() && step > floor)
            ++increases;
        else
            increases = 0;
        r.residual_trace.push_back(step);
        if (step < opts.tol_fp || step <= floor) {
            converged = true;
            break;
        }
        if (increases >= 2)
            throw ContractionFailed("fixed-point step grew twice in a row");
    }
    if (!converged)
        throw ContractionFailed("fixed-point iteration hit the iteration cap");
    if (r.orthogonality_defect > opts.tol_orth)
        throw ToleranceNotMet("orthogonality to the projection set lost");

    r.phi = phi;
    r.c = c;
    r.star_norm_phi = star(phi);
    r.stability_constant = r.star_norm_error > 0.0 ? r.star_norm_phi / r.star_norm_error : 0.0;

    const Eigen::VectorXd u = r.u();
    Eigen::VectorXd res = grid.laplacian * u - u + u.unaryExpr([p](double v) { return positive_pow(v, p); });
    for (std::size_t a = 0; a < sys.projections().Z.size(); ++a)
        res -= c[static_cast<Eigen::Index>(a)] * sys.projections().Z[a];
    r.pde_residual = res.cwiseAbs().maxCoeff();
    return r;
}

namespace {

// Columns χ_i φ₀(· − Q_i/ε) for every spike followed by every Z_ij.
Eigen::MatrixXd decomposition_basis(const Ansatz& ansatz, const Configuration& config)
{
    const Grid& grid = ansatz.grid();
    const GroundState& gs = ansatz.ground_state();
    const ProjectionSet ps = projection_set(ansatz, config);
    const auto centers = rescaled_centers(ansatz, config);
    const auto N = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd B(N, static_cast<Eigen::Index>(centers.size() + ps.Z.size()));
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (Eigen::Index n = 0; n < N; ++n)
            B(n, static_cast<Eigen::Index>(i)) = ps.chi[i][n] * gs.phi0(distance(grid.nodes[n], centers[i]));
    for (std::size_t a = 0; a < ps.Z.size(); ++a)
        B.col(static_cast<Eigen::Index>(centers.size() + a)) = ps.Z[a];
    return B;
}

}  // namespace

IncrementalReport incremental_difference_diagnostic(const Ansatz& ansatz, const Configuration& config_k,
                                                    const Point& q_new, const ReductionOptions& opts)
{
    const Grid& grid = ansatz.grid();
    Configuration all = config_k;
    all.points.push_back(q_new);
    Configuration single;
    single.rho = config_k.rho;
    single.points = {q_new};

    IncrementalReport rep;
    const auto N = static_cast<Eigen::Index>(grid.size());
    if (config_k.k() == 0) {
        rep.c.assign(1, 0.0);
        rep.d.assign(static_cast<std::size_t>(grid.dim), 0.0);
        rep.c_bound.assign(1, std::exp(-0.5 * config_k.rho));
        return rep;
    }
    const ReducedSolution ra = reduce(ansatz, all, opts);
    const ReducedSolution rk = reduce(ansatz, config_k, opts);
    const ReducedSolution rs = reduce(ansatz, single, opts);
    const Eigen::VectorXd phi = ra.u() - rk.u() - rs.u();
    rep.h1_norm_sq = phi.dot(grid.stiffness * phi) + grid.inner(phi, phi);

    const Configuration snapped = ansatz.snapped(all);
    const Eigen::MatrixXd B = decomposition_basis(ansatz, snapped);
    const Eigen::VectorXd wts = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), N);
    const Eigen::MatrixXd G = B.transpose() * wts.asDiagonal() * B;
    const Eigen::VectorXd coef = G.ldlt().solve(B.transpose() * wts.cwiseProduct(phi));
    const std::size_t k1 = snapped.k();
    for (std::size_t i = 0; i < k1; ++i) {
        rep.c.push_back(coef[static_cast<Eigen::Index>(i)]);
        const double dist = distance(snapped.points[i], snapped.points.back()) / ansatz.epsilon();
        rep.c_bound.push_back(std::exp(-0.5 * snapped.rho) * std::exp(-opts.eta * dist));
    }
    for (Eigen::Index a = static_cast<Eigen::Index>(k1); a < coef.size(); ++a)
        rep.d.push_back(coef[a]);
    const Eigen::VectorXd psi = phi - B * coef;
    rep.psi_h1_norm_sq = psi.dot(grid.stiffness * psi) + grid.inner(psi, psi);
    return rep;
}

double coercivity_constant(const Ansatz& ansatz, const ReducedSolution& r)
{
    const Grid& grid = ansatz.grid();
    const auto N = static_cast<Eigen::Index>(grid.size());
    if (N > 4000)
        throw ConfigError("dense coercivity check limited to 4000 nodes");
    const double p = ansatz.ground_state().p;
    Eigen::VectorXd sq(N);
    for (Eigen::Index n = 0; n < N; ++n)
        sq[n] = std::sqrt(grid.weights[n]);
    // Similarity transform to the Euclidean inner product: A' = D^{-1/2}(−M L)D^{-1/2}.
    Eigen::MatrixXd A = Eigen::MatrixXd(grid.stiffness);
    A = sq.cwiseInverse().asDiagonal() * A * sq.cwiseInverse().asDiagonal();
    for (Eigen::Index n = 0; n < N; ++n)
        A(n, n) += 1.0 - p * positive_pow(r.w[n], p - 1.0);
    const Eigen::MatrixXd B = sq.asDiagonal() * decomposition_basis(ansatz, r.config);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd C = Q.rightCols(N - B.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C.transpose() * A * C, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace spikes
