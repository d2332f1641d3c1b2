#include "spikes/lattice_profile.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "spikes/errors.hpp"

namespace spikes {

LatticeProfile::LatticeProfile(const GroundState& gs, double h) : dim_(gs.dim), h_(h), p_(gs.p)
{
    if (dim_ > 2)
        throw InvalidMesh("lattice profiles are available for dim 1 and 2");
    const double w0 = gs.center_value();
    double R = 1.0;
    while (R < gs.r_max() && gs.value(R) >= 1e-16 * w0)
        R += 1.0;
    m_ = static_cast<int>(std::ceil(R / h));
    const int ny = dim_ == 2 ? m_ + 1 : 1;
    const int nx = m_ + 1;
    const auto N = static_cast<Eigen::Index>(nx) * ny;
    auto id = [nx](int i, int j) { return static_cast<Eigen::Index>(j) * nx + i; };

    Eigen::VectorXd u(N);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            u[id(i, j)] = gs.value(h * std::hypot(i, j));

    const double ih2 = 1.0 / (h * h);
    // −Δ_h restricted to the even sector, zero beyond the box.
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const auto r = id(i, j);
            trips.emplace_back(r, r, 2.0 * dim_ * ih2);
            auto couple = [&](int a, int b) {
                if (a > m_ || b > m_)
                    return;
                trips.emplace_back(r, id(a, b), -ih2);
            };
            couple(i + 1, j);
            couple(i == 0 ? 1 : i - 1, j);
            if (dim_ == 2) {
                couple(i, j + 1);
                couple(i, j == 0 ? 1 : j - 1);
            }
        }
    Eigen::SparseMatrix<double> neg_lap(N, N);
    neg_lap.setFromTriplets(trips.begin(), trips.end());

    auto residual_of = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd F = -(neg_lap * v) - v;
        for (Eigen::Index k = 0; k < N; ++k)
            F[k] += std::pow(std::max(v[k], 0.0), p_);
        return F;
    };

    Eigen::VectorXd F = residual_of(u);
    int it = 0;
    for (; it < 40 && F.cwiseAbs().maxCoeff() > 1e-14 * w0; ++it) {
        Eigen::SparseMatrix<double> J = -neg_lap;
        for (Eigen::Index k = 0; k < N; ++k)
            J.coeffRef(k, k) += -1.0 + p_ * std::pow(std::max(u[k], 0.0), p_ - 1.0);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw LinearSolveFailed("lattice ground state Jacobian is singular");
        const Eigen::VectorXd du = lu.solve(F);
        u -= du;
        F = residual_of(u);
        if (du.cwiseAbs().maxCoeff() < 1e-15 * w0)
            break;
    }
    residual_ = F.cwiseAbs().maxCoeff();
    // Rounding in Δ_h grows like 1/h², so fine lattices get a proportional floor.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * w0 * (2.0 * dim_ * ih2 + 1.0);
    if (residual_ > std::max(1e-12 * w0, floor))
        throw ToleranceNotMet("lattice ground state Newton did not converge");

    vals_.assign(u.data(), u.data() + N);

    const double cell = std::pow(h, dim_);
    const Eigen::VectorXd Au = neg_lap * u;
    energy_ = 0.0;
    grad_sq_ = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double mult = (i == 0 ? 1.0 : 2.0) * (j == 0 ? 1.0 : 2.0);
            const double v = u[id(i, j)];
            energy_ += mult * cell *
                       (0.5 * v * (Au[id(i, j)] + v) - std::pow(std::max(v, 0.0), p_ + 1.0) / (p_ + 1.0));
            const double d = derivative(i, j, 0);
            grad_sq_ += mult * cell * d * d;
        }
}

}  // namespace spikes
