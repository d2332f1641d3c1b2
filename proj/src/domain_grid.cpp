#include "spikes/domain_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "spikes/errors.hpp"

namespace spikes {

double distance(const Point& a, const Point& b)
{
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

Domain Domain::interval(double a, double b, double epsilon)
{
    Domain d;
    d.shape = Shape::Interval;
    d.lower = {a, 0.0};
    d.upper = {b, 0.0};
    d.epsilon = epsilon;
    return d;
}

Domain Domain::rectangle(Point lo, Point hi, double epsilon)
{
    Domain d;
    d.shape = Shape::Rectangle;
    d.lower = lo;
    d.upper = hi;
    d.epsilon = epsilon;
    return d;
}

Domain Domain::disk(Point center, double radius, double epsilon)
{
    Domain d;
    d.shape = Shape::Disk;
    d.center = center;
    d.radius = radius;
    d.epsilon = epsilon;
    return d;
}

double Domain::measure() const
{
    switch (shape) {
    case Shape::Interval:
        return upper[0] - lower[0];
    case Shape::Rectangle:
        return (upper[0] - lower[0]) * (upper[1] - lower[1]);
    case Shape::Disk:
        return std::numbers::pi * radius * radius;
    }
    return 0.0;
}

bool Domain::contains(const Point& q) const
{
    switch (shape) {
    case Shape::Interval:
        return q[0] >= lower[0] && q[0] <= upper[0];
    case Shape::Rectangle:
        return q[0] >= lower[0] && q[0] <= upper[0] && q[1] >= lower[1] && q[1] <= upper[1];
    case Shape::Disk:
        return distance(q, center) <= radius;
    }
    return false;
}

nlohmann::json to_json(const Domain& d)
{
    nlohmann::json j;
    switch (d.shape) {
    case Shape::Interval:
        j["shape"] = "interval";
        j["extents"] = {d.lower[0], d.upper[0]};
        break;
    case Shape::Rectangle:
        j["shape"] = "rectangle";
        j["extents"] = {d.lower[0], d.upper[0], d.lower[1], d.upper[1]};
        break;
    case Shape::Disk:
        j["shape"] = "disk";
        j["extents"] = {d.center[0], d.center[1], d.radius};
        break;
    }
    j["epsilon"] = d.epsilon;
    return j;
}

Domain domain_from_json(const nlohmann::json& j)
{
    const std::string shape = j.at("shape").get<std::string>();
    const auto ext = j.at("extents").get<std::vector<double>>();
    const double eps = j.at("epsilon").get<double>();
    if (!(eps > 0.0))
        throw ConfigError("domain epsilon must be positive");
    if (shape == "interval" && ext.size() == 2 && ext[0] < ext[1])
        return Domain::interval(ext[0], ext[1], eps);
    if (shape == "rectangle" && ext.size() == 4 && ext[0] < ext[1] && ext[2] < ext[3])
        return Domain::rectangle({ext[0], ext[2]}, {ext[1], ext[3]}, eps);
    if (shape == "disk" && ext.size() == 3 && ext[2] > 0.0)
        return Domain::disk({ext[0], ext[1]}, ext[2], eps);
    throw ConfigError("malformed domain descriptor for shape '" + shape + "'");
}

BoundaryGeometry reflect_point(const Domain& domain, const Point& q, double corner_band)
{
    BoundaryGeometry g;
    auto finish = [&]() {
        g.reflected = {q[0] + 2.0 * g.distance * g.normal[0], q[1] + 2.0 * g.distance * g.normal[1]};
        return g;
    };
    switch (domain.shape) {
    case Shape::Interval: {
        const double d0 = q[0] - domain.lower[0];
        const double d1 = domain.upper[0] - q[0];
        if (std::min(d0, d1) < 0.0)
            throw PointOutsideDomain("point outside interval");
        if (d0 <= d1) {
            g.distance = d0;
            g.nearest = {domain.lower[0], 0.0};
            g.normal = {-1.0, 0.0};
        } else {
            g.distance = d1;
            g.nearest = {domain.upper[0], 0.0};
            g.normal = {1.0, 0.0};
        }
        return finish();
    }
    case Shape::Rectangle: {
        const std::array<double, 4> d{q[0] - domain.lower[0], domain.upper[0] - q[0], q[1] - domain.lower[1],
                                      domain.upper[1] - q[1]};
        const std::array<Point, 4> normals{Point{-1.0, 0.0}, Point{1.0, 0.0}, Point{0.0, -1.0}, Point{0.0, 1.0}};
        if (*std::min_element(d.begin(), d.end()) < 0.0)
            throw PointOutsideDomain("point outside rectangle");
        const auto face = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
        g.distance = d[face];
        g.normal = normals[face];
        g.nearest = {q[0] + g.distance * g.normal[0], q[1] + g.distance * g.normal[1]};
        // Closest face on the other axis decides whether a corner is near.
        const std::size_t other = face < 2 ? (d[2] <= d[3] ? 2 : 3) : (d[0] <= d[1] ? 0 : 1);
        if (d[other] - g.distance <= corner_band) {
            g.near_corner = true;
            g.corner_reflected = {q[0] + 2.0 * d[other] * normals[other][0],
                                  q[1] + 2.0 * d[other] * normals[other][1]};
        }
        return finish();
    }
    case Shape::Disk: {
        const double dx = q[0] - domain.center[0], dy = q[1] - domain.center[1];
        const double r = std::hypot(dx, dy);
        g.distance = domain.radius - r;
        if (g.distance < 0.0)
            throw PointOutsideDomain("point outside disk");
        g.normal = r > 0.0 ? Point{dx / r, dy / r} : Point{1.0, 0.0};
        g.nearest = {domain.center[0] + domain.radius * g.normal[0], domain.center[1] + domain.radius * g.normal[1]};
        return finish();
    }
    }
    return g;
}

double Grid::total_weight() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

std::optional<int> Grid::node_at(const LatticeIndex& idx) const
{
    const int i = idx[0] - lookup_lo_[0];
    const int j = idx[1] - lookup_lo_[1];
    if (i < 0 || j < 0 || i >= lookup_extent_[0] || j >= lookup_extent_[1])
        return std::nullopt;
    const int n = lookup_[static_cast<std::size_t>(j) * lookup_extent_[0] + i];
    if (n < 0)
        return std::nullopt;
    return n;
}

LatticeIndex Grid::nearest_index(const Point& x) const
{
    LatticeIndex idx{0, 0};
    for (int a = 0; a < dim; ++a)
        idx[a] = static_cast<int>(std::floor((x[a] - origin[a]) / h + 0.5));
    return idx;
}

Point Grid::lattice_point(const LatticeIndex& idx) const
{
    Point x{origin[0] + h * idx[0], 0.0};
    if (dim == 2)
        x[1] = origin[1] + h * idx[1];
    return x;
}

double Grid::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        s += weights[i] * u[i] * v[i];
    return s;
}

Eigen::VectorXd Grid::apply_mass(const Eigen::VectorXd& u) const
{
    Eigen::VectorXd out(u.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        out[i] = weights[i] * u[i];
    return out;
}

Eigen::VectorXd Grid::solve_helmholtz(const Eigen::VectorXd& f) const
{
    Eigen::VectorXd v = helmholtz_->solve(apply_mass(f));
    if (helmholtz_->info() != Eigen::Success)
        throw LinearSolveFailed("Neumann Helmholtz solve failed");
    return v;
}

namespace {

// Area of the square cell [x0,x1]×[y0,y1] inside the circle (c, R).
double cell_area_in_disk(double x0, double x1, double y0, double y1, const Point& c, double R)
{
    auto chord = [&](double x) {
        const double dx = x - c[0];
        if (std::abs(dx) >= R)
            return 0.0;
        const double s = std::sqrt(R * R - dx * dx);
        return std::max(0.0, std::min(y1, c[1] + s) - std::max(y0, c[1] - s));
    };
    std::vector<double> breaks{x0, x1};
    for (double y : {y0, y1}) {
        const double dy = y - c[1];
        if (std::abs(dy) < R) {
            const double s = std::sqrt(R * R - dy * dy);
            breaks.push_back(c[0] - s);
            breaks.push_back(c[0] + s);
        }
    }
    breaks.push_back(c[0] - R);
    breaks.push_back(c[0] + R);
    std::sort(breaks.begin(), breaks.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = std::max(x0, breaks[k]);
        const double b = std::min(x1, breaks[k + 1]);
        if (b > a)
            area += boost::math::quadrature::gauss<double, 30>::integrate(chord, a, b);
    }
    return area;
}

// Length of the segment {x = const, y ∈ [y0,y1]} (or its transpose) inside the circle.
double segment_in_disk(double fixed, double t0, double t1, double c_fixed, double c_free, double R)
{
    const double d = fixed - c_fixed;
    if (std::abs(d) >= R)
        return 0.0;
    const double s = std::sqrt(R * R - d * d);
    return std::max(0.0, std::min(t1, c_free + s) - std::max(t0, c_free - s));
}

int cell_count(double extent, double h, const char* what)
{
    const double n = extent / h;
    const double rounded = std::round(n);
    if (rounded < 1.0 || std::abs(n - rounded) > 1e-8 * std::max(1.0, n))
        throw InvalidMesh(std::string("mesh width does not divide the rescaled ") + what + " extent");
    return static_cast<int>(rounded);
}

}  // namespace

Grid build_grid(const Domain& domain, double h)
{
    if (!(h > 0.0))
        throw InvalidMesh("mesh width must be positive");
    if (h > 0.25)
        throw MeshTooCoarse("mesh width " + std::to_string(h) + " exceeds 1/4 in rescaled units");

    Grid g;
    g.dim = domain.dim();
    g.h = h;
    g.epsilon = domain.epsilon;
    const double eps = domain.epsilon;

    struct Face {
        int a, b;
        double coeff;  // face length / h (aperture)
    };
    std::vector<Face> faces;
    std::vector<double> fraction;  // per node: cell measure / h^dim

    LatticeIndex lo{0, 0}, extent{1, 1};
    std::vector<LatticeIndex> cells;

    if (domain.shape == Shape::Interval) {
        const int n = cell_count((domain.upper[0] - domain.lower[0]) / eps, h, "interval");
        g.origin = {domain.lower[0] / eps + 0.5 * h, 0.0};
        extent = {n, 1};
        for (int i = 0; i < n; ++i) {
            cells.push_back({i, 0});
            fraction.push_back(1.0);
        }
    } else if (domain.shape == Shape::Rectangle) {
        const int nx = cell_count((domain.upper[0] - domain.lower[0]) / eps, h, "rectangle x");
        const int ny = cell_count((domain.upper[1] - domain.lower[1]) / eps, h, "rectangle y");
        g.origin = {domain.lower[0] / eps + 0.5 * h, domain.lower[1] / eps + 0.5 * h};
        extent = {nx, ny};
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                cells.push_back({i, j});
                fraction.push_back(1.0);
            }
    } else {
        const double R = domain.radius / eps;
        if (2.0 * std::numbers::pi * R / h < 64.0)
            throw InvalidMesh("disk boundary resolved by fewer than 64 cells");
        g.origin = {domain.center[0] / eps, domain.center[1] / eps};
        const int m = static_cast<int>(std::ceil(R / h)) + 1;
        lo = {-m, -m};
        extent = {2 * m + 1, 2 * m + 1};
        const Point c{0.0, 0.0};
        for (int j = -m; j <= m; ++j)
            for (int i = -m; i <= m; ++i) {
                const double x = h * i, y = h * j;
                const double x0 = x - 0.5 * h, x1 = x + 0.5 * h, y0 = y - 0.5 * h, y1 = y + 0.5 * h;
                const double far = std::hypot(std::max(std::abs(x0), std::abs(x1)), std::max(std::abs(y0), std::abs(y1)));
                const double nx = std::clamp(0.0, x0, x1), ny = std::clamp(0.0, y0, y1);
                if (std::hypot(nx, ny) >= R)
                    continue;
                const double frac = far <= R ? 1.0 : cell_area_in_disk(x0, x1, y0, y1, c, R) / (h * h);
                // Slivers below one percent of a cell are dropped; their area is negligible.
                if (frac < 0.01)
                    continue;
                cells.push_back({i, j});
                fraction.push_back(frac);
            }
    }

    g.lookup_lo_ = lo;
    g.lookup_extent_ = extent;
    g.lookup_.assign(static_cast<std::size_t>(extent[0]) * extent[1], -1);
    for (std::size_t n = 0; n < cells.size(); ++n) {
        g.index.push_back(cells[n]);
        g.nodes.push_back(g.lattice_point(cells[n]));
        g.weights.push_back(fraction[n] * std::pow(h, g.dim));
        const auto& c = cells[n];
        g.lookup_[static_cast<std::size_t>(c[1] - lo[1]) * extent[0] + (c[0] - lo[0])] = static_cast<int>(n);
    }

    const std::size_t N = cells.size();
    g.on_boundary.assign(N, false);
    for (std::size_t n = 0; n < N; ++n) {
        if (fraction[n] < 1.0)
            g.on_boundary[n] = true;
        for (int axis = 0; axis < g.dim; ++axis) {
            LatticeIndex nb = cells[n];
            nb[axis] += 1;
            auto m = g.node_at(nb);
            LatticeIndex back = cells[n];
            back[axis] -= 1;
            if (!g.node_at(back))
                g.on_boundary[n] = true;
            if (!m) {
                g.on_boundary[n] = true;
                continue;
            }
            double coeff = 1.0;
            if (domain.shape == Shape::Disk) {
                const double R = domain.radius / eps;
                const Point mid{h * (cells[n][0] + (axis == 0 ? 0.5 : 0.0)), h * (cells[n][1] + (axis == 1 ? 0.5 : 0.0))};
                const double len = axis == 0 ? segment_in_disk(mid[0], mid[1] - 0.5 * h, mid[1] + 0.5 * h, 0.0, 0.0, R)
                                             : segment_in_disk(mid[1], mid[0] - 0.5 * h, mid[0] + 0.5 * h, 0.0, 0.0, R);
                coeff = len / h;
                if (coeff < 1.0)
                    g.on_boundary[n] = g.on_boundary[*m] = true;
                if (coeff <= 0.0)
                    continue;
            }
            faces.push_back({static_cast<int>(n), *m, coeff});
        }
    }

    // Δ_ij = coeff · h^{dim-1} / (h · V_i); stiffness = −M Δ.
    const double face_measure = std::pow(h, g.dim - 1);
    std::vector<Eigen::Triplet<double>> lap, stiff;
    std::vector<double> diag_lap(N, 0.0), diag_stiff(N, 0.0);
    g.face_neighbors.assign(N, {});
    for (const Face& f : faces) {
        const double t = f.coeff * face_measure / h;
        lap.emplace_back(f.a, f.b, t / g.weights[f.a]);
        lap.emplace_back(f.b, f.a, t / g.weights[f.b]);
        diag_lap[f.a] -= t / g.weights[f.a];
        diag_lap[f.b] -= t / g.weights[f.b];
        stiff.emplace_back(f.a, f.b, -t);
        stiff.emplace_back(f.b, f.a, -t);
        diag_stiff[f.a] += t;
        diag_stiff[f.b] += t;
        g.face_neighbors[f.a].push_back(f.b);
        g.face_neighbors[f.b].push_back(f.a);
    }
    for (std::size_t n = 0; n < N; ++n) {
        lap.emplace_back(n, n, diag_lap[n]);
        stiff.emplace_back(n, n, diag_stiff[n]);
        std::sort(g.face_neighbors[n].begin(), g.face_neighbors[n].end());
    }
    g.laplacian.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    g.laplacian.setFromTriplets(lap.begin(), lap.end());
    g.stiffness.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    g.stiffness.setFromTriplets(stiff.begin(), stiff.end());

    g.all_neighbors.assign(N, {});
    for (std::size_t n = 0; n < N; ++n) {
        for (int dj = (g.dim == 2 ? -1 : 0); dj <= (g.dim == 2 ? 1 : 0); ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0)
                    continue;
                if (auto m = g.node_at({cells[n][0] + di, cells[n][1] + dj}))
                    g.all_neighbors[n].push_back(*m);
            }
        std::sort(g.all_neighbors[n].begin(), g.all_neighbors[n].end());
    }

    Eigen::SparseMatrix<double> helm = g.stiffness;
    for (std::size_t n = 0; n < N; ++n)
        helm.coeffRef(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) += g.weights[n];
    g.helmholtz_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(helm);
    if (g.helmholtz_->info() != Eigen::Success)
        throw LinearSolveFailed("factorisation of the Neumann Helmholtz operator failed");
    return g;
}

}  // namespace spikes
