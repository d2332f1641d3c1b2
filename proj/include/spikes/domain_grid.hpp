#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "json.hpp"

namespace spikes {

/// Points carry two coordinates; the second is ignored (and kept at 0) in 1D.
using Point = std::array<double, 2>;
using LatticeIndex = std::array<int, 2>;

double distance(const Point& a, const Point& b);

enum class Shape { Interval, Rectangle, Disk };

/// Physical domain Ω together with the scale ε. Geometry is stored in
/// physical units; grids live in rescaled units x = z/ε.
struct Domain {
    Shape shape = Shape::Interval;
    Point lower{0.0, 0.0};   ///< interval / rectangle lower corner
    Point upper{1.0, 0.0};   ///< interval / rectangle upper corner
    Point center{0.0, 0.0};  ///< disk center
    double radius = 1.0;     ///< disk radius
    double epsilon = 0.05;

    static Domain interval(double a, double b, double epsilon);
    static Domain rectangle(Point lo, Point hi, double epsilon);
    static Domain disk(Point center, double radius, double epsilon);

    int dim() const { return shape == Shape::Interval ? 1 : 2; }
    /// |Ω| in physical units.
    double measure() const;
    bool contains(const Point& q) const;
};

nlohmann::json to_json(const Domain& d);
Domain domain_from_json(const nlohmann::json& j);

/// Distance to ∂Ω, nearest boundary point, outward normal there and the
/// reflected point Q* = Q + 2 d ν.
struct BoundaryGeometry {
    double distance = 0.0;
    Point nearest{0.0, 0.0};
    Point normal{0.0, 0.0};
    Point reflected{0.0, 0.0};
    /// Rectangle only: the second-nearest face is within one mesh cell, so
    /// the nearest boundary point is effectively a corner.
    bool near_corner = false;
    /// Rectangle only: reflection across the other face adjacent to the corner.
    Point corner_reflected{0.0, 0.0};
};

/// Closed-form boundary geometry. Ties between rectangle faces are broken in
/// the order x-low, x-high, y-low, y-high. Throws PointOutsideDomain.
BoundaryGeometry reflect_point(const Domain& domain, const Point& q, double corner_band = 0.0);

/// Cell-centred finite-volume grid over Ω_ε with a homogeneous Neumann
/// Laplacian. Nodes sit on the lattice origin + h·index. For the disk, cut
/// cells carry their true area and face apertures.
class Grid {
public:
    int dim = 1;
    double h = 0.25;
    double epsilon = 0.05;
    Point origin{0.0, 0.0};
    std::vector<Point> nodes;             ///< rescaled coordinates
    std::vector<LatticeIndex> index;
    std::vector<double> weights;          ///< cell measure (quadrature weight)
    std::vector<bool> on_boundary;        ///< cell touches ∂Ω_ε
    /// Discrete Δ with Neumann closure (rows sum to zero).
    Eigen::SparseMatrix<double, Eigen::RowMajor> laplacian;
    /// −M·Δ, symmetric positive semidefinite (M = diag(weights)).
    Eigen::SparseMatrix<double> stiffness;
    std::vector<std::vector<int>> face_neighbors;
    std::vector<std::vector<int>> all_neighbors;  ///< face and diagonal neighbours

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;

    /// Node with the given lattice index, if it belongs to the grid.
    std::optional<int> node_at(const LatticeIndex& idx) const;
    /// Lattice index nearest to a rescaled point (ties rounded half up).
    LatticeIndex nearest_index(const Point& x) const;
    Point lattice_point(const LatticeIndex& idx) const;

    /// Weighted inner product Σ V_i u_i v_i.
    double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply_mass(const Eigen::VectorXd& u) const;

    /// Solves (1 − Δ) v = f with the Neumann closure; factorisation shared.
    Eigen::VectorXd solve_helmholtz(const Eigen::VectorXd& f) const;

private:
    friend Grid build_grid(const Domain& domain, double h);
    std::vector<int> lookup_;  // dense lattice map over the bounding box
    LatticeIndex lookup_lo_{0, 0};
    LatticeIndex lookup_extent_{0, 1};
    std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> helmholtz_;
};

/// Builds the grid in rescaled coordinates. Throws MeshTooCoarse for h > 1/4
/// and InvalidMesh when h does not divide the rectangle/interval extents or
/// under-resolves the disk boundary.
Grid build_grid(const Domain& domain, double h);

}  // namespace spikes
