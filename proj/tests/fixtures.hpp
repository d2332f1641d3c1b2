#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "spikes/ansatz.hpp"
#include "spikes/ground_state.hpp"

namespace fixtures {

// Ground states are shared across test cases; solving them is the slow part.
inline std::shared_ptr<const spikes::GroundState> ground_state(int dim)
{
    static const auto g1 = std::make_shared<const spikes::GroundState>(spikes::solve_ground_state(1, 3.0, 60.0, 1e-10));
    if (dim == 1)
        return g1;
    static const auto g2 = std::make_shared<const spikes::GroundState>(spikes::solve_ground_state(2, 3.0, 50.0, 1e-10));
    return g2;
}

inline double soliton(double r) { return std::sqrt(2.0) / std::cosh(r); }

inline Eigen::VectorXd random_field(std::size_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = dist(rng);
    return v;
}

// Physical point on the node `offset` cells from the first node of a 1D grid.
inline spikes::Point from_left(const spikes::Ansatz& a, int offset)
{
    return a.physical({a.grid().index.front()[0] + offset, 0});
}

}  // namespace fixtures
