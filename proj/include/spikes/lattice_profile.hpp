#pragma once

#include <vector>

#include "spikes/domain_grid.hpp"
#include "spikes/ground_state.hpp"

namespace spikes {

/// Ground state of the lattice equation Δ_h ŵ − ŵ + ŵᵖ = 0 on hℤⁿ, centred
/// on a node. Spikes placed on grid nodes use ŵ instead of samples of the
/// continuum w, so the discrete error field carries no O(h²) consistency
/// term and only the genuine interaction remains.
///
/// Computed by Newton iteration on the even (reflection-symmetric) sector of
/// a box [−R, R]ⁿ, starting from the continuum profile. Values beyond the box
/// are zero; R is chosen so that they lie below 1e-16·ŵ(0).
class LatticeProfile {
public:
    LatticeProfile(const GroundState& gs, double h);

    int dim() const { return dim_; }
    double h() const { return h_; }
    double p() const { return p_; }
    int half_width() const { return m_; }
    double center_value() const { return vals_.front(); }

    /// ŵ at a lattice offset from the centre node.
    double value(int di, int dj = 0) const
    {
        di = di < 0 ? -di : di;
        dj = dj < 0 ? -dj : dj;
        if (di > m_ || dj > m_)
            return 0.0;
        return vals_[static_cast<std::size_t>(dj) * (m_ + 1) + di];
    }
    /// Central difference of ŵ along `axis` at a lattice offset.
    double derivative(int di, int dj, int axis) const
    {
        if (axis == 0)
            return (value(di + 1, dj) - value(di - 1, dj)) / (2.0 * h_);
        return (value(di, dj + 1) - value(di, dj - 1)) / (2.0 * h_);
    }

    /// Lattice energy J_h(ŵ) = ½Σhⁿ(|∇_h ŵ|² + ŵ²) − Σhⁿ ŵ^{p+1}/(p+1).
    double energy() const { return energy_; }
    /// Σhⁿ (∂_1 ŵ)² with the central-difference derivative.
    double gradient_norm_sq() const { return grad_sq_; }
    /// max |Δ_h ŵ − ŵ + ŵᵖ| after Newton.
    double residual() const { return residual_; }

private:
    int dim_;
    double h_;
    double p_;
    int m_;
    std::vector<double> vals_;
    double energy_ = 0.0;
    double grad_sq_ = 0.0;
    double residual_ = 0.0;
};

}  // namespace spikes
