#pragma once

#include <string>
#include <vector>

#include "spikes/energy.hpp"

namespace spikes {

struct SweepRow {
    std::string kind;       ///< "pair", "boundary" or "free_space"
    double distance = 0.0;  ///< s/ε for pairs, 2d/ε for boundary rows
    double B = 0.0;         ///< measured interaction
    double w_at = 0.0;      ///< w(distance)
    double ratio = 0.0;     ///< B / w(distance); tends to γ
    double literal = 0.0;   ///< pairs: γ·w(2d(Q_j)/ε), the prediction as literally stated
    double rel_error = 0.0; ///< ratio/γ − 1
    double envelope = 0.0;  ///< tolerance on |rel_error|, 0 when the row is informational
    bool pass = true;
};

struct AsymptoticsReport {
    double gamma = 0.0;
    std::vector<SweepRow> rows;
    bool pass() const;
};

/// Interaction sweeps at distances {8, 10, 12}: two spikes about the domain
/// centre (envelope 15% at 12), one spike approaching the lowest face along
/// the first axis (envelope 20% at 10), and the free-space two-centre
/// integral (envelope 10% at 12).
AsymptoticsReport verify_asymptotics(const Ansatz& ansatz, double rho);

}  // namespace spikes
