#pragma once

#include <string>
#include <vector>

#include "spikes/search.hpp"
#include "spikes/verify.hpp"

namespace spikes {

struct LadderStep {
    std::size_t k = 0;
    SearchState state;
    EnergyStepReport step;
    InteriorReport interior;
    SolutionCertificate certificate;
    EnergyReport energy;
};

struct LadderResult {
    std::vector<LadderStep> steps;
    std::string stop_reason;  ///< "k_max", "no_clearance" or "packing_budget"
    bool all_steps_pass() const;
};

/// Greedy ladder: insert → local_maximize → energy step → interiority →
/// certificate, for k = 1 … k_max or until insertion is impossible.
LadderResult run_ladder(const Ansatz& ansatz, double rho, std::size_t k_max, const SearchOptions& opts = {},
                        const CertificateOptions& cert = {});

}  // namespace spikes
