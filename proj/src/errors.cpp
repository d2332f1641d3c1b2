#include "spikes/errors.hpp"

namespace spikes {

int exit_code_for(const Error& e)
{
    if (dynamic_cast<const ToleranceNotMet*>(&e) || dynamic_cast<const NoDecayBracket*>(&e) ||
        dynamic_cast<const IterationDiverged*>(&e))
        return 2;
    if (dynamic_cast<const ContractionFailed*>(&e) || dynamic_cast<const SaddleSingular*>(&e) ||
        dynamic_cast<const InfeasibleConfiguration*>(&e))
        return 3;
    if (dynamic_cast<const ConfigError*>(&e))
        return 64;
    return 1;
}

}  // namespace spikes
