#include "spikes/ladder.hpp"

#include "spikes/errors.hpp"

namespace spikes {

bool LadderResult::all_steps_pass() const
{
    for (const auto& s : steps)
        if (!s.step.pass)
            return false;
    return !steps.empty();
}

LadderResult run_ladder(const Ansatz& ansatz, double rho, std::size_t k_max, const SearchOptions& opts,
                        const CertificateOptions& cert)
{
    LadderResult out;
    EnergyLandscape landscape(ansatz, opts);
    SearchState previous;
    previous.config.rho = rho;
    out.stop_reason = "k_max";
    for (std::size_t k = 1; k <= k_max; ++k) {
        Configuration start;
        try {
            start = insert_spike(ansatz, previous.config, opts);
        } catch (const NoClearance&) {
            out.stop_reason = "no_clearance";
            break;
        } catch (const PackingBudgetExceeded&) {
            out.stop_reason = "packing_budget";
            break;
        }
        LadderStep step;
        step.k = k;
        step.state = local_maximize(landscape, start);
        step.step = verify_energy_step(ansatz, previous, step.state);
        step.interior = verify_interior_maximizer(ansatz, step.state);
        const ReducedSolution reduced = reduce(ansatz, step.state.config, opts.reduction);
        step.energy = reduced_energy(ansatz, reduced);
        step.certificate = certify(ansatz, reduced, cert, opts.reduction);
        previous = step.state;
        out.steps.push_back(std::move(step));
    }
    return out;
}

}  // namespace spikes
