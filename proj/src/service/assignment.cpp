#include "neurowise/service/assignment.hpp"

namespace neurowise::service {

BlockRandomizer::BlockRandomizer(std::uint64_t seed) : rng_(seed) {}

Condition BlockRandomizer::assign(const StratumKey& stratum) {
    std::lock_guard lock(mutex_);
    auto& state = strata_[stratum];
    Condition c;
    if (state.pending) {
        c = *state.pending;
        state.pending.reset();
    } else {
        std::bernoulli_distribution coin(0.5);
        c = coin(rng_) ? Condition::NeuroWise : Condition::Baseline;
        state.pending = c == Condition::NeuroWise ? Condition::Baseline : Condition::NeuroWise;
    }
    (c == Condition::NeuroWise ? state.counts.neurowise : state.counts.baseline) += 1;
    return c;
}

BlockRandomizer::Counts BlockRandomizer::counts(const StratumKey& stratum) const {
    std::lock_guard lock(mutex_);
    auto it = strata_.find(stratum);
    return it == strata_.end() ? Counts{} : it->second.counts;
}

}  // namespace neurowise::service
