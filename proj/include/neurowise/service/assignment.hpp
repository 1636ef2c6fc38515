#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>

#include "neurowise/core/domain.hpp"
#include "neurowise/service/session.hpp"

namespace neurowise::service {

/// Stratified block randomization with blocks of two: within a stratum, every
/// consecutive pair of assignments holds one Baseline and one NeuroWise session in
/// random order.
class BlockRandomizer {
public:
    explicit BlockRandomizer(std::uint64_t seed);

    Condition assign(const StratumKey& stratum);

    struct Counts {
        int baseline = 0;
        int neurowise = 0;
    };
    Counts counts(const StratumKey& stratum) const;

private:
    struct StratumState {
        Counts counts;
        std::optional<Condition> pending;  // second half of an open block
    };

    mutable std::mutex mutex_;
    std::mt19937_64 rng_;
    std::map<StratumKey, StratumState> strata_;
};

}  // namespace neurowise::service
