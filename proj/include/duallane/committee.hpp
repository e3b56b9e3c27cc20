// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "duallane/crypto.hpp"
#include "duallane/object.hpp"

namespace duallane {

using Stake = std::uint64_t;

/// Epoch committee. Thresholds count stake, not heads, so weighted
/// committees work unchanged.
struct Committee {
    EpochId epoch = 0;
    std::map<ValidatorId, Stake> members;
    Stake total_stake = 0;

    static Committee make(EpochId epoch, const std::map<ValidatorId, Stake>& members);
    static Committee equal_stake(EpochId epoch, std::uint32_t n);

    /// floor(2*total/3) + 1: any two quorums intersect in a validity-sized set.
    Stake quorum_threshold() const { return 2 * total_stake / 3 + 1; }
    /// floor(total/3) + 1: guaranteed to contain one correct validator.
    Stake validity_threshold() const { return total_stake / 3 + 1; }

    bool contains(ValidatorId id) const { return members.contains(id); }
    Stake stake_of(ValidatorId id) const;
    Stake stake_of(const std::vector<ValidatorId>& ids) const;  // deduplicates
    std::vector<ValidatorId> ids() const;
};

}  // namespace duallane
