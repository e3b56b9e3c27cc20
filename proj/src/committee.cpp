// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/committee.hpp"

#include <set>

namespace duallane {

Committee Committee::make(EpochId epoch, const std::map<ValidatorId, Stake>& members) {
    Committee c;
    c.epoch = epoch;
    c.members = members;
    for (const auto& [id, stake] : members) c.total_stake += stake;
    if (c.total_stake == 0) throw std::logic_error("committee with zero total stake");
    return c;
}

Committee Committee::equal_stake(EpochId epoch, std::uint32_t n) {
    std::map<ValidatorId, Stake> members;
    for (std::uint32_t i = 0; i < n; ++i) members[i] = 1;
    return make(epoch, members);
}

Stake Committee::stake_of(ValidatorId id) const {
    auto it = members.find(id);
    return it == members.end() ? 0 : it->second;
}

Stake Committee::stake_of(const std::vector<ValidatorId>& ids) const {
    std::set<ValidatorId> distinct(ids.begin(), ids.end());
    Stake total = 0;
    for (ValidatorId id : distinct) total += stake_of(id);
    return total;
}

std::vector<ValidatorId> Committee::ids() const {
    std::vector<ValidatorId> out;
    out.reserve(members.size());
    for (const auto& [id, _] : members) out.push_back(id);
    return out;
}

}  // namespace duallane
