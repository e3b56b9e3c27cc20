// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/gas.hpp"

namespace duallane {

GasSchedule GasSchedule::standard() {
    GasSchedule s;
    s.base_fee = 2;
    s.min_cost = 5;
    s.per_command_cost = {
        {"transfer_owned", 10},   {"transfer_to_object", 12}, {"create_owned", 15},
        {"create_shared", 15},    {"mutate_owned", 10},       {"wrap", 12},
        {"unwrap", 12},           {"delete", 8},              {"increment", 10},
        {"read_shared", 5},       {"abort_with", 5},          {"register_vote", 5},
        {"ready_vote", 5},        {"end_of_epoch_vote", 5},   {"handover_call", 5},
    };
    return s;
}

std::uint64_t GasSchedule::command_cost(const Command& cmd) const {
    auto it = per_command_cost.find(command_name(cmd));
    return it == per_command_cost.end() ? min_cost : it->second;
}

}  // namespace duallane
