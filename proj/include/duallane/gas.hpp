// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "duallane/tx.hpp"

namespace duallane {

/// Flat per-command gas metering. A bundle costs the sum of its commands;
/// running past the budget aborts the whole transaction with the gas code.
/// fee = gas_used * base_fee + tip, charged on success and abort alike.
struct GasSchedule {
    std::uint64_t base_fee = 1;  // fee units per gas unit (static, no dynamic adjustment)
    std::uint64_t min_cost = 1;  // floor on gas_used per transaction
    std::map<std::string, std::uint64_t> per_command_cost;

    static GasSchedule standard();
    std::uint64_t command_cost(const Command& cmd) const;
};

inline constexpr std::uint64_t kAbortCodeGas = 1;
inline constexpr std::uint64_t kAbortCodeType = 2;
inline constexpr std::uint64_t kAbortCodeAuth = 3;

}  // namespace duallane
