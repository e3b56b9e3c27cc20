// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duallane/committee.hpp"
#include "duallane/result.hpp"

namespace duallane {

struct NetworkConfig {
    std::uint64_t delay_min = 10;  // one-way, in ticks
    std::uint64_t delay_max = 50;
    double drop_prob = 0.0;
    std::uint32_t max_retries = 10;  // after this many drops delivery is forced
    std::uint64_t retry_interval = 60;
};

struct CrashSpec {
    ValidatorId validator = 0;
    std::uint64_t crash_at = 0;
    std::optional<std::uint64_t> recover_at;
};

struct ByzantineSpec {
    ValidatorId validator = 0;
    bool sign_conflicting = false;
    bool corrupt_checkpoint_sigs = false;
};

enum class WorkloadKind { owned, shared, shared_read, ptb, mixed };

enum class ClientKind { normal, equivocator, crasher, resubmitter };

/// Per-validator routing of an equivocating pair: which of the two
/// conflicting transactions a validator receives, and in which order.
enum class EquivRoute : std::uint8_t { first_only = 0, second_only = 1, first_then_second = 2,
                                       second_then_first = 3, neither = 4 };

struct ClientSpec {
    ClientKind kind = ClientKind::normal;
    std::vector<EquivRoute> split;      // equivocator: one entry per validator
    std::uint32_t submit_copies = 1;    // crasher: how many validators get the certificate
};

struct WorkloadConfig {
    std::uint32_t clients = 1;
    std::uint32_t txs_per_client = 1;
    WorkloadKind kind = WorkloadKind::owned;
    std::uint64_t interval = 200;  // ticks between a settlement and the next submission
    std::uint32_t ptb_size = 10;
    std::vector<ClientSpec> behaviors;  // by client index; missing entries are normal
};

struct EpochConfig {
    std::uint64_t checkpoints_before_change = 8;  // S
    Stake min_stake = 1;                          // T
    std::uint32_t epochs = 1;                     // epochs the run is allowed to span
};

struct Scenario {
    std::uint64_t seed = 1;
    std::uint32_t validators = 4;
    std::vector<Stake> stakes;  // empty = equal stake 1
    NetworkConfig network;
    std::uint64_t commit_interval = 120;  // sequencer batching period
    EpochConfig epoch;
    std::vector<CrashSpec> crashes;
    std::vector<ByzantineSpec> byzantine;
    WorkloadConfig workload;
    std::uint64_t duration = 60000;

    Committee genesis_committee() const;
};

Result<Scenario> scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);
Result<Scenario> load_scenario_file(const std::string& path);

}  // namespace duallane
