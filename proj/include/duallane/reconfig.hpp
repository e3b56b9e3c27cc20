// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>

#include "duallane/committee.hpp"
#include "duallane/object.hpp"

namespace duallane {

/// Epoch-change contract, run as a distinguished shared object through the
/// ordinary shared-object path so its state transitions inherit consensus
/// agreement. Four phases per cycle:
///   Register      new validators stake in, until S checkpoints exist
///   Ready         new committee signals it has synchronized state
///   End-of-Epoch  old committee confirms its executions are all sequenced
///   Handover      committees swap after one extra checkpoint
enum class ReconfigPhase : std::uint8_t {
    registering = 0,
    ready = 1,
    end_of_epoch = 2,
    handover = 3,
};

const char* reconfig_phase_name(ReconfigPhase p);

struct ReconfigContract {
    std::uint64_t checkpoints_before_change = 8;  // S
    Stake min_stake = 1;                          // T
    EpochId epoch = 0;

    Stake total_old_stake = 0;
    Stake total_new_stake = 0;
    std::map<Address, Stake> old_keys;
    std::map<Address, Stake> new_keys;

    std::uint64_t epoch_edge = 0;  // checkpoint seq recorded at End-of-Epoch quorum
    ReconfigPhase phase = ReconfigPhase::registering;
    Stake stake = 0;  // accumulator, reset on every phase transition
    std::map<Address, bool> voted;  // dedup within the current phase

    bool operator==(const ReconfigContract&) const = default;
};

ReconfigContract make_genesis_contract(const std::map<Address, Stake>& genesis_committee,
                                       std::uint64_t checkpoints_before_change, Stake min_stake);

/// Step 1: candidate validators stake in. Silently ignored once the phase
/// has moved on or when the stake is below the minimum.
void reconfig_register(ReconfigContract& c, const Address& sender, Stake stake);

/// Step 2: a registered next-epoch validator signals readiness. The first
/// call at or past checkpoint S flips Register to Ready; a quorum of new
/// stake flips to End-of-Epoch, the cutoff at which the old committee stops
/// locking objects.
void reconfig_ready(ReconfigContract& c, const Address& sender,
                    std::uint64_t latest_checkpoint_seq);

/// Step 3: an old-committee validator confirms everything it executed is
/// sequenced. At a quorum of old stake the contract enters Handover and
/// records the epoch edge. Callers must locally verify their pending
/// checkpoint set is empty before voting; the contract cannot check that.
void reconfig_end_of_epoch(ReconfigContract& c, const Address& sender,
                           std::uint64_t latest_checkpoint_seq);

/// Step 4: anyone may complete the swap once one checkpoint past the epoch
/// edge exists. Resets the contract for the next cycle and bumps the epoch.
void reconfig_handover(ReconfigContract& c, std::uint64_t latest_checkpoint_seq);

void encode_contract(Encoder& enc, const ReconfigContract& c);
ReconfigContract decode_contract(Decoder& dec);

Value contract_to_value(const ReconfigContract& c);
ReconfigContract contract_from_value(const Value& v);

}  // namespace duallane
