// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/reconfig.hpp"

namespace duallane {

const char* reconfig_phase_name(ReconfigPhase p) {
    switch (p) {
        case ReconfigPhase::registering: return "register";
        case ReconfigPhase::ready: return "ready";
        case ReconfigPhase::end_of_epoch: return "end_of_epoch";
        case ReconfigPhase::handover: return "handover";
    }
    return "unknown";
}

ReconfigContract make_genesis_contract(const std::map<Address, Stake>& genesis_committee,
                                       std::uint64_t checkpoints_before_change, Stake min_stake) {
    ReconfigContract c;
    c.checkpoints_before_change = checkpoints_before_change;
    c.min_stake = min_stake;
    c.old_keys = genesis_committee;
    for (const auto& [_, s] : genesis_committee) c.total_old_stake += s;
    return c;
}

void reconfig_register(ReconfigContract& c, const Address& sender, Stake stake) {
    if (c.phase != ReconfigPhase::registering) return;
    if (stake < c.min_stake) return;
    if (c.new_keys.contains(sender)) return;
    c.new_keys[sender] = stake;
    c.total_new_stake += stake;
}

void reconfig_ready(ReconfigContract& c, const Address& sender,
                    std::uint64_t latest_checkpoint_seq) {
    if (c.phase == ReconfigPhase::registering &&
        latest_checkpoint_seq >= c.checkpoints_before_change) {
        c.phase = ReconfigPhase::ready;
        c.stake = 0;
        c.voted.clear();
    }
    if (c.phase != ReconfigPhase::ready) return;
    auto it = c.new_keys.find(sender);
    if (it == c.new_keys.end()) return;
    if (c.voted[sender]) return;
    c.voted[sender] = true;
    c.stake += it->second;
    if (c.stake >= 2 * c.total_new_stake / 3 + 1) {
        // Cutoff: from this point the old committee stops locking objects.
        c.phase = ReconfigPhase::end_of_epoch;
        c.stake = 0;
        c.voted.clear();
    }
}

void reconfig_end_of_epoch(ReconfigContract& c, const Address& sender,
                           std::uint64_t latest_checkpoint_seq) {
    if (c.phase != ReconfigPhase::end_of_epoch) return;
    auto it = c.old_keys.find(sender);
    if (it == c.old_keys.end()) return;
    if (c.voted[sender]) return;
    c.voted[sender] = true;
    c.stake += it->second;
    if (c.stake >= 2 * c.total_old_stake / 3 + 1) {
        c.phase = ReconfigPhase::handover;
        c.stake = 0;
        c.voted.clear();
        c.epoch_edge = latest_checkpoint_seq;
    }
}

void reconfig_handover(ReconfigContract& c, std::uint64_t latest_checkpoint_seq) {
    if (c.phase != ReconfigPhase::handover) return;
    if (latest_checkpoint_seq < c.epoch_edge + 1) return;
    c.old_keys = c.new_keys;
    c.total_old_stake = c.total_new_stake;
    c.new_keys.clear();
    c.total_new_stake = 0;
    c.epoch_edge = 0;
    c.phase = ReconfigPhase::registering;
    c.stake = 0;
    c.voted.clear();
    c.epoch += 1;
}

void encode_contract(Encoder& enc, const ReconfigContract& c) {
    enc.u64(c.checkpoints_before_change);
    enc.u64(c.min_stake);
    enc.u64(c.epoch);
    enc.u64(c.total_old_stake);
    enc.u64(c.total_new_stake);
    auto keys = [&enc](const std::map<Address, Stake>& m) {
        enc.u32(static_cast<std::uint32_t>(m.size()));
        for (const auto& [addr, stake] : m) {
            enc.digest(addr.bytes);
            enc.u64(stake);
        }
    };
    keys(c.old_keys);
    keys(c.new_keys);
    enc.u64(c.epoch_edge);
    enc.u8(static_cast<std::uint8_t>(c.phase));
    enc.u64(c.stake);
    enc.u32(static_cast<std::uint32_t>(c.voted.size()));
    for (const auto& [addr, v] : c.voted) {
        enc.digest(addr.bytes);
        enc.u8(v ? 1 : 0);
    }
}

ReconfigContract decode_contract(Decoder& dec) {
    ReconfigContract c;
    c.checkpoints_before_change = dec.u64();
    c.min_stake = dec.u64();
    c.epoch = dec.u64();
    c.total_old_stake = dec.u64();
    c.total_new_stake = dec.u64();
    auto keys = [&dec]() {
        std::map<Address, Stake> m;
        std::uint32_t n = dec.u32();
        for (std::uint32_t i = 0; i < n; ++i) {
            Address a{dec.digest()};
            m[a] = dec.u64();
        }
        return m;
    };
    c.old_keys = keys();
    c.new_keys = keys();
    c.epoch_edge = dec.u64();
    c.phase = static_cast<ReconfigPhase>(dec.u8());
    c.stake = dec.u64();
    std::uint32_t n = dec.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        Address a{dec.digest()};
        c.voted[a] = dec.u8() != 0;
    }
    return c;
}

Value contract_to_value(const ReconfigContract& c) {
    Encoder enc;
    encode_contract(enc, c);
    return Value(enc.take());
}

ReconfigContract contract_from_value(const Value& v) {
    const Bytes& raw = std::get<Bytes>(v.v);
    Decoder dec(raw);
    return decode_contract(dec);
}

}  // namespace duallane
