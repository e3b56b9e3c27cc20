// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/tx.hpp"

#include <algorithm>
#include <set>

namespace duallane {

TxKind TxKind::single(Command cmd) {
    TxKind k;
    k.commands.push_back(std::move(cmd));
    return k;
}

TxKind TxKind::ptb(std::vector<Command> cmds) {
    if (cmds.empty()) throw std::logic_error("empty command bundle");
    for (const auto& c : cmds) {
        if (std::holds_alternative<RegisterVote>(c) || std::holds_alternative<ReadyVote>(c) ||
            std::holds_alternative<EndOfEpochVote>(c) || std::holds_alternative<HandoverCall>(c)) {
            throw std::logic_error("epoch votes cannot be bundled");
        }
    }
    TxKind k;
    k.commands = std::move(cmds);
    k.is_ptb = true;
    return k;
}

bool TxKind::is_vote() const {
    if (commands.size() != 1) return false;
    const Command& c = commands.front();
    return std::holds_alternative<RegisterVote>(c) || std::holds_alternative<ReadyVote>(c) ||
           std::holds_alternative<EndOfEpochVote>(c) || std::holds_alternative<HandoverCall>(c);
}

const char* command_name(const Command& cmd) {
    static const char* names[] = {
        "transfer_owned", "transfer_to_object", "create_owned", "create_shared",
        "mutate_owned",   "wrap",               "unwrap",       "delete",
        "increment",      "read_shared",        "abort_with",   "register_vote",
        "ready_vote",     "end_of_epoch_vote",  "handover_call"};
    return names[cmd.index()];
}

void encode_command(Encoder& enc, const Command& cmd) {
    enc.u8(static_cast<std::uint8_t>(cmd.index()));
    std::visit(
        [&enc](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, TransferOwned>) {
                enc.digest(c.obj.bytes);
                enc.digest(c.recipient.bytes);
            } else if constexpr (std::is_same_v<T, TransferToObject>) {
                enc.digest(c.child.bytes);
                enc.digest(c.parent.bytes);
            } else if constexpr (std::is_same_v<T, CreateOwned>) {
                encode_value(enc, c.contents);
                enc.digest(c.recipient.bytes);
            } else if constexpr (std::is_same_v<T, CreateShared>) {
                encode_value(enc, c.contents);
            } else if constexpr (std::is_same_v<T, MutateOwned>) {
                enc.digest(c.obj.bytes);
                encode_value(enc, c.new_contents);
            } else if constexpr (std::is_same_v<T, WrapObject>) {
                enc.digest(c.inner.bytes);
                enc.digest(c.outer.bytes);
            } else if constexpr (std::is_same_v<T, UnwrapObject>) {
                enc.digest(c.outer.bytes);
            } else if constexpr (std::is_same_v<T, DeleteObject>) {
                enc.digest(c.obj.bytes);
            } else if constexpr (std::is_same_v<T, IncrementShared>) {
                enc.digest(c.obj.bytes);
            } else if constexpr (std::is_same_v<T, ReadShared>) {
                enc.digest(c.obj.bytes);
            } else if constexpr (std::is_same_v<T, AbortWith>) {
                enc.u64(c.code);
            } else if constexpr (std::is_same_v<T, RegisterVote>) {
                enc.u64(c.stake);
            }
            // ReadyVote, EndOfEpochVote, HandoverCall carry no payload.
        },
        cmd);
}

void encode_tx_signing_payload(Encoder& enc, const Tx& tx) {
    enc.u64(tx.epoch);
    enc.digest(tx.sender.bytes);
    enc.u8(tx.kind.is_ptb ? 1 : 0);
    enc.u32(static_cast<std::uint32_t>(tx.kind.commands.size()));
    for (const auto& cmd : tx.kind.commands) encode_command(enc, cmd);
    enc.u32(static_cast<std::uint32_t>(tx.owned_inputs.size()));
    for (const auto& ref : tx.owned_inputs) encode_obj_ref(enc, ref);
    enc.u32(static_cast<std::uint32_t>(tx.readonly_inputs.size()));
    for (const auto& id : tx.readonly_inputs) enc.digest(id.bytes);
    enc.u32(static_cast<std::uint32_t>(tx.shared_inputs.size()));
    for (const auto& in : tx.shared_inputs) {
        enc.digest(in.id.bytes);
        enc.u64(in.initial_version);
    }
    encode_obj_ref(enc, tx.gas_ref);
    enc.u64(tx.gas_budget);
    enc.u64(tx.tip);
}

TxDigest tx_digest(const Tx& tx) {
    Encoder enc;
    enc.str("tx");
    encode_tx_signing_payload(enc, tx);
    return TxDigest{enc.finalize()};
}

Tx sign_tx(Tx tx, const SecretKey& sender_key) {
    tx.user_sig.sender = tx.sender;
    tx.user_sig.sig = attest(sender_key, tx_digest(tx).bytes.bytes);
    return tx;
}

bool verify_user_sig(const Tx& tx, const KeyBook& keys) {
    if (tx.user_sig.sender != tx.sender) return false;
    return keys.verify_user(tx.sender, tx_digest(tx).bytes.bytes, tx.user_sig.sig);
}

SharedAccess shared_access(const Tx& tx) {
    std::set<ObjId> declared;
    for (const auto& in : tx.shared_inputs) declared.insert(in.id);
    std::set<ObjId> reads;
    std::set<ObjId> writes;
    for (const auto& cmd : tx.kind.commands) {
        if (const auto* r = std::get_if<ReadShared>(&cmd)) {
            if (declared.contains(r->obj)) reads.insert(r->obj);
        } else if (const auto* i = std::get_if<IncrementShared>(&cmd)) {
            if (declared.contains(i->obj)) writes.insert(i->obj);
        } else if (std::holds_alternative<RegisterVote>(cmd) ||
                   std::holds_alternative<ReadyVote>(cmd) ||
                   std::holds_alternative<EndOfEpochVote>(cmd) ||
                   std::holds_alternative<HandoverCall>(cmd)) {
            for (const auto& in : tx.shared_inputs) writes.insert(in.id);
        } else {
            // Owned commands may still name a declared shared input (e.g. a
            // mutate targeting a shared object); treat those as writes.
            std::visit(
                [&](const auto& c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, TransferOwned> ||
                                  std::is_same_v<T, MutateOwned> ||
                                  std::is_same_v<T, DeleteObject>) {
                        if (declared.contains(c.obj)) writes.insert(c.obj);
                    }
                },
                cmd);
        }
    }
    SharedAccess out;
    for (const auto& in : tx.shared_inputs) {
        if (writes.contains(in.id)) {
            out.writes.push_back(in.id);
        } else if (reads.contains(in.id)) {
            out.reads.push_back(in.id);
        } else {
            // Declared but untouched by any command: schedule as a read so it
            // is never version-bumped without a mutation.
            out.reads.push_back(in.id);
        }
    }
    return out;
}

}  // namespace duallane
