// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "duallane/committee.hpp"
#include "duallane/crypto.hpp"
#include "duallane/object.hpp"

namespace duallane {

// Built-in command set. TransferToObject makes the child object-owned by the
// parent; Wrap in-lines the inner object into the outer's contents; Unwrap
// re-emits it at a fresh Lamport version. The *Vote/HandoverCall commands
// drive the epoch-change contract, a distinguished shared object.
struct TransferOwned {
    ObjId obj;
    Address recipient;
};
struct TransferToObject {
    ObjId child;
    ObjId parent;
};
struct CreateOwned {
    Value contents;
    Address recipient;
};
struct CreateShared {
    Value contents;
};
struct MutateOwned {
    ObjId obj;
    Value new_contents;
};
struct WrapObject {
    ObjId inner;
    ObjId outer;
};
struct UnwrapObject {
    ObjId outer;
};
struct DeleteObject {
    ObjId obj;
};
struct IncrementShared {
    ObjId obj;
};
struct ReadShared {
    ObjId obj;
};
struct AbortWith {
    std::uint64_t code;
};
struct RegisterVote {
    Stake stake;
};
struct ReadyVote {};
struct EndOfEpochVote {};
struct HandoverCall {};

using Command =
    std::variant<TransferOwned, TransferToObject, CreateOwned, CreateShared, MutateOwned,
                 WrapObject, UnwrapObject, DeleteObject, IncrementShared, ReadShared,
                 AbortWith, RegisterVote, ReadyVote, EndOfEpochVote, HandoverCall>;

/// One command, or an atomically executed bundle of them. Bundles cannot
/// nest and cannot carry epoch-change votes.
struct TxKind {
    std::vector<Command> commands;
    bool is_ptb = false;

    static TxKind single(Command cmd);
    static TxKind ptb(std::vector<Command> cmds);
    bool is_vote() const;
};

const char* command_name(const Command& cmd);

struct SharedInput {
    ObjId id;
    Version initial_version = 1;
    auto operator<=>(const SharedInput&) const = default;
};

struct UserSig {
    Address sender;
    Attestation sig;
};

/// A signed command over explicit inputs. The gas reference is also listed
/// in owned_inputs: every valid transaction has at least one owned input.
struct Tx {
    EpochId epoch = 0;
    Address sender;
    TxKind kind;
    std::vector<ObjRef> owned_inputs;
    std::vector<ObjId> readonly_inputs;
    std::vector<SharedInput> shared_inputs;
    ObjRef gas_ref;
    std::uint64_t gas_budget = 0;
    std::uint64_t tip = 0;
    UserSig user_sig;
};

void encode_command(Encoder& enc, const Command& cmd);
/// Canonical encoding of everything except user_sig; the digest input.
void encode_tx_signing_payload(Encoder& enc, const Tx& tx);

/// Deterministic, signature-independent commitment to the transaction.
TxDigest tx_digest(const Tx& tx);

/// Signs (or re-signs) the transaction for its declared sender.
Tx sign_tx(Tx tx, const SecretKey& sender_key);
bool verify_user_sig(const Tx& tx, const KeyBook& keys);

/// Shared inputs the commands mutate vs. only read. ReadShared is the only
/// read-only access; everything else writes its shared targets.
struct SharedAccess {
    std::vector<ObjId> writes;
    std::vector<ObjId> reads;
};
SharedAccess shared_access(const Tx& tx);

}  // namespace duallane
