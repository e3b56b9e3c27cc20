// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <vector>

#include "duallane/gas.hpp"
#include "duallane/messages.hpp"
#include "duallane/reconfig.hpp"

namespace duallane {

struct TxValidity {
    bool valid = false;
    std::string reason;

    static TxValidity ok() { return {true, ""}; }
    static TxValidity fail(std::string why) { return {false, std::move(why)}; }
};

/// Static validity: authorization over the input objects, gas sufficiency,
/// structural shape of the command list. Never executes a command.
/// `owned_objs` are the owned inputs loaded at their exact references (gas
/// included); `lookup` resolves ownership chains and read-only/shared
/// presence by latest version.
TxValidity tx_valid(const Tx& tx, const std::vector<Obj>& owned_objs, const ObjLookup& lookup,
                    const KeyBook& keys, const GasSchedule& gas);

struct ExecInputs {
    std::vector<Obj> owned;     // exact versions, in tx.owned_inputs order
    std::vector<Obj> readonly;  // latest, in tx.readonly_inputs order
    std::vector<Obj> shared;    // at their locked versions, in tx.shared_inputs order
    ObjLookup lookup;           // latest-version lookup for dynamically loaded children
};

struct ExecContext {
    GasSchedule gas;
    /// Checkpoint sequence visible to epoch-vote commands. Deterministic
    /// across validators because checkpoints are built per consensus commit.
    std::uint64_t latest_checkpoint_seq = 0;
};

struct ExecResult {
    Effects effects;
    /// Objects to persist: created, mutated, unwrapped outputs at the new
    /// Lamport version. On abort this is the debited gas object plus shared
    /// write inputs advanced (contents unchanged) so their sequenced
    /// schedule stays live.
    std::vector<Obj> outputs;
    /// Owned-lock entries consumed by this execution (pre-state keys).
    std::vector<ObjKey> consumed_owned;
    /// Abort path only: owned inputs to unlock at their unchanged versions.
    std::vector<ObjKey> unlock_owned;
    Version new_version = 0;
};

/// Deterministic execution. Infallible as a function: command failures
/// produce abort effects (gas still charged, everything else unchanged);
/// inputs that do not match the transaction's references are a caller bug
/// and throw.
ExecResult exec(const Tx& tx, const ExecInputs& in, const ExecContext& ctx);

/// Resolves a child object not declared as an input to its parent chain.
/// The chain's root must be one of `root_inputs`; the returned chain is
/// root-first and every member is version-bumped by the caller.
Result<std::vector<Obj>> dynamic_child_load(const std::vector<Obj>& root_inputs,
                                            const ObjId& child, const ObjLookup& store);

}  // namespace duallane
