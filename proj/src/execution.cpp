// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/execution.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace duallane {

namespace {

const char* kWrappedField = "wrapped";

/// Object ids referenced by a command that must name owned inputs (declared
/// or dynamically loadable children).
std::vector<ObjId> owned_targets(const Command& cmd) {
    std::vector<ObjId> out;
    std::visit(
        [&out](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, TransferOwned> || std::is_same_v<T, MutateOwned> ||
                          std::is_same_v<T, DeleteObject>) {
                out.push_back(c.obj);
            } else if constexpr (std::is_same_v<T, TransferToObject>) {
                out.push_back(c.child);
                out.push_back(c.parent);
            } else if constexpr (std::is_same_v<T, WrapObject>) {
                out.push_back(c.inner);
                out.push_back(c.outer);
            } else if constexpr (std::is_same_v<T, UnwrapObject>) {
                out.push_back(c.outer);
            }
        },
        cmd);
    return out;
}

std::vector<ObjId> shared_targets(const Command& cmd) {
    std::vector<ObjId> out;
    if (const auto* i = std::get_if<IncrementShared>(&cmd)) out.push_back(i->obj);
    if (const auto* r = std::get_if<ReadShared>(&cmd)) out.push_back(r->obj);
    return out;
}

}  // namespace

TxValidity tx_valid(const Tx& tx, const std::vector<Obj>& owned_objs, const ObjLookup& lookup,
                    const KeyBook& keys, const GasSchedule& gas) {
    // Structural shape.
    if (tx.kind.commands.empty()) return TxValidity::fail("no commands");
    if (!tx.kind.is_ptb && tx.kind.commands.size() != 1) {
        return TxValidity::fail("multiple commands outside a bundle");
    }
    if (tx.owned_inputs.empty()) return TxValidity::fail("no owned inputs");
    bool gas_listed = false;
    for (const auto& r : tx.owned_inputs) gas_listed |= (r == tx.gas_ref);
    if (!gas_listed) return TxValidity::fail("gas reference not among owned inputs");

    std::set<ObjId> seen;
    for (const auto& r : tx.owned_inputs) {
        if (!seen.insert(r.id).second) return TxValidity::fail("duplicate input object");
    }
    for (const auto& r : tx.readonly_inputs) {
        if (!seen.insert(r).second) return TxValidity::fail("duplicate input object");
    }
    for (const auto& s : tx.shared_inputs) {
        if (!seen.insert(s.id).second) return TxValidity::fail("duplicate input object");
    }

    if (!verify_user_sig(tx, keys)) return TxValidity::fail("bad user signature");

    if (owned_objs.size() != tx.owned_inputs.size()) {
        throw std::logic_error("tx_valid: owned objects do not match references");
    }

    // Authorization over each owned input.
    const Obj* gas_obj = nullptr;
    for (std::size_t i = 0; i < owned_objs.size(); ++i) {
        const Obj& obj = owned_objs[i];
        if (obj.id != tx.owned_inputs[i].id || obj.version != tx.owned_inputs[i].version) {
            throw std::logic_error("tx_valid: owned object loaded at wrong key");
        }
        if (obj.version == kTombstoneVersion) return TxValidity::fail("input is a tombstone");
        if (const auto* a = std::get_if<OwnedByAddress>(&obj.ownership)) {
            if (a->addr != tx.sender) return TxValidity::fail("unauthorized: not the owner");
        } else if (std::holds_alternative<OwnedByObject>(obj.ownership)) {
            auto root = resolve_root(obj.id, lookup);
            if (!root.ok()) return TxValidity::fail("unauthorized: " + root.error().detail);
            if (const auto* ra = std::get_if<OwnedByAddress>(&root.value().root)) {
                if (ra->addr != tx.sender) {
                    return TxValidity::fail("unauthorized: chain root not owned by sender");
                }
            } else if (std::holds_alternative<SharedMutable>(root.value().root)) {
                const ObjId root_id = root.value().chain.back();
                bool declared = false;
                for (const auto& s : tx.shared_inputs) declared |= (s.id == root_id);
                if (!declared) {
                    return TxValidity::fail("unauthorized: shared chain root not an input");
                }
            } else {
                return TxValidity::fail("unauthorized: immutable chain root");
            }
        } else {
            return TxValidity::fail("shared object listed as owned input");
        }
        if (tx.owned_inputs[i] == tx.gas_ref) gas_obj = &obj;
    }

    // Read-only inputs must exist and be immutable.
    for (const auto& id : tx.readonly_inputs) {
        const Obj* obj = lookup(id);
        if (obj == nullptr) return TxValidity::fail("unknown read-only input");
        if (!is_shared_immutable(obj->ownership)) {
            return TxValidity::fail("read-only input is not immutable");
        }
    }
    for (const auto& s : tx.shared_inputs) {
        const Obj* obj = lookup(s.id);
        if (obj == nullptr) return TxValidity::fail("unknown shared input");
        if (!is_shared_mutable(obj->ownership)) {
            return TxValidity::fail("shared input is not a shared object");
        }
    }

    // Gas sufficiency: the coin must cover the worst case the budget admits,
    // so execution can always charge gas_used * base_fee + tip exactly.
    if (gas_obj == nullptr) throw std::logic_error("tx_valid: gas object not loaded");
    if (!is_address_owned(gas_obj->ownership)) return TxValidity::fail("gas object not owned");
    if (!gas_obj->contents.is_u64()) return TxValidity::fail("gas object is not a coin");
    const std::uint64_t coin = gas_obj->contents.as_u64();
    if (tx.gas_budget < gas.min_cost) return TxValidity::fail("insufficient gas: budget too low");
    if (coin < gas.min_cost * gas.base_fee || coin < tx.gas_budget * gas.base_fee + tx.tip) {
        return TxValidity::fail("insufficient gas");
    }

    // Static command shape against the declared inputs.
    const std::set<ObjId> shared_ids = [&tx] {
        std::set<ObjId> s;
        for (const auto& in : tx.shared_inputs) s.insert(in.id);
        return s;
    }();
    const std::set<ObjId> readonly_ids(tx.readonly_inputs.begin(), tx.readonly_inputs.end());
    for (const auto& cmd : tx.kind.commands) {
        for (const auto& id : owned_targets(cmd)) {
            if (id == tx.gas_ref.id) return TxValidity::fail("gas object cannot be a target");
            if (readonly_ids.contains(id)) return TxValidity::fail("command mutates read-only input");
        }
        for (const auto& id : shared_targets(cmd)) {
            if (!shared_ids.contains(id)) return TxValidity::fail("shared target not declared");
        }
        if (std::holds_alternative<RegisterVote>(cmd) || std::holds_alternative<ReadyVote>(cmd) ||
            std::holds_alternative<EndOfEpochVote>(cmd) ||
            std::holds_alternative<HandoverCall>(cmd)) {
            if (tx.shared_inputs.size() != 1) {
                return TxValidity::fail("vote must name the reconfiguration contract");
            }
        }
    }
    return TxValidity::ok();
}

Result<std::vector<Obj>> dynamic_child_load(const std::vector<Obj>& root_inputs,
                                            const ObjId& child, const ObjLookup& store) {
    auto res = resolve_root(child, store);
    if (!res.ok()) return res.error();
    const ObjId root_id = res.value().chain.back();
    bool authorized = false;
    for (const auto& r : root_inputs) authorized |= (r.id == root_id);
    if (!authorized) {
        return Error{Errc::unauthorized, "chain root " + root_id.hex() + " is not an input"};
    }
    std::vector<Obj> chain;
    for (auto it = res.value().chain.rbegin(); it != res.value().chain.rend(); ++it) {
        chain.push_back(*store(*it));
    }
    return chain;
}

namespace {

/// Working state of one execution: objects by id plus the effect lists.
struct Workspace {
    Workspace(const Tx& tx_, const ExecInputs& in_, const ExecContext& ctx_)
        : tx(tx_), in(in_), ctx(ctx_), digest(tx_digest(tx_)) {}

    const Tx& tx;
    const ExecInputs& in;
    const ExecContext& ctx;
    TxDigest digest;
    Version v_new = 0;

    std::map<ObjId, Obj> objs;            // mutable working copies
    std::vector<ObjId> owned_order;       // declared owned, then dynamic chains
    std::set<ObjId> readonly_ids;
    std::set<ObjId> shared_write_ids;
    std::set<ObjId> shared_read_ids;
    std::set<ObjId> dynamic_ids;

    std::vector<Obj> created;
    std::set<ObjId> wrapped;
    std::set<ObjId> deleted;
    std::vector<ObjId> unwrapped;
    std::vector<Event> events;
    std::uint64_t create_counter = 0;

    struct CommandAbort {
        std::uint64_t code;
        std::string location;
    };
    std::optional<CommandAbort> abort;

    Obj& live(const ObjId& id) { return objs.at(id); }

    bool is_live_owned(const ObjId& id) const {
        return objs.contains(id) && !wrapped.contains(id) && !deleted.contains(id) &&
               !readonly_ids.contains(id) && !shared_write_ids.contains(id) &&
               !shared_read_ids.contains(id);
    }

    void fail(std::uint64_t code, const Command& cmd) {
        abort = CommandAbort{code, command_name(cmd)};
    }

    /// Brings an owned target into the workspace, loading its parent chain
    /// dynamically when it was not declared. Returns false on authorization
    /// or type failure (caller aborts the transaction).
    bool ensure_owned_target(const ObjId& id, const Command& cmd) {
        if (is_live_owned(id)) return true;
        if (objs.contains(id)) {
            fail(kAbortCodeType, cmd);  // shared, read-only, wrapped or deleted target
            return false;
        }
        if (!in.lookup) {
            fail(kAbortCodeAuth, cmd);
            return false;
        }
        std::vector<Obj> roots;
        roots.reserve(objs.size());
        for (const auto& [oid, obj] : objs) {
            if (!readonly_ids.contains(oid)) roots.push_back(obj);
        }
        auto chain = dynamic_child_load(roots, id, in.lookup);
        if (!chain.ok()) {
            fail(kAbortCodeAuth, cmd);
            return false;
        }
        for (const auto& member : chain.value()) {
            if (objs.contains(member.id)) continue;  // root already declared
            objs.emplace(member.id, member);
            owned_order.push_back(member.id);
            dynamic_ids.insert(member.id);
        }
        return true;
    }
};

bool run_command(Workspace& ws, const Command& cmd);

bool run_transfer_owned(Workspace& ws, const TransferOwned& c, const Command& cmd) {
    if (!ws.ensure_owned_target(c.obj, cmd)) return false;
    ws.live(c.obj).ownership = OwnedByAddress{c.recipient};
    return true;
}

bool run_transfer_to_object(Workspace& ws, const TransferToObject& c, const Command& cmd) {
    if (!ws.ensure_owned_target(c.child, cmd)) return false;
    if (!ws.ensure_owned_target(c.parent, cmd)) return false;
    if (c.child == c.parent) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    // Reparenting must not close a cycle: walk up from the new parent.
    ObjId cursor = c.parent;
    for (;;) {
        if (!ws.objs.contains(cursor)) break;
        const auto* link = std::get_if<OwnedByObject>(&ws.live(cursor).ownership);
        if (link == nullptr) break;
        if (link->parent == c.child) {
            ws.fail(kAbortCodeType, cmd);
            return false;
        }
        cursor = link->parent;
    }
    ws.live(c.child).ownership = OwnedByObject{c.parent};
    return true;
}

bool run_create(Workspace& ws, const Value& contents, const Ownership& ownership) {
    Obj obj;
    obj.id = derive_object_id(ws.digest, ws.create_counter++);
    obj.version = ws.v_new;
    obj.initial_version = ws.v_new;
    obj.ownership = ownership;
    obj.contents = contents;
    obj.parent_tx = ws.digest;
    ws.created.push_back(std::move(obj));
    return true;
}

bool run_mutate_owned(Workspace& ws, const MutateOwned& c, const Command& cmd) {
    if (!ws.ensure_owned_target(c.obj, cmd)) return false;
    ws.live(c.obj).contents = c.new_contents;
    return true;
}

bool run_wrap(Workspace& ws, const WrapObject& c, const Command& cmd) {
    if (!ws.ensure_owned_target(c.inner, cmd)) return false;
    if (!ws.ensure_owned_target(c.outer, cmd)) return false;
    if (c.inner == c.outer) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    Obj& outer = ws.live(c.outer);
    Value::Record rec;
    if (std::holds_alternative<Value::Record>(outer.contents.v)) {
        rec = std::get<Value::Record>(outer.contents.v);
    } else {
        rec.fields.emplace_back("contents", outer.contents);
    }
    for (const auto& [name, _] : rec.fields) {
        if (name == kWrappedField) {
            ws.fail(kAbortCodeType, cmd);  // single wrap slot
            return false;
        }
    }
    // The embedded copy keeps its pre-wrap version; it is re-versioned when
    // unwrapped.
    Obj inner_copy = ws.live(c.inner);
    rec.fields.emplace_back(kWrappedField, Value(std::make_shared<const Obj>(inner_copy)));
    std::sort(rec.fields.begin(), rec.fields.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    outer.contents = Value(std::move(rec));
    ws.wrapped.insert(c.inner);
    return true;
}

bool run_unwrap(Workspace& ws, const UnwrapObject& c, const Command& cmd) {
    if (!ws.ensure_owned_target(c.outer, cmd)) return false;
    Obj& outer = ws.live(c.outer);
    auto* rec = std::get_if<Value::Record>(&outer.contents.v);
    if (rec == nullptr) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    auto it = std::find_if(rec->fields.begin(), rec->fields.end(),
                           [](const auto& f) { return f.first == kWrappedField; });
    if (it == rec->fields.end() || !it->second.is_wrapped()) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    Obj inner = it->second.wrapped();
    rec->fields.erase(it);
    inner.ownership = OwnedByAddress{ws.tx.sender};
    // Wrapped and unwrapped within the same transaction collapses to a plain
    // mutation; otherwise the object re-emerges at the transaction's Lamport
    // version, strictly above any version it held before.
    const bool wrapped_here = ws.wrapped.erase(inner.id) > 0;
    if (wrapped_here) {
        inner.version = ws.objs.at(inner.id).version;
        ws.objs.insert_or_assign(inner.id, inner);
        return true;
    }
    ws.objs.insert_or_assign(inner.id, inner);
    if (std::find(ws.owned_order.begin(), ws.owned_order.end(), inner.id) ==
        ws.owned_order.end()) {
        ws.owned_order.push_back(inner.id);
    }
    ws.unwrapped.push_back(inner.id);
    return true;
}

bool run_delete(Workspace& ws, const DeleteObject& c, const Command& cmd) {
    if (!ws.ensure_owned_target(c.obj, cmd)) return false;
    ws.deleted.insert(c.obj);
    return true;
}

bool run_increment(Workspace& ws, const IncrementShared& c, const Command& cmd) {
    if (!ws.shared_write_ids.contains(c.obj)) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    Obj& obj = ws.live(c.obj);
    if (!obj.contents.is_u64()) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    const std::uint64_t next = obj.contents.as_u64() + 1;
    obj.contents = Value(next);
    Encoder enc;
    enc.u64(next);
    ws.events.push_back(Event{"counter", enc.take()});
    return true;
}

bool run_read_shared(Workspace& ws, const ReadShared& c, const Command& cmd) {
    if (!ws.shared_read_ids.contains(c.obj) && !ws.shared_write_ids.contains(c.obj)) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    return true;  // reads have no effect beyond the dependency edge
}

bool run_vote(Workspace& ws, const Command& cmd) {
    if (ws.tx.shared_inputs.size() != 1) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    const ObjId contract_id = ws.tx.shared_inputs.front().id;
    Obj& obj = ws.live(contract_id);
    ReconfigContract contract;
    try {
        contract = contract_from_value(obj.contents);
    } catch (const std::exception&) {
        ws.fail(kAbortCodeType, cmd);
        return false;
    }
    if (const auto* reg = std::get_if<RegisterVote>(&cmd)) {
        reconfig_register(contract, ws.tx.sender, reg->stake);
    } else if (std::holds_alternative<ReadyVote>(cmd)) {
        reconfig_ready(contract, ws.tx.sender, ws.ctx.latest_checkpoint_seq);
    } else if (std::holds_alternative<EndOfEpochVote>(cmd)) {
        reconfig_end_of_epoch(contract, ws.tx.sender, ws.ctx.latest_checkpoint_seq);
    } else {
        reconfig_handover(contract, ws.ctx.latest_checkpoint_seq);
    }
    obj.contents = contract_to_value(contract);
    return true;
}

bool run_command(Workspace& ws, const Command& cmd) {
    if (const auto* c = std::get_if<TransferOwned>(&cmd)) return run_transfer_owned(ws, *c, cmd);
    if (const auto* c = std::get_if<TransferToObject>(&cmd)) {
        return run_transfer_to_object(ws, *c, cmd);
    }
    if (const auto* c = std::get_if<CreateOwned>(&cmd)) {
        return run_create(ws, c->contents, OwnedByAddress{c->recipient});
    }
    if (const auto* c = std::get_if<CreateShared>(&cmd)) {
        return run_create(ws, c->contents, SharedMutable{});
    }
    if (const auto* c = std::get_if<MutateOwned>(&cmd)) return run_mutate_owned(ws, *c, cmd);
    if (const auto* c = std::get_if<WrapObject>(&cmd)) return run_wrap(ws, *c, cmd);
    if (const auto* c = std::get_if<UnwrapObject>(&cmd)) return run_unwrap(ws, *c, cmd);
    if (const auto* c = std::get_if<DeleteObject>(&cmd)) return run_delete(ws, *c, cmd);
    if (const auto* c = std::get_if<IncrementShared>(&cmd)) return run_increment(ws, *c, cmd);
    if (const auto* c = std::get_if<ReadShared>(&cmd)) return run_read_shared(ws, *c, cmd);
    if (const auto* c = std::get_if<AbortWith>(&cmd)) {
        ws.abort = Workspace::CommandAbort{c->code, command_name(cmd)};
        return false;
    }
    return run_vote(ws, cmd);
}

std::vector<TxDigest> collect_dependencies(const Tx& tx, const Workspace& ws,
                                           const ExecInputs& in) {
    std::vector<TxDigest> deps;
    std::set<ObjId> counted;
    auto add = [&](const ObjId& id, const TxDigest& parent) {
        if (counted.insert(id).second) deps.push_back(parent);
    };
    for (std::size_t i = 0; i < tx.owned_inputs.size(); ++i) {
        add(tx.owned_inputs[i].id, in.owned[i].parent_tx);
    }
    for (std::size_t i = 0; i < tx.readonly_inputs.size(); ++i) {
        add(tx.readonly_inputs[i], in.readonly[i].parent_tx);
    }
    for (std::size_t i = 0; i < tx.shared_inputs.size(); ++i) {
        add(tx.shared_inputs[i].id, in.shared[i].parent_tx);
    }
    for (const auto& id : ws.owned_order) {
        if (ws.dynamic_ids.contains(id)) add(id, ws.objs.at(id).parent_tx);
    }
    return deps;
}

}  // namespace

ExecResult exec(const Tx& tx, const ExecInputs& in, const ExecContext& ctx) {
    if (in.owned.size() != tx.owned_inputs.size() ||
        in.readonly.size() != tx.readonly_inputs.size() ||
        in.shared.size() != tx.shared_inputs.size()) {
        throw std::invalid_argument("exec: inputs do not match transaction references");
    }
    for (std::size_t i = 0; i < in.owned.size(); ++i) {
        if (in.owned[i].id != tx.owned_inputs[i].id ||
            in.owned[i].version != tx.owned_inputs[i].version) {
            throw std::invalid_argument("exec: owned input at wrong version");
        }
    }
    for (std::size_t i = 0; i < in.shared.size(); ++i) {
        if (in.shared[i].id != tx.shared_inputs[i].id) {
            throw std::invalid_argument("exec: shared input mismatch");
        }
    }

    Workspace ws(tx, in, ctx);

    // Lamport timestamp over the owned and shared inputs. Dynamically loaded
    // children never exceed their root's version, so this dominates them too.
    std::vector<Version> versions;
    for (const auto& o : in.owned) versions.push_back(o.version);
    for (const auto& s : in.shared) versions.push_back(s.version);
    ws.v_new = lamport_version(versions);

    const SharedAccess access = shared_access(tx);
    for (std::size_t i = 0; i < in.owned.size(); ++i) {
        ws.objs.emplace(in.owned[i].id, in.owned[i]);
        ws.owned_order.push_back(in.owned[i].id);
    }
    for (const auto& o : in.readonly) {
        ws.objs.emplace(o.id, o);
        ws.readonly_ids.insert(o.id);
    }
    for (const auto& s : in.shared) {
        ws.objs.emplace(s.id, s);
        if (std::find(access.writes.begin(), access.writes.end(), s.id) != access.writes.end()) {
            ws.shared_write_ids.insert(s.id);
        } else {
            ws.shared_read_ids.insert(s.id);
        }
    }

    // Metering walk: abort the whole transaction on gas exhaustion or the
    // first failing command.
    std::uint64_t used = 0;
    for (const auto& cmd : tx.kind.commands) {
        used += ctx.gas.command_cost(cmd);
        if (used > tx.gas_budget) {
            ws.abort = Workspace::CommandAbort{kAbortCodeGas, command_name(cmd)};
            used = tx.gas_budget;
            break;
        }
        if (!run_command(ws, cmd)) break;
    }
    const std::uint64_t gas_used = std::max(std::min(used, tx.gas_budget), ctx.gas.min_cost);
    const std::uint64_t fee = gas_used * ctx.gas.base_fee + tx.tip;

    ExecResult res;
    res.new_version = ws.v_new;
    Effects& eff = res.effects;
    eff.tx_digest = ws.digest;
    eff.gas_used = gas_used;
    eff.fee_charged = fee;
    eff.dependencies = collect_dependencies(tx, ws, in);

    std::size_t gas_index = tx.owned_inputs.size();
    for (std::size_t i = 0; i < tx.owned_inputs.size(); ++i) {
        if (tx.owned_inputs[i] == tx.gas_ref) gas_index = i;
    }
    if (gas_index == tx.owned_inputs.size()) {
        throw std::invalid_argument("exec: gas reference not among owned inputs");
    }
    const Obj& gas_in = in.owned[gas_index];
    if (!gas_in.contents.is_u64() || gas_in.contents.as_u64() < fee) {
        throw std::invalid_argument("exec: gas coin cannot cover the fee");
    }

    auto debited_gas = [&] {
        Obj g = gas_in;
        g.version = ws.v_new;
        g.contents = Value(gas_in.contents.as_u64() - fee);
        g.parent_tx = ws.digest;
        return g;
    };

    if (ws.abort) {
        // All-or-nothing: the fee is charged, every other input is returned
        // unchanged and reported for unlock.
        eff.status = ExecStatus::abort;
        eff.abort = AbortInfo{ws.abort->code, ws.abort->location};
        Obj gas_out = debited_gas();
        eff.mutated.push_back(make_ref(gas_out));
        res.outputs.push_back(std::move(gas_out));
        res.consumed_owned.push_back(gas_in.key());
        for (const auto& ref : tx.owned_inputs) {
            if (ref != tx.gas_ref) res.unlock_owned.push_back(ref.key());
        }
        // Shared write inputs advance (contents unchanged) so later
        // sequenced certificates on them stay executable.
        for (const auto& s : in.shared) {
            if (!ws.shared_write_ids.contains(s.id)) continue;
            Obj bumped = s;
            bumped.version = ws.v_new;
            bumped.parent_tx = ws.digest;
            res.outputs.push_back(std::move(bumped));
        }
        return res;
    }

    eff.status = ExecStatus::success;
    eff.events = ws.events;

    // Owned inputs (declared and dynamically loaded) are consumed and
    // re-emitted at the new version unless wrapped or deleted.
    for (const auto& id : ws.owned_order) {
        const Obj& pre = ws.objs.at(id);
        const bool was_unwrapped =
            std::find(ws.unwrapped.begin(), ws.unwrapped.end(), id) != ws.unwrapped.end();
        if (!was_unwrapped) res.consumed_owned.push_back(ObjKey{id, pre.version});
        if (ws.deleted.contains(id)) {
            eff.deleted.push_back(ObjKey{id, ws.v_new});
            continue;
        }
        if (ws.wrapped.contains(id)) {
            eff.wrapped.push_back(ObjKey{id, ws.v_new});
            continue;
        }
        Obj out = pre;
        out.version = ws.v_new;
        out.parent_tx = ws.digest;
        if (id == gas_in.id) out.contents = Value(gas_in.contents.as_u64() - fee);
        if (was_unwrapped) {
            eff.unwrapped.push_back(make_ref(out));
        } else {
            eff.mutated.push_back(make_ref(out));
        }
        res.outputs.push_back(std::move(out));
    }
    // Shared write inputs mutate at the new version; reads are untouched.
    for (const auto& s : in.shared) {
        if (!ws.shared_write_ids.contains(s.id)) continue;
        Obj out = ws.objs.at(s.id);
        out.version = ws.v_new;
        out.parent_tx = ws.digest;
        eff.mutated.push_back(make_ref(out));
        res.outputs.push_back(std::move(out));
    }
    for (const auto& created : ws.created) {
        eff.created.push_back(make_ref(created));
        res.outputs.push_back(created);
    }
    return res;
}

}  // namespace duallane
