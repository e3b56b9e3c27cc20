// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "duallane/execution.hpp"
#include "duallane/rng.hpp"
#include "test_support.hpp"

using namespace duallane;
using test::World;

namespace {

/// Loads execution inputs for a transaction straight out of the world store.
ExecInputs inputs_for(World& w, const Tx& tx) {
    ExecInputs in;
    for (const auto& ref : tx.owned_inputs) in.owned.push_back(w.store.at(ref.id));
    for (const auto& id : tx.readonly_inputs) in.readonly.push_back(w.store.at(id));
    for (const auto& s : tx.shared_inputs) in.shared.push_back(w.store.at(s.id));
    in.lookup = w.lookup();
    return in;
}

ExecResult run(World& w, const Tx& tx, std::uint64_t checkpoint_seq = 0) {
    return exec(tx, inputs_for(w, tx), ExecContext{w.gas, checkpoint_seq});
}

TxValidity validity(World& w, const Tx& tx) {
    std::vector<Obj> owned;
    for (const auto& ref : tx.owned_inputs) owned.push_back(w.store.at(ref.id));
    return tx_valid(tx, owned, w.lookup(), w.keys, w.gas);
}

}  // namespace

TEST_CASE("static validity") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj mine = w.make_obj(w.user, 1);
    const Obj theirs = w.make_obj(w.other, 1);

    SUBCASE("owner with sufficient gas is valid") {
        Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, gas);
        CHECK(validity(w, tx).valid);
    }
    SUBCASE("an input owned by someone else is unauthorized") {
        Tx tx = w.tx_of(TransferOwned{theirs.id, w.other}, {theirs}, gas);
        const TxValidity v = validity(w, tx);
        CHECK(!v.valid);
        CHECK(v.reason.find("unauthorized") != std::string::npos);
    }
    SUBCASE("an empty gas coin is insufficient") {
        const Obj broke = w.make_obj(w.user, 0);
        Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, broke);
        const TxValidity v = validity(w, tx);
        CHECK(!v.valid);
        CHECK(v.reason.find("insufficient gas") != std::string::npos);
    }
    SUBCASE("the coin must cover the worst case the budget admits") {
        const Obj small = w.make_obj(w.user, 100);
        Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, small, /*budget=*/200);
        CHECK(!validity(w, tx).valid);
    }
    SUBCASE("duplicate inputs are rejected") {
        TxSpec spec;
        spec.sender = w.user;
        spec.commands = {TransferOwned{mine.id, w.other}};
        spec.owned_inputs = {make_ref(mine), make_ref(mine)};
        spec.gas_ref = make_ref(gas);
        Tx tx = build_tx(spec, w.user_key).value();
        CHECK(!validity(w, tx).valid);
    }
    SUBCASE("a child input needs its root owned by the sender") {
        const Obj root = w.make_obj(w.user, 1);
        const Obj child = w.make_child(root.id, 2);
        Tx tx = w.tx_of(TransferOwned{child.id, w.other}, {child}, gas);
        CHECK(validity(w, tx).valid);
        w.store.at(root.id).ownership = OwnedByAddress{w.other};
        CHECK(!validity(w, tx).valid);
    }
    SUBCASE("a bad user signature is invalid") {
        Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, gas);
        tx.user_sig.sig.mac.bytes[0] ^= 1;
        CHECK(!validity(w, tx).valid);
    }
    SUBCASE("the gas object cannot be a command target") {
        Tx tx = w.tx_of(MutateOwned{gas.id, Value(std::uint64_t{1})}, {}, gas);
        CHECK(!validity(w, tx).valid);
    }
}

TEST_CASE("transfer bumps both objects to the Lamport version") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000, 2);
    const Obj mine = w.make_obj(w.user, 1, 3);
    Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, gas);
    ExecResult res = run(w, tx);
    CHECK(res.new_version == 4);  // 1 + max(3, 2)
    REQUIRE(res.outputs.size() == 2);
    for (const auto& out : res.outputs) CHECK(out.version == 4);
    bool found = false;
    for (const auto& out : res.outputs) {
        if (out.id == mine.id) {
            found = true;
            CHECK(std::get<OwnedByAddress>(out.ownership).addr == w.other);
        }
    }
    CHECK(found);
    CHECK(res.effects.status == ExecStatus::success);
    CHECK(res.effects.mutated.size() == 2);
    // One dependency per distinct input object.
    CHECK(res.effects.dependencies.size() == 2);
}

TEST_CASE("fee is gas_used * base_fee + tip") {
    World w;
    w.gas.base_fee = 2;
    w.gas.min_cost = 1;
    w.gas.per_command_cost["transfer_owned"] = 10;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj mine = w.make_obj(w.user, 1);
    Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, gas, /*budget=*/100, /*tip=*/3);
    ExecResult res = run(w, tx);
    CHECK(res.effects.gas_used == 10);
    CHECK(res.effects.fee_charged == 23);
    for (const auto& out : res.outputs) {
        if (out.id == gas.id) CHECK(out.contents.as_u64() == 100'000 - 23);
    }
}

TEST_CASE("abort charges gas, mutates only gas, and reports unlocks") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000, 1);
    const Obj mine = w.make_obj(w.user, 9, 5);
    Tx tx = w.tx_of(AbortWith{7}, {mine}, gas);
    ExecResult res = run(w, tx);
    CHECK(res.effects.is_abort());
    CHECK(res.effects.abort->code == 7);
    CHECK(res.effects.abort->location == "abort_with");
    REQUIRE(res.effects.mutated.size() == 1);
    CHECK(res.effects.mutated[0].id == gas.id);
    CHECK(res.effects.mutated[0].version == 6);  // 1 + max(5, 1)
    CHECK(res.effects.created.empty());
    CHECK(res.effects.wrapped.empty());
    CHECK(res.effects.unwrapped.empty());
    CHECK(res.effects.deleted.empty());
    CHECK(res.effects.events.empty());
    REQUIRE(res.unlock_owned.size() == 1);
    CHECK(res.unlock_owned[0] == ObjKey{mine.id, 5});
    const std::uint64_t expected_fee =
        std::max(w.gas.command_cost(AbortWith{7}), w.gas.min_cost) * w.gas.base_fee;
    CHECK(res.effects.fee_charged == expected_fee);
}

TEST_CASE("gas exhaustion aborts the whole bundle at the budget") {
    World w;
    const Obj gas = w.make_obj(w.user, 1'000'000);
    std::vector<Obj> pool;
    std::vector<Command> cmds;
    TxSpec spec;
    spec.sender = w.user;
    spec.gas_ref = make_ref(gas);
    for (int i = 0; i < 5; ++i) {
        pool.push_back(w.make_obj(w.user, 0));
        cmds.push_back(TransferOwned{pool.back().id, w.other});
        spec.owned_inputs.push_back(make_ref(pool.back()));
    }
    // Three transfers fit; the fourth exceeds the budget.
    spec.gas_budget = 3 * w.gas.command_cost(cmds[0]) + 1;
    Tx tx = make_ptb(spec, cmds, w.user_key).value();
    ExecResult res = run(w, tx);
    CHECK(res.effects.is_abort());
    CHECK(res.effects.abort->code == kAbortCodeGas);
    CHECK(res.effects.gas_used == tx.gas_budget);
    CHECK(res.effects.mutated.size() == 1);  // gas only
}

TEST_CASE("unwrapped objects re-emerge above every prior version") {
    World w;
    const Obj gas = w.make_obj(w.user, 1'000'000, 1);
    const Obj inner = w.make_obj(w.user, 5, 2);
    const Obj outer = w.make_obj(w.user, 0, 9);

    Tx wrap = w.tx_of(WrapObject{inner.id, outer.id}, {inner, outer}, gas);
    ExecResult wrapped = run(w, wrap);
    CHECK(!wrapped.effects.is_abort());
    REQUIRE(wrapped.effects.wrapped.size() == 1);
    CHECK(wrapped.effects.wrapped[0].id == inner.id);
    CHECK(wrapped.effects.wrapped[0].version == 10);  // 1 + max(2, 9, 1)
    // Inner is gone from the live outputs; outer carries it.
    for (const auto& out : wrapped.outputs) CHECK(out.id != inner.id);

    // Apply outputs and unwrap at a later version.
    for (const auto& out : wrapped.outputs) w.store[out.id] = out;
    w.store.erase(inner.id);
    Tx unwrap = w.tx_of(UnwrapObject{outer.id}, {w.store.at(outer.id)},
                        w.store.at(gas.id));
    ExecResult unwrapped = run(w, unwrap);
    CHECK(!unwrapped.effects.is_abort());
    REQUIRE(unwrapped.effects.unwrapped.size() == 1);
    CHECK(unwrapped.effects.unwrapped[0].id == inner.id);
    CHECK(unwrapped.effects.unwrapped[0].version == 11);
    CHECK(unwrapped.effects.unwrapped[0].version > inner.version);
}

TEST_CASE("unwrapping a non-wrapper aborts with the type code") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj plain = w.make_obj(w.user, 3);
    Tx tx = w.tx_of(UnwrapObject{plain.id}, {plain}, gas);
    ExecResult res = run(w, tx);
    CHECK(res.effects.is_abort());
    CHECK(res.effects.abort->code == kAbortCodeType);
}

TEST_CASE("deletion emits a tombstone record") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000, 4);
    const Obj doomed = w.make_obj(w.user, 1, 2);
    Tx tx = w.tx_of(DeleteObject{doomed.id}, {doomed}, gas);
    ExecResult res = run(w, tx);
    REQUIRE(res.effects.deleted.size() == 1);
    CHECK(res.effects.deleted[0] == ObjKey{doomed.id, 5});
    for (const auto& out : res.outputs) CHECK(out.id != doomed.id);
}

TEST_CASE("dynamic child loading") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj root = w.make_obj(w.user, 0, 7);
    const Obj child = w.make_child(root.id, 1, 3);
    const Obj grandchild = w.make_child(child.id, 2, 2);

    SUBCASE("the chain from a declared root is returned root-first") {
        auto chain = dynamic_child_load({root}, child.id, w.lookup());
        REQUIRE(chain.ok());
        REQUIRE(chain.value().size() == 2);
        CHECK(chain.value()[0].id == root.id);
        CHECK(chain.value()[1].id == child.id);
    }
    SUBCASE("a child of an undeclared root is unauthorized") {
        const Obj stranger = w.make_obj(w.other, 0);
        auto chain = dynamic_child_load({stranger}, child.id, w.lookup());
        REQUIRE(!chain.ok());
        CHECK(chain.code() == Errc::unauthorized);
    }
    SUBCASE("executing against a depth-three chain bumps every member") {
        Tx tx = w.tx_of(MutateOwned{grandchild.id, Value(std::uint64_t{99})}, {root}, gas);
        ExecResult res = run(w, tx);
        CHECK(!res.effects.is_abort());
        std::set<ObjId> bumped;
        for (const auto& out : res.outputs) {
            CHECK(out.version == res.new_version);
            bumped.insert(out.id);
        }
        CHECK(bumped.contains(root.id));
        CHECK(bumped.contains(child.id));
        CHECK(bumped.contains(grandchild.id));
        CHECK(res.new_version == 8);  // 1 + max(root 7, gas 1); chain is below the root
    }
    SUBCASE("a command on an unrelated object aborts with the auth code") {
        const Obj foreign_root = w.make_obj(w.other, 0);
        const Obj foreign_child = w.make_child(foreign_root.id, 0);
        Tx tx = w.tx_of(MutateOwned{foreign_child.id, Value(std::uint64_t{1})}, {root}, gas);
        ExecResult res = run(w, tx);
        CHECK(res.effects.is_abort());
        CHECK(res.effects.abort->code == kAbortCodeAuth);
    }
}

TEST_CASE("execution is deterministic byte for byte") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000, 3);
    const Obj a = w.make_obj(w.user, 1, 5);
    const Obj b = w.make_obj(w.user, 2, 2);
    TxSpec spec;
    spec.sender = w.user;
    spec.gas_ref = make_ref(gas);
    spec.owned_inputs = {make_ref(a), make_ref(b)};
    Tx tx = make_ptb(spec,
                     {TransferOwned{a.id, w.other}, MutateOwned{b.id, Value(std::uint64_t{8})}},
                     w.user_key)
                .value();
    ExecResult r1 = run(w, tx);
    ExecResult r2 = run(w, tx);
    CHECK(effects_digest(r1.effects) == effects_digest(r2.effects));
    REQUIRE(r1.outputs.size() == r2.outputs.size());
    for (std::size_t i = 0; i < r1.outputs.size(); ++i) {
        CHECK(obj_digest(r1.outputs[i]) == obj_digest(r2.outputs[i]));
    }
}

TEST_CASE("mismatched inputs are a caller bug, not an abort") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj mine = w.make_obj(w.user, 1);
    Tx tx = w.tx_of(TransferOwned{mine.id, w.other}, {mine}, gas);
    ExecInputs in = inputs_for(w, tx);
    in.owned[0].version += 1;
    CHECK_THROWS_AS(exec(tx, in, ExecContext{w.gas, 0}), std::invalid_argument);
}

TEST_CASE("shared counter increments emit an event") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj counter = w.make_shared(41, 6);
    TxSpec spec;
    spec.sender = w.user;
    spec.gas_ref = make_ref(gas);
    spec.commands = {IncrementShared{counter.id}};
    spec.shared_inputs = {SharedInput{counter.id, counter.initial_version}};
    Tx tx = build_tx(spec, w.user_key).value();
    ExecResult res = run(w, tx);
    CHECK(!res.effects.is_abort());
    REQUIRE(res.effects.events.size() == 1);
    CHECK(res.effects.events[0].type == "counter");
    Decoder dec(res.effects.events[0].payload);
    CHECK(dec.u64() == 42);
    bool counter_mutated = false;
    for (const auto& out : res.outputs) {
        if (out.id == counter.id) {
            counter_mutated = true;
            CHECK(out.contents.as_u64() == 42);
            CHECK(out.version == 7);
        }
    }
    CHECK(counter_mutated);
}

TEST_CASE("reads do not mutate the shared object") {
    World w;
    const Obj gas = w.make_obj(w.user, 100'000);
    const Obj counter = w.make_shared(41, 6);
    TxSpec spec;
    spec.sender = w.user;
    spec.gas_ref = make_ref(gas);
    spec.commands = {ReadShared{counter.id}};
    spec.shared_inputs = {SharedInput{counter.id, counter.initial_version}};
    Tx tx = build_tx(spec, w.user_key).value();
    ExecResult res = run(w, tx);
    CHECK(!res.effects.is_abort());
    REQUIRE(res.effects.mutated.size() == 1);  // the gas object only
    CHECK(res.effects.mutated[0].id == gas.id);
    for (const auto& out : res.outputs) CHECK(out.id != counter.id);
    // The counter still contributes a dependency edge.
    CHECK(res.effects.dependencies.size() == 2);
}

TEST_CASE("gas conservation and abort shape over randomized bundles") {
    Rng rng(2026);
    for (int trial = 0; trial < 60; ++trial) {
        World w;
        const std::uint64_t coin = 1'000'000;
        const Obj gas = w.make_obj(w.user, coin, 1 + rng.range(0, 5));
        TxSpec spec;
        spec.sender = w.user;
        spec.gas_ref = make_ref(gas);
        spec.gas_budget = 2000;
        spec.tip = rng.range(0, 9);
        std::vector<Command> cmds;
        const std::uint64_t n = 1 + rng.range(0, 5);
        const bool abort_somewhere = rng.chance(0.5);
        const std::uint64_t abort_at = rng.range(0, n - 1);
        for (std::uint64_t i = 0; i < n; ++i) {
            if (abort_somewhere && i == abort_at) {
                cmds.push_back(AbortWith{100 + i});
                continue;
            }
            const Obj obj = w.make_obj(w.user, 0, 1 + rng.range(0, 9));
            spec.owned_inputs.push_back(make_ref(obj));
            cmds.push_back(TransferOwned{obj.id, w.other});
        }
        Tx tx = make_ptb(spec, cmds, w.user_key).value();
        ExecResult res = run(w, tx);
        std::uint64_t gas_out = 0;
        for (const auto& out : res.outputs) {
            if (out.id == gas.id) gas_out = out.contents.as_u64();
        }
        CHECK(coin - gas_out == res.effects.gas_used * w.gas.base_fee + tx.tip);
        if (res.effects.is_abort()) {
            CHECK(res.effects.created.empty());
            CHECK(res.effects.wrapped.empty());
            CHECK(res.effects.unwrapped.empty());
            CHECK(res.effects.deleted.empty());
            CHECK(res.effects.mutated.size() == 1);
            CHECK(res.unlock_owned.size() == tx.owned_inputs.size() - 1);
        } else {
            for (const auto& out : res.outputs) CHECK(out.version == res.new_version);
        }
    }
}
