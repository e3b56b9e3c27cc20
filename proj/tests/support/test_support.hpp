// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <map>
#include <vector>

#include "duallane/client.hpp"
#include "duallane/simnet.hpp"

namespace duallane::test {

/// In-memory world for driving validators without the simulator: a key book,
/// one user, a handful of genesis objects and a plain map standing in for a
/// latest-version store in pure execution tests.
struct World {
    KeyBook keys;
    SecretKey user_key;
    Address user;
    SecretKey other_key;
    Address other;
    GasSchedule gas = GasSchedule::standard();
    std::map<ObjId, Obj> store;  // latest versions only
    std::uint64_t next_genesis = 0;

    World() {
        user_key = KeyBook::derive_key(42, "user");
        other_key = KeyBook::derive_key(42, "other");
        keys.add_user(user_key);
        keys.add_user(other_key);
        user = address_of_key(user_key);
        other = address_of_key(other_key);
    }

    ObjLookup lookup() {
        return [this](const ObjId& id) -> const Obj* {
            auto it = store.find(id);
            return it == store.end() ? nullptr : &it->second;
        };
    }

    Obj make_obj(const Address& owner, std::uint64_t value, Version version = 1) {
        Obj obj;
        obj.id = derive_object_id(TxDigest{}, next_genesis++);
        obj.version = version;
        obj.initial_version = version;
        obj.ownership = OwnedByAddress{owner};
        obj.contents = Value(value);
        store[obj.id] = obj;
        return obj;
    }

    Obj make_child(const ObjId& parent, std::uint64_t value, Version version = 1) {
        Obj obj;
        obj.id = derive_object_id(TxDigest{}, next_genesis++);
        obj.version = version;
        obj.initial_version = version;
        obj.ownership = OwnedByObject{parent};
        obj.contents = Value(value);
        store[obj.id] = obj;
        return obj;
    }

    Obj make_shared(std::uint64_t value, Version version = 1) {
        Obj obj;
        obj.id = derive_object_id(TxDigest{}, next_genesis++);
        obj.version = version;
        obj.initial_version = version;
        obj.ownership = SharedMutable{};
        obj.contents = Value(value);
        store[obj.id] = obj;
        return obj;
    }

    /// Signed single-command transaction over explicit inputs; gas first.
    Tx tx_of(Command cmd, const std::vector<Obj>& owned, const Obj& gas_obj,
             std::uint64_t budget = 200, std::uint64_t tip = 0, EpochId epoch = 0) {
        TxSpec spec;
        spec.epoch = epoch;
        spec.sender = user;
        spec.commands = {std::move(cmd)};
        spec.gas_ref = make_ref(gas_obj);
        for (const auto& o : owned) spec.owned_inputs.push_back(make_ref(o));
        spec.gas_budget = budget;
        spec.tip = tip;
        return build_tx(spec, user_key).value();
    }
};

/// Four equal-stake validators over a shared genesis plus a hand-cranked
/// sequencer: enough machinery to exercise the full certificate lifecycle
/// without the event-driven network.
struct Cluster {
    Scenario sc;
    KeyBook keys;
    Genesis gen;
    Committee committee;
    std::vector<std::unique_ptr<Validator>> validators;
    std::unique_ptr<Sequencer> sequencer;
    TraceLog trace;
    std::vector<TxCert> submitted;  // what validators scheduled for sequencing

    explicit Cluster(std::uint32_t n = 4, WorkloadKind kind = WorkloadKind::owned,
                     std::uint32_t clients = 2) {
        sc.validators = n;
        sc.workload.clients = clients;
        sc.workload.kind = kind;
        committee = sc.genesis_committee();
        gen = make_genesis(sc, keys);
        sequencer = std::make_unique<Sequencer>(committee, &keys, sc.commit_interval);
        for (std::uint32_t i = 0; i < n; ++i) {
            ValidatorHooks hooks;
            hooks.submit_cert = [this](const TxCert& cert) {
                submitted.push_back(cert);
                (void)sequencer->submit_cert(cert);
            };
            hooks.submit_signal = [this](const CommitSignal& s) {
                (void)sequencer->submit_signal(s);
            };
            hooks.trace = [this](TraceEvent ev) { trace.emit(std::move(ev)); };
            auto v = std::make_unique<Validator>(
                i, committee, KeyBook::derive_key(sc.seed, "validator/" + std::to_string(i)),
                &keys, GasSchedule::standard(), hooks);
            v->load_genesis(gen.objects);
            v->configure_reconfig_agent(gen.contract_id, gen.vote_coins.at(i), 0);
            validators.push_back(std::move(v));
        }
    }

    std::vector<Validator*> ptrs() {
        std::vector<Validator*> out;
        for (auto& v : validators) out.push_back(v.get());
        return out;
    }

    DirectClient client() { return DirectClient(ptrs(), committee, &keys); }

    const SecretKey& client_key(std::uint32_t c) const { return gen.clients.at(c).key; }
    const Address& client_addr(std::uint32_t c) const { return gen.clients.at(c).addr; }

    Obj genesis_obj(const ObjId& id) const {
        for (const auto& obj : gen.objects) {
            if (obj.id == id) return obj;
        }
        throw std::logic_error("no such genesis object");
    }

    ObjRef client_gas(std::uint32_t c) const { return make_ref(genesis_obj(gen.clients.at(c).gas)); }
    ObjRef client_pool(std::uint32_t c, std::size_t i) const {
        return make_ref(genesis_obj(gen.clients.at(c).pool.at(i)));
    }

    /// Cuts one commit and feeds it to every validator.
    Commit pump_one() {
        Commit commit = sequencer->cut();
        for (auto& v : validators) v->handle_commit(commit);
        return commit;
    }

    /// Cuts commits until no certificates have flowed for a few rounds.
    /// Checkpoint signals keep flowing forever by design (every commit yields
    /// a checkpoint), so they do not count against quiescence.
    void pump() {
        int quiet = 0;
        for (int i = 0; i < 96; ++i) {
            Commit c = pump_one();
            quiet = c.certs.empty() ? quiet + 1 : 0;
            if (quiet >= 3) return;
        }
        throw std::logic_error("cluster did not quiesce");
    }

    /// Owned transfer transaction for a client's pool object.
    Tx transfer_tx(std::uint32_t c, std::size_t pool_index, const Address& to,
                   EpochId epoch = 0) {
        TxSpec spec;
        spec.epoch = epoch;
        spec.sender = client_addr(c);
        const ObjRef obj = client_pool(c, pool_index);
        spec.commands = {TransferOwned{obj.id, to}};
        spec.owned_inputs = {obj};
        spec.gas_ref = client_gas(c);
        return build_tx(spec, client_key(c)).value();
    }

    /// Shared-counter increment transaction.
    Tx increment_tx(std::uint32_t c, EpochId epoch = 0) {
        TxSpec spec;
        spec.epoch = epoch;
        spec.sender = client_addr(c);
        spec.commands = {IncrementShared{gen.counter_id}};
        spec.shared_inputs = {SharedInput{gen.counter_id, gen.counter_initial}};
        spec.gas_ref = client_gas(c);
        return build_tx(spec, client_key(c)).value();
    }
};

}  // namespace duallane::test
