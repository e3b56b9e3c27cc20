// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "duallane/reconfig.hpp"
#include "duallane/rng.hpp"
#include "test_support.hpp"

using namespace duallane;

namespace {

struct ContractFixture {
    std::map<Address, Stake> members;
    std::vector<Address> addrs;
    ReconfigContract c;

    ContractFixture(std::uint64_t s = 8, Stake t = 10) {
        for (int i = 0; i < 4; ++i) {
            Address a{sha256(Bytes{static_cast<std::uint8_t>(i)})};
            addrs.push_back(a);
            members[a] = 10;
        }
        c = make_genesis_contract(members, s, t);
    }

    void register_all() {
        for (const auto& a : addrs) reconfig_register(c, a, 10);
    }
};

}  // namespace

TEST_CASE("registration respects the minimum stake and the phase") {
    ContractFixture f(8, 10);
    SUBCASE("stake at the threshold registers") {
        reconfig_register(f.c, f.addrs[0], 10);
        CHECK(f.c.new_keys.contains(f.addrs[0]));
        CHECK(f.c.total_new_stake == 10);
    }
    SUBCASE("stake below the threshold is ignored") {
        reconfig_register(f.c, f.addrs[0], 9);
        CHECK(!f.c.new_keys.contains(f.addrs[0]));
    }
    SUBCASE("registration after the phase has moved on is ignored") {
        f.register_all();
        for (const auto& a : f.addrs) reconfig_ready(f.c, a, 8);
        REQUIRE(f.c.phase == ReconfigPhase::end_of_epoch);
        Address late{sha256(Bytes{99})};
        reconfig_register(f.c, late, 50);
        CHECK(!f.c.new_keys.contains(late));
    }
}

TEST_CASE("readiness flips phases at the checkpoint threshold and quorum") {
    ContractFixture f(8, 10);
    f.register_all();
    SUBCASE("ready before checkpoint S is ignored") {
        reconfig_ready(f.c, f.addrs[0], 7);
        CHECK(f.c.phase == ReconfigPhase::registering);
        CHECK(f.c.stake == 0);
    }
    SUBCASE("a non-registered sender is ignored") {
        Address stranger{sha256(Bytes{77})};
        reconfig_ready(f.c, stranger, 8);
        CHECK(f.c.phase == ReconfigPhase::ready);  // flip happened
        CHECK(f.c.stake == 0);                     // but no stake counted
    }
    SUBCASE("a quorum of new stake triggers the cutoff") {
        reconfig_ready(f.c, f.addrs[0], 8);
        reconfig_ready(f.c, f.addrs[1], 9);
        CHECK(f.c.phase == ReconfigPhase::ready);
        reconfig_ready(f.c, f.addrs[2], 9);  // 30 of 40 >= 2*40/3+1 = 27
        CHECK(f.c.phase == ReconfigPhase::end_of_epoch);
        CHECK(f.c.stake == 0);
    }
    SUBCASE("duplicate ready votes count once") {
        reconfig_ready(f.c, f.addrs[0], 8);
        reconfig_ready(f.c, f.addrs[0], 9);
        reconfig_ready(f.c, f.addrs[0], 9);
        CHECK(f.c.phase == ReconfigPhase::ready);
    }
}

TEST_CASE("end of epoch accumulates old stake and records the edge") {
    ContractFixture f(8, 10);
    f.register_all();
    for (const auto& a : f.addrs) reconfig_ready(f.c, a, 8);
    REQUIRE(f.c.phase == ReconfigPhase::end_of_epoch);

    reconfig_end_of_epoch(f.c, f.addrs[0], 9);
    reconfig_end_of_epoch(f.c, f.addrs[0], 9);  // duplicate, counted once
    reconfig_end_of_epoch(f.c, f.addrs[1], 9);
    CHECK(f.c.phase == ReconfigPhase::end_of_epoch);
    reconfig_end_of_epoch(f.c, f.addrs[2], 11);
    CHECK(f.c.phase == ReconfigPhase::handover);
    CHECK(f.c.epoch_edge == 11);
}

TEST_CASE("handover needs one extra checkpoint and resets the cycle") {
    ContractFixture f(8, 10);
    f.register_all();
    for (const auto& a : f.addrs) reconfig_ready(f.c, a, 8);
    for (const auto& a : f.addrs) reconfig_end_of_epoch(f.c, a, 10);
    REQUIRE(f.c.phase == ReconfigPhase::handover);
    REQUIRE(f.c.epoch_edge == 10);

    reconfig_handover(f.c, 10);  // needs edge + 1
    CHECK(f.c.phase == ReconfigPhase::handover);
    CHECK(f.c.epoch == 0);

    reconfig_handover(f.c, 11);
    CHECK(f.c.epoch == 1);
    CHECK(f.c.phase == ReconfigPhase::registering);
    CHECK(f.c.new_keys.empty());
    CHECK(f.c.total_old_stake == 40);
    CHECK(f.c.epoch_edge == 0);

    // Repeated calls after the reset are ignored until the next cycle.
    reconfig_handover(f.c, 12);
    CHECK(f.c.epoch == 1);
}

TEST_CASE("contract state round-trips through its canonical encoding") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        ContractFixture f(1 + rng.range(0, 15), 1 + rng.range(0, 20));
        for (const auto& a : f.addrs) {
            if (rng.chance(0.7)) reconfig_register(f.c, a, 10);
        }
        for (const auto& a : f.addrs) {
            if (rng.chance(0.5)) reconfig_ready(f.c, a, rng.range(0, 20));
        }
        const Value v = contract_to_value(f.c);
        CHECK(contract_from_value(v) == f.c);
    }
}

TEST_CASE("epoch transition drops locks, clears tombstones, rolls back strays") {
    test::Cluster c;
    DirectClient client = c.client();

    // Settle and checkpoint one transfer.
    auto eff = client.drive_owned_tx(c.transfer_tx(0, 0, c.client_addr(1)));
    REQUIRE(eff.ok());
    c.pump();

    // Delete an object (tombstone) and checkpoint it.
    TxSpec del_spec;
    del_spec.sender = c.client_addr(1);
    const ObjRef doomed = c.client_pool(1, 0);
    del_spec.commands = {DeleteObject{doomed.id}};
    del_spec.owned_inputs = {doomed};
    del_spec.gas_ref = c.client_gas(1);
    auto del_eff = client.drive_owned_tx(build_tx(del_spec, c.client_key(1)).value());
    REQUIRE(del_eff.ok());
    c.pump();

    // Execute one more transfer on validator 0 only; keep it out of every
    // checkpoint so the transition must roll it back. Client 1's gas moved
    // when the deletion settled, so reference its current version.
    ObjRef gas1;
    for (const auto& ref : del_eff.value().effects.mutated) {
        if (ref.id == c.gen.clients[1].gas) gas1 = ref;
    }
    Tx stray = [&] {
        TxSpec spec;
        spec.sender = c.client_addr(1);
        const ObjRef obj = c.client_pool(1, 1);
        spec.commands = {TransferOwned{obj.id, c.client_addr(0)}};
        spec.owned_inputs = {obj};
        spec.gas_ref = gas1;
        return build_tx(spec, c.client_key(1)).value();
    }();
    std::vector<TxSign> signs;
    for (auto& v : c.validators) signs.push_back(v->handle_tx(stray).value());
    auto stray_cert = aggregate_tx_cert(stray, signs, c.committee, c.keys);
    REQUIRE(stray_cert.ok());
    Validator& v0 = *c.validators[0];
    c.submitted.clear();
    {
        // Swallow the consensus submission so the certificate is never
        // sequenced (models a crash of the submission path).
        auto res = v0.handle_cert(stray_cert.value());
        REQUIRE(res.ok());
    }
    const ObjKey stray_key = stray.owned_inputs[0].key();
    REQUIRE(v0.executed_effects(stray_cert.value().digest()).has_value());

    // Equivocation leftovers: lock an object on v1 with a tx that never
    // certifies (client 0's gas moved when its first transfer settled).
    ObjRef gas0;
    for (const auto& ref : eff.value().effects.mutated) {
        if (ref.id == c.gen.clients[0].gas) gas0 = ref;
    }
    Tx orphan = [&] {
        TxSpec spec;
        spec.sender = c.client_addr(0);
        const ObjRef obj = c.client_pool(0, 1);
        spec.commands = {TransferOwned{obj.id, c.client_addr(1)}};
        spec.owned_inputs = {obj};
        spec.gas_ref = gas0;
        return build_tx(spec, c.client_key(0)).value();
    }();
    REQUIRE(c.validators[1]->handle_tx(orphan).ok());

    const Committee next = Committee::make(1, c.committee.members);
    std::vector<Digest> states;
    for (auto& v : c.validators) {
        v->epoch_transition(next);
        states.push_back(v->state_digest());
        CHECK(v->epoch() == 1);
    }
    // All correct validators converge to the same state: the stray execution
    // was rolled back on v0, the orphan lock dropped on v1.
    for (const auto& d : states) CHECK(d == states.front());
    CHECK(!v0.executed_effects(stray_cert.value().digest()).has_value());
    CHECK(v0.objdb().latest_version(stray_key.id) == stray_key.version);
    // Tombstones are gone.
    CHECK(!v0.objdb().is_tombstone(doomed.id));
    CHECK(v0.objdb().latest_version(doomed.id) == std::nullopt);
    // The rolled-back object is lockable again in the new epoch (renewal).
    Tx renewed = stray;
    renewed.epoch = 1;
    renewed = sign_tx(std::move(renewed), c.client_key(1));
    CHECK(v0.handle_tx(renewed).ok());
}
