// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "duallane/scenario.hpp"
#include "duallane/store.hpp"
#include "duallane/trace.hpp"
#include "test_support.hpp"

using namespace duallane;

TEST_CASE("object store tracks latest versions and tombstones") {
    test::World w;
    Obj obj = w.make_obj(w.user, 1, 1);
    ObjectStore store;
    store.put(obj);
    CHECK(store.latest_version(obj.id) == 1);
    obj.version = 4;
    store.put(obj);
    CHECK(store.latest_version(obj.id) == 4);
    REQUIRE(store.latest_obj(obj.id) != nullptr);
    CHECK(store.get(ObjKey{obj.id, 1}) != nullptr);  // history retained

    store.set_latest(obj.id, kTombstoneVersion);
    CHECK(store.is_tombstone(obj.id));
    CHECK(store.latest_obj(obj.id) == nullptr);

    store.erase_latest(obj.id);
    CHECK(store.latest_version(obj.id) == std::nullopt);
}

TEST_CASE("state digests are sensitive to live state only") {
    test::World w;
    ObjectStore a;
    ObjectStore b;
    const Obj obj = w.make_obj(w.user, 5, 2);
    a.put(obj);
    b.put(obj);
    CHECK(a.state_digest() == b.state_digest());
    Obj newer = obj;
    newer.version = 3;
    a.put(newer);
    CHECK(a.state_digest() != b.state_digest());
    b.put(newer);
    CHECK(a.state_digest() == b.state_digest());
}

TEST_CASE("write batches apply atomically") {
    test::World w;
    ObjectStore store;
    const Obj obj = w.make_obj(w.user, 5, 2);
    WriteBatch batch;
    batch.put_obj(obj);
    batch.set_latest(obj.id, obj.version);
    CHECK(store.latest_version(obj.id) == std::nullopt);  // staged, not visible
    batch.apply(store);
    CHECK(store.latest_version(obj.id) == 2);
}

TEST_CASE("trace logs round-trip through JSONL") {
    TraceLog log;
    TraceEvent ev;
    ev.time = 42;
    ev.actor = "v0";
    ev.kind = "lock_granted";
    ev.fields = {{"obj", "ab12"}, {"digest", "cd34"}};
    log.emit(ev);
    ev.time = 43;
    ev.kind = "cert_formed";
    log.emit(ev);

    const std::string text = log.to_jsonl();
    TraceLog parsed = TraceLog::from_jsonl(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed.events()[0].time == 42);
    CHECK(parsed.events()[0].kind == "lock_granted");
    CHECK(parsed.events()[0].field("obj") == "ab12");
    CHECK(parsed.events()[1].time == 43);
    CHECK(parsed.to_jsonl() == text);

    CHECK_THROWS(TraceLog::from_jsonl("{\"kind\": \"x\"}\nnot json\n"));
}

TEST_CASE("safety checks flag hand-injected violations") {
    std::vector<TraceEvent> events;
    auto grant = [&](const std::string& v, const std::string& digest) {
        TraceEvent ev;
        ev.actor = v;
        ev.kind = "lock_granted";
        ev.fields = {{"epoch", "0"}, {"obj", "aa"},     {"obj_version", "1"},
                     {"digest", digest}, {"stake", "1"}};
        events.push_back(ev);
    };
    // Four grants for A and three for B on the same key: both reach quorum 3.
    for (const auto& v : {"v0", "v1", "v2", "v3"}) grant(v, "dA");
    grant("v1", "dB");
    grant("v2", "dB");
    grant("v3", "dB");
    auto checks = run_safety_checks(events, {"v0", "v1", "v2", "v3"}, 3);
    bool bcb_failed = false;
    for (const auto& c : checks) {
        if (c.name == "bcb_consistency") bcb_failed = !c.passed;
    }
    CHECK(bcb_failed);

    SUBCASE("conflicting formed certificates are flagged too") {
        std::vector<TraceEvent> evs;
        TraceEvent ev;
        ev.actor = "c0";
        ev.kind = "cert_formed";
        ev.fields = {{"epoch", "0"}, {"digest", "dA"}, {"owned_keys", "aa:1"}};
        evs.push_back(ev);
        ev.fields["digest"] = "dB";
        evs.push_back(ev);
        auto r = run_safety_checks(evs, {}, 3);
        bool failed = false;
        for (const auto& c : r) {
            if (c.name == "bcb_consistency") failed = !c.passed;
        }
        CHECK(failed);
    }
}

TEST_CASE("scenario configs round-trip and validate") {
    Scenario sc;
    sc.seed = 7;
    sc.validators = 4;
    sc.workload.kind = WorkloadKind::shared;
    sc.workload.clients = 8;
    sc.crashes.push_back(CrashSpec{2, 100, 500});
    sc.byzantine.push_back(ByzantineSpec{0, true, false});
    sc.workload.behaviors.push_back(
        ClientSpec{ClientKind::equivocator,
                   {EquivRoute::first_only, EquivRoute::second_only}, 1});
    auto parsed = scenario_from_json(scenario_to_json(sc));
    REQUIRE(parsed.ok());
    CHECK(parsed.value().seed == 7);
    CHECK(parsed.value().workload.kind == WorkloadKind::shared);
    CHECK(parsed.value().crashes.size() == 1);
    CHECK(parsed.value().crashes[0].recover_at == 500);
    CHECK(parsed.value().byzantine[0].sign_conflicting);
    CHECK(parsed.value().workload.behaviors[0].kind == ClientKind::equivocator);

    SUBCASE("malformed json is a config error") {
        auto res = scenario_from_json("{nope");
        REQUIRE(!res.ok());
        CHECK(res.code() == Errc::bad_config);
    }
    SUBCASE("bad delay window is a config error") {
        Scenario bad = sc;
        bad.network.delay_max = 1;
        bad.network.delay_min = 10;
        auto res = scenario_from_json(scenario_to_json(bad));
        REQUIRE(!res.ok());
        CHECK(res.code() == Errc::bad_config);
    }
    SUBCASE("crash of an unknown validator is a config error") {
        Scenario bad = sc;
        bad.crashes[0].validator = 17;
        auto res = scenario_from_json(scenario_to_json(bad));
        REQUIRE(!res.ok());
    }
}
