// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <memory>

#include "duallane/client.hpp"
#include "duallane/scenario.hpp"

namespace duallane {

struct ClientGenesis {
    SecretKey key;
    Address addr;
    ObjId gas;
    std::vector<ObjId> pool;
};

/// Deterministic genesis derived from the scenario: validator vote coins,
/// client gas coins and object pools, one shared counter and the
/// reconfiguration contract. Identical at every validator.
struct Genesis {
    std::vector<Obj> objects;
    ObjId contract_id;
    ObjId counter_id;
    Version counter_initial = 1;
    std::map<ValidatorId, std::array<ObjId, 4>> vote_coins;
    std::vector<ClientGenesis> clients;
};

Genesis make_genesis(const Scenario& sc, KeyBook& keys);

struct TxRecord {
    std::string client;
    std::string digest;  // hex; updated on cross-epoch renewal
    EpochId epoch = 0;
    std::uint64_t submit_time = 0;
    std::optional<std::uint64_t> finality;
    std::optional<std::uint64_t> settlement;
    std::uint64_t wave1_done = 0;
    std::uint64_t cert_sent = 0;
    std::uint32_t waves = 0;  // request waves actually issued; 2 = clean run
    bool shared = false;
    std::uint32_t ops = 1;
    std::string note;  // "equivocated", "crashed_after_cert", ...
};

struct Metrics {
    std::uint64_t duration = 0;
    std::uint64_t end_time = 0;
    std::vector<TxRecord> txs;
    std::uint64_t distinct_effcerts = 0;
    std::uint64_t settled_ops = 0;
    std::map<EpochId, std::uint64_t> checkpoints_per_epoch;
    std::map<EpochId, std::uint64_t> epoch_start_times;

    std::vector<double> latencies(bool shared, bool settlement) const;
    static double mean(const std::vector<double>& xs);
    static double percentile(std::vector<double> xs, double p);
    double certs_per_kilotick() const;
    std::map<std::string, std::string> to_kv() const;
};

struct RunReport {
    TraceLog trace;
    Metrics metrics;
    std::vector<CheckResult> checks;
    bool safety_ok = false;
    std::vector<std::string> correct_actors;
};

/// Single-threaded discrete-event simulation: validators, one logical
/// sequencer, clients and a lossy-but-eventually-reliable network. Events
/// are processed in (time, insertion) order; every random draw comes from a
/// per-link or per-actor stream derived from the scenario seed, so a given
/// (scenario, seed) pair yields a bit-identical trace.
class Simulation {
  public:
    explicit Simulation(Scenario sc);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const RunReport& run();

    // Post-run inspection.
    const Scenario& scenario() const;
    const Genesis& genesis() const;
    const KeyBook& keys() const;
    Validator& validator(ValidatorId id);
    std::uint32_t validator_count() const;
    std::uint64_t now() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: construct, run, and return the report.
RunReport run_scenario(const Scenario& sc);

}  // namespace duallane
