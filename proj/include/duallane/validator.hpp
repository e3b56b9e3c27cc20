// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <mutex>
#include <optional>
#include <set>

#include "duallane/checkpoint.hpp"
#include "duallane/execution.hpp"
#include "duallane/store.hpp"
#include "duallane/trace.hpp"

namespace duallane {

/// Thrown by the test-only crash hook: the validator lost power before the
/// pending atomic batch committed. The harness catches it and marks the
/// validator crashed; no partial write is ever visible.
struct CrashInjected {};

struct CertRecord {
    TxCert cert;
    EffSign eff_sign;
};

struct CertOutcome {
    enum class Kind { executed, forwarded };
    Kind kind = Kind::executed;
    std::optional<EffSign> eff_sign;
};

/// Side effects the validator pushes outward: scheduling certificates for
/// sequencing, checkpoint signatures, execution notifications and trace
/// records. All optional; unset hooks are no-ops.
struct ValidatorHooks {
    std::function<void(const TxCert&)> submit_cert;
    std::function<void(const CommitSignal&)> submit_signal;
    std::function<void(const TxCert&, const EffSign&)> on_executed;
    TraceSink trace;
};

/// Behavior switches for the fault harness. Byzantine strategies are limited
/// to double-signing and divergent checkpoint votes; refusal to respond is
/// modeled at the network layer.
struct ByzantineConfig {
    bool sign_conflicting = false;
    bool corrupt_checkpoint_sigs = false;
};

/// A validator: the five persistent tables plus epoch metadata, driven by
/// transactions and certificates from users and by the commit stream from
/// consensus. Handlers are deterministic given state and message.
class Validator {
  public:
    Validator(ValidatorId id, Committee committee, SecretKey key, const KeyBook* keys,
              GasSchedule gas, ValidatorHooks hooks);

    void load_genesis(const std::vector<Obj>& objects);

    ValidatorId id() const { return id_; }
    EpochId epoch() const { return epoch_; }
    const Committee& committee() const { return committee_; }
    bool paused() const { return paused_; }
    std::string actor_name() const { return "v" + std::to_string(id_); }

    /// Consistent-broadcast step: validity checks, per-key guards, then the
    /// write-once owned lock. Idempotent for the same transaction within an
    /// epoch.
    Result<TxSign> handle_tx(const Tx& tx);

    /// Certificate processing for user submissions. Owned-only certificates
    /// execute immediately; shared-object certificates are forwarded to
    /// consensus until their locks exist and they are next in schedule.
    /// `missing` (optional) receives the object keys the validator lacks.
    Result<CertOutcome> handle_cert(const TxCert& cert, std::vector<ObjKey>* missing = nullptr);

    /// Commit-stream consumption: shared-lock assignment (single logical
    /// task), execution of sequenced certificates, checkpoint construction
    /// and certification. Must be fed commits in sequence order.
    void handle_commit(const Commit& commit);

    /// Serves stored certificates to relayers.
    std::vector<TxCert> handle_sync_request(const std::vector<TxDigest>& digests) const;

    /// Assigns shared-object versions for a sequenced certificate. Exposed
    /// for tests; handle_commit calls it for every first-occurrence cert.
    void assign_shared_locks(const TxCert& cert);

    /// Epoch cutoff: stop locking owned objects for new user transactions
    /// (epoch-change votes stay admissible, the contract path must survive
    /// the pause).
    void pause_tx_locking();

    /// Stop-the-world switch to the next epoch: drops owned and shared
    /// locks, clears tombstones, rolls back executions absent from every
    /// checkpoint of the closing epoch, rebuilds the owned-lock table from
    /// the live state.
    void epoch_transition(const Committee& next);

    // Reconfiguration driving (the validator acting as a client of the
    // epoch-change contract): transactions it wants certified, built
    // deterministically. The simulation actor drains and drives them. Each
    // vote kind burns its own gas coin so an in-flight vote never locks the
    // next one out.
    void configure_reconfig_agent(ObjId contract_id, std::array<ObjId, 4> vote_coins,
                                  Stake next_epoch_stake);
    std::vector<Tx> drain_vote_intents();

    /// Contract state as executed locally (nullopt before genesis).
    std::optional<ReconfigContract> contract_state() const;
    /// Set when the locally executed contract has completed a handover and
    /// this validator has not yet transitioned.
    bool handover_complete() const;
    /// Committee for the next epoch as recorded by the contract.
    Committee next_committee() const;

    // Inspection for tests, trace checks and synchronization.
    const ObjectStore& objdb() const { return objdb_; }
    std::optional<TxSign> owned_lock(const ObjKey& key) const;
    bool has_owned_lock_entry(const ObjKey& key) const;
    std::optional<Version> shared_lock(const TxDigest& digest, const ObjId& id) const;
    std::optional<Version> next_shared_lock(const ObjId& id) const;
    const std::map<std::pair<TxDigest, ObjId>, Version>& shared_lock_map() const {
        return shared_lock_;
    }
    std::optional<EffSign> executed_effects(const TxDigest& digest) const;
    const std::map<TxDigest, CertRecord>& cert_store() const { return ct_; }
    const std::set<TxDigest>& pending_checkpoint() const { return pending_checkpoint_; }
    const CheckpointBuilder& builder() const { return builder_; }
    const CheckpointCertifier& certifier() const { return certifier_; }
    std::uint64_t next_commit_seq() const { return next_commit_seq_; }
    Digest state_digest() const { return objdb_.state_digest(); }
    std::uint64_t executions() const { return executions_; }

    // Fault harness.
    void set_byzantine(ByzantineConfig cfg) { byz_ = cfg; }
    const ByzantineConfig& byzantine() const { return byz_; }
    /// Drops the next atomic persist (state as if the validator lost power
    /// just before the batch committed).
    void inject_crash_before_persist() { crash_before_persist_ = true; }
    /// Clears volatile, non-persisted scratch state after a crash.
    void on_crash();

    void set_time_source(std::function<std::uint64_t()> now) { now_ = std::move(now); }

  private:
    struct LoadedInputs {
        std::vector<Obj> owned;
        std::vector<Obj> readonly;
        std::vector<Obj> shared;  // latest for checks; exec reloads at lock versions
        std::vector<ObjKey> missing;
    };

    Result<LoadedInputs> load_inputs(const Tx& tx, bool shared_at_latest) const;
    Result<CertOutcome> execute_cert(const TxCert& cert, std::vector<ObjKey>* missing,
                                     bool from_commit);
    void atomic_persist(const TxCert& cert, const EffSign& eff_sign, const ExecResult& result);
    std::optional<CheckpointBuilder::ExecInfo> builder_probe(const TxCert& cert);
    void assign_read_locks_for(const TxCert& cert);
    void maybe_emit_votes();
    std::optional<Tx> build_vote(Command cmd, const ObjId& coin_id);
    void emit(std::string kind, std::map<std::string, std::string> fields);
    std::uint64_t now() const { return now_ ? now_() : 0; }

    ValidatorId id_;
    EpochId epoch_ = 0;
    Committee committee_;
    SecretKey key_;
    const KeyBook* keys_;
    GasSchedule gas_;
    ValidatorHooks hooks_;
    ByzantineConfig byz_;
    std::function<std::uint64_t()> now_;

    // Persistent tables.
    std::map<ObjKey, std::optional<TxSign>> owned_lock_;
    std::map<std::pair<TxDigest, ObjId>, Version> shared_lock_;
    std::map<ObjId, Version> next_shared_lock_;
    std::map<TxDigest, CertRecord> ct_;
    ObjectStore objdb_;
    std::set<TxDigest> pending_checkpoint_;
    bool paused_ = false;
    std::uint64_t next_commit_seq_ = 0;
    CheckpointBuilder builder_{0};
    CheckpointCertifier certifier_{Committee::equal_stake(0, 1)};

    struct UndoRecord {
        TxDigest digest;
        std::vector<ObjKey> written_keys;
        std::vector<std::pair<ObjId, std::optional<Version>>> prev_latest;
    };
    std::vector<UndoRecord> undo_log_;

    // Per-key guards for concurrent transaction processing (check 1.3).
    // Acquired in sorted key order; the table mutex only protects the map.
    std::mutex guard_mutex_;
    std::set<ObjKey> guarded_;

    // Reconfiguration agent state (rebuilt from the contract on recovery).
    ObjId contract_id_;
    std::array<ObjId, 4> vote_coins_{};
    Stake next_epoch_stake_ = 0;
    bool participates_next_epoch_ = false;
    std::vector<Tx> vote_intents_;
    std::set<std::string> votes_sent_;  // per-epoch vote kinds already emitted

    bool crash_before_persist_ = false;
    std::uint64_t executions_ = 0;
};

/// RAII guard set over a sorted list of object keys.
class KeyGuards {
  public:
    KeyGuards() = default;
    KeyGuards(std::mutex& table_mutex, std::set<ObjKey>& table, std::vector<ObjKey> keys);
    ~KeyGuards();
    KeyGuards(const KeyGuards&) = delete;
    KeyGuards& operator=(const KeyGuards&) = delete;
    KeyGuards(KeyGuards&& other) noexcept;
    bool acquired() const { return acquired_; }

  private:
    std::mutex* mutex_ = nullptr;
    std::set<ObjKey>* table_ = nullptr;
    std::vector<ObjKey> keys_;
    bool acquired_ = false;
};

}  // namespace duallane
