// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <optional>
#include <set>

#include "duallane/consensus.hpp"

namespace duallane {

/// Hash-chained, causally complete, canonically ordered record of one
/// consensus commit's certificates and their effects. Checkpoint sequences
/// are 1-based within an epoch (0 = no checkpoint yet); the digest chain
/// runs across epochs from an all-zero genesis.
struct Checkpoint {
    EpochId epoch = 0;
    std::uint64_t seq = 0;
    Digest prev_digest;
    std::vector<std::pair<TxDigest, Digest>> contents;  // (tx digest, effects digest)

    Digest digest() const;
};

void encode_checkpoint(Encoder& enc, const Checkpoint& cp);

struct CheckpointCert {
    EpochId epoch = 0;
    std::uint64_t seq = 0;
    Digest digest;
    std::vector<ValidatorId> signers;  // the first quorum, in sequenced order
};

/// Deterministic checkpoint construction from the commit stream. Candidates
/// are the first occurrence of each certificate; a candidate is includable
/// once all its dependencies are in prior checkpoints or included alongside
/// it, and deferred (with its dependents) otherwise. The includable set is
/// topologically sorted by the dependency relation, ties broken by ascending
/// transaction digest bytes.
class CheckpointBuilder {
  public:
    struct ExecInfo {
        Digest effects_digest;
        std::vector<TxDigest> deps;
    };
    /// Attempts local execution of a candidate; returns its effects digest
    /// and dependencies once executed, std::nullopt while inputs are missing.
    using ExecProbe = std::function<std::optional<ExecInfo>(const TxCert&)>;

    explicit CheckpointBuilder(EpochId epoch) : epoch_(epoch) {}

    /// Feeds the next commit; returns the emitted checkpoint, or nullopt when
    /// every candidate is still causally incomplete (the commit's checkpoint
    /// is deferred to a later commit).
    std::optional<Checkpoint> add_commit(const Commit& commit, const ExecProbe& probe);

    bool is_checkpointed(const TxDigest& digest) const { return checkpointed_.contains(digest); }
    std::uint64_t latest_seq() const { return next_seq_ - 1; }
    const Digest& prev_digest() const { return prev_digest_; }
    const std::vector<Checkpoint>& chain() const { return chain_; }
    std::size_t pending_candidates() const { return pending_order_.size(); }

    /// Resets per-epoch counters. The digest chain and the cumulative set of
    /// checkpointed transactions carry across epochs.
    void begin_epoch(EpochId epoch);

  private:
    EpochId epoch_;
    std::uint64_t next_seq_ = 1;
    Digest prev_digest_;
    std::set<TxDigest> checkpointed_;
    std::set<TxDigest> seen_;  // candidate dedup, per epoch
    std::map<TxDigest, TxCert> pending_;
    std::vector<TxDigest> pending_order_;  // insertion order
    std::map<TxDigest, ExecInfo> executed_;
    std::vector<Checkpoint> chain_;  // this epoch's checkpoints
};

/// Sequenced-signature tally for checkpoint certificates. Feed signals in
/// commit order; a certificate forms at quorum stake. A correct validator
/// whose local digest disagrees with a certified digest has hit a protocol
/// invariant violation, surfaced by `certify` returning the conflict.
class CheckpointCertifier {
  public:
    explicit CheckpointCertifier(Committee committee) : committee_(std::move(committee)) {}

    /// Returns a certificate when this signal completes a quorum.
    std::optional<CheckpointCert> observe(const CommitSignal& signal);
    const std::vector<CheckpointCert>& certified() const { return certs_; }
    void begin_epoch(Committee committee);

  private:
    Committee committee_;
    // seq -> digest -> (signers in sequenced order, certified flag)
    struct Tally {
        std::vector<ValidatorId> signers;
        bool done = false;
    };
    std::map<std::uint64_t, std::map<Digest, Tally>> tallies_;
    std::vector<CheckpointCert> certs_;
};

}  // namespace duallane
