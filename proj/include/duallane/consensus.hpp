// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <deque>
#include <optional>
#include <set>

#include "duallane/messages.hpp"

namespace duallane {

/// Sequenced side-channel vote: a validator's signature over a locally built
/// checkpoint. The first quorum of these, in sequence order, forms the
/// canonical checkpoint certificate.
struct CommitSignal {
    ValidatorId validator = 0;
    EpochId epoch = 0;
    std::uint64_t checkpoint_seq = 0;
    Digest checkpoint_digest;
    Attestation sig;
};

Bytes checkpoint_sig_payload(EpochId epoch, std::uint64_t seq, const Digest& digest);
CommitSignal make_checkpoint_signal(EpochId epoch, std::uint64_t seq, const Digest& digest,
                                    ValidatorId validator, const SecretKey& key);
bool verify_signal(const CommitSignal& signal, const KeyBook& keys);

/// One total-order output batch. Sequences are consecutive from 0 per epoch
/// and identical at all correct validators.
struct Commit {
    EpochId epoch = 0;
    std::uint64_t seq = 0;
    std::vector<TxCert> certs;
    std::vector<CommitSignal> signals;
};

/// The consensus black box as one logical sequencer: verified submissions
/// are batched into a commit every `interval` ticks. Only certificates with
/// a valid quorum are sequenced, which is what makes the signing step
/// effective spam protection for the ordering engine.
class Sequencer {
  public:
    Sequencer(Committee committee, const KeyBook* keys, std::uint64_t interval);

    EpochId epoch() const { return committee_.epoch; }
    std::uint64_t interval() const { return interval_; }

    Result<Unit> submit_cert(const TxCert& cert);
    Result<Unit> submit_signal(const CommitSignal& signal);

    /// Cuts the next commit (possibly empty; empty commits drive checkpoint
    /// and reconfiguration timers).
    Commit cut();

    /// Replay for validators resuming after a crash.
    std::vector<Commit> commits_from(EpochId epoch, std::uint64_t seq) const;

    /// Switches to the next epoch once enough validators confirmed the
    /// handover. Pending submissions for the old epoch are discarded.
    void begin_epoch(Committee committee);

  private:
    Committee committee_;
    const KeyBook* keys_;
    std::uint64_t interval_;
    std::uint64_t next_seq_ = 0;
    std::vector<TxCert> pending_certs_;
    std::vector<CommitSignal> pending_signals_;
    std::set<TxDigest> sequenced_;  // per-epoch duplicate suppression
    std::set<std::pair<ValidatorId, std::uint64_t>> sequenced_signals_;
    std::map<EpochId, std::vector<Commit>> log_;
};

}  // namespace duallane
