// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/consensus.hpp"

namespace duallane {

Bytes checkpoint_sig_payload(EpochId epoch, std::uint64_t seq, const Digest& digest) {
    Encoder enc;
    enc.str("ckpt-sign");
    enc.u64(epoch);
    enc.u64(seq);
    enc.digest(digest);
    return enc.take();
}

CommitSignal make_checkpoint_signal(EpochId epoch, std::uint64_t seq, const Digest& digest,
                                    ValidatorId validator, const SecretKey& key) {
    CommitSignal s;
    s.validator = validator;
    s.epoch = epoch;
    s.checkpoint_seq = seq;
    s.checkpoint_digest = digest;
    s.sig = attest(key, checkpoint_sig_payload(epoch, seq, digest));
    return s;
}

bool verify_signal(const CommitSignal& signal, const KeyBook& keys) {
    return keys.verify_validator(
        signal.validator,
        checkpoint_sig_payload(signal.epoch, signal.checkpoint_seq, signal.checkpoint_digest),
        signal.sig);
}

Sequencer::Sequencer(Committee committee, const KeyBook* keys, std::uint64_t interval)
    : committee_(std::move(committee)), keys_(keys), interval_(interval) {
    if (interval_ == 0) throw std::logic_error("sequencer interval must be positive");
}

Result<Unit> Sequencer::submit_cert(const TxCert& cert) {
    if (cert.tx.epoch != committee_.epoch) {
        return Error{Errc::epoch_closed, "submission for closed epoch"};
    }
    if (auto ok = verify_tx_cert(cert, committee_, *keys_); !ok.ok()) return ok.error();
    const TxDigest digest = cert.digest();
    if (sequenced_.contains(digest)) return Unit{};  // first occurrence is canonical
    sequenced_.insert(digest);
    pending_certs_.push_back(cert);
    return Unit{};
}

Result<Unit> Sequencer::submit_signal(const CommitSignal& signal) {
    if (signal.epoch != committee_.epoch) {
        return Error{Errc::epoch_closed, "signal for closed epoch"};
    }
    if (!committee_.contains(signal.validator) || !verify_signal(signal, *keys_)) {
        return Error{Errc::bad_signature, "bad checkpoint signal"};
    }
    const auto key = std::make_pair(signal.validator, signal.checkpoint_seq);
    if (sequenced_signals_.contains(key)) return Unit{};
    sequenced_signals_.insert(key);
    pending_signals_.push_back(signal);
    return Unit{};
}

Commit Sequencer::cut() {
    Commit commit;
    commit.epoch = committee_.epoch;
    commit.seq = next_seq_++;
    commit.certs = std::move(pending_certs_);
    commit.signals = std::move(pending_signals_);
    pending_certs_.clear();
    pending_signals_.clear();
    log_[commit.epoch].push_back(commit);
    return commit;
}

std::vector<Commit> Sequencer::commits_from(EpochId epoch, std::uint64_t seq) const {
    std::vector<Commit> out;
    auto it = log_.find(epoch);
    if (it == log_.end()) return out;
    for (const auto& c : it->second) {
        if (c.seq >= seq) out.push_back(c);
    }
    return out;
}

void Sequencer::begin_epoch(Committee committee) {
    if (committee.epoch <= committee_.epoch) {
        throw std::logic_error("sequencer epoch must advance");
    }
    committee_ = std::move(committee);
    next_seq_ = 0;
    pending_certs_.clear();
    pending_signals_.clear();
    sequenced_.clear();
    sequenced_signals_.clear();
}

}  // namespace duallane
