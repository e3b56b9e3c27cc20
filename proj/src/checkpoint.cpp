// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/checkpoint.hpp"

#include <algorithm>

namespace duallane {

void encode_checkpoint(Encoder& enc, const Checkpoint& cp) {
    enc.str("checkpoint");
    enc.u64(cp.epoch);
    enc.u64(cp.seq);
    enc.digest(cp.prev_digest);
    enc.u32(static_cast<std::uint32_t>(cp.contents.size()));
    for (const auto& [tx, eff] : cp.contents) {
        enc.digest(tx.bytes);
        enc.digest(eff);
    }
}

Digest Checkpoint::digest() const {
    Encoder enc;
    encode_checkpoint(enc, *this);
    return enc.finalize();
}

std::optional<Checkpoint> CheckpointBuilder::add_commit(const Commit& commit,
                                                        const ExecProbe& probe) {
    if (commit.epoch != epoch_) throw std::logic_error("commit fed to wrong-epoch builder");

    // First occurrence of each certificate becomes a candidate.
    for (const auto& cert : commit.certs) {
        const TxDigest digest = cert.digest();
        if (seen_.contains(digest) || checkpointed_.contains(digest)) continue;
        seen_.insert(digest);
        pending_.emplace(digest, cert);
        pending_order_.push_back(digest);
    }

    // Drive local execution to a fixpoint: executing one candidate can make
    // another executable within the same commit.
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& digest : pending_order_) {
            if (executed_.contains(digest)) continue;
            auto info = probe(pending_.at(digest));
            if (info.has_value()) {
                executed_.emplace(digest, std::move(*info));
                progress = true;
            }
        }
    }

    // Causal completeness: a candidate is includable once every dependency is
    // already checkpointed or includable alongside it.
    std::set<TxDigest> includable;
    progress = true;
    while (progress) {
        progress = false;
        for (const auto& digest : pending_order_) {
            if (includable.contains(digest)) continue;
            auto it = executed_.find(digest);
            if (it == executed_.end()) continue;
            bool complete = true;
            for (const auto& dep : it->second.deps) {
                if (dep.is_zero()) continue;  // genesis
                if (checkpointed_.contains(dep) || includable.contains(dep)) continue;
                complete = false;
                break;
            }
            if (complete) {
                includable.insert(digest);
                progress = true;
            }
        }
    }

    if (includable.empty() && !pending_order_.empty()) {
        return std::nullopt;  // all candidates deferred: gaps in causal history
    }

    // Canonical topological order over the includable set, ascending digest
    // bytes as the tie-break.
    std::map<TxDigest, std::vector<TxDigest>> dependents;
    std::map<TxDigest, std::size_t> missing;
    for (const auto& digest : includable) {
        std::size_t count = 0;
        for (const auto& dep : executed_.at(digest).deps) {
            if (includable.contains(dep)) {
                dependents[dep].push_back(digest);
                ++count;
            }
        }
        missing[digest] = count;
    }
    std::set<TxDigest> ready;
    for (const auto& [digest, count] : missing) {
        if (count == 0) ready.insert(digest);
    }
    std::vector<std::pair<TxDigest, Digest>> ordered;
    while (!ready.empty()) {
        TxDigest next = *ready.begin();
        ready.erase(ready.begin());
        ordered.emplace_back(next, executed_.at(next).effects_digest);
        for (const auto& dep : dependents[next]) {
            if (--missing.at(dep) == 0) ready.insert(dep);
        }
    }
    if (ordered.size() != includable.size()) {
        throw std::logic_error("dependency cycle in checkpoint candidates");
    }

    Checkpoint cp;
    cp.epoch = epoch_;
    cp.seq = next_seq_++;
    cp.prev_digest = prev_digest_;
    cp.contents = std::move(ordered);
    prev_digest_ = cp.digest();

    for (const auto& [digest, _] : cp.contents) {
        checkpointed_.insert(digest);
        pending_.erase(digest);
        executed_.erase(digest);
        std::erase(pending_order_, digest);
    }
    chain_.push_back(cp);
    return cp;
}

void CheckpointBuilder::begin_epoch(EpochId epoch) {
    if (!pending_.empty()) {
        // Candidates never completed within their epoch die with it; their
        // certificates are epoch-scoped.
        pending_.clear();
        pending_order_.clear();
        executed_.clear();
    }
    seen_.clear();
    chain_.clear();
    epoch_ = epoch;
    next_seq_ = 1;
}

std::optional<CheckpointCert> CheckpointCertifier::observe(const CommitSignal& signal) {
    if (signal.epoch != committee_.epoch) return std::nullopt;
    auto& tally = tallies_[signal.checkpoint_seq][signal.checkpoint_digest];
    if (tally.done) return std::nullopt;
    if (std::find(tally.signers.begin(), tally.signers.end(), signal.validator) !=
        tally.signers.end()) {
        return std::nullopt;
    }
    tally.signers.push_back(signal.validator);
    if (committee_.stake_of(tally.signers) < committee_.quorum_threshold()) return std::nullopt;
    tally.done = true;
    CheckpointCert cert;
    cert.epoch = signal.epoch;
    cert.seq = signal.checkpoint_seq;
    cert.digest = signal.checkpoint_digest;
    cert.signers = tally.signers;
    certs_.push_back(cert);
    return cert;
}

void CheckpointCertifier::begin_epoch(Committee committee) {
    committee_ = std::move(committee);
    tallies_.clear();
    certs_.clear();
}

}  // namespace duallane
