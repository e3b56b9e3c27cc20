// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/validator.hpp"

#include <algorithm>

namespace duallane {

KeyGuards::KeyGuards(std::mutex& table_mutex, std::set<ObjKey>& table, std::vector<ObjKey> keys)
    : mutex_(&table_mutex), table_(&table), keys_(std::move(keys)) {
    std::sort(keys_.begin(), keys_.end());
    std::lock_guard<std::mutex> lock(*mutex_);
    for (const auto& key : keys_) {
        if (table_->contains(key)) return;  // busy: caller retries
    }
    for (const auto& key : keys_) table_->insert(key);
    acquired_ = true;
}

KeyGuards::~KeyGuards() {
    if (!acquired_ || mutex_ == nullptr) return;
    std::lock_guard<std::mutex> lock(*mutex_);
    for (const auto& key : keys_) table_->erase(key);
}

KeyGuards::KeyGuards(KeyGuards&& other) noexcept
    : mutex_(other.mutex_), table_(other.table_), keys_(std::move(other.keys_)),
      acquired_(other.acquired_) {
    other.acquired_ = false;
}

Validator::Validator(ValidatorId id, Committee committee, SecretKey key, const KeyBook* keys,
                     GasSchedule gas, ValidatorHooks hooks)
    : id_(id), epoch_(committee.epoch), committee_(committee), key_(key), keys_(keys),
      gas_(std::move(gas)), hooks_(std::move(hooks)), builder_(committee.epoch),
      certifier_(committee) {}

void Validator::load_genesis(const std::vector<Obj>& objects) {
    for (const auto& obj : objects) {
        objdb_.put(obj);
        if (is_owned(obj.ownership)) owned_lock_[obj.key()] = std::nullopt;
    }
}

void Validator::emit(std::string kind, std::map<std::string, std::string> fields) {
    if (!hooks_.trace) return;
    TraceEvent ev;
    ev.time = now();
    ev.actor = actor_name();
    ev.kind = std::move(kind);
    ev.fields = std::move(fields);
    hooks_.trace(std::move(ev));
}

Result<Validator::LoadedInputs> Validator::load_inputs(const Tx& tx,
                                                       bool shared_at_latest) const {
    LoadedInputs out;
    bool behind = false;
    bool ahead = false;
    for (const auto& ref : tx.owned_inputs) {
        const auto latest = objdb_.latest_version(ref.id);
        if (!latest.has_value() || *latest == kTombstoneVersion || *latest < ref.version) {
            out.missing.push_back(ref.key());
            behind = true;
            continue;
        }
        if (*latest != ref.version) {
            out.missing.push_back(ref.key());
            ahead = true;
            continue;
        }
        const Obj* obj = objdb_.get(ref.key());
        if (obj == nullptr) {
            out.missing.push_back(ref.key());
            behind = true;
            continue;
        }
        if (obj_digest(*obj) != ref.contents_digest) {
            return Error{Errc::version_mismatch, "object reference digest mismatch"};
        }
        out.owned.push_back(*obj);
    }
    for (const auto& id : tx.readonly_inputs) {
        const Obj* obj = objdb_.latest_obj(id);
        if (obj == nullptr) {
            out.missing.push_back(ObjKey{id, 0});
            behind = true;
            continue;
        }
        out.readonly.push_back(*obj);
    }
    for (const auto& s : tx.shared_inputs) {
        const Obj* obj = objdb_.latest_obj(s.id);
        if (obj == nullptr) {
            out.missing.push_back(ObjKey{s.id, 0});
            behind = true;
            continue;
        }
        out.shared.push_back(*obj);
    }
    (void)shared_at_latest;
    if (behind) {
        return Error{Errc::missing_dependency,
                     std::to_string(out.missing.size()) + " input object(s) not present"};
    }
    if (ahead) {
        return Error{Errc::version_mismatch, "input object version already consumed"};
    }
    return out;
}

Result<TxSign> Validator::handle_tx(const Tx& tx) {
    if (paused_ && !tx.kind.is_vote()) {
        return Error{Errc::validator_paused, "epoch change cutoff reached"};
    }
    if (tx.epoch != epoch_) {
        return Error{Errc::wrong_epoch, "transaction epoch " + std::to_string(tx.epoch)};
    }
    const TxDigest digest = tx_digest(tx);

    // Check 1.1: all inputs exist; owned inputs at their exact version,
    // shared inputs with a matching initial version.
    auto loaded = load_inputs(tx, true);
    if (!loaded.ok()) {
        emit("tx_rejected", {{"digest", digest.hex()}, {"code", errc_name(loaded.code())}});
        return loaded.error();
    }
    for (std::size_t i = 0; i < tx.shared_inputs.size(); ++i) {
        if (loaded.value().shared[i].initial_version != tx.shared_inputs[i].initial_version) {
            return Error{Errc::initial_version_mismatch,
                         "shared input declared wrong initial version"};
        }
    }

    // Check 1.2: static validity.
    const TxValidity validity = tx_valid(tx, loaded.value().owned, objdb_.lookup(), *keys_, gas_);
    if (!validity.valid) {
        emit("tx_rejected", {{"digest", digest.hex()}, {"code", "invalid_tx"},
                             {"reason", validity.reason}});
        return Error{Errc::invalid_tx, validity.reason};
    }

    // Check 1.3: exclusive guards over the owned inputs for the duration of
    // the lock writes, acquired in sorted order.
    std::vector<ObjKey> keys;
    keys.reserve(tx.owned_inputs.size());
    for (const auto& ref : tx.owned_inputs) keys.push_back(ref.key());
    KeyGuards guards(guard_mutex_, guarded_, keys);
    if (!guards.acquired()) {
        return Error{Errc::guard_contention, "inputs busy, retry"};
    }

    // Check 1.4: write-once owned locks; this is the consistent-broadcast
    // step. Idempotent for the same transaction within the epoch.
    TxSign sign = make_tx_sign(digest, epoch_, id_, key_);
    if (!byz_.sign_conflicting) {
        for (const auto& key : keys) {
            auto it = owned_lock_.find(key);
            if (it == owned_lock_.end()) {
                return Error{Errc::lock_conflict, "no lock entry for input"};
            }
            if (it->second.has_value() && it->second->tx_digest != digest) {
                emit("lock_conflict",
                     {{"epoch", std::to_string(epoch_)},
                      {"obj", key.id.hex()},
                      {"obj_version", std::to_string(key.version)},
                      {"digest", digest.hex()},
                      {"holder", it->second->tx_digest.hex()}});
                return Error{Errc::lock_conflict,
                             "locked by " + it->second->tx_digest.hex()};
            }
        }
        for (const auto& key : keys) owned_lock_[key] = sign;
    }
    for (const auto& key : keys) {
        emit("lock_granted", {{"epoch", std::to_string(epoch_)},
                              {"obj", key.id.hex()},
                              {"obj_version", std::to_string(key.version)},
                              {"digest", digest.hex()},
                              {"stake", std::to_string(committee_.stake_of(id_))}});
    }
    return sign;
}

Result<CertOutcome> Validator::handle_cert(const TxCert& cert, std::vector<ObjKey>* missing) {
    if (auto ok = verify_tx_cert(cert, committee_, *keys_); !ok.ok()) return ok.error();
    if (paused_ && !cert.tx.kind.is_vote()) {
        if (!ct_.contains(cert.digest())) {
            return Error{Errc::epoch_closed, "epoch is closing, resubmit next epoch"};
        }
    }
    return execute_cert(cert, missing, /*from_commit=*/false);
}

Result<CertOutcome> Validator::execute_cert(const TxCert& cert, std::vector<ObjKey>* missing,
                                            bool from_commit) {
    const TxDigest digest = cert.digest();
    if (auto it = ct_.find(digest); it != ct_.end()) {
        return CertOutcome{CertOutcome::Kind::executed, it->second.eff_sign};
    }
    const Tx& tx = cert.tx;

    // Check 4.2: load objects; a missing object means this validator has not
    // caught up with the certificate's causal history yet.
    auto loaded = load_inputs(tx, true);
    if (!loaded.ok()) {
        if (missing != nullptr) {
            // Recompute to hand the caller the concrete gap list.
            LoadedInputs probe;
            for (const auto& ref : tx.owned_inputs) {
                if (objdb_.latest_version(ref.id) != ref.version) probe.missing.push_back(ref.key());
            }
            for (const auto& id : tx.readonly_inputs) {
                if (objdb_.latest_obj(id) == nullptr) probe.missing.push_back(ObjKey{id, 0});
            }
            for (const auto& s : tx.shared_inputs) {
                if (objdb_.latest_obj(s.id) == nullptr) probe.missing.push_back(ObjKey{s.id, 0});
            }
            *missing = probe.missing;
        }
        return loaded.error();
    }

    // Check 4.3: shared-object scheduling.
    std::vector<Obj> shared_at_lock;
    if (!tx.shared_inputs.empty()) {
        bool locks_exist = true;
        for (const auto& s : tx.shared_inputs) {
            if (!shared_lock_.contains({digest, s.id})) {
                locks_exist = false;
                break;
            }
        }
        if (!locks_exist) {
            if (from_commit) {
                throw std::logic_error("commit-path certificate without assigned locks");
            }
            pending_checkpoint_.insert(digest);
            if (hooks_.submit_cert) hooks_.submit_cert(cert);
            emit("forwarded", {{"digest", digest.hex()}});
            return CertOutcome{CertOutcome::Kind::forwarded, std::nullopt};
        }
        const SharedAccess access = shared_access(tx);
        for (const auto& s : tx.shared_inputs) {
            const Version lock = shared_lock_.at({digest, s.id});
            const bool is_write = std::find(access.writes.begin(), access.writes.end(), s.id) !=
                                  access.writes.end();
            if (is_write) {
                // Writers run in assigned-version order over the live object.
                if (objdb_.latest_version(s.id) != lock) {
                    return Error{Errc::not_scheduled, "not the next scheduled certificate"};
                }
                shared_at_lock.push_back(*objdb_.latest_obj(s.id));
            } else {
                // Reads run against their pinned version, whenever available.
                const Obj* obj = objdb_.get(ObjKey{s.id, lock});
                if (obj == nullptr) {
                    return Error{Errc::not_scheduled, "read version not yet materialized"};
                }
                shared_at_lock.push_back(*obj);
            }
        }
    }

    ExecInputs inputs;
    inputs.owned = loaded.value().owned;
    inputs.readonly = loaded.value().readonly;
    inputs.shared = std::move(shared_at_lock);
    inputs.lookup = objdb_.lookup();
    ExecContext ctx{gas_, builder_.latest_seq()};
    ExecResult result = exec(tx, inputs, ctx);

    EffSign eff_sign = make_eff_sign(result.effects, epoch_, id_, key_);
    atomic_persist(cert, eff_sign, result);
    ++executions_;

    if (!from_commit && hooks_.submit_cert) hooks_.submit_cert(cert);
    emit("cert_executed",
         {{"epoch", std::to_string(epoch_)},
          {"digest", digest.hex()},
          {"effects", effects_digest(result.effects).hex()},
          {"status", result.effects.is_abort() ? "abort" : "success"}});
    if (hooks_.on_executed) hooks_.on_executed(cert, eff_sign);
    return CertOutcome{CertOutcome::Kind::executed, eff_sign};
}

void Validator::atomic_persist(const TxCert& cert, const EffSign& eff_sign,
                               const ExecResult& result) {
    if (crash_before_persist_) {
        crash_before_persist_ = false;
        throw CrashInjected{};
    }
    const TxDigest digest = cert.digest();
    const Effects& eff = result.effects;

    UndoRecord undo;
    undo.digest = digest;
    std::set<ObjId> touched;
    for (const auto& obj : result.outputs) touched.insert(obj.id);
    for (const auto& key : eff.deleted) touched.insert(key.id);
    for (const auto& key : eff.wrapped) touched.insert(key.id);
    for (const auto& id : touched) undo.prev_latest.emplace_back(id, objdb_.latest_version(id));

    WriteBatch batch;
    for (const auto& obj : result.outputs) {
        batch.put_obj(obj);
        undo.written_keys.push_back(obj.key());
    }
    for (const auto& key : eff.deleted) batch.set_latest(key.id, kTombstoneVersion);
    for (const auto& key : eff.wrapped) batch.erase_latest(key.id);

    // The batch plus the lock/certificate table updates below form one
    // atomic unit with respect to crash recovery.
    batch.apply(objdb_);
    ct_[digest] = CertRecord{cert, eff_sign};
    for (const auto& key : result.consumed_owned) owned_lock_.erase(key);
    for (const auto& key : result.unlock_owned) owned_lock_[key] = std::nullopt;
    for (const auto& obj : result.outputs) {
        if (is_owned(obj.ownership)) owned_lock_[obj.key()] = std::nullopt;
    }
    pending_checkpoint_.insert(digest);
    undo_log_.push_back(std::move(undo));
}

void Validator::assign_shared_locks(const TxCert& cert) {
    const TxDigest digest = cert.digest();
    const Tx& tx = cert.tx;
    if (tx.shared_inputs.empty()) return;

    bool all_exist = true;
    for (const auto& s : tx.shared_inputs) {
        if (!shared_lock_.contains({digest, s.id})) {
            all_exist = false;
            break;
        }
    }
    if (all_exist) return;  // assigned exactly once

    const SharedAccess access = shared_access(tx);
    auto fallback = [this](const ObjId& id, Version declared_initial) {
        // Absent table entry: fresh objects take their declared initial
        // version; objects retained across an epoch boundary take their
        // checkpointed version.
        const auto stored = objdb_.latest_version(id);
        if (stored.has_value() && *stored != kTombstoneVersion) return *stored;
        return declared_initial;
    };
    auto next_or_fallback = [&](const SharedInput& s) {
        auto it = next_shared_lock_.find(s.id);
        return it != next_shared_lock_.end() ? it->second : fallback(s.id, s.initial_version);
    };

    assign_read_locks_for(cert);

    // Lamport timestamp over the owned inputs and the shared versions being
    // consumed; the next lock on each written object is one past it.
    Version v_max = 1;
    for (const auto& ref : tx.owned_inputs) v_max = std::max(v_max, ref.version);
    for (const auto& s : tx.shared_inputs) v_max = std::max(v_max, next_or_fallback(s));

    for (const auto& s : tx.shared_inputs) {
        const bool is_write = std::find(access.writes.begin(), access.writes.end(), s.id) !=
                              access.writes.end();
        if (!is_write) continue;
        if (!shared_lock_.contains({digest, s.id})) {
            const Version v = next_or_fallback(s);
            shared_lock_[{digest, s.id}] = v;
            emit("shared_lock_set", {{"epoch", std::to_string(epoch_)},
                                     {"digest", digest.hex()},
                                     {"obj", s.id.hex()},
                                     {"version", std::to_string(v)},
                                     {"access", "write"}});
        }
        next_shared_lock_[s.id] = v_max + 1;
    }
}

std::optional<CheckpointBuilder::ExecInfo> Validator::builder_probe(const TxCert& cert) {
    const TxDigest digest = cert.digest();
    auto it = ct_.find(digest);
    if (it == ct_.end()) {
        auto res = execute_cert(cert, nullptr, /*from_commit=*/true);
        if (!res.ok()) return std::nullopt;
        it = ct_.find(digest);
        if (it == ct_.end()) return std::nullopt;
    }
    const Effects& eff = it->second.eff_sign.effects;
    return CheckpointBuilder::ExecInfo{effects_digest(eff), eff.dependencies};
}

void Validator::handle_commit(const Commit& commit) {
    if (commit.epoch != epoch_) {
        throw std::logic_error("commit for wrong epoch fed to validator");
    }
    if (commit.seq != next_commit_seq_) {
        throw std::logic_error("commit out of order");
    }
    next_commit_seq_ = commit.seq + 1;

    // Single-writer shared-lock assignment: reads across the whole commit
    // are pinned first, so they observe the pre-commit version even when
    // sequenced after a writer; writers then lock in sequence order.
    for (const auto& cert : commit.certs) assign_read_locks_for(cert);
    for (const auto& cert : commit.certs) assign_shared_locks(cert);

    auto probe = [this](const TxCert& cert) { return builder_probe(cert); };
    auto checkpoint = builder_.add_commit(commit, probe);
    if (checkpoint.has_value()) {
        std::string txs;
        for (const auto& [digest, _] : checkpoint->contents) {
            pending_checkpoint_.erase(digest);
            if (!txs.empty()) txs += ",";
            txs += digest.hex();
        }
        Digest cp_digest = checkpoint->digest();
        emit("checkpoint_built", {{"epoch", std::to_string(checkpoint->epoch)},
                                  {"seq", std::to_string(checkpoint->seq)},
                                  {"digest", cp_digest.hex()},
                                  {"prev", checkpoint->prev_digest.hex()},
                                  {"count", std::to_string(checkpoint->contents.size())},
                                  {"txs", txs}});
        if (byz_.corrupt_checkpoint_sigs) {
            cp_digest.bytes[0] ^= 0xff;  // divergent vote, ignored by correct tallies
        }
        if (hooks_.submit_signal) {
            hooks_.submit_signal(
                make_checkpoint_signal(epoch_, checkpoint->seq, cp_digest, id_, key_));
        }
    }

    for (const auto& signal : commit.signals) {
        if (!committee_.contains(signal.validator) || !verify_signal(signal, *keys_)) continue;
        auto cert = certifier_.observe(signal);
        if (!cert.has_value()) continue;
        emit("checkpoint_cert", {{"epoch", std::to_string(cert->epoch)},
                                 {"seq", std::to_string(cert->seq)},
                                 {"digest", cert->digest.hex()},
                                 {"signers", std::to_string(cert->signers.size())}});
        // A certified digest disagreeing with this validator's own checkpoint
        // would break deterministic construction; surface it loudly.
        for (const auto& local : builder_.chain()) {
            if (local.seq == cert->seq && local.digest() != cert->digest && !byz_.sign_conflicting) {
                throw std::logic_error("certified checkpoint diverges from local chain");
            }
        }
    }

    maybe_emit_votes();
}

void Validator::assign_read_locks_for(const TxCert& cert) {
    const Tx& tx = cert.tx;
    if (tx.shared_inputs.empty()) return;
    const TxDigest digest = cert.digest();
    const SharedAccess access = shared_access(tx);
    for (const auto& s : tx.shared_inputs) {
        const bool is_read = std::find(access.reads.begin(), access.reads.end(), s.id) !=
                             access.reads.end();
        if (!is_read || shared_lock_.contains({digest, s.id})) continue;
        Version v;
        auto it = next_shared_lock_.find(s.id);
        if (it != next_shared_lock_.end()) {
            v = it->second;
        } else {
            const auto stored = objdb_.latest_version(s.id);
            v = (stored.has_value() && *stored != kTombstoneVersion) ? *stored
                                                                     : s.initial_version;
        }
        shared_lock_[{digest, s.id}] = v;
        emit("shared_lock_set", {{"epoch", std::to_string(epoch_)},
                                 {"digest", digest.hex()},
                                 {"obj", s.id.hex()},
                                 {"version", std::to_string(v)},
                                 {"access", "read"}});
    }
}

std::vector<TxCert> Validator::handle_sync_request(const std::vector<TxDigest>& digests) const {
    std::vector<TxCert> out;
    for (const auto& d : digests) {
        auto it = ct_.find(d);
        if (it != ct_.end()) out.push_back(it->second.cert);
    }
    return out;
}

void Validator::pause_tx_locking() {
    if (paused_) return;
    paused_ = true;
    emit("cutoff", {{"epoch", std::to_string(epoch_)}});
}

std::optional<ReconfigContract> Validator::contract_state() const {
    const Obj* obj = objdb_.latest_obj(contract_id_);
    if (obj == nullptr) return std::nullopt;
    try {
        return contract_from_value(obj->contents);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

bool Validator::handover_complete() const {
    auto c = contract_state();
    return c.has_value() && c->epoch > epoch_;
}

Committee Validator::next_committee() const {
    auto c = contract_state();
    if (!c.has_value()) throw std::logic_error("no contract state");
    std::map<ValidatorId, Stake> members;
    const auto addresses = keys_->validator_addresses();
    for (const auto& [addr, stake] : c->old_keys) {
        auto it = addresses.find(addr);
        if (it == addresses.end()) throw std::logic_error("unknown next-epoch validator");
        members[it->second] = stake;
    }
    return Committee::make(c->epoch, members);
}

void Validator::configure_reconfig_agent(ObjId contract_id, std::array<ObjId, 4> vote_coins,
                                         Stake next_epoch_stake) {
    contract_id_ = contract_id;
    vote_coins_ = vote_coins;
    next_epoch_stake_ = next_epoch_stake;
    participates_next_epoch_ = next_epoch_stake > 0;
}

std::optional<Tx> Validator::build_vote(Command cmd, const ObjId& coin_id) {
    const Obj* coin = objdb_.latest_obj(coin_id);
    const Obj* contract = objdb_.latest_obj(contract_id_);
    if (coin == nullptr || contract == nullptr) return std::nullopt;
    Tx tx;
    tx.epoch = epoch_;
    tx.sender = address_of_key(key_);
    tx.kind = TxKind::single(std::move(cmd));
    tx.gas_ref = make_ref(*coin);
    tx.owned_inputs = {tx.gas_ref};
    tx.shared_inputs = {SharedInput{contract_id_, contract->initial_version}};
    tx.gas_budget = 10;
    tx.tip = 0;
    return sign_tx(std::move(tx), key_);
}

void Validator::maybe_emit_votes() {
    if (!participates_next_epoch_ && next_epoch_stake_ == 0) return;
    auto c = contract_state();
    if (!c.has_value()) return;

    if ((c->phase == ReconfigPhase::end_of_epoch || c->phase == ReconfigPhase::handover) &&
        !paused_) {
        pause_tx_locking();
    }

    const Address self = address_of_key(key_);
    auto push_vote = [this](const char* label, Command cmd, const ObjId& coin) {
        if (votes_sent_.contains(label)) return;
        auto tx = build_vote(std::move(cmd), coin);
        if (!tx.has_value()) return;
        votes_sent_.insert(label);
        emit("vote_sent", {{"kind", label}, {"epoch", std::to_string(epoch_)}});
        vote_intents_.push_back(std::move(*tx));
    };

    if (participates_next_epoch_ && c->phase == ReconfigPhase::registering &&
        !c->new_keys.contains(self)) {
        push_vote("register", RegisterVote{next_epoch_stake_}, vote_coins_[0]);
    }
    if (participates_next_epoch_ && c->new_keys.contains(self) &&
        builder_.latest_seq() >= c->checkpoints_before_change &&
        (c->phase == ReconfigPhase::registering || c->phase == ReconfigPhase::ready)) {
        push_vote("ready", ReadyVote{}, vote_coins_[1]);
    }
    if (committee_.contains(id_) && c->phase == ReconfigPhase::end_of_epoch &&
        pending_checkpoint_.empty()) {
        push_vote("eoe", EndOfEpochVote{}, vote_coins_[2]);
    }
    if (c->phase == ReconfigPhase::handover && builder_.latest_seq() >= c->epoch_edge + 1) {
        push_vote("handover", HandoverCall{}, vote_coins_[3]);
    }
}

std::vector<Tx> Validator::drain_vote_intents() {
    std::vector<Tx> out = std::move(vote_intents_);
    vote_intents_.clear();
    return out;
}

void Validator::epoch_transition(const Committee& next) {
    const EpochId old_epoch = epoch_;

    // Roll back executions that made it into no checkpoint of the closing
    // epoch: they were not final, and their owned inputs must become usable
    // again (newest first so chained writes unwind cleanly).
    for (auto it = undo_log_.rbegin(); it != undo_log_.rend(); ++it) {
        if (builder_.is_checkpointed(it->digest)) continue;
        ct_.erase(it->digest);
        pending_checkpoint_.erase(it->digest);
        for (const auto& key : it->written_keys) objdb_.erase_version(key);
        for (const auto& [id, prev] : it->prev_latest) {
            if (prev.has_value()) {
                objdb_.set_latest(id, *prev);
            } else {
                objdb_.erase_latest(id);
            }
        }
        emit("rolled_back", {{"digest", it->digest.hex()}, {"epoch", std::to_string(old_epoch)}});
    }
    undo_log_.clear();

    owned_lock_.clear();
    shared_lock_.clear();
    next_shared_lock_.clear();

    // Deleted-object tombstones are epoch-scoped: certificates cannot outlive
    // their epoch, so replay protection is no longer needed.
    std::vector<ObjId> tombstones;
    for (const auto& [id, v] : objdb_.latest_map()) {
        if (v == kTombstoneVersion) tombstones.push_back(id);
    }
    for (const auto& id : tombstones) objdb_.erase_latest(id);

    for (const auto& [id, v] : objdb_.latest_map()) {
        const Obj* obj = objdb_.get(ObjKey{id, v});
        if (obj != nullptr && is_owned(obj->ownership)) {
            owned_lock_[ObjKey{id, v}] = std::nullopt;
        }
    }

    epoch_ = next.epoch;
    committee_ = next;
    paused_ = false;
    pending_checkpoint_.clear();
    votes_sent_.clear();
    vote_intents_.clear();
    next_commit_seq_ = 0;
    builder_.begin_epoch(epoch_);
    certifier_.begin_epoch(next);

    emit("epoch_transition", {{"old_epoch", std::to_string(old_epoch)},
                              {"new_epoch", std::to_string(epoch_)},
                              {"state", objdb_.state_digest().hex()}});
}

std::optional<TxSign> Validator::owned_lock(const ObjKey& key) const {
    auto it = owned_lock_.find(key);
    if (it == owned_lock_.end()) return std::nullopt;
    return it->second;
}

bool Validator::has_owned_lock_entry(const ObjKey& key) const {
    return owned_lock_.contains(key);
}

std::optional<Version> Validator::shared_lock(const TxDigest& digest, const ObjId& id) const {
    auto it = shared_lock_.find({digest, id});
    if (it == shared_lock_.end()) return std::nullopt;
    return it->second;
}

std::optional<Version> Validator::next_shared_lock(const ObjId& id) const {
    auto it = next_shared_lock_.find(id);
    if (it == next_shared_lock_.end()) return std::nullopt;
    return it->second;
}

std::optional<EffSign> Validator::executed_effects(const TxDigest& digest) const {
    auto it = ct_.find(digest);
    if (it == ct_.end()) return std::nullopt;
    return it->second.eff_sign;
}

void Validator::on_crash() {
    vote_intents_.clear();
    crash_before_persist_ = false;
    std::lock_guard<std::mutex> lock(guard_mutex_);
    guarded_.clear();
}

}  // namespace duallane
