// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/simnet.hpp"

#include <algorithm>
#include <queue>
#include <variant>

#include "duallane/rng.hpp"

namespace duallane {

Genesis make_genesis(const Scenario& sc, KeyBook& keys) {
    Genesis g;
    const TxDigest genesis_tx{};  // all-zero: the axiomatic first dependency
    std::uint64_t counter = 0;
    auto fresh_id = [&] { return derive_object_id(genesis_tx, counter++); };
    auto add_coin = [&](const Address& owner, std::uint64_t value) {
        Obj obj;
        obj.id = fresh_id();
        obj.version = 1;
        obj.initial_version = 1;
        obj.ownership = OwnedByAddress{owner};
        obj.contents = Value(value);
        obj.parent_tx = genesis_tx;
        g.objects.push_back(obj);
        return obj.id;
    };

    const Committee committee = sc.genesis_committee();
    for (const auto& [vid, stake] : committee.members) {
        (void)stake;
        const SecretKey key = KeyBook::derive_key(sc.seed, "validator/" + std::to_string(vid));
        keys.add_validator(vid, key);
    }
    // Vote gas coins: one per vote kind so an in-flight vote never locks the
    // next kind out.
    for (const auto& [vid, stake] : committee.members) {
        (void)stake;
        const Address addr = keys.validator_address(vid);
        std::array<ObjId, 4> coins{};
        for (int i = 0; i < 4; ++i) coins[i] = add_coin(addr, 1'000'000);
        g.vote_coins[vid] = coins;
    }

    const std::uint32_t pool_size =
        sc.workload.kind == WorkloadKind::ptb ? std::max(1u, sc.workload.ptb_size) : 2u;
    for (std::uint32_t c = 0; c < sc.workload.clients; ++c) {
        ClientGenesis cg;
        cg.key = KeyBook::derive_key(sc.seed, "client/" + std::to_string(c));
        cg.addr = address_of_key(cg.key);
        keys.add_user(cg.key);
        cg.gas = add_coin(cg.addr, 1'000'000'000);
        for (std::uint32_t i = 0; i < pool_size; ++i) {
            Obj obj;
            obj.id = fresh_id();
            obj.version = 1;
            obj.initial_version = 1;
            obj.ownership = OwnedByAddress{cg.addr};
            obj.contents = Value(std::uint64_t{0});
            obj.parent_tx = genesis_tx;
            g.objects.push_back(obj);
            cg.pool.push_back(obj.id);
        }
        g.clients.push_back(std::move(cg));
    }

    {
        Obj obj;
        obj.id = fresh_id();
        obj.version = 1;
        obj.initial_version = 1;
        obj.ownership = SharedMutable{};
        obj.contents = Value(std::uint64_t{0});
        obj.parent_tx = genesis_tx;
        g.counter_id = obj.id;
        g.counter_initial = 1;
        g.objects.push_back(obj);
    }
    {
        std::map<Address, Stake> members;
        for (const auto& [vid, stake] : committee.members) {
            members[keys.validator_address(vid)] = stake;
        }
        Obj obj;
        obj.id = fresh_id();
        obj.version = 1;
        obj.initial_version = 1;
        obj.ownership = SharedMutable{};
        obj.contents = contract_to_value(make_genesis_contract(
            members, sc.epoch.checkpoints_before_change, sc.epoch.min_stake));
        obj.parent_tx = genesis_tx;
        g.contract_id = obj.id;
        g.objects.push_back(obj);
    }
    return g;
}

std::vector<double> Metrics::latencies(bool shared, bool settlement) const {
    std::vector<double> out;
    for (const auto& tx : txs) {
        if (tx.shared != shared || !tx.note.empty()) continue;
        const auto& stamp = settlement ? tx.settlement : tx.finality;
        if (stamp.has_value()) out.push_back(static_cast<double>(*stamp - tx.submit_time));
    }
    return out;
}

double Metrics::mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double Metrics::percentile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const auto idx = static_cast<std::size_t>(p * static_cast<double>(xs.size() - 1));
    return xs[idx];
}

double Metrics::certs_per_kilotick() const {
    if (end_time == 0) return 0.0;
    return static_cast<double>(distinct_effcerts) * 1000.0 / static_cast<double>(end_time);
}

std::map<std::string, std::string> Metrics::to_kv() const {
    std::map<std::string, std::string> kv;
    auto put = [&kv](const std::string& k, double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        kv[k] = buf;
    };
    kv["duration_ticks"] = std::to_string(duration);
    kv["end_time"] = std::to_string(end_time);
    kv["txs_submitted"] = std::to_string(txs.size());
    kv["effcerts_distinct"] = std::to_string(distinct_effcerts);
    kv["ops_settled"] = std::to_string(settled_ops);
    std::map<std::string, std::uint64_t> notes;
    for (const auto& tx : txs) {
        if (!tx.note.empty()) notes[tx.note] += 1;
    }
    for (const auto& [note, count] : notes) kv["txs_" + note] = std::to_string(count);
    put("certs_per_kilotick", certs_per_kilotick());
    for (const bool shared : {false, true}) {
        const std::string prefix = shared ? "shared_" : "owned_";
        auto fin = latencies(shared, false);
        auto set = latencies(shared, true);
        kv[prefix + "settled"] = std::to_string(set.size());
        if (!fin.empty()) {
            put(prefix + "finality_mean", mean(fin));
            put(prefix + "finality_p50", percentile(fin, 0.5));
            put(prefix + "finality_p90", percentile(fin, 0.9));
        }
        if (!set.empty()) {
            put(prefix + "settlement_mean", mean(set));
            put(prefix + "settlement_p50", percentile(set, 0.5));
            put(prefix + "settlement_p90", percentile(set, 0.9));
        }
    }
    for (const auto& [epoch, count] : checkpoints_per_epoch) {
        kv["checkpoints_epoch_" + std::to_string(epoch)] = std::to_string(count);
    }
    for (const auto& [epoch, t] : epoch_start_times) {
        kv["epoch_" + std::to_string(epoch) + "_start"] = std::to_string(t);
    }
    return kv;
}

namespace {

struct Dest {
    enum class Kind : std::uint8_t { validator, sequencer, client } kind;
    std::uint32_t index = 0;
};

struct MTxReq {
    Dest reply_to;
    Tx tx;
};
struct MTxResp {
    ValidatorId from;
    TxDigest digest;
    bool ok = false;
    TxSign sign;
    Errc code = Errc::invalid_tx;
    EpochId current_epoch = 0;
};
struct MCertReq {
    Dest reply_to;
    TxCert cert;
};
struct MCertResp {
    ValidatorId from;
    TxDigest digest;
    enum class Status : std::uint8_t { executed, forwarded, error } status;
    std::optional<EffSign> eff;
    Errc code = Errc::invalid_tx;
    EpochId current_epoch = 0;
};
struct MEffPush {
    ValidatorId from;
    TxDigest digest;
    EffSign eff;
};
struct MSubmitCert {
    TxCert cert;
};
struct MSubmitSignal {
    CommitSignal signal;
};
struct MCommit {
    Commit commit;
};
struct MFetchCommits {
    ValidatorId from;
    EpochId epoch;
    std::uint64_t from_seq;
};
struct MCommitBatch {
    std::vector<Commit> commits;
};
struct MEpochStarted {
    ValidatorId from;
    Committee next;
};
struct TSeqTick {};
struct TClientKick {
    std::uint32_t client;
};
struct TValidatorKick {
    ValidatorId v;
};
struct TCrash {
    ValidatorId v;
};
struct TRecover {
    ValidatorId v;
};

using Message = std::variant<MTxReq, MTxResp, MCertReq, MCertResp, MEffPush, MSubmitCert,
                             MSubmitSignal, MCommit, MFetchCommits, MCommitBatch, MEpochStarted,
                             TSeqTick, TClientKick, TValidatorKick, TCrash, TRecover>;

struct SimEvent {
    std::uint64_t time = 0;
    std::uint64_t order = 0;
    Dest dest;
    Message msg;
};

struct SimEventAfter {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        return a.time != b.time ? a.time > b.time : a.order > b.order;
    }
};

std::string dest_name(const Dest& d) {
    switch (d.kind) {
        case Dest::Kind::validator: return "v" + std::to_string(d.index);
        case Dest::Kind::sequencer: return "seq";
        case Dest::Kind::client: return "c" + std::to_string(d.index);
    }
    return "?";
}

/// Client-side state for one logical transaction attempt.
struct Attempt {
    Tx tx;
    TxDigest digest;
    std::uint64_t submitted_at = 0;       // first submission (for latency)
    std::uint64_t phase_sent_at = 0;      // last wave send
    std::map<ValidatorId, TxSign> signs;
    std::set<ValidatorId> responded;      // first-wave responders
    Stake conflict_stake = 0;
    std::optional<TxCert> cert;
    std::set<ValidatorId> cert_acked;     // executed or forwarded responses
    std::map<ValidatorId, EffSign> effs;
    bool finality_done = false;
    bool settled = false;
    bool abandoned = false;
};

struct ClientState {
    std::uint32_t index = 0;
    ClientSpec spec;
    SecretKey key;
    Address addr;
    ObjId gas_id;
    std::vector<ObjId> pool;
    std::map<ObjId, ObjRef> refs;  // latest known references for own objects
    EpochId known_epoch = 0;
    std::uint32_t txs_left = 0;
    std::uint64_t next_submit_at = 0;
    std::optional<Attempt> current;
    std::optional<Attempt> second;  // equivocator's conflicting twin
    std::size_t record = SIZE_MAX;  // index into metrics
    bool done = false;
    std::uint32_t seq_no = 0;  // per-client tx counter (recipient salt)
};

struct VoteAttempt {
    Tx tx;
    TxDigest digest;
    std::map<ValidatorId, TxSign> signs;
    bool submitted = false;
    std::uint64_t sent_at = 0;
};

struct ValidatorActor {
    std::unique_ptr<Validator> v;
    bool crashed = false;
    std::map<std::uint64_t, Commit> ooo;                    // out-of-order commits (volatile)
    std::map<EpochId, std::map<std::uint64_t, Commit>> future;  // next-epoch commits
    std::map<TxDigest, std::vector<Dest>> watchers;         // clients awaiting effects (volatile)
    std::map<TxDigest, VoteAttempt> votes;                  // in-flight vote txs (volatile)
};

}  // namespace

struct Simulation::Impl {
    Scenario sc;
    KeyBook keys;
    Genesis gen;
    Committee committee0;
    std::uint64_t now = 0;
    std::uint64_t order = 0;
    std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventAfter> queue;
    std::vector<ValidatorActor> validators;
    std::unique_ptr<Sequencer> sequencer;
    std::set<std::pair<EpochId, ValidatorId>> epoch_started_votes;
    std::vector<ClientState> clients;
    TraceLog trace;
    Metrics metrics;
    RunReport report;
    bool ran = false;
    std::map<std::string, Rng> link_rngs;

    explicit Impl(Scenario s) : sc(std::move(s)), committee0(sc.genesis_committee()) {
        gen = make_genesis(sc, keys);
        sequencer = std::make_unique<Sequencer>(committee0, &keys, sc.commit_interval);
        setup_validators();
        setup_clients();
        schedule_initial_events();
    }

    // ---- plumbing -------------------------------------------------------

    void emit(const std::string& actor, std::string kind,
              std::map<std::string, std::string> fields) {
        TraceEvent ev;
        ev.time = now;
        ev.actor = actor;
        ev.kind = std::move(kind);
        ev.fields = std::move(fields);
        trace.emit(std::move(ev));
    }

    Rng& link_rng(const std::string& a, const std::string& b) {
        const std::string key = a + ">" + b;
        auto it = link_rngs.find(key);
        if (it == link_rngs.end()) {
            it = link_rngs.emplace(key, Rng::derive(sc.seed, "link/" + key)).first;
        }
        return it->second;
    }

    void push_at(std::uint64_t time, Dest dest, Message msg) {
        queue.push(SimEvent{time, order++, dest, std::move(msg)});
    }

    /// Network send with the eventually-reliable link model: each attempt may
    /// drop; after max_retries the delivery is forced.
    void send(const std::string& from, Dest to, Message msg) {
        Rng& rng = link_rng(from, dest_name(to));
        std::uint64_t when = now;
        for (std::uint32_t attempt = 0; attempt < sc.network.max_retries; ++attempt) {
            if (!rng.chance(sc.network.drop_prob)) break;
            when += sc.network.retry_interval;
        }
        when += rng.range(sc.network.delay_min, sc.network.delay_max);
        push_at(when, to, std::move(msg));
    }

    void send_local(Dest to, Message msg) { push_at(now, to, std::move(msg)); }

    // ---- construction ---------------------------------------------------

    void setup_validators() {
        validators.resize(sc.validators);
        for (std::uint32_t i = 0; i < sc.validators; ++i) {
            ValidatorHooks hooks;
            hooks.submit_cert = [this, i](const TxCert& cert) {
                send("v" + std::to_string(i), Dest{Dest::Kind::sequencer, 0}, MSubmitCert{cert});
            };
            hooks.submit_signal = [this, i](const CommitSignal& signal) {
                send("v" + std::to_string(i), Dest{Dest::Kind::sequencer, 0},
                     MSubmitSignal{signal});
            };
            hooks.on_executed = [this, i](const TxCert& cert, const EffSign& eff) {
                on_validator_executed(i, cert, eff);
            };
            hooks.trace = [this](TraceEvent ev) {
                ev.time = now;
                trace.emit(std::move(ev));
            };
            auto v = std::make_unique<Validator>(
                i, committee0, KeyBook::derive_key(sc.seed, "validator/" + std::to_string(i)),
                &keys, GasSchedule::standard(), hooks);
            v->set_time_source([this] { return now; });
            v->load_genesis(gen.objects);
            const Stake my_stake = committee0.stake_of(i);
            v->configure_reconfig_agent(gen.contract_id, gen.vote_coins.at(i),
                                        sc.epoch.epochs > 1 ? my_stake : 0);
            for (const auto& b : sc.byzantine) {
                if (b.validator == i) {
                    v->set_byzantine(
                        ByzantineConfig{b.sign_conflicting, b.corrupt_checkpoint_sigs});
                }
            }
            validators[i].v = std::move(v);
        }
    }

    void setup_clients() {
        clients.resize(sc.workload.clients);
        for (std::uint32_t c = 0; c < sc.workload.clients; ++c) {
            ClientState& cs = clients[c];
            cs.index = c;
            if (c < sc.workload.behaviors.size()) cs.spec = sc.workload.behaviors[c];
            cs.key = gen.clients[c].key;
            cs.addr = gen.clients[c].addr;
            cs.gas_id = gen.clients[c].gas;
            cs.pool = gen.clients[c].pool;
            cs.txs_left = sc.workload.txs_per_client;
            for (const auto& obj : gen.objects) {
                if (obj.id == cs.gas_id ||
                    std::find(cs.pool.begin(), cs.pool.end(), obj.id) != cs.pool.end()) {
                    cs.refs[obj.id] = make_ref(obj);
                }
            }
        }
    }

    void schedule_initial_events() {
        push_at(sc.commit_interval, Dest{Dest::Kind::sequencer, 0}, TSeqTick{});
        for (std::uint32_t c = 0; c < sc.workload.clients; ++c) {
            clients[c].next_submit_at = 1 + 7 * c;
            push_at(clients[c].next_submit_at, Dest{Dest::Kind::client, c}, TClientKick{c});
        }
        for (std::uint32_t i = 0; i < sc.validators; ++i) {
            push_at(sc.network.retry_interval, Dest{Dest::Kind::validator, i}, TValidatorKick{i});
        }
        for (const auto& crash : sc.crashes) {
            push_at(crash.crash_at, Dest{Dest::Kind::validator, crash.validator},
                    TCrash{crash.validator});
            if (crash.recover_at.has_value()) {
                push_at(*crash.recover_at, Dest{Dest::Kind::validator, crash.validator},
                        TRecover{crash.validator});
            }
        }
        emit("harness", "epoch_meta",
             {{"epoch", "0"},
              {"quorum", std::to_string(committee0.quorum_threshold())},
              {"validity", std::to_string(committee0.validity_threshold())},
              {"total", std::to_string(committee0.total_stake)}});
    }

    // ---- validator actor ------------------------------------------------

    void on_validator_executed(ValidatorId vid, const TxCert& cert, const EffSign& eff) {
        auto& actor = validators[vid];
        auto it = actor.watchers.find(cert.digest());
        if (it == actor.watchers.end()) return;
        for (const auto& dest : it->second) {
            send(actor.v->actor_name(), dest, MEffPush{vid, cert.digest(), eff});
        }
        actor.watchers.erase(it);
    }

    void drain_votes(ValidatorId vid) {
        auto& actor = validators[vid];
        for (Tx& tx : actor.v->drain_vote_intents()) {
            VoteAttempt attempt;
            attempt.digest = tx_digest(tx);
            attempt.tx = std::move(tx);
            attempt.sent_at = now;
            const TxDigest digest = attempt.digest;
            actor.votes.emplace(digest, std::move(attempt));
            for (std::uint32_t j = 0; j < sc.validators; ++j) {
                send(actor.v->actor_name(), Dest{Dest::Kind::validator, j},
                     MTxReq{Dest{Dest::Kind::validator, vid}, actor.votes.at(digest).tx});
            }
        }
    }

    void validator_vote_resp(ValidatorId vid, const MTxResp& resp) {
        auto& actor = validators[vid];
        auto it = actor.votes.find(resp.digest);
        if (it == actor.votes.end()) return;
        VoteAttempt& attempt = it->second;
        if (attempt.submitted || !resp.ok) return;
        attempt.signs[resp.sign.validator] = resp.sign;
        std::vector<TxSign> signs;
        signs.reserve(attempt.signs.size());
        for (const auto& [_, s] : attempt.signs) signs.push_back(s);
        auto cert = aggregate_tx_cert(attempt.tx, signs, actor.v->committee(), keys);
        if (cert.ok()) {
            attempt.submitted = true;
            send(actor.v->actor_name(), Dest{Dest::Kind::sequencer, 0},
                 MSubmitCert{cert.value()});
        }
    }

    void deliver_commit(ValidatorId vid, const Commit& commit) {
        auto& actor = validators[vid];
        if (actor.crashed) return;
        Validator& v = *actor.v;
        if (commit.epoch > v.epoch()) {
            actor.future[commit.epoch][commit.seq] = commit;
            return;
        }
        if (commit.epoch < v.epoch() || commit.seq < v.next_commit_seq()) return;
        actor.ooo[commit.seq] = commit;
        while (!actor.crashed) {
            auto it = actor.ooo.find(v.next_commit_seq());
            if (it == actor.ooo.end()) break;
            Commit next = it->second;
            actor.ooo.erase(it);
            try {
                v.handle_commit(next);
            } catch (const CrashInjected&) {
                crash_validator(vid);
                return;
            }
            drain_votes(vid);
            if (v.handover_complete()) perform_transition(vid);
        }
    }

    void perform_transition(ValidatorId vid) {
        auto& actor = validators[vid];
        Validator& v = *actor.v;
        const Committee next = v.next_committee();
        v.epoch_transition(next);
        actor.ooo.clear();
        actor.votes.clear();
        const Stake my_stake = next.stake_of(vid);
        const bool more_epochs = next.epoch + 1 < sc.epoch.epochs;
        v.configure_reconfig_agent(gen.contract_id, gen.vote_coins.at(vid),
                                   more_epochs ? my_stake : 0);
        send(v.actor_name(), Dest{Dest::Kind::sequencer, 0}, MEpochStarted{vid, next});
        if (!metrics.epoch_start_times.contains(next.epoch)) {
            metrics.epoch_start_times[next.epoch] = now;
        }
        // Anything buffered for the new epoch becomes deliverable.
        auto it = actor.future.find(next.epoch);
        if (it != actor.future.end()) {
            auto buffered = std::move(it->second);
            actor.future.erase(it);
            for (auto& [seq, commit] : buffered) deliver_commit(vid, commit);
        }
        send(v.actor_name(), Dest{Dest::Kind::sequencer, 0},
             MFetchCommits{vid, next.epoch, actor.v->next_commit_seq()});
    }

    void crash_validator(ValidatorId vid) {
        auto& actor = validators[vid];
        if (actor.crashed) return;
        actor.crashed = true;
        actor.ooo.clear();
        actor.future.clear();
        actor.watchers.clear();
        actor.votes.clear();
        actor.v->on_crash();
        emit(actor.v->actor_name(), "crash", {});
    }

    void recover_validator(ValidatorId vid) {
        auto& actor = validators[vid];
        if (!actor.crashed) return;
        actor.crashed = false;
        emit(actor.v->actor_name(), "recover", {});
        send(actor.v->actor_name(), Dest{Dest::Kind::sequencer, 0},
             MFetchCommits{vid, actor.v->epoch(), actor.v->next_commit_seq()});
    }

    void validator_event(ValidatorId vid, const Message& msg) {
        auto& actor = validators[vid];
        if (const auto* crash = std::get_if<TCrash>(&msg)) {
            crash_validator(crash->v);
            return;
        }
        if (const auto* recover = std::get_if<TRecover>(&msg)) {
            recover_validator(recover->v);
            return;
        }
        if (actor.crashed) return;  // dropped at delivery
        Validator& v = *actor.v;

        if (const auto* req = std::get_if<MTxReq>(&msg)) {
            auto res = v.handle_tx(req->tx);
            MTxResp resp;
            resp.from = vid;
            resp.digest = tx_digest(req->tx);
            resp.current_epoch = v.epoch();
            if (res.ok()) {
                resp.ok = true;
                resp.sign = res.value();
            } else {
                resp.code = res.code();
            }
            send(v.actor_name(), req->reply_to, resp);
        } else if (const auto* req = std::get_if<MCertReq>(&msg)) {
            std::vector<ObjKey> missing;
            MCertResp resp;
            resp.from = vid;
            resp.digest = req->cert.digest();
            resp.current_epoch = v.epoch();
            Result<CertOutcome> res = [&]() -> Result<CertOutcome> {
                try {
                    return v.handle_cert(req->cert, &missing);
                } catch (const CrashInjected&) {
                    crash_validator(vid);
                    return Error{Errc::missing_dependency, "validator crashed"};
                }
            }();
            if (actor.crashed) return;
            if (res.ok() && res.value().kind == CertOutcome::Kind::executed) {
                resp.status = MCertResp::Status::executed;
                resp.eff = res.value().eff_sign;
            } else if (res.ok()) {
                resp.status = MCertResp::Status::forwarded;
                actor.watchers[req->cert.digest()].push_back(req->reply_to);
            } else {
                resp.status = MCertResp::Status::error;
                resp.code = res.code();
            }
            send(v.actor_name(), req->reply_to, resp);
        } else if (const auto* resp = std::get_if<MTxResp>(&msg)) {
            validator_vote_resp(vid, *resp);
        } else if (const auto* commit = std::get_if<MCommit>(&msg)) {
            deliver_commit(vid, commit->commit);
        } else if (const auto* batch = std::get_if<MCommitBatch>(&msg)) {
            for (const auto& c : batch->commits) deliver_commit(vid, c);
        } else if (std::get_if<TValidatorKick>(&msg)) {
            // Re-broadcast stale vote attempts (crash-tolerant retries).
            for (auto& [digest, attempt] : actor.votes) {
                if (attempt.submitted ||
                    now - attempt.sent_at < 2 * sc.network.delay_max + sc.network.retry_interval) {
                    continue;
                }
                attempt.sent_at = now;
                for (std::uint32_t j = 0; j < sc.validators; ++j) {
                    send(v.actor_name(), Dest{Dest::Kind::validator, j},
                         MTxReq{Dest{Dest::Kind::validator, vid}, attempt.tx});
                }
            }
            drain_votes(vid);
            if (now < sc.duration) {
                push_at(now + sc.network.retry_interval, Dest{Dest::Kind::validator, vid},
                        TValidatorKick{vid});
            }
        }
    }

    // ---- sequencer actor ------------------------------------------------

    void sequencer_event(const Message& msg) {
        if (const auto* submit = std::get_if<MSubmitCert>(&msg)) {
            (void)sequencer->submit_cert(submit->cert);
        } else if (const auto* signal = std::get_if<MSubmitSignal>(&msg)) {
            (void)sequencer->submit_signal(signal->signal);
        } else if (const auto* fetch = std::get_if<MFetchCommits>(&msg)) {
            auto commits = sequencer->commits_from(fetch->epoch, fetch->from_seq);
            if (!commits.empty()) {
                send("seq", Dest{Dest::Kind::validator, fetch->from},
                     MCommitBatch{std::move(commits)});
            }
        } else if (const auto* started = std::get_if<MEpochStarted>(&msg)) {
            if (started->next.epoch <= sequencer->epoch()) return;
            epoch_started_votes.insert({started->next.epoch, started->from});
            Stake stake = 0;
            for (const auto& [epoch, vid] : epoch_started_votes) {
                if (epoch == started->next.epoch) stake += started->next.stake_of(vid);
            }
            if (stake >= started->next.validity_threshold()) {
                sequencer->begin_epoch(started->next);
                emit("harness", "epoch_meta",
                     {{"epoch", std::to_string(started->next.epoch)},
                      {"quorum", std::to_string(started->next.quorum_threshold())},
                      {"validity", std::to_string(started->next.validity_threshold())},
                      {"total", std::to_string(started->next.total_stake)}});
            }
        } else if (std::get_if<TSeqTick>(&msg)) {
            Commit commit = sequencer->cut();
            emit("seq", "commit",
                 {{"epoch", std::to_string(commit.epoch)},
                  {"seq", std::to_string(commit.seq)},
                  {"certs", std::to_string(commit.certs.size())},
                  {"signals", std::to_string(commit.signals.size())}});
            for (std::uint32_t i = 0; i < sc.validators; ++i) {
                send("seq", Dest{Dest::Kind::validator, i}, MCommit{commit});
            }
            if (now < sc.duration) {
                push_at(now + sc.commit_interval, Dest{Dest::Kind::sequencer, 0}, TSeqTick{});
            }
        }
    }

    // ---- client actor ---------------------------------------------------

    Address fresh_recipient(ClientState& cs, const std::string& salt) {
        return address_of_key(
            KeyBook::derive_key(sc.seed, "recipient/" + std::to_string(cs.index) + "/" + salt));
    }

    std::optional<Tx> build_workload_tx(ClientState& cs, bool conflicting_twin) {
        WorkloadKind kind = sc.workload.kind;
        if (kind == WorkloadKind::mixed) {
            kind = (cs.seq_no % 2 == 0) ? WorkloadKind::owned : WorkloadKind::shared;
        }
        TxSpec spec;
        spec.epoch = cs.known_epoch;
        spec.sender = cs.addr;
        spec.gas_ref = cs.refs.at(cs.gas_id);
        spec.gas_budget = 2000 + 20ull * sc.workload.ptb_size;
        const std::string salt =
            std::to_string(cs.seq_no) + (conflicting_twin ? "/b" : "/a");
        switch (kind) {
            case WorkloadKind::owned: {
                // Transfers go back to the sender so the pool stays usable;
                // equivocating twins name distinct recipients so the pair
                // genuinely conflicts.
                const ObjId obj = cs.pool[cs.seq_no % cs.pool.size()];
                spec.owned_inputs = {cs.refs.at(obj)};
                const Address to = cs.spec.kind == ClientKind::equivocator
                                       ? fresh_recipient(cs, salt)
                                       : cs.addr;
                spec.commands = {TransferOwned{obj, to}};
                break;
            }
            case WorkloadKind::shared:
                spec.commands = {IncrementShared{gen.counter_id}};
                spec.shared_inputs = {SharedInput{gen.counter_id, gen.counter_initial}};
                break;
            case WorkloadKind::shared_read:
                spec.commands = {ReadShared{gen.counter_id}};
                spec.shared_inputs = {SharedInput{gen.counter_id, gen.counter_initial}};
                break;
            case WorkloadKind::ptb: {
                std::vector<Command> cmds;
                for (std::uint32_t i = 0; i < sc.workload.ptb_size; ++i) {
                    const ObjId obj = cs.pool[i % cs.pool.size()];
                    spec.owned_inputs.push_back(cs.refs.at(obj));
                    cmds.push_back(TransferOwned{obj, cs.addr});
                }
                auto tx = make_ptb(spec, cmds, cs.key);
                return tx.ok() ? std::optional<Tx>(tx.value()) : std::nullopt;
            }
            case WorkloadKind::mixed:
                return std::nullopt;  // resolved above
        }
        auto tx = build_tx(spec, cs.key);
        return tx.ok() ? std::optional<Tx>(tx.value()) : std::nullopt;
    }

    void client_record_new(ClientState& cs, const Attempt& attempt, bool shared,
                           std::uint32_t ops) {
        TxRecord rec;
        rec.client = "c" + std::to_string(cs.index);
        rec.digest = attempt.digest.hex();
        rec.epoch = attempt.tx.epoch;
        rec.submit_time = attempt.submitted_at;
        rec.shared = shared;
        rec.ops = ops;
        rec.waves = 1;
        cs.record = metrics.txs.size();
        metrics.txs.push_back(rec);
        emit(rec.client, "tx_submitted",
             {{"digest", rec.digest}, {"epoch", std::to_string(rec.epoch)}});
    }

    void client_broadcast_tx(ClientState& cs, Attempt& attempt) {
        attempt.phase_sent_at = now;
        const std::string from = "c" + std::to_string(cs.index);
        const int copies = cs.spec.kind == ClientKind::resubmitter ? 2 : 1;
        for (std::uint32_t j = 0; j < sc.validators; ++j) {
            for (int k = 0; k < copies; ++k) {
                send(from, Dest{Dest::Kind::validator, j},
                     MTxReq{Dest{Dest::Kind::client, cs.index}, attempt.tx});
            }
        }
    }

    void client_submit(ClientState& cs) {
        if (cs.txs_left == 0 || cs.current.has_value()) return;
        if (cs.spec.kind == ClientKind::equivocator) {
            client_submit_equivocation(cs);
            return;
        }
        const bool shared = sc.workload.kind == WorkloadKind::shared ||
                            sc.workload.kind == WorkloadKind::shared_read ||
                            (sc.workload.kind == WorkloadKind::mixed && cs.seq_no % 2 == 1);
        auto tx = build_workload_tx(cs, false);
        if (!tx.has_value()) {
            cs.done = true;
            return;
        }
        Attempt attempt;
        attempt.tx = *tx;
        attempt.digest = tx_digest(*tx);
        attempt.submitted_at = now;
        cs.current = attempt;
        client_record_new(cs, *cs.current, shared,
                          static_cast<std::uint32_t>(tx->kind.commands.size()));
        client_broadcast_tx(cs, *cs.current);
        cs.txs_left--;
        cs.seq_no++;
    }

    void client_submit_equivocation(ClientState& cs) {
        auto tx_a = build_workload_tx(cs, false);
        auto tx_b = build_workload_tx(cs, true);
        if (!tx_a || !tx_b) {
            cs.done = true;
            return;
        }
        Attempt a;
        a.tx = *tx_a;
        a.digest = tx_digest(*tx_a);
        a.submitted_at = now;
        Attempt b;
        b.tx = *tx_b;
        b.digest = tx_digest(*tx_b);
        b.submitted_at = now;
        cs.current = a;
        cs.second = b;
        client_record_new(cs, a, false, 1);
        metrics.txs.back().note = "equivocated";
        const std::string from = "c" + std::to_string(cs.index);
        for (std::uint32_t j = 0; j < sc.validators; ++j) {
            const EquivRoute route =
                j < cs.spec.split.size() ? cs.spec.split[j] : EquivRoute::first_only;
            const Dest self{Dest::Kind::client, cs.index};
            switch (route) {
                case EquivRoute::first_only:
                    send(from, Dest{Dest::Kind::validator, j}, MTxReq{self, a.tx});
                    break;
                case EquivRoute::second_only:
                    send(from, Dest{Dest::Kind::validator, j}, MTxReq{self, b.tx});
                    break;
                case EquivRoute::first_then_second: {
                    send(from, Dest{Dest::Kind::validator, j}, MTxReq{self, a.tx});
                    // Staggered past the delay window so arrival order is fixed.
                    push_at(now + sc.network.delay_max + 1, Dest{Dest::Kind::validator, j},
                            MTxReq{self, b.tx});
                    break;
                }
                case EquivRoute::second_then_first: {
                    send(from, Dest{Dest::Kind::validator, j}, MTxReq{self, b.tx});
                    push_at(now + sc.network.delay_max + 1, Dest{Dest::Kind::validator, j},
                            MTxReq{self, a.tx});
                    break;
                }
                case EquivRoute::neither: break;
            }
        }
        cs.txs_left--;
        cs.seq_no++;
    }

    void client_try_certify(ClientState& cs, Attempt& attempt) {
        if (attempt.cert.has_value() || attempt.abandoned) return;
        std::vector<TxSign> signs;
        signs.reserve(attempt.signs.size());
        for (const auto& [_, s] : attempt.signs) signs.push_back(s);
        Committee committee = committee0;
        if (attempt.tx.epoch != committee.epoch) {
            // Renewed transaction: thresholds are unchanged in these
            // scenarios (same stakes re-registered); reuse with new epoch id.
            committee.epoch = attempt.tx.epoch;
        }
        auto cert = aggregate_tx_cert(attempt.tx, signs, committee, keys);
        if (!cert.ok()) return;
        attempt.cert = cert.value();
        if (cs.record != SIZE_MAX) {
            metrics.txs[cs.record].wave1_done = now;
            metrics.txs[cs.record].cert_sent = now;
            metrics.txs[cs.record].waves += 1;
        }
        std::string owned_keys;
        for (const auto& ref : attempt.tx.owned_inputs) {
            if (!owned_keys.empty()) owned_keys += ",";
            owned_keys += ref.id.hex() + ":" + std::to_string(ref.version);
        }
        emit("c" + std::to_string(cs.index), "cert_formed",
             {{"digest", attempt.digest.hex()},
              {"epoch", std::to_string(attempt.tx.epoch)},
              {"owned_keys", owned_keys}});
        attempt.phase_sent_at = now;
        const std::string from = "c" + std::to_string(cs.index);
        std::uint32_t copies = sc.validators;
        if (cs.spec.kind == ClientKind::crasher) {
            copies = std::min(cs.spec.submit_copies, sc.validators);
            if (cs.record != SIZE_MAX) metrics.txs[cs.record].note = "crashed_after_cert";
        }
        for (std::uint32_t j = 0; j < copies; ++j) {
            const int dup = cs.spec.kind == ClientKind::resubmitter ? 2 : 1;
            for (int k = 0; k < dup; ++k) {
                send(from, Dest{Dest::Kind::validator, j},
                     MCertReq{Dest{Dest::Kind::client, cs.index}, *attempt.cert});
            }
        }
        if (cs.spec.kind == ClientKind::crasher) {
            attempt.abandoned = true;  // walks away after firing the certificate
            cs.done = cs.txs_left == 0;
            cs.current.reset();
        }
    }

    void client_settled(ClientState& cs, Attempt& attempt, const Effects& effects) {
        if (cs.record != SIZE_MAX) {
            metrics.txs[cs.record].settlement = now;
            if (!metrics.txs[cs.record].finality.has_value()) {
                metrics.txs[cs.record].finality = now;
            }
        }
        emit("c" + std::to_string(cs.index), "effcert_formed",
             {{"digest", attempt.digest.hex()}, {"epoch", std::to_string(attempt.tx.epoch)}});
        metrics.distinct_effcerts += 1;
        metrics.settled_ops += attempt.tx.kind.commands.size();
        // Refresh object references from the effects.
        for (const auto& ref : effects.mutated) {
            if (cs.refs.contains(ref.id)) cs.refs[ref.id] = ref;
        }
        for (const auto& ref : effects.created) {
            (void)ref;  // workload transactions do not track created objects
        }
        cs.current.reset();
        cs.second.reset();
        if (cs.txs_left == 0) {
            cs.done = true;
        } else {
            cs.next_submit_at = now + sc.workload.interval;
            push_at(cs.next_submit_at, Dest{Dest::Kind::client, cs.index},
                    TClientKick{cs.index});
        }
    }

    void client_renew(ClientState& cs) {
        // The previous epoch closed under this attempt; re-sign the same
        // command for the current epoch and start over.
        if (!cs.current.has_value()) return;
        Attempt& attempt = *cs.current;
        if (attempt.tx.epoch >= cs.known_epoch) return;
        Tx renewed = attempt.tx;
        renewed.epoch = cs.known_epoch;
        renewed = sign_tx(std::move(renewed), cs.key);
        Attempt fresh;
        fresh.tx = renewed;
        fresh.digest = tx_digest(renewed);
        fresh.submitted_at = attempt.submitted_at;
        cs.second.reset();
        if (cs.record != SIZE_MAX) {
            metrics.txs[cs.record].digest = fresh.digest.hex();
            metrics.txs[cs.record].epoch = renewed.epoch;
            metrics.txs[cs.record].waves += 1;
        }
        emit("c" + std::to_string(cs.index), "tx_renewed",
             {{"digest", fresh.digest.hex()}, {"epoch", std::to_string(renewed.epoch)}});
        cs.current = fresh;
        client_broadcast_tx(cs, *cs.current);
    }

    void client_event(std::uint32_t index, const Message& msg) {
        ClientState& cs = clients[index];
        if (std::get_if<TClientKick>(&msg)) {
            client_kick(cs);
            return;
        }
        if (const auto* resp = std::get_if<MTxResp>(&msg)) {
            Attempt* attempt = nullptr;
            if (cs.current && cs.current->digest == resp->digest) attempt = &*cs.current;
            if (cs.second && cs.second->digest == resp->digest) attempt = &*cs.second;
            if (attempt == nullptr) return;
            cs.known_epoch = std::max(cs.known_epoch, resp->current_epoch);
            if (resp->ok) {
                attempt->signs[resp->sign.validator] = resp->sign;
                attempt->responded.insert(resp->from);
                client_try_certify(cs, *attempt);
            } else {
                attempt->responded.insert(resp->from);
                if (resp->code == Errc::lock_conflict) {
                    attempt->conflict_stake += committee0.stake_of(resp->from);
                    if (attempt->conflict_stake >= committee0.validity_threshold() &&
                        cs.record != SIZE_MAX && metrics.txs[cs.record].note.empty()) {
                        metrics.txs[cs.record].note = "equivocation_detected";
                    }
                }
            }
            return;
        }
        if (const auto* resp = std::get_if<MCertResp>(&msg)) {
            if (!cs.current || cs.current->digest != resp->digest) return;
            Attempt& attempt = *cs.current;
            cs.known_epoch = std::max(cs.known_epoch, resp->current_epoch);
            if (resp->status == MCertResp::Status::error) return;
            attempt.cert_acked.insert(resp->from);
            if (resp->status == MCertResp::Status::executed && resp->eff.has_value()) {
                attempt.effs[resp->from] = *resp->eff;
            }
            client_progress(cs, attempt);
            return;
        }
        if (const auto* push = std::get_if<MEffPush>(&msg)) {
            if (!cs.current || cs.current->digest != push->digest) return;
            cs.current->cert_acked.insert(push->from);
            cs.current->effs[push->from] = push->eff;
            client_progress(cs, *cs.current);
            return;
        }
    }

    void client_progress(ClientState& cs, Attempt& attempt) {
        std::vector<ValidatorId> acked(attempt.cert_acked.begin(), attempt.cert_acked.end());
        Committee committee = committee0;
        committee.epoch = attempt.tx.epoch;
        if (!attempt.finality_done &&
            committee.stake_of(acked) >= committee.quorum_threshold()) {
            attempt.finality_done = true;
            if (cs.record != SIZE_MAX) metrics.txs[cs.record].finality = now;
            emit("c" + std::to_string(cs.index), "tx_finalized",
                 {{"digest", attempt.digest.hex()},
                  {"epoch", std::to_string(attempt.tx.epoch)},
                  {"waves", std::to_string(cs.record != SIZE_MAX ? metrics.txs[cs.record].waves
                                                                 : 0)}});
        }
        if (attempt.settled) return;
        std::vector<EffSign> signs;
        signs.reserve(attempt.effs.size());
        for (const auto& [_, s] : attempt.effs) signs.push_back(s);
        if (signs.empty()) return;
        auto cert = aggregate_eff_cert(signs.front().effects, signs, committee, keys);
        if (!cert.ok()) return;
        attempt.settled = true;
        client_settled(cs, attempt, cert.value().effects);
    }

    void client_kick(ClientState& cs) {
        if (cs.done) return;
        if (!cs.current.has_value()) {
            if (cs.txs_left > 0 && now >= cs.next_submit_at && now <= sc.duration) {
                client_submit(cs);
            }
        } else {
            Attempt& attempt = *cs.current;
            if (attempt.tx.epoch < cs.known_epoch && !attempt.settled) {
                client_renew(cs);
            } else if (!attempt.abandoned &&
                       now - attempt.phase_sent_at >
                           2 * sc.network.delay_max + sc.network.retry_interval) {
                // Resend the current phase to validators that never answered.
                // A fully-answered but uncertified attempt is deadlocked
                // (equivocation or epoch change); poll everyone again so the
                // client learns the current epoch and can renew.
                const std::string from = "c" + std::to_string(cs.index);
                if (cs.record != SIZE_MAX) metrics.txs[cs.record].waves += 1;
                attempt.phase_sent_at = now;
                if (!attempt.cert.has_value() && attempt.responded.size() >= sc.validators) {
                    attempt.responded.clear();
                }
                for (std::uint32_t j = 0; j < sc.validators; ++j) {
                    if (!attempt.cert.has_value()) {
                        if (!attempt.responded.contains(j)) {
                            send(from, Dest{Dest::Kind::validator, j},
                                 MTxReq{Dest{Dest::Kind::client, cs.index}, attempt.tx});
                        }
                    } else if (!attempt.cert_acked.contains(j) ||
                               (!attempt.settled && !attempt.effs.contains(j))) {
                        send(from, Dest{Dest::Kind::validator, j},
                             MCertReq{Dest{Dest::Kind::client, cs.index}, *attempt.cert});
                    }
                }
            }
        }
        if (now < sc.duration && !cs.done) {
            push_at(now + std::max<std::uint64_t>(sc.network.retry_interval, 20),
                    Dest{Dest::Kind::client, cs.index}, TClientKick{cs.index});
        }
    }

    // ---- run loop ---------------------------------------------------------

    void run() {
        while (!queue.empty()) {
            SimEvent ev = queue.top();
            queue.pop();
            now = ev.time;
            switch (ev.dest.kind) {
                case Dest::Kind::validator: validator_event(ev.dest.index, ev.msg); break;
                case Dest::Kind::sequencer: sequencer_event(ev.msg); break;
                case Dest::Kind::client: client_event(ev.dest.index, ev.msg); break;
            }
        }
        finalize();
    }

    void finalize() {
        metrics.duration = sc.duration;
        metrics.end_time = now;
        for (const auto& ev : trace.events()) {
            if (ev.kind == "checkpoint_built" && ev.actor == "v0") {
                metrics.checkpoints_per_epoch[ev.field_u64("epoch")] += 1;
            }
        }

        // Correct = non-Byzantine and fully caught up with the commit stream.
        std::set<ValidatorId> byz;
        for (const auto& b : sc.byzantine) byz.insert(b.validator);
        std::pair<EpochId, std::uint64_t> best{0, 0};
        for (std::uint32_t i = 0; i < sc.validators; ++i) {
            if (byz.contains(i)) continue;
            best = std::max(best, {validators[i].v->epoch(), validators[i].v->next_commit_seq()});
        }
        std::vector<std::string> correct;
        for (std::uint32_t i = 0; i < sc.validators; ++i) {
            if (byz.contains(i)) continue;
            const std::pair<EpochId, std::uint64_t> pos{validators[i].v->epoch(),
                                                        validators[i].v->next_commit_seq()};
            if (pos == best) correct.push_back(validators[i].v->actor_name());
        }
        std::string joined;
        for (const auto& name : correct) {
            if (!joined.empty()) joined += ",";
            joined += name;
        }
        emit("harness", "run_meta",
             {{"correct", joined},
              {"quorum", std::to_string(committee0.quorum_threshold())}});

        report.checks = run_safety_checks(trace.events(), correct, committee0.quorum_threshold());
        report.safety_ok = all_passed(report.checks);
        report.correct_actors = correct;
        report.metrics = metrics;
        report.trace = trace;
    }
};

Simulation::Simulation(Scenario sc) : impl_(std::make_unique<Impl>(std::move(sc))) {}
Simulation::~Simulation() = default;

const RunReport& Simulation::run() {
    if (!impl_->ran) {
        impl_->run();
        impl_->ran = true;
    }
    return impl_->report;
}

const Scenario& Simulation::scenario() const { return impl_->sc; }
const Genesis& Simulation::genesis() const { return impl_->gen; }
const KeyBook& Simulation::keys() const { return impl_->keys; }
Validator& Simulation::validator(ValidatorId id) { return *impl_->validators.at(id).v; }
std::uint32_t Simulation::validator_count() const { return impl_->sc.validators; }
std::uint64_t Simulation::now() const { return impl_->now; }

RunReport run_scenario(const Scenario& sc) {
    Simulation sim(sc);
    return sim.run();
}

}  // namespace duallane
