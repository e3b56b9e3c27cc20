// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace duallane {

using nlohmann::json;

std::string TraceEvent::field(const std::string& key) const {
    auto it = fields.find(key);
    return it == fields.end() ? std::string{} : it->second;
}

std::uint64_t TraceEvent::field_u64(const std::string& key) const {
    const std::string v = field(key);
    return v.empty() ? 0 : std::stoull(v);
}

std::string TraceLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& ev : events_) {
        json j;
        j["t"] = ev.time;
        j["actor"] = ev.actor;
        j["kind"] = ev.kind;
        for (const auto& [k, v] : ev.fields) j[k] = v;
        out << j.dump() << '\n';
    }
    return out.str();
}

TraceLog TraceLog::from_jsonl(const std::string& text) {
    TraceLog log;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("kind")) {
            throw std::runtime_error("corrupt trace at line " + std::to_string(lineno));
        }
        TraceEvent ev;
        ev.time = j.value("t", std::uint64_t{0});
        ev.actor = j.value("actor", "");
        ev.kind = j.at("kind").get<std::string>();
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "t" || it.key() == "actor" || it.key() == "kind") continue;
            if (it.value().is_string()) ev.fields[it.key()] = it.value().get<std::string>();
        }
        log.emit(std::move(ev));
    }
    return log;
}

void TraceLog::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_jsonl();
}

TraceLog TraceLog::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

namespace {

CheckResult check_bcb_consistency(const std::vector<TraceEvent>& events, Stake quorum_stake) {
    CheckResult res{"bcb_consistency", true, ""};
    // Stake of lock grants per (epoch, object key, tx digest).
    std::map<std::tuple<std::string, std::string, std::string>, std::map<std::string, Stake>>
        grants;
    for (const auto& ev : events) {
        if (ev.kind != "lock_granted") continue;
        auto key = std::make_tuple(ev.field("epoch"), ev.field("obj"), ev.field("obj_version"));
        grants[key][ev.field("digest")] += ev.field_u64("stake");
    }
    for (const auto& [key, per_digest] : grants) {
        int quorums = 0;
        for (const auto& [digest, stake] : per_digest) {
            if (stake >= quorum_stake) ++quorums;
        }
        if (quorums > 1) {
            res.passed = false;
            res.detail = "two transactions reached a lock quorum on object " + std::get<1>(key) +
                         " v" + std::get<2>(key) + " epoch " + std::get<0>(key);
            return res;
        }
    }
    // Independently: no two distinct certificates formed over one key+epoch.
    std::map<std::pair<std::string, std::string>, std::set<std::string>> certs;
    for (const auto& ev : events) {
        if (ev.kind != "cert_formed") continue;
        std::istringstream keys(ev.field("owned_keys"));
        std::string item;
        while (std::getline(keys, item, ',')) {
            if (item.empty()) continue;
            certs[{ev.field("epoch"), item}].insert(ev.field("digest"));
        }
    }
    for (const auto& [key, digests] : certs) {
        if (digests.size() > 1) {
            res.passed = false;
            res.detail = "conflicting certificates on " + key.second + " epoch " + key.first;
            return res;
        }
    }
    return res;
}

CheckResult check_shared_lock_consistency(const std::vector<TraceEvent>& events,
                                          const std::vector<std::string>& correct) {
    CheckResult res{"shared_lock_consistency", true, ""};
    const std::set<std::string> correct_set(correct.begin(), correct.end());
    // Per epoch, per validator: assignment log in emission order.
    std::map<std::string, std::map<std::string, std::vector<std::string>>> logs;
    for (const auto& ev : events) {
        if (ev.kind != "shared_lock_set") continue;
        if (!correct_set.contains(ev.actor)) continue;
        logs[ev.field("epoch")][ev.actor].push_back(ev.field("digest") + ":" + ev.field("obj") +
                                                    ":" + ev.field("version"));
    }
    for (const auto& [epoch, per_validator] : logs) {
        for (auto a = per_validator.begin(); a != per_validator.end(); ++a) {
            for (auto b = std::next(a); b != per_validator.end(); ++b) {
                const auto& la = a->second;
                const auto& lb = b->second;
                const std::size_t n = std::min(la.size(), lb.size());
                for (std::size_t i = 0; i < n; ++i) {
                    if (la[i] != lb[i]) {
                        res.passed = false;
                        res.detail = "shared lock logs diverge between " + a->first + " and " +
                                     b->first + " at index " + std::to_string(i) + " epoch " +
                                     epoch;
                        return res;
                    }
                }
            }
        }
    }
    return res;
}

CheckResult check_checkpoint_chains(const std::vector<TraceEvent>& events,
                                    const std::vector<std::string>& correct) {
    CheckResult res{"checkpoint_chain_equality", true, ""};
    const std::set<std::string> correct_set(correct.begin(), correct.end());
    // (epoch, seq) -> digest -> validators; also verify the per-validator chain.
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::map<std::string, std::set<std::string>>>
        built;
    std::map<std::string, std::string> prev_by_validator;
    for (const auto& ev : events) {
        if (ev.kind != "checkpoint_built") continue;
        if (!correct_set.contains(ev.actor)) continue;
        built[{ev.field_u64("epoch"), ev.field_u64("seq")}][ev.field("digest")].insert(ev.actor);
        auto& prev = prev_by_validator[ev.actor];
        if (!prev.empty() && prev != ev.field("prev")) {
            res.passed = false;
            res.detail = "broken hash chain at " + ev.actor + " seq " + ev.field("seq");
            return res;
        }
        prev = ev.field("digest");
    }
    for (const auto& [key, digests] : built) {
        if (digests.size() > 1) {
            res.passed = false;
            res.detail = "checkpoint digest divergence at epoch " + std::to_string(key.first) +
                         " seq " + std::to_string(key.second);
            return res;
        }
    }
    return res;
}

CheckResult check_epoch_state_equality(const std::vector<TraceEvent>& events,
                                       const std::vector<std::string>& correct) {
    CheckResult res{"epoch_state_equality", true, ""};
    const std::set<std::string> correct_set(correct.begin(), correct.end());
    std::map<std::string, std::set<std::string>> digests_per_epoch;
    for (const auto& ev : events) {
        if (ev.kind != "epoch_transition") continue;
        if (!correct_set.contains(ev.actor)) continue;
        digests_per_epoch[ev.field("new_epoch")].insert(ev.field("state"));
    }
    for (const auto& [epoch, digests] : digests_per_epoch) {
        if (digests.size() > 1) {
            res.passed = false;
            res.detail = "state divergence entering epoch " + epoch;
            return res;
        }
    }
    return res;
}

CheckResult check_settled_never_reverted(const std::vector<TraceEvent>& events) {
    CheckResult res{"settled_never_reverted", true, ""};
    std::set<std::string> settled;
    for (const auto& ev : events) {
        if (ev.kind == "effcert_formed") settled.insert(ev.field("digest"));
    }
    for (const auto& ev : events) {
        if (ev.kind == "rolled_back" && settled.contains(ev.field("digest"))) {
            res.passed = false;
            res.detail = "settled transaction rolled back: " + ev.field("digest");
            return res;
        }
    }
    return res;
}

}  // namespace

std::vector<CheckResult> run_safety_checks(const std::vector<TraceEvent>& events,
                                           const std::vector<std::string>& correct_actors,
                                           Stake quorum_stake) {
    return {
        check_bcb_consistency(events, quorum_stake),
        check_shared_lock_consistency(events, correct_actors),
        check_checkpoint_chains(events, correct_actors),
        check_epoch_state_equality(events, correct_actors),
        check_settled_never_reverted(events),
    };
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

}  // namespace duallane
