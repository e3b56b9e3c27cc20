// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace duallane {

using nlohmann::json;

Committee Scenario::genesis_committee() const {
    std::map<ValidatorId, Stake> members;
    for (std::uint32_t i = 0; i < validators; ++i) {
        members[i] = i < stakes.size() ? stakes[i] : 1;
    }
    return Committee::make(0, members);
}

namespace {

WorkloadKind workload_kind_from(const std::string& s) {
    if (s == "owned") return WorkloadKind::owned;
    if (s == "shared") return WorkloadKind::shared;
    if (s == "shared_read") return WorkloadKind::shared_read;
    if (s == "ptb") return WorkloadKind::ptb;
    if (s == "mixed") return WorkloadKind::mixed;
    throw std::runtime_error("unknown workload kind: " + s);
}

std::string workload_kind_name(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::owned: return "owned";
        case WorkloadKind::shared: return "shared";
        case WorkloadKind::shared_read: return "shared_read";
        case WorkloadKind::ptb: return "ptb";
        case WorkloadKind::mixed: return "mixed";
    }
    return "owned";
}

ClientKind client_kind_from(const std::string& s) {
    if (s == "normal") return ClientKind::normal;
    if (s == "equivocator") return ClientKind::equivocator;
    if (s == "crasher") return ClientKind::crasher;
    if (s == "resubmitter") return ClientKind::resubmitter;
    throw std::runtime_error("unknown client kind: " + s);
}

std::string client_kind_name(ClientKind k) {
    switch (k) {
        case ClientKind::normal: return "normal";
        case ClientKind::equivocator: return "equivocator";
        case ClientKind::crasher: return "crasher";
        case ClientKind::resubmitter: return "resubmitter";
    }
    return "normal";
}

}  // namespace

Result<Scenario> scenario_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return Error{Errc::bad_config, "scenario is not a JSON object"};
    }
    try {
        Scenario sc;
        sc.seed = j.value("seed", sc.seed);
        sc.validators = j.value("validators", sc.validators);
        if (j.contains("stakes")) sc.stakes = j.at("stakes").get<std::vector<Stake>>();
        if (j.contains("network")) {
            const auto& n = j.at("network");
            sc.network.delay_min = n.value("delay_min", sc.network.delay_min);
            sc.network.delay_max = n.value("delay_max", sc.network.delay_max);
            sc.network.drop_prob = n.value("drop_prob", sc.network.drop_prob);
            sc.network.max_retries = n.value("max_retries", sc.network.max_retries);
            sc.network.retry_interval = n.value("retry_interval", sc.network.retry_interval);
        }
        sc.commit_interval = j.value("commit_interval", sc.commit_interval);
        if (j.contains("epoch")) {
            const auto& e = j.at("epoch");
            sc.epoch.checkpoints_before_change =
                e.value("checkpoints_before_change", sc.epoch.checkpoints_before_change);
            sc.epoch.min_stake = e.value("min_stake", sc.epoch.min_stake);
            sc.epoch.epochs = e.value("epochs", sc.epoch.epochs);
        }
        if (j.contains("crashes")) {
            for (const auto& c : j.at("crashes")) {
                CrashSpec spec;
                spec.validator = c.at("validator").get<ValidatorId>();
                spec.crash_at = c.at("crash_at").get<std::uint64_t>();
                if (c.contains("recover_at")) {
                    spec.recover_at = c.at("recover_at").get<std::uint64_t>();
                }
                sc.crashes.push_back(spec);
            }
        }
        if (j.contains("byzantine")) {
            for (const auto& b : j.at("byzantine")) {
                ByzantineSpec spec;
                spec.validator = b.at("validator").get<ValidatorId>();
                spec.sign_conflicting = b.value("sign_conflicting", false);
                spec.corrupt_checkpoint_sigs = b.value("corrupt_checkpoint_sigs", false);
                sc.byzantine.push_back(spec);
            }
        }
        if (j.contains("workload")) {
            const auto& w = j.at("workload");
            sc.workload.clients = w.value("clients", sc.workload.clients);
            sc.workload.txs_per_client = w.value("txs_per_client", sc.workload.txs_per_client);
            if (w.contains("kind")) {
                sc.workload.kind = workload_kind_from(w.at("kind").get<std::string>());
            }
            sc.workload.interval = w.value("interval", sc.workload.interval);
            sc.workload.ptb_size = w.value("ptb_size", sc.workload.ptb_size);
            if (w.contains("behaviors")) {
                for (const auto& b : w.at("behaviors")) {
                    ClientSpec spec;
                    spec.kind = client_kind_from(b.value("kind", "normal"));
                    if (b.contains("split")) {
                        for (const auto& r : b.at("split")) {
                            spec.split.push_back(static_cast<EquivRoute>(r.get<int>()));
                        }
                    }
                    spec.submit_copies = b.value("submit_copies", 1u);
                    sc.workload.behaviors.push_back(spec);
                }
            }
        }
        sc.duration = j.value("duration", sc.duration);

        if (sc.validators == 0) return Error{Errc::bad_config, "need at least one validator"};
        if (!sc.stakes.empty() && sc.stakes.size() != sc.validators) {
            return Error{Errc::bad_config, "stakes list does not match validator count"};
        }
        if (sc.network.delay_min == 0 || sc.network.delay_max < sc.network.delay_min) {
            return Error{Errc::bad_config, "bad delay window"};
        }
        if (sc.network.drop_prob < 0.0 || sc.network.drop_prob >= 1.0) {
            return Error{Errc::bad_config, "drop probability must be in [0,1)"};
        }
        if (sc.commit_interval == 0) return Error{Errc::bad_config, "commit interval must be > 0"};
        if (sc.epoch.checkpoints_before_change == 0) {
            return Error{Errc::bad_config, "need at least one checkpoint per epoch"};
        }
        if (sc.epoch.epochs == 0) return Error{Errc::bad_config, "need at least one epoch"};
        for (const auto& c : sc.crashes) {
            if (c.validator >= sc.validators) return Error{Errc::bad_config, "crash of unknown validator"};
        }
        for (const auto& b : sc.byzantine) {
            if (b.validator >= sc.validators) return Error{Errc::bad_config, "unknown byzantine validator"};
        }
        return sc;
    } catch (const std::exception& e) {
        return Error{Errc::bad_config, e.what()};
    }
}

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["seed"] = sc.seed;
    j["validators"] = sc.validators;
    if (!sc.stakes.empty()) j["stakes"] = sc.stakes;
    j["network"] = {{"delay_min", sc.network.delay_min},
                    {"delay_max", sc.network.delay_max},
                    {"drop_prob", sc.network.drop_prob},
                    {"max_retries", sc.network.max_retries},
                    {"retry_interval", sc.network.retry_interval}};
    j["commit_interval"] = sc.commit_interval;
    j["epoch"] = {{"checkpoints_before_change", sc.epoch.checkpoints_before_change},
                  {"min_stake", sc.epoch.min_stake},
                  {"epochs", sc.epoch.epochs}};
    json crashes = json::array();
    for (const auto& c : sc.crashes) {
        json e = {{"validator", c.validator}, {"crash_at", c.crash_at}};
        if (c.recover_at) e["recover_at"] = *c.recover_at;
        crashes.push_back(e);
    }
    if (!crashes.empty()) j["crashes"] = crashes;
    json byz = json::array();
    for (const auto& b : sc.byzantine) {
        byz.push_back({{"validator", b.validator},
                       {"sign_conflicting", b.sign_conflicting},
                       {"corrupt_checkpoint_sigs", b.corrupt_checkpoint_sigs}});
    }
    if (!byz.empty()) j["byzantine"] = byz;
    json behaviors = json::array();
    for (const auto& b : sc.workload.behaviors) {
        json e = {{"kind", client_kind_name(b.kind)}, {"submit_copies", b.submit_copies}};
        if (!b.split.empty()) {
            json split = json::array();
            for (auto r : b.split) split.push_back(static_cast<int>(r));
            e["split"] = split;
        }
        behaviors.push_back(e);
    }
    j["workload"] = {{"clients", sc.workload.clients},
                     {"txs_per_client", sc.workload.txs_per_client},
                     {"kind", workload_kind_name(sc.workload.kind)},
                     {"interval", sc.workload.interval},
                     {"ptb_size", sc.workload.ptb_size}};
    if (!behaviors.empty()) j["workload"]["behaviors"] = behaviors;
    j["duration"] = sc.duration;
    return j.dump(2);
}

Result<Scenario> load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Error{Errc::bad_config, "cannot open " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

}  // namespace duallane
