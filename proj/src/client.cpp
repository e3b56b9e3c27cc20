// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/client.hpp"

#include <algorithm>
#include <set>

namespace duallane {

Result<Tx> build_tx(const TxSpec& spec, const SecretKey& key) {
    if (spec.commands.empty()) return Error{Errc::invalid_tx, "no commands"};
    Tx tx;
    tx.epoch = spec.epoch;
    tx.sender = spec.sender;
    try {
        tx.kind = spec.bundle ? TxKind::ptb(spec.commands) : TxKind::single(spec.commands.front());
    } catch (const std::logic_error& e) {
        return Error{Errc::invalid_tx, e.what()};
    }
    tx.owned_inputs = spec.owned_inputs;
    tx.readonly_inputs = spec.readonly_inputs;
    tx.shared_inputs = spec.shared_inputs;
    tx.gas_ref = spec.gas_ref;
    tx.gas_budget = spec.gas_budget;
    tx.tip = spec.tip;
    bool gas_listed = false;
    for (const auto& r : tx.owned_inputs) gas_listed |= (r == tx.gas_ref);
    if (!gas_listed) tx.owned_inputs.push_back(tx.gas_ref);
    return sign_tx(std::move(tx), key);
}

Result<Tx> make_ptb(TxSpec base, std::vector<Command> commands, const SecretKey& key) {
    if (commands.empty()) return Error{Errc::invalid_tx, "empty bundle"};
    // Inputs are single-use: no object may be named by two commands.
    std::set<ObjId> used;
    for (const auto& cmd : commands) {
        std::vector<ObjId> ids;
        std::visit(
            [&ids](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, TransferOwned> || std::is_same_v<T, MutateOwned> ||
                              std::is_same_v<T, DeleteObject>) {
                    ids.push_back(c.obj);
                } else if constexpr (std::is_same_v<T, TransferToObject>) {
                    ids.push_back(c.child);
                    ids.push_back(c.parent);
                } else if constexpr (std::is_same_v<T, WrapObject>) {
                    ids.push_back(c.inner);
                    ids.push_back(c.outer);
                } else if constexpr (std::is_same_v<T, UnwrapObject>) {
                    ids.push_back(c.outer);
                } else if constexpr (std::is_same_v<T, IncrementShared> ||
                                     std::is_same_v<T, ReadShared>) {
                    ids.push_back(c.obj);
                }
            },
            cmd);
        for (const auto& id : ids) {
            if (!used.insert(id).second) {
                return Error{Errc::duplicate_input, "object used by two bundled commands"};
            }
        }
    }
    base.commands = std::move(commands);
    base.bundle = true;
    return build_tx(base, key);
}

Result<TxCert> DirectClient::collect_cert(const Tx& tx) {
    std::vector<TxSign> signs;
    Stake conflict_stake = 0;
    for (Validator* v : validators_) {
        auto res = v->handle_tx(tx);
        if (res.ok()) {
            signs.push_back(res.value());
        } else if (res.code() == Errc::lock_conflict) {
            conflict_stake += committee_.stake_of(v->id());
        }
    }
    if (conflict_stake >= committee_.validity_threshold()) {
        return Error{Errc::lock_conflict, "equivocation detected: conflicting lock holders"};
    }
    return aggregate_tx_cert(tx, signs, committee_, *keys_);
}

Result<EffCert> DirectClient::drive_owned_tx(const Tx& tx) {
    auto cert = collect_cert(tx);
    if (!cert.ok()) return cert.error();
    std::vector<EffSign> signs;
    for (Validator* v : validators_) {
        auto res = v->handle_cert(cert.value());
        if (res.ok() && res.value().eff_sign.has_value()) {
            signs.push_back(*res.value().eff_sign);
        }
    }
    if (signs.empty()) return Error{Errc::insufficient_stake, "no validator executed"};
    return aggregate_eff_cert(signs.front().effects, signs, committee_, *keys_);
}

Result<EffCert> DirectClient::drive_shared_tx(const Tx& tx, const std::function<void()>& pump) {
    auto cert = collect_cert(tx);
    if (!cert.ok()) return cert.error();
    for (Validator* v : validators_) {
        (void)v->handle_cert(cert.value());  // forwards to consensus
    }
    pump();  // sequencing + commit delivery
    std::vector<EffSign> signs;
    for (Validator* v : validators_) {
        auto eff = v->executed_effects(cert.value().digest());
        if (eff.has_value()) signs.push_back(*eff);
    }
    if (signs.empty()) return Error{Errc::not_scheduled, "certificate not executed after pump"};
    return aggregate_eff_cert(signs.front().effects, signs, committee_, *keys_);
}

Result<TxCert> DirectClient::renew_certificate(const Tx& tx, EpochId new_epoch,
                                               const SecretKey& key) {
    Tx renewed = tx;
    renewed.epoch = new_epoch;
    renewed = sign_tx(std::move(renewed), key);
    return collect_cert(renewed);
}

namespace {

/// Creating certificate of an object key, found through the relayer's own
/// effects history.
std::optional<TxDigest> creating_cert(const std::map<TxDigest, CertRecord>& ct,
                                      const ObjKey& key) {
    for (const auto& [digest, rec] : ct) {
        const Effects& eff = rec.eff_sign.effects;
        auto match_ref = [&key](const ObjRef& r) {
            return r.id == key.id && (key.version == 0 || r.version == key.version);
        };
        if (std::any_of(eff.created.begin(), eff.created.end(), match_ref) ||
            std::any_of(eff.mutated.begin(), eff.mutated.end(), match_ref) ||
            std::any_of(eff.unwrapped.begin(), eff.unwrapped.end(), match_ref)) {
            return digest;
        }
    }
    return std::nullopt;
}

}  // namespace

Result<std::uint64_t> DirectClient::sync_validator(Validator& target, const TxCert& cert,
                                                   const std::map<TxDigest, CertRecord>& local_ct) {
    // Discover the missing causal prefix, then submit it oldest-first.
    std::vector<TxDigest> order;  // reverse causal order (dependents first)
    std::set<TxDigest> seen;
    std::vector<TxCert> worklist{cert};
    seen.insert(cert.digest());
    while (!worklist.empty()) {
        TxCert current = worklist.back();
        worklist.pop_back();
        order.push_back(current.digest());
        std::vector<ObjKey> missing;
        auto res = target.handle_cert(current, &missing);
        if (res.ok()) continue;  // already executable; deeper sync not needed
        if (res.code() != Errc::missing_dependency) {
            return Error{res.code(), "sync blocked: " + res.error().detail};
        }
        for (const auto& key : missing) {
            auto parent = creating_cert(local_ct, key);
            if (!parent.has_value()) {
                return Error{Errc::cannot_sync, "history gap at object " + key.id.hex()};
            }
            if (seen.insert(*parent).second) {
                auto it = local_ct.find(*parent);
                if (it == local_ct.end()) {
                    return Error{Errc::cannot_sync, "missing certificate " + parent->hex()};
                }
                worklist.push_back(it->second.cert);
            }
        }
    }
    // Submit in causal order: ancestors before dependents.
    std::uint64_t submissions = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const TxCert* c = &cert;
        auto found = local_ct.find(*it);
        if (found != local_ct.end()) c = &found->second.cert;
        auto res = target.handle_cert(*c);
        ++submissions;
        if (!res.ok()) {
            return Error{res.code(), "sync submission failed: " + res.error().detail};
        }
    }
    return submissions;
}

}  // namespace duallane
