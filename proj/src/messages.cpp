// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/messages.hpp"

#include <algorithm>
#include <map>

namespace duallane {

Bytes tx_sign_payload(const TxDigest& digest, EpochId epoch) {
    Encoder enc;
    enc.str("tx-sign");
    enc.digest(digest.bytes);
    enc.u64(epoch);
    return enc.take();
}

TxSign make_tx_sign(const TxDigest& digest, EpochId epoch, ValidatorId validator,
                    const SecretKey& key) {
    TxSign s;
    s.tx_digest = digest;
    s.epoch = epoch;
    s.validator = validator;
    s.sig = attest(key, tx_sign_payload(digest, epoch));
    return s;
}

bool verify_tx_sign(const TxSign& sign, const KeyBook& keys) {
    return keys.verify_validator(sign.validator, tx_sign_payload(sign.tx_digest, sign.epoch),
                                 sign.sig);
}

std::vector<ValidatorId> AggregateSig::signers() const {
    std::vector<ValidatorId> out;
    out.reserve(parts.size());
    for (const auto& [id, _] : parts) out.push_back(id);
    return out;
}

void encode_effects(Encoder& enc, const Effects& eff) {
    enc.str("effects");
    enc.digest(eff.tx_digest.bytes);
    enc.u8(static_cast<std::uint8_t>(eff.status));
    enc.u8(eff.abort.has_value() ? 1 : 0);
    if (eff.abort) {
        enc.u64(eff.abort->code);
        enc.str(eff.abort->location);
    }
    auto refs = [&enc](const std::vector<ObjRef>& v) {
        enc.u32(static_cast<std::uint32_t>(v.size()));
        for (const auto& r : v) encode_obj_ref(enc, r);
    };
    auto keys = [&enc](const std::vector<ObjKey>& v) {
        enc.u32(static_cast<std::uint32_t>(v.size()));
        for (const auto& k : v) {
            enc.digest(k.id.bytes);
            enc.u64(k.version);
        }
    };
    refs(eff.created);
    refs(eff.mutated);
    keys(eff.wrapped);
    refs(eff.unwrapped);
    keys(eff.deleted);
    enc.u32(static_cast<std::uint32_t>(eff.events.size()));
    for (const auto& ev : eff.events) {
        enc.str(ev.type);
        enc.bytes(ev.payload);
    }
    enc.u32(static_cast<std::uint32_t>(eff.dependencies.size()));
    for (const auto& d : eff.dependencies) enc.digest(d.bytes);
    enc.u64(eff.gas_used);
    enc.u64(eff.fee_charged);
}

Digest effects_digest(const Effects& eff) {
    Encoder enc;
    encode_effects(enc, eff);
    return enc.finalize();
}

Bytes eff_sign_payload(const Digest& effects_digest, EpochId epoch) {
    Encoder enc;
    enc.str("eff-sign");
    enc.digest(effects_digest);
    enc.u64(epoch);
    return enc.take();
}

EffSign make_eff_sign(Effects effects, EpochId epoch, ValidatorId validator,
                      const SecretKey& key) {
    EffSign s;
    s.sig = attest(key, eff_sign_payload(effects_digest(effects), epoch));
    s.effects = std::move(effects);
    s.epoch = epoch;
    s.validator = validator;
    return s;
}

bool verify_eff_sign(const EffSign& sign, const KeyBook& keys) {
    return keys.verify_validator(
        sign.validator, eff_sign_payload(effects_digest(sign.effects), sign.epoch), sign.sig);
}

namespace {

/// Shared quorum-assembly logic for both certificate kinds.
Result<AggregateSig> collect_quorum(const std::vector<std::pair<ValidatorId, Attestation>>& votes,
                                    const Committee& committee) {
    std::map<ValidatorId, Attestation> dedup;
    for (const auto& [id, att] : votes) dedup.emplace(id, att);
    Stake stake = 0;
    AggregateSig agg;
    for (const auto& [id, att] : dedup) {
        stake += committee.stake_of(id);
        agg.parts.emplace_back(id, att);
    }
    if (stake < committee.quorum_threshold()) {
        return Error{Errc::insufficient_stake,
                     "stake " + std::to_string(stake) + " below quorum " +
                         std::to_string(committee.quorum_threshold())};
    }
    return agg;
}

}  // namespace

Result<TxCert> aggregate_tx_cert(const Tx& tx, const std::vector<TxSign>& signs,
                                 const Committee& committee, const KeyBook& keys) {
    if (committee.epoch != tx.epoch) {
        return Error{Errc::wrong_epoch, "transaction epoch does not match committee"};
    }
    const TxDigest digest = tx_digest(tx);
    std::vector<std::pair<ValidatorId, Attestation>> votes;
    for (const auto& s : signs) {
        if (s.tx_digest != digest) return Error{Errc::mixed_digests, "sign over wrong digest"};
        if (s.epoch != tx.epoch) return Error{Errc::wrong_epoch, "sign over wrong epoch"};
        if (!committee.contains(s.validator)) {
            return Error{Errc::bad_signature, "signer not in committee"};
        }
        if (!verify_tx_sign(s, keys)) return Error{Errc::bad_signature, "bad partial signature"};
        votes.emplace_back(s.validator, s.sig);
    }
    auto agg = collect_quorum(votes, committee);
    if (!agg.ok()) return agg.error();
    return TxCert{tx, std::move(agg).value()};
}

Result<EffCert> aggregate_eff_cert(const Effects& effects, const std::vector<EffSign>& signs,
                                   const Committee& committee, const KeyBook& keys) {
    const Digest digest = effects_digest(effects);
    std::vector<std::pair<ValidatorId, Attestation>> votes;
    for (const auto& s : signs) {
        if (effects_digest(s.effects) != digest) {
            return Error{Errc::mixed_digests, "effect signs over different effects"};
        }
        if (s.epoch != committee.epoch) return Error{Errc::wrong_epoch, "sign over wrong epoch"};
        if (!committee.contains(s.validator)) {
            return Error{Errc::bad_signature, "signer not in committee"};
        }
        if (!verify_eff_sign(s, keys)) return Error{Errc::bad_signature, "bad effects signature"};
        votes.emplace_back(s.validator, s.sig);
    }
    auto agg = collect_quorum(votes, committee);
    if (!agg.ok()) return agg.error();
    return EffCert{effects, committee.epoch, std::move(agg).value()};
}

Result<Unit> verify_tx_cert(const TxCert& cert, const Committee& committee, const KeyBook& keys) {
    if (cert.tx.epoch != committee.epoch) {
        return Error{Errc::wrong_epoch, "certificate epoch mismatch"};
    }
    const Bytes payload = tx_sign_payload(cert.digest(), cert.tx.epoch);
    Stake stake = 0;
    ValidatorId prev = 0;
    bool first = true;
    for (const auto& [id, att] : cert.agg.parts) {
        if (!first && id <= prev) return Error{Errc::bad_signature, "unsorted signer set"};
        first = false;
        prev = id;
        if (!committee.contains(id)) return Error{Errc::bad_signature, "signer not in committee"};
        if (!keys.verify_validator(id, payload, att)) {
            return Error{Errc::bad_signature, "bad aggregate part"};
        }
        stake += committee.stake_of(id);
    }
    if (stake < committee.quorum_threshold()) {
        return Error{Errc::insufficient_stake, "certificate below quorum"};
    }
    return Unit{};
}

Result<Unit> verify_eff_cert(const EffCert& cert, const Committee& committee,
                             const KeyBook& keys) {
    if (cert.epoch != committee.epoch) {
        return Error{Errc::wrong_epoch, "effects certificate epoch mismatch"};
    }
    const Bytes payload = eff_sign_payload(effects_digest(cert.effects), cert.epoch);
    Stake stake = 0;
    for (const auto& [id, att] : cert.agg.parts) {
        if (!committee.contains(id)) return Error{Errc::bad_signature, "signer not in committee"};
        if (!keys.verify_validator(id, payload, att)) {
            return Error{Errc::bad_signature, "bad aggregate part"};
        }
        stake += committee.stake_of(id);
    }
    if (stake < committee.quorum_threshold()) {
        return Error{Errc::insufficient_stake, "effects certificate below quorum"};
    }
    return Unit{};
}

}  // namespace duallane
