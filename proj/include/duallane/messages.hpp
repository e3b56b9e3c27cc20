// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duallane/committee.hpp"
#include "duallane/tx.hpp"

namespace duallane {

/// Partial certificate: one validator's vote on a transaction, binding
/// (digest, epoch).
struct TxSign {
    TxDigest tx_digest;
    ValidatorId validator = 0;
    EpochId epoch = 0;
    Attestation sig;

    auto operator<=>(const TxSign&) const = default;
};

Bytes tx_sign_payload(const TxDigest& digest, EpochId epoch);
TxSign make_tx_sign(const TxDigest& digest, EpochId epoch, ValidatorId validator,
                    const SecretKey& key);
bool verify_tx_sign(const TxSign& sign, const KeyBook& keys);

/// Aggregate of per-validator attestations. Two certificates over the same
/// transaction with different signer sets are semantically the same
/// certificate; equality is digest equality.
struct AggregateSig {
    std::vector<std::pair<ValidatorId, Attestation>> parts;  // sorted by validator

    std::vector<ValidatorId> signers() const;
};

struct TxCert {
    Tx tx;
    AggregateSig agg;

    TxDigest digest() const { return tx_digest(tx); }
    EpochId epoch() const { return tx.epoch; }
};

enum class ExecStatus : std::uint8_t { success = 0, abort = 1 };

struct AbortInfo {
    std::uint64_t code = 0;
    std::string location;  // name of the aborting command

    bool operator==(const AbortInfo&) const = default;
};

struct Event {
    std::string type;
    Bytes payload;

    bool operator==(const Event&) const = default;
};

/// Execution summary. On abort, only the gas object is mutated; created,
/// wrapped, unwrapped and deleted are empty. dependencies lists the creating
/// transaction of every input object, one entry per distinct input.
struct Effects {
    TxDigest tx_digest;
    ExecStatus status = ExecStatus::success;
    std::optional<AbortInfo> abort;
    std::vector<ObjRef> created;
    std::vector<ObjRef> mutated;
    std::vector<ObjKey> wrapped;
    std::vector<ObjRef> unwrapped;
    std::vector<ObjKey> deleted;
    std::vector<Event> events;
    std::vector<TxDigest> dependencies;
    std::uint64_t gas_used = 0;
    std::uint64_t fee_charged = 0;

    bool is_abort() const { return status == ExecStatus::abort; }
};

void encode_effects(Encoder& enc, const Effects& eff);
Digest effects_digest(const Effects& eff);

struct EffSign {
    Effects effects;
    ValidatorId validator = 0;
    EpochId epoch = 0;
    Attestation sig;
};

Bytes eff_sign_payload(const Digest& effects_digest, EpochId epoch);
EffSign make_eff_sign(Effects effects, EpochId epoch, ValidatorId validator,
                      const SecretKey& key);
bool verify_eff_sign(const EffSign& sign, const KeyBook& keys);

struct EffCert {
    Effects effects;
    EpochId epoch = 0;
    AggregateSig agg;
};

/// Forms a certificate from a quorum of partial certificates. Partial
/// certificates must match the transaction's digest and epoch, verify, and
/// their distinct signers must reach the quorum threshold. The committee's
/// epoch must match the transaction's epoch.
Result<TxCert> aggregate_tx_cert(const Tx& tx, const std::vector<TxSign>& signs,
                                 const Committee& committee, const KeyBook& keys);

Result<EffCert> aggregate_eff_cert(const Effects& effects, const std::vector<EffSign>& signs,
                                   const Committee& committee, const KeyBook& keys);

Result<Unit> verify_tx_cert(const TxCert& cert, const Committee& committee, const KeyBook& keys);
Result<Unit> verify_eff_cert(const EffCert& cert, const Committee& committee,
                             const KeyBook& keys);

}  // namespace duallane
