// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "duallane/validator.hpp"

namespace duallane {

struct TxSpec {
    EpochId epoch = 0;
    Address sender;
    std::vector<Command> commands;
    bool bundle = false;
    std::vector<ObjRef> owned_inputs;  // must include gas_ref
    ObjRef gas_ref;
    std::uint64_t gas_budget = 200;
    std::uint64_t tip = 0;
    std::vector<ObjId> readonly_inputs;
    std::vector<SharedInput> shared_inputs;
};

Result<Tx> build_tx(const TxSpec& spec, const SecretKey& key);

/// Bundles commands into one atomically executed transaction with a single
/// signature and a single gas object. Rejects empty bundles and duplicate
/// object uses across commands (inputs are single-use).
Result<Tx> make_ptb(TxSpec base, std::vector<Command> commands, const SecretKey& key);

/// Synchronous client/gateway against in-process validators: certificate
/// assembly, settlement collection, cross-epoch renewal and relayer
/// synchronization. The network-driven counterpart lives in the simulator.
class DirectClient {
  public:
    DirectClient(std::vector<Validator*> validators, Committee committee, const KeyBook* keys)
        : validators_(std::move(validators)), committee_(std::move(committee)), keys_(keys) {}

    /// Collects a quorum of partial certificates. Surfaces an equivocation
    /// conflict when a validity threshold of stake reports a lock conflict.
    Result<TxCert> collect_cert(const Tx& tx);

    /// Broadcast, certify, execute, settle; owned-object path (two waves).
    Result<EffCert> drive_owned_tx(const Tx& tx);

    /// As above but the certificate goes through consensus first; `pump`
    /// advances the sequencer and feeds commits until effects appear.
    Result<EffCert> drive_shared_tx(const Tx& tx, const std::function<void()>& pump);

    /// Re-signs the transaction for a later epoch and assembles a fresh
    /// quorum. Inputs and command are identical; only the epoch changes.
    Result<TxCert> renew_certificate(const Tx& tx, EpochId new_epoch, const SecretKey& key);

    /// Relayer: updates a lagging validator with the smallest certificate
    /// set, in causal order, until `cert` executes there. `local_ct` is the
    /// relayer's own store of past certificates and effects.
    /// Returns the number of certificates submitted.
    Result<std::uint64_t> sync_validator(Validator& target, const TxCert& cert,
                                         const std::map<TxDigest, CertRecord>& local_ct);

  private:
    std::vector<Validator*> validators_;
    Committee committee_;
    const KeyBook* keys_;
};

}  // namespace duallane
