// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "duallane/bytes.hpp"
#include "duallane/object.hpp"

namespace duallane {

using ValidatorId = std::uint32_t;

/// Deterministic keyed-MAC attestation. Stands in for a real signature
/// scheme behind the same produce/verify API; the simulator's key book plays
/// the role of the PKI. A real scheme can replace this without touching the
/// protocol code.
struct Attestation {
    Digest mac;
    auto operator<=>(const Attestation&) const = default;
};

struct SecretKey {
    Digest bytes;
};

Attestation attest(const SecretKey& key, std::span<const std::uint8_t> msg);
bool check_attestation(const SecretKey& key, std::span<const std::uint8_t> msg,
                       const Attestation& att);

/// Address of an authenticator: digest of its public handle. One default
/// scheme; the indirection keeps the door open for others.
Address address_of_key(const SecretKey& key);

/// Key directory shared by the simulation harness. Maps validator ids and
/// user addresses to their keys so attestations can be verified anywhere.
class KeyBook {
  public:
    void add_validator(ValidatorId id, const SecretKey& key);
    void add_user(const SecretKey& key);

    const SecretKey& validator_key(ValidatorId id) const;
    bool has_validator(ValidatorId id) const;
    const SecretKey* user_key(const Address& addr) const;

    bool verify_validator(ValidatorId id, std::span<const std::uint8_t> msg,
                          const Attestation& att) const;
    bool verify_user(const Address& addr, std::span<const std::uint8_t> msg,
                     const Attestation& att) const;

    /// Address of every known validator; the link between committee members
    /// and the epoch-change contract's registration keys.
    std::map<Address, ValidatorId> validator_addresses() const;
    Address validator_address(ValidatorId id) const;

    /// Stable key derivation so a (seed, label) pair always names the same
    /// actor across runs.
    static SecretKey derive_key(std::uint64_t seed, const std::string& label);

  private:
    std::map<ValidatorId, SecretKey> validators_;
    std::map<Address, SecretKey> users_;
};

}  // namespace duallane
