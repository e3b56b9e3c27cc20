// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/crypto.hpp"

namespace duallane {

Attestation attest(const SecretKey& key, std::span<const std::uint8_t> msg) {
    Encoder enc;
    enc.str("mac");
    enc.digest(key.bytes);
    enc.bytes(msg);
    return Attestation{enc.finalize()};
}

bool check_attestation(const SecretKey& key, std::span<const std::uint8_t> msg,
                       const Attestation& att) {
    return attest(key, msg) == att;
}

Address address_of_key(const SecretKey& key) {
    Encoder enc;
    enc.str("addr");
    enc.digest(key.bytes);
    return Address{enc.finalize()};
}

void KeyBook::add_validator(ValidatorId id, const SecretKey& key) {
    validators_[id] = key;
    // Validators also hold accounts (gas objects, epoch-change votes).
    users_[address_of_key(key)] = key;
}

void KeyBook::add_user(const SecretKey& key) {
    users_[address_of_key(key)] = key;
}

const SecretKey& KeyBook::validator_key(ValidatorId id) const {
    auto it = validators_.find(id);
    if (it == validators_.end()) throw std::logic_error("unknown validator key");
    return it->second;
}

bool KeyBook::has_validator(ValidatorId id) const {
    return validators_.contains(id);
}

const SecretKey* KeyBook::user_key(const Address& addr) const {
    auto it = users_.find(addr);
    return it == users_.end() ? nullptr : &it->second;
}

bool KeyBook::verify_validator(ValidatorId id, std::span<const std::uint8_t> msg,
                               const Attestation& att) const {
    auto it = validators_.find(id);
    return it != validators_.end() && check_attestation(it->second, msg, att);
}

bool KeyBook::verify_user(const Address& addr, std::span<const std::uint8_t> msg,
                          const Attestation& att) const {
    const SecretKey* key = user_key(addr);
    return key != nullptr && check_attestation(*key, msg, att);
}

std::map<Address, ValidatorId> KeyBook::validator_addresses() const {
    std::map<Address, ValidatorId> out;
    for (const auto& [id, key] : validators_) out[address_of_key(key)] = id;
    return out;
}

Address KeyBook::validator_address(ValidatorId id) const {
    return address_of_key(validator_key(id));
}

SecretKey KeyBook::derive_key(std::uint64_t seed, const std::string& label) {
    Encoder enc;
    enc.str("key");
    enc.u64(seed);
    enc.str(label);
    return SecretKey{enc.finalize()};
}

}  // namespace duallane
