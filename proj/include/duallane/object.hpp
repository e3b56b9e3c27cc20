// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "duallane/bytes.hpp"
#include "duallane/result.hpp"

namespace duallane {

struct Obj;

/// Version 0 is a tombstone marker, never a live object.
using Version = std::uint64_t;
inline constexpr Version kTombstoneVersion = 0;

using EpochId = std::uint64_t;

struct ObjId {
    Digest bytes;
    auto operator<=>(const ObjId&) const = default;
    std::string hex() const { return bytes.hex(); }
};

struct TxDigest {
    Digest bytes;
    auto operator<=>(const TxDigest&) const = default;
    bool is_zero() const { return bytes.is_zero(); }
    std::string hex() const { return bytes.hex(); }
};

/// The single-use unit of locking, the system's equivalent of a UTXO.
struct ObjKey {
    ObjId id;
    Version version = 0;
    auto operator<=>(const ObjKey&) const = default;
};

struct Address {
    Digest bytes;
    auto operator<=>(const Address&) const = default;
    std::string hex() const { return bytes.hex(); }
};

struct OwnedByAddress {
    Address addr;
    auto operator<=>(const OwnedByAddress&) const = default;
};
struct OwnedByObject {
    ObjId parent;
    auto operator<=>(const OwnedByObject&) const = default;
};
struct SharedMutable {
    auto operator<=>(const SharedMutable&) const = default;
};
struct SharedImmutable {
    auto operator<=>(const SharedImmutable&) const = default;
};

using Ownership = std::variant<OwnedByAddress, OwnedByObject, SharedMutable, SharedImmutable>;

bool is_address_owned(const Ownership& o);
bool is_object_owned(const Ownership& o);
/// Address-owned or object-owned; the lockable kinds.
bool is_owned(const Ownership& o);
bool is_shared_mutable(const Ownership& o);
bool is_shared_immutable(const Ownership& o);

/// Built-in typed value standing in for contract struct values: an unsigned
/// integer, a byte string, a record of named values, or a wrapped object.
struct Value {
    struct Record {
        std::vector<std::pair<std::string, Value>> fields;  // sorted by name
        bool operator==(const Record&) const;
    };
    using Variant =
        std::variant<std::uint64_t, Bytes, Record, std::shared_ptr<const Obj>>;

    Variant v = std::uint64_t{0};

    Value() = default;
    Value(std::uint64_t n) : v(n) {}
    Value(Bytes b) : v(std::move(b)) {}
    Value(Record r) : v(std::move(r)) {}
    explicit Value(std::shared_ptr<const Obj> wrapped) : v(std::move(wrapped)) {}

    bool is_u64() const { return std::holds_alternative<std::uint64_t>(v); }
    bool is_wrapped() const { return std::holds_alternative<std::shared_ptr<const Obj>>(v); }
    std::uint64_t as_u64() const;
    const Obj& wrapped() const;

    bool operator==(const Value& other) const;
};

struct Obj {
    ObjId id;
    Version version = 1;
    Version initial_version = 1;
    Ownership ownership;
    Value contents;
    TxDigest parent_tx;  // digest of the transaction that created or last mutated it

    bool operator==(const Obj&) const;
    ObjKey key() const { return ObjKey{id, version}; }
};

/// Reference to an object at an exact version, committing to its full value.
struct ObjRef {
    ObjId id;
    Version version = 0;
    Digest contents_digest;
    auto operator<=>(const ObjRef&) const = default;
    ObjKey key() const { return ObjKey{id, version}; }
};

void encode_value(Encoder& enc, const Value& v);
void encode_ownership(Encoder& enc, const Ownership& o);
void encode_obj(Encoder& enc, const Obj& obj);
void encode_obj_ref(Encoder& enc, const ObjRef& ref);

Digest obj_digest(const Obj& obj);
ObjRef make_ref(const Obj& obj);

/// Identity of a freshly created object: hash of the creating transaction's
/// digest and a per-transaction creation counter.
ObjId derive_object_id(const TxDigest& tx_digest, std::uint64_t counter);

/// Output version of a transaction: one plus the highest input version.
/// Inputs must be live (>= 1); an empty list is a caller bug.
Version lamport_version(const std::vector<Version>& input_versions);

/// Latest-version lookup used by ownership-chain resolution.
using ObjLookup = std::function<const Obj*(const ObjId&)>;

struct RootResolution {
    Ownership root;
    std::vector<ObjId> chain;  // from the queried object up to the root object
};

/// Walks parent links to the first non-child owner. Detects cycles and
/// missing links.
Result<RootResolution> resolve_root(const ObjId& id, const ObjLookup& store);

}  // namespace duallane
