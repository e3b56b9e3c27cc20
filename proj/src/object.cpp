// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/object.hpp"

#include <algorithm>
#include <set>

namespace duallane {

const char* errc_name(Errc e) {
    switch (e) {
        case Errc::unknown_object: return "unknown_object";
        case Errc::version_mismatch: return "version_mismatch";
        case Errc::initial_version_mismatch: return "initial_version_mismatch";
        case Errc::invalid_tx: return "invalid_tx";
        case Errc::lock_conflict: return "lock_conflict";
        case Errc::guard_contention: return "guard_contention";
        case Errc::validator_paused: return "validator_paused";
        case Errc::wrong_epoch: return "wrong_epoch";
        case Errc::missing_dependency: return "missing_dependency";
        case Errc::not_scheduled: return "not_scheduled";
        case Errc::insufficient_stake: return "insufficient_stake";
        case Errc::mixed_digests: return "mixed_digests";
        case Errc::bad_signature: return "bad_signature";
        case Errc::epoch_closed: return "epoch_closed";
        case Errc::unauthorized: return "unauthorized";
        case Errc::ownership_cycle: return "ownership_cycle";
        case Errc::duplicate_input: return "duplicate_input";
        case Errc::cannot_sync: return "cannot_sync";
        case Errc::bad_config: return "bad_config";
    }
    return "unknown";
}

bool is_address_owned(const Ownership& o) {
    return std::holds_alternative<OwnedByAddress>(o);
}
bool is_object_owned(const Ownership& o) {
    return std::holds_alternative<OwnedByObject>(o);
}
bool is_owned(const Ownership& o) {
    return is_address_owned(o) || is_object_owned(o);
}
bool is_shared_mutable(const Ownership& o) {
    return std::holds_alternative<SharedMutable>(o);
}
bool is_shared_immutable(const Ownership& o) {
    return std::holds_alternative<SharedImmutable>(o);
}

bool Value::Record::operator==(const Record& other) const {
    return fields == other.fields;
}

std::uint64_t Value::as_u64() const {
    if (!is_u64()) throw std::logic_error("Value is not an integer");
    return std::get<std::uint64_t>(v);
}

const Obj& Value::wrapped() const {
    if (!is_wrapped()) throw std::logic_error("Value is not a wrapped object");
    return *std::get<std::shared_ptr<const Obj>>(v);
}

bool Value::operator==(const Value& other) const {
    if (v.index() != other.v.index()) return false;
    if (is_wrapped()) return wrapped() == other.wrapped();
    return v == other.v;
}

bool Obj::operator==(const Obj& other) const {
    return id == other.id && version == other.version &&
           initial_version == other.initial_version && ownership == other.ownership &&
           contents == other.contents && parent_tx == other.parent_tx;
}

void encode_value(Encoder& enc, const Value& v) {
    enc.u8(static_cast<std::uint8_t>(v.v.index()));
    if (v.is_u64()) {
        enc.u64(std::get<std::uint64_t>(v.v));
    } else if (std::holds_alternative<Bytes>(v.v)) {
        enc.bytes(std::get<Bytes>(v.v));
    } else if (std::holds_alternative<Value::Record>(v.v)) {
        const auto& rec = std::get<Value::Record>(v.v);
        enc.u32(static_cast<std::uint32_t>(rec.fields.size()));
        for (const auto& [name, val] : rec.fields) {
            enc.str(name);
            encode_value(enc, val);
        }
    } else {
        encode_obj(enc, v.wrapped());
    }
}

void encode_ownership(Encoder& enc, const Ownership& o) {
    enc.u8(static_cast<std::uint8_t>(o.index()));
    if (const auto* a = std::get_if<OwnedByAddress>(&o)) {
        enc.digest(a->addr.bytes);
    } else if (const auto* p = std::get_if<OwnedByObject>(&o)) {
        enc.digest(p->parent.bytes);
    }
}

void encode_obj(Encoder& enc, const Obj& obj) {
    enc.digest(obj.id.bytes);
    enc.u64(obj.version);
    enc.u64(obj.initial_version);
    encode_ownership(enc, obj.ownership);
    encode_value(enc, obj.contents);
    enc.digest(obj.parent_tx.bytes);
}

void encode_obj_ref(Encoder& enc, const ObjRef& ref) {
    enc.digest(ref.id.bytes);
    enc.u64(ref.version);
    enc.digest(ref.contents_digest);
}

Digest obj_digest(const Obj& obj) {
    Encoder enc;
    encode_obj(enc, obj);
    return enc.finalize();
}

ObjRef make_ref(const Obj& obj) {
    return ObjRef{obj.id, obj.version, obj_digest(obj)};
}

ObjId derive_object_id(const TxDigest& tx_digest, std::uint64_t counter) {
    Encoder enc;
    enc.str("obj-id");
    enc.digest(tx_digest.bytes);
    enc.u64(counter);
    return ObjId{enc.finalize()};
}

Version lamport_version(const std::vector<Version>& input_versions) {
    if (input_versions.empty()) throw std::logic_error("lamport_version on empty input list");
    Version max = 0;
    for (Version v : input_versions) {
        if (v == kTombstoneVersion) throw std::logic_error("lamport_version over a tombstone");
        max = std::max(max, v);
    }
    return max + 1;
}

Result<RootResolution> resolve_root(const ObjId& id, const ObjLookup& store) {
    RootResolution res;
    std::set<ObjId> visited;
    ObjId cur = id;
    for (;;) {
        if (!visited.insert(cur).second) {
            return Error{Errc::ownership_cycle, "ownership cycle at " + cur.hex()};
        }
        const Obj* obj = store(cur);
        if (obj == nullptr) {
            return Error{Errc::unknown_object, "missing chain link " + cur.hex()};
        }
        res.chain.push_back(cur);
        if (const auto* parent = std::get_if<OwnedByObject>(&obj->ownership)) {
            cur = parent->parent;
            continue;
        }
        res.root = obj->ownership;
        return res;
    }
}

}  // namespace duallane
