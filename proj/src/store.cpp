// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include "duallane/store.hpp"

namespace duallane {

void ObjectStore::put(const Obj& obj) {
    by_key_[obj.key()] = obj;
    latest_[obj.id] = obj.version;
}

void ObjectStore::set_latest(const ObjId& id, Version v) {
    latest_[id] = v;
}

void ObjectStore::erase_latest(const ObjId& id) {
    latest_.erase(id);
}

void ObjectStore::erase_version(const ObjKey& key) {
    by_key_.erase(key);
}

const Obj* ObjectStore::get(const ObjKey& key) const {
    auto it = by_key_.find(key);
    return it == by_key_.end() ? nullptr : &it->second;
}

const Obj* ObjectStore::latest_obj(const ObjId& id) const {
    auto it = latest_.find(id);
    if (it == latest_.end() || it->second == kTombstoneVersion) return nullptr;
    return get(ObjKey{id, it->second});
}

std::optional<Version> ObjectStore::latest_version(const ObjId& id) const {
    auto it = latest_.find(id);
    if (it == latest_.end()) return std::nullopt;
    return it->second;
}

bool ObjectStore::is_tombstone(const ObjId& id) const {
    auto it = latest_.find(id);
    return it != latest_.end() && it->second == kTombstoneVersion;
}

ObjLookup ObjectStore::lookup() const {
    return [this](const ObjId& id) { return latest_obj(id); };
}

Digest ObjectStore::state_digest() const {
    Encoder enc;
    enc.str("state");
    enc.u32(static_cast<std::uint32_t>(latest_.size()));
    for (const auto& [id, version] : latest_) {
        enc.digest(id.bytes);
        enc.u64(version);
        if (version != kTombstoneVersion) {
            const Obj* obj = get(ObjKey{id, version});
            enc.u8(obj != nullptr ? 1 : 0);
            if (obj != nullptr) encode_obj(enc, *obj);
        }
    }
    return enc.finalize();
}

void WriteBatch::put_obj(Obj obj) {
    objs_.push_back(std::move(obj));
}

void WriteBatch::set_latest(ObjId id, Version v) {
    latest_.emplace_back(id, v);
}

void WriteBatch::erase_latest(ObjId id) {
    latest_.emplace_back(id, std::nullopt);
}

void WriteBatch::apply(ObjectStore& store) const {
    for (const auto& obj : objs_) store.put(obj);
    for (const auto& [id, v] : latest_) {
        if (v.has_value()) {
            store.set_latest(id, *v);
        } else {
            store.erase_latest(id);
        }
    }
}

}  // namespace duallane
