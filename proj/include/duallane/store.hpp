// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <map>
#include <optional>

#include "duallane/object.hpp"

namespace duallane {

/// Versioned object store: every version ever written, plus a latest pointer
/// per object. latest == 0 is a tombstone; a missing latest entry means
/// unknown (or currently wrapped).
class ObjectStore {
  public:
    void put(const Obj& obj);
    void set_latest(const ObjId& id, Version v);
    void erase_latest(const ObjId& id);
    void erase_version(const ObjKey& key);

    const Obj* get(const ObjKey& key) const;
    /// Latest live version; nullptr for unknown or tombstoned objects.
    const Obj* latest_obj(const ObjId& id) const;
    std::optional<Version> latest_version(const ObjId& id) const;
    bool is_tombstone(const ObjId& id) const;

    const std::map<ObjId, Version>& latest_map() const { return latest_; }
    const std::map<ObjKey, Obj>& all_versions() const { return by_key_; }

    ObjLookup lookup() const;

    /// Commitment to the live state: hash over the latest map and the object
    /// bytes at those versions. Used for cross-validator equality checks.
    Digest state_digest() const;

  private:
    std::map<ObjKey, Obj> by_key_;
    std::map<ObjId, Version> latest_;
};

/// Deferred mutations applied as one atomic unit. The simulator's crash
/// injection can drop a batch before it commits, never mid-way; that is the
/// recovery contract the persistence layer promises.
class WriteBatch {
  public:
    void put_obj(Obj obj);
    void set_latest(ObjId id, Version v);
    void erase_latest(ObjId id);

    void apply(ObjectStore& store) const;
    bool empty() const { return objs_.empty() && latest_.empty(); }

  private:
    std::vector<Obj> objs_;
    std::vector<std::pair<ObjId, std::optional<Version>>> latest_;  // nullopt = erase
};

}  // namespace duallane
