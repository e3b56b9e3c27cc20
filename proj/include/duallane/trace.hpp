// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "duallane/committee.hpp"

namespace duallane {

/// Flat structured trace record. Field values are strings (hex for digests,
/// decimal for numbers) so the log serializes to one JSON object per line
/// and can be checked offline.
struct TraceEvent {
    std::uint64_t time = 0;
    std::string actor;
    std::string kind;
    std::map<std::string, std::string> fields;

    std::string field(const std::string& key) const;
    std::uint64_t field_u64(const std::string& key) const;
};

class TraceLog {
  public:
    void emit(TraceEvent ev) { events_.push_back(std::move(ev)); }
    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    std::string to_jsonl() const;
    static TraceLog from_jsonl(const std::string& text);

    void write_file(const std::string& path) const;
    static TraceLog read_file(const std::string& path);

  private:
    std::vector<TraceEvent> events_;
};

using TraceSink = std::function<void(TraceEvent)>;

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Trace-level safety assertions, run after every simulation and offline on
/// stored traces:
///  - broadcast consistency: per (epoch, object key) at most one transaction
///    digest ever reaches a quorum of lock grants, and no two distinct
///    certificates form on the same key;
///  - shared-lock consistency: per-validator shared lock assignment logs are
///    pairwise prefix-consistent;
///  - checkpoint chain equality: all correct validators build identical
///    hash-chained checkpoints per (epoch, seq);
///  - epoch-boundary state equality: state digests match at each handover;
///  - settled-never-reverted: no transaction with an effects certificate is
///    ever rolled back.
/// `correct` lists the validators expected to agree (non-Byzantine and fully
/// caught up); `quorum` is the stake threshold over equal-stake grants.
std::vector<CheckResult> run_safety_checks(const std::vector<TraceEvent>& events,
                                           const std::vector<std::string>& correct_actors,
                                           Stake quorum_stake);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace duallane
