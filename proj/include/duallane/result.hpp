// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <variant>

namespace duallane {

/// Protocol-level rejections. Contract violations (caller bugs) throw
/// std::logic_error instead and are never part of normal operation.
enum class Errc {
    unknown_object,
    version_mismatch,
    initial_version_mismatch,
    invalid_tx,
    lock_conflict,
    guard_contention,
    validator_paused,
    wrong_epoch,
    missing_dependency,
    not_scheduled,
    insufficient_stake,
    mixed_digests,
    bad_signature,
    epoch_closed,
    unauthorized,
    ownership_cycle,
    duplicate_input,
    cannot_sync,
    bad_config,
};

const char* errc_name(Errc e);

struct Error {
    Errc code;
    std::string detail;
};

template <typename T>
class Result {
  public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error err) : v_(std::move(err)) {}
    Result(Errc code, std::string detail = "") : v_(Error{code, std::move(detail)}) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::logic_error("Result::value on error: " + error().detail);
        return std::get<T>(v_);
    }
    T&& value() && {
        if (!ok()) throw std::logic_error("Result::value on error: " + error().detail);
        return std::get<T>(std::move(v_));
    }
    const Error& error() const {
        if (ok()) throw std::logic_error("Result::error on success");
        return std::get<Error>(v_);
    }
    Errc code() const { return error().code; }

  private:
    std::variant<T, Error> v_;
};

struct Unit {};

}  // namespace duallane
