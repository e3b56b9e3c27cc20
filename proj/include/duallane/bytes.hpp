// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace duallane {

using Bytes = std::vector<std::uint8_t>;

/// 32-byte digest. The single hash (SHA-256) is used for every commitment in
/// the system: object ids, transaction digests, effects digests and the
/// checkpoint chain.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;
    bool is_zero() const;
    std::string hex() const;
    static Digest from_hex(const std::string& hex);
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(const Bytes& data);

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(const std::string& hex);

/// Canonical byte encoding: fixed-width little-endian integers, u32
/// length-prefixed byte strings, u32 count-prefixed sequences, fields in
/// declaration order. Every digest in the system is computed over this
/// encoding, so it must stay bit-stable.
class Encoder {
  public:
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(std::span<const std::uint8_t> data);
    void bytes(std::span<const std::uint8_t> data);
    void str(const std::string& s);
    void digest(const Digest& d);

    const Bytes& out() const { return out_; }
    Bytes take() { return std::move(out_); }
    Digest finalize() const { return sha256(out_); }

  private:
    Bytes out_;
};

/// Mirror of Encoder for the few places that need to read the canonical
/// encoding back (contract state, trace tooling). Throws std::runtime_error
/// on truncated input.
class Decoder {
  public:
    explicit Decoder(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    Bytes bytes();
    std::string str();
    Digest digest();
    bool done() const { return pos_ == data_.size(); }

  private:
    void need(std::size_t n) const;
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace duallane
