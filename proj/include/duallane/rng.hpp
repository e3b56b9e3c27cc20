// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>

#include "duallane/bytes.hpp"

namespace duallane {

/// splitmix64 stream. Chosen over std <random> distributions because its
/// output is bit-stable across standard library implementations, which the
/// trace-determinism guarantees depend on.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [lo, hi], inclusive. Modulo bias is irrelevant at the scales
    /// used here (delay windows of a few hundred ticks).
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        if (hi <= lo) return lo;
        return lo + next() % (hi - lo + 1);
    }

    /// Bernoulli with probability p (clamped to [0,1]).
    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
    }

    /// Derive an independent stream for a named substream. Used to give each
    /// network link its own stream so fault injection on one actor does not
    /// perturb delays elsewhere.
    static Rng derive(std::uint64_t seed, const std::string& label) {
        Encoder enc;
        enc.u64(seed);
        enc.str(label);
        Digest d = enc.finalize();
        std::uint64_t s = 0;
        for (int i = 0; i < 8; ++i) s |= static_cast<std::uint64_t>(d.bytes[i]) << (8 * i);
        return Rng(s);
    }

  private:
    std::uint64_t state_;
};

}  // namespace duallane
