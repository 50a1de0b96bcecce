// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace finfuzz {

// Deterministic RNG wrapper. All draws go through hand-rolled mappings so a
// (seed, config) pair produces the identical transaction stream on every run;
// std::uniform_int_distribution is implementation-defined and never used.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Unbiased integer in [0, n) via rejection sampling.
    uint64_t index(uint64_t n) {
        assert(n > 0);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform integer in [lo, hi], inclusive.
    int64_t range(int64_t lo, int64_t hi) {
        assert(lo <= hi);
        return lo + static_cast<int64_t>(index(static_cast<uint64_t>(hi - lo) + 1));
    }

    bool chance_bool() { return (eng_() & 1) != 0; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace finfuzz
