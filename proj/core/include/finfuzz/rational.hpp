// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace finfuzz {

// All monetary amounts, prices and oracle tolerances are exact rationals.
// Every equality the oracles test is reproducible bit-for-bit; no binary
// floating point anywhere on the money path.
using Rat = mpq_class;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts "123", "-7", "999/1000", "0.999", "-1.25", "9.99e-1", "7e-2".
Rat rat_parse(const std::string& text);

// Canonical form: "num" when the denominator is 1, else "num/den".
std::string rat_str(const Rat& r);

// Decimal rendering for logs and report summaries (exact when the value
// terminates within `max_digits`, otherwise suffixed with "...").
std::string rat_decimal(const Rat& r, int max_digits = 12);

inline Rat rat_of(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace finfuzz
