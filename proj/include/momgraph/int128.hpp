#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "momgraph/errors.hpp"

namespace momgraph {

// Exact counts of pattern copies are accumulated in unsigned 128-bit
// integers; every add/multiply on the counting path goes through these
// helpers so that overflow raises instead of wrapping.
using Count = unsigned __int128;

inline Count checked_add(Count a, Count b) {
    Count r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit count accumulator overflow");
    return r;
}

inline Count checked_mul(Count a, Count b) {
    Count r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit count accumulator overflow");
    return r;
}

inline Count checked_sub(Count a, Count b) {
    if (b > a) throw OverflowError("negative intermediate in exact count");
    return a - b;
}

inline std::string to_string(Count v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

inline Count parse_count(const std::string& s) {
    if (s.empty()) throw ParseError("empty integer literal");
    Count v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw ParseError("invalid integer literal '" + s + "'");
        v = checked_add(checked_mul(v, 10), static_cast<Count>(c - '0'));
    }
    return v;
}

inline double to_double(Count v) { return static_cast<double>(v); }

// Binomial coefficient C(n, k), exact. Each partial product C(n, j) is an
// integer so the division at every step is exact.
inline Count binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    Count r = 1;
    for (std::uint64_t j = 1; j <= k; ++j) {
        r = checked_mul(r, n - k + j) / j;
    }
    return r;
}

inline Count factorial(unsigned n) {
    Count r = 1;
    for (unsigned j = 2; j <= n; ++j) r = checked_mul(r, j);
    return r;
}

// Falling factorial (x)_l = x (x-1) ... (x-l+1); zero when l > x.
inline Count falling_factorial(std::uint64_t x, unsigned l) {
    Count r = 1;
    for (unsigned j = 0; j < l; ++j) {
        if (x < j) return 0;
        r = checked_mul(r, x - j);
    }
    return r;
}

}  // namespace momgraph
