#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "brz/errors.hpp"

namespace brz {

// Renormalization height: a positive integer, or Infinity encoding a
// non-renormalizable pair (r_n = infinity terminates the sequence).
struct Height {
    static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

    std::int64_t r = kInf;

    Height() = default;
    explicit Height(std::int64_t value) : r(value) {
        if (value < 1) throw Error("height must be >= 1");
    }
    static Height infinity() { return Height{}; }

    bool is_infinite() const { return r == kInf; }
    bool operator==(const Height& o) const { return r == o.r; }

    std::string str() const { return is_infinite() ? "inf" : std::to_string(r); }
};

// Height sequence [r0, r1, ...] with value 1/(r0 + 1/(r1 + ...)), 1/inf = 0.
// Entries after an Infinity are forbidden. `exhausted_cap` marks a sequence
// whose last expansion step hit the height cap: the final entry is then only
// a lower bound.
struct ContinuedFraction {
    std::vector<Height> entries;
    bool exhausted_cap = false;

    int depth() const { return static_cast<int>(entries.size()); }
    bool terminated() const { return !entries.empty() && entries.back().is_infinite(); }

    void push(Height h) {
        if (terminated()) throw Error("continued fraction already terminated by infinity");
        entries.push_back(h);
    }

    // Value of the fraction with the unknown tail replaced by t in [0,1].
    double value_with_tail(double t) const;

    // Finite value, tail = 0 (exact when terminated).
    double value() const { return value_with_tail(0.0); }

    // Rigorous enclosure of every rotation number consistent with the entries:
    // tail ranges over [0,1]; degenerate when terminated.
    void value_interval(double& lo, double& hi) const;

    std::string str() const;
};

// Alternating lexicographic order (equivalently, order of the real values):
// at even index a larger entry gives a smaller value, at odd index a larger
// one. Missing entries of a *terminated* or shorter sequence compare as
// infinity. Returns -1, 0, +1; 0 means the sequences agree on the first
// `depth` entries (depth < 0 compares everything available).
int compare_cf(const ContinuedFraction& x, const ContinuedFraction& y, int depth = -1);

// Convenience: compare a computed fraction against a word of target entries.
int compare_to_word(const ContinuedFraction& x, const std::vector<Height>& word, int depth);

} // namespace brz
