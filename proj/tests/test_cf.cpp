#include <doctest.h>

#include <cmath>
#include <random>

#include "brz/cf.hpp"

using namespace brz;

namespace {

ContinuedFraction cf_of(std::initializer_list<long> entries, bool end_inf = false) {
    ContinuedFraction cf;
    for (long r : entries) cf.push(Height(r));
    if (end_inf) cf.push(Height::infinity());
    return cf;
}

// independent oracle: value by exact rational accumulation (num/den), backward
long double rational_value(const std::vector<long>& entries) {
    long double num = 0.0L, den = 1.0L;  // tail value 0 = num/den
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        // val' = 1/(r + num/den) = den/(r*den + num)
        const long double nn = den;
        den = static_cast<long double>(*it) * den + num;
        num = nn;
    }
    return num / den;
}

} // namespace

TEST_CASE("special values") {
    CHECK(cf_of({}, true).value() == doctest::Approx(0.0));          // [inf] = 0
    CHECK(cf_of({1}, true).value() == doctest::Approx(1.0));         // [1, inf] = 1
    CHECK(cf_of({2}).value() == doctest::Approx(0.5));
    CHECK(cf_of({1, 1}).value() == doctest::Approx(0.5));
    CHECK(cf_of({2, 1, 3}).value() == doctest::Approx(rational_value({2, 1, 3})));
}

TEST_CASE("value agrees with the exact rational oracle on random finite fractions") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> entry(1, 9);
    std::uniform_int_distribution<int> len(1, 12);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<long> es(len(rng));
        for (auto& e : es) e = entry(rng);
        ContinuedFraction cf;
        for (long e : es) cf.push(Height(e));
        CHECK(cf.value() ==
              doctest::Approx((double)rational_value(es)).epsilon(1e-14));
    }
}

TEST_CASE("golden ratio tail") {
    ContinuedFraction cf;
    for (int i = 0; i < 40; ++i) cf.push(Height(1));
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(cf.value() == doctest::Approx(golden).epsilon(1e-15));
    double lo, hi;
    cf.value_interval(lo, hi);
    CHECK(lo <= golden + 1e-15);
    CHECK(hi >= golden - 1e-15);
    CHECK(hi - lo < 1e-15);
}

TEST_CASE("entries after infinity are forbidden") {
    ContinuedFraction cf = cf_of({2}, true);
    CHECK_THROWS_AS(cf.push(Height(1)), Error);
}

TEST_CASE("value interval brackets every consistent tail") {
    ContinuedFraction cf = cf_of({2, 1});
    double lo, hi;
    cf.value_interval(lo, hi);
    // extend with random tails; the value must stay inside [lo,hi]
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long> entry(1, 50);
    for (int trial = 0; trial < 200; ++trial) {
        ContinuedFraction ext = cf;
        const int extra = 1 + (int)(trial % 6);
        for (int i = 0; i < extra; ++i) ext.push(Height(entry(rng)));
        CHECK(ext.value() >= lo - 1e-15);
        CHECK(ext.value() <= hi + 1e-15);
    }
}

TEST_CASE("alternating comparison order matches value order") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<long> entry(1, 5);
    std::uniform_int_distribution<int> len(1, 10);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<long> ea(len(rng)), eb(len(rng));
        for (auto& e : ea) e = entry(rng);
        for (auto& e : eb) e = entry(rng);
        ContinuedFraction a, b;
        for (long e : ea) a.push(Height(e));
        for (long e : eb) b.push(Height(e));
        // the entry order refines the value order: finite fractions ending
        // [...,k,1] and [...,k+1] share a value but compare as distinct
        // one-sided limits
        const int cmp = compare_cf(a, b);
        const long double va = rational_value(ea), vb = rational_value(eb);
        if (cmp < 0) CHECK(va <= vb);
        if (cmp > 0) CHECK(va >= vb);
        if (cmp == 0) CHECK(std::fabs((double)(va - vb)) < 1e-18);
    }
}

TEST_CASE("prefix comparison at fixed depth") {
    const ContinuedFraction a = cf_of({1, 2, 3, 4});
    CHECK(compare_to_word(a, {Height(1), Height(2)}, 2) == 0);
    CHECK(compare_to_word(a, {Height(2), Height(2)}, 2) == 1);   // larger r0: smaller value
    CHECK(compare_to_word(a, {Height(1), Height(3)}, 2) == -1);  // larger r1: larger value
    // terminated sequence compares as entry = infinity
    const ContinuedFraction t = cf_of({1}, true);
    CHECK(compare_to_word(t, {Height(1), Height(7)}, 2) == 1);
}
