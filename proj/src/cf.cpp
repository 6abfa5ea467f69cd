#include "brz/cf.hpp"

#include <algorithm>
#include <sstream>

namespace brz {

double ContinuedFraction::value_with_tail(double t) const {
    double val = t;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        if (it->is_infinite()) {
            val = 0.0;  // 1/inf = 0; anything accumulated beyond is discarded
            continue;
        }
        val = 1.0 / (static_cast<double>(it->r) + val);
    }
    return val;
}

void ContinuedFraction::value_interval(double& lo, double& hi) const {
    if (terminated() && !exhausted_cap) {
        lo = hi = value();
        return;
    }
    const double v0 = value_with_tail(0.0);
    const double v1 = value_with_tail(1.0);
    lo = std::min(v0, v1);
    hi = std::max(v0, v1);
    if (exhausted_cap && !entries.empty()) {
        // last entry is only a lower bound; the enclosure must reach the value
        // it would take were that entry infinite
        ContinuedFraction capped = *this;
        capped.entries.back() = Height::infinity();
        capped.exhausted_cap = false;
        const double vinf = capped.value();
        lo = std::min(lo, vinf);
        hi = std::max(hi, vinf);
    }
}

std::string ContinuedFraction::str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i) os << ",";
        os << entries[i].str();
        if (i + 1 == entries.size() && exhausted_cap && !entries[i].is_infinite()) os << "+";
    }
    os << "]";
    return os.str();
}

namespace {

// Entry at index i with the terminated-sequence convention: past the end of a
// finite expansion the (dynamically meaningless) entry is infinite.
std::int64_t entry_at(const ContinuedFraction& x, int i) {
    if (i < static_cast<int>(x.entries.size())) return x.entries[i].r;
    return Height::kInf;
}

} // namespace

int compare_cf(const ContinuedFraction& x, const ContinuedFraction& y, int depth) {
    const int n = depth >= 0
                      ? depth
                      : std::max(x.depth(), y.depth());
    for (int i = 0; i < n; ++i) {
        const std::int64_t ex = entry_at(x, i);
        const std::int64_t ey = entry_at(y, i);
        if (ex == ey) {
            if (ex == Height::kInf) return 0;  // both terminated: equal values
            continue;
        }
        const bool larger_means_smaller = (i % 2 == 0);
        const int sign = (ex > ey) ? -1 : 1;
        return larger_means_smaller ? sign : -sign;
    }
    return 0;
}

int compare_to_word(const ContinuedFraction& x, const std::vector<Height>& word, int depth) {
    ContinuedFraction t;
    t.entries = word;
    return compare_cf(x, t, depth);
}

} // namespace brz
