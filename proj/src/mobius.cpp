#include "brz/mobius.hpp"

namespace brz {

MoebiusMap moebius_compose(const MoebiusMap& m1, const MoebiusMap& m2) {
    const auto a = m1.entries();
    const auto b = m2.entries();
    MoebiusMap r(a[0] * b[0] + a[1] * b[2],
                 a[0] * b[1] + a[1] * b[3],
                 a[2] * b[0] + a[3] * b[2],
                 a[2] * b[1] + a[3] * b[3],
                 m2.domain());
    if (r.domain() && !r.denominator_clear_on(*r.domain())) {
        throw PoleOnDomain("composition has a pole inside its declared domain");
    }
    return r;
}

MoebiusMap moebius_power(const MoebiusMap& m, long k) {
    if (k < 0) throw Error("moebius_power: negative exponent");
    MoebiusMap acc = MoebiusMap::identity();
    acc.set_domain(m.domain());
    MoebiusMap base = m;
    long e = k;
    while (e > 0) {
        if (e & 1) {
            const auto a = acc.entries(), b = base.entries();
            acc = MoebiusMap(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                             a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3],
                             acc.domain());
        }
        e >>= 1;
        if (e > 0) {
            const auto b = base.entries();
            base = MoebiusMap(b[0] * b[0] + b[1] * b[2], b[0] * b[1] + b[1] * b[3],
                              b[2] * b[0] + b[3] * b[2], b[2] * b[1] + b[3] * b[3]);
        }
    }
    return acc;
}

double projective_distance(const MoebiusMap& a, const MoebiusMap& b) {
    const auto x = a.entries();
    const auto y = b.entries();
    double xy = 0.0, yy = 0.0, xx = 0.0;
    for (int i = 0; i < 4; ++i) {
        xy += x[i] * y[i];
        yy += y[i] * y[i];
        xx += x[i] * x[i];
    }
    if (yy == 0.0 || xx == 0.0) return std::sqrt(std::max(xx, yy));
    const double k = xy / yy;
    double r = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double d = x[i] - k * y[i];
        r += d * d;
    }
    return std::sqrt(r / xx);
}

} // namespace brz
