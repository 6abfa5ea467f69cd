#pragma once

#include <array>
#include <cmath>

#include "brz/params.hpp"

namespace brz {

// First-order jet in the two parameter directions: a value together with its
// partial derivatives with respect to a and v. Arithmetic follows the product
// and chain rules; a constant has zero partials.
struct Jet2 {
    double val = 0.0;
    double da = 0.0;
    double dv = 0.0;

    static Jet2 constant(double x) { return {x, 0.0, 0.0}; }
    static Jet2 var_a(double x) { return {x, 1.0, 0.0}; }
    static Jet2 var_v(double x) { return {x, 0.0, 1.0}; }
};

inline Jet2 operator+(const Jet2& x, const Jet2& y) {
    return {x.val + y.val, x.da + y.da, x.dv + y.dv};
}
inline Jet2 operator-(const Jet2& x, const Jet2& y) {
    return {x.val - y.val, x.da - y.da, x.dv - y.dv};
}
inline Jet2 operator-(const Jet2& x) { return {-x.val, -x.da, -x.dv}; }
inline Jet2 operator*(const Jet2& x, const Jet2& y) {
    return {x.val * y.val, x.da * y.val + x.val * y.da, x.dv * y.val + x.val * y.dv};
}
inline Jet2 operator/(const Jet2& x, const Jet2& y) {
    const double q = x.val / y.val;
    return {q, (x.da - q * y.da) / y.val, (x.dv - q * y.dv) / y.val};
}
inline Jet2 operator*(double s, const Jet2& x) { return {s * x.val, s * x.da, s * x.dv}; }

// Moebius matrix with jet entries, for propagating parameter derivatives
// through long compositions at O(1) cost per factor.
struct JetMobius {
    std::array<Jet2, 4> m;

    static JetMobius identity() {
        return {{Jet2::constant(1), Jet2::constant(0), Jet2::constant(0), Jet2::constant(1)}};
    }

    // F_{a,v,c} = (cz + a)/(-vz + 1) with a, v the jet variables
    static JetMobius family_F(const Params& p) {
        return {{Jet2::constant(p.c), Jet2::var_a(p.a), -Jet2::var_v(p.v), Jet2::constant(1)}};
    }

    // G_{a,v,c} = (az - ac)/((1+v-c) z + ac)
    static JetMobius family_G(const Params& p) {
        const Jet2 a = Jet2::var_a(p.a);
        const Jet2 v = Jet2::var_v(p.v);
        const Jet2 c = Jet2::constant(p.c);
        return {{a, -(a * c), Jet2::constant(1) + v - c, a * c}};
    }

    Jet2 eval(const Jet2& x) const {
        return (m[0] * x + m[1]) / (m[2] * x + m[3]);
    }
    Jet2 eval(double x) const { return eval(Jet2::constant(x)); }

    // divide all entries by the largest-|value| entry (a jet scalar), which
    // keeps the projective class as a function of the parameters
    void normalize() {
        int k = 0;
        for (int i = 1; i < 4; ++i)
            if (std::fabs(m[i].val) > std::fabs(m[k].val)) k = i;
        const Jet2 s = m[k];
        if (s.val != 0.0) {
            for (auto& e : m) e = e / s;
        }
    }
};

inline JetMobius operator*(const JetMobius& x, const JetMobius& y) {
    JetMobius r{{x.m[0] * y.m[0] + x.m[1] * y.m[2], x.m[0] * y.m[1] + x.m[1] * y.m[3],
                 x.m[2] * y.m[0] + x.m[3] * y.m[2], x.m[2] * y.m[1] + x.m[3] * y.m[3]}};
    r.normalize();
    return r;
}

inline JetMobius jet_power(const JetMobius& base_in, long k) {
    JetMobius acc = JetMobius::identity();
    JetMobius base = base_in;
    long e = k;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return acc;
}

} // namespace brz
