#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "brz/errors.hpp"

namespace brz {

// Closed interval on the real line, used as the declared evaluation domain
// of a Moebius map.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x, double slack = 1e-9) const {
        return x >= lo - slack && x <= hi + slack;
    }
    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

// Orientation-preserving fractional-linear map
//     x -> (m00*x + m01) / (m10*x + m11),   det > 0,
// stored as a 2x2 matrix rescaled after every product so that the largest
// absolute entry is 1. An optional domain interval is carried along and the
// denominator is checked against it on every evaluation: pole crossings are
// the dominant silent-failure mode in long renormalization compositions.
class MoebiusMap {
public:
    MoebiusMap() : m_{{1.0, 0.0, 0.0, 1.0}} {}

    MoebiusMap(double m00, double m01, double m10, double m11,
               std::optional<Interval> domain = std::nullopt)
        : m_{{m00, m01, m10, m11}}, domain_(domain) {
        normalize();
    }

    static MoebiusMap identity() { return MoebiusMap(); }

    // Affine map x -> s*x + t.
    static MoebiusMap affine(double s, double t,
                             std::optional<Interval> domain = std::nullopt) {
        return MoebiusMap(s, t, 0.0, 1.0, domain);
    }

    double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

    double entry(int i, int j) const { return m_[2 * i + j]; }
    std::array<double, 4> entries() const { return m_; }

    const std::optional<Interval>& domain() const { return domain_; }
    void set_domain(std::optional<Interval> d) { domain_ = d; }

    double denominator(double x) const { return m_[2] * x + m_[3]; }

    double eval(double x) const {
        check_point(x);
        return (m_[0] * x + m_[1]) / (m_[2] * x + m_[3]);
    }

    // d/dx of the evaluation, det / den^2.
    double deriv(double x) const {
        check_point(x);
        const double den = m_[2] * x + m_[3];
        return det() / (den * den);
    }

    MoebiusMap inverse() const {
        // (a b; c d)^-1 ~ (d -b; -c a), projectively; det sign is preserved.
        MoebiusMap r(m_[3], -m_[1], -m_[2], m_[0]);
        return r;
    }

    // Largest-|entry| normalization; the projective class is unchanged and the
    // determinant sign is kept positive by construction of the inputs.
    void normalize() {
        double s = 0.0;
        for (double e : m_) s = std::max(s, std::fabs(e));
        if (s > 0.0 && std::isfinite(s)) {
            for (double& e : m_) e /= s;
        }
    }

    // True if the (linear) denominator has no zero on [lo, hi].
    bool denominator_clear_on(const Interval& iv) const {
        const double dl = denominator(iv.lo);
        const double dh = denominator(iv.hi);
        return dl * dh > 0.0;
    }

private:
    void check_point(double x) const {
        if (domain_ && !domain_->contains(x)) {
            throw PoleOnDomain("evaluation point " + std::to_string(x) +
                               " outside declared domain [" + std::to_string(domain_->lo) +
                               ", " + std::to_string(domain_->hi) + "]");
        }
        const double den = m_[2] * x + m_[3];
        double scale = std::max(std::fabs(m_[2] * x), std::fabs(m_[3]));
        if (scale == 0.0) scale = 1.0;
        if (std::fabs(den) <= 1e-14 * scale) {
            throw PoleOnDomain("Moebius denominator vanishes at x = " + std::to_string(x));
        }
    }

    std::array<double, 4> m_;
    std::optional<Interval> domain_;
};

// Composition m1 after m2 (i.e. x -> m1(m2(x))). The domain of the result is
// the domain of the inner map; the denominator of the product is checked
// against it when present.
MoebiusMap moebius_compose(const MoebiusMap& m1, const MoebiusMap& m2);

// k-fold composition by repeated squaring with renormalization; k >= 0.
MoebiusMap moebius_power(const MoebiusMap& m, long k);

inline MoebiusMap moebius_invert(const MoebiusMap& m) { return m.inverse(); }

inline double moebius_eval(const MoebiusMap& m, double x) { return m.eval(x); }
inline double moebius_deriv(const MoebiusMap& m, double x) { return m.deriv(x); }

// Least-squares projective distance between two maps: || A - k B ||_F / ||A||_F
// minimized over the scalar k. Zero iff the maps are projectively equal.
double projective_distance(const MoebiusMap& a, const MoebiusMap& b);

} // namespace brz
