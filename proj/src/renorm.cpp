#include "brz/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace brz {

std::optional<double> f_fixed_point_in_unit(const Params& p) {
    // F(z) = z  <=>  v z^2 + (c-1) z + a = 0
    const double A = p.v, B = p.c - 1.0, C = p.a;
    if (std::fabs(A) < 1e-300) {
        if (B == 0.0) return std::nullopt;
        const double z = -C / B;
        if (z > -1.0 && z <= 0.0) return z;
        return std::nullopt;
    }
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    // stable quadratic roots
    const double q = -0.5 * (B + (B >= 0.0 ? s : -s));
    const double z1 = q / A;
    const double z2 = (q != 0.0) ? C / q : std::numeric_limits<double>::infinity();
    // report the larger root first: it is the one the orbit of -1 meets
    const double hi = std::max(z1, z2), lo = std::min(z1, z2);
    for (double z : {hi, lo}) {
        if (std::isfinite(z) && z > -1.0 && z <= 0.0) return z;
    }
    return std::nullopt;
}

Height height(const BreakPair& pair, long r_cap) {
    if (f_fixed_point_in_unit(pair.params)) return Height::infinity();
    MoebiusMap F = pair.F;
    F.set_domain(std::nullopt);
    double z = -1.0;
    for (long r = 1; r <= r_cap + 1; ++r) {
        const double zn = F.eval(z);
        if (zn > 0.0) {
            if (r == 1) {
                // F(-1) > 0 cannot happen inside D_c (b >= 0); boundary noise
                throw NotRenormalizable("F(-1) > 0: outside the family's domain");
            }
            return Height(r - 1);
        }
        z = zn;
    }
    throw HeightCapExceeded("height cap exceeded with no zero crossing and no fixed point",
                            r_cap);
}

Height height(const Params& p, long r_cap) { return height(make_pair(p), r_cap); }

namespace {

MoebiusMap model_F(double a, double v, double c) {
    return MoebiusMap(c, a, -v, 1.0);
}
MoebiusMap model_G(double a, double v, double c) {
    return MoebiusMap(a, -a * c, 1.0 + v - c, a * c);
}

// chained multiply without domains
MoebiusMap mul(const MoebiusMap& x, const MoebiusMap& y) {
    const auto a = x.entries(), b = y.entries();
    return MoebiusMap(a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                      a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]);
}

// Extended-precision 2x2 matrices for the step algebra only: long
// compositions followed by the v' extraction are the ill-conditioned part of
// a step, and the extra mantissa keeps the documented double-precision
// tolerances honest near strata boundaries. Storage and API stay double.
struct LdMat {
    long double m[4];

    static LdMat from(const MoebiusMap& x) {
        const auto e = x.entries();
        return {{(long double)e[0], (long double)e[1], (long double)e[2],
                 (long double)e[3]}};
    }

    void normalize() {
        long double s = 0.0L;
        for (long double e : m) s = std::max(s, e < 0 ? -e : e);
        if (s > 0.0L)
            for (long double& e : m) e /= s;
    }

    LdMat mul(const LdMat& o) const {
        LdMat r{{m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3],
                 m[2] * o.m[0] + m[3] * o.m[2], m[2] * o.m[1] + m[3] * o.m[3]}};
        r.normalize();
        return r;
    }

    LdMat pow(long k) const {
        LdMat acc{{1.0L, 0.0L, 0.0L, 1.0L}};
        LdMat base = *this;
        while (k > 0) {
            if (k & 1) acc = acc.mul(base);
            k >>= 1;
            if (k > 0) base = base.mul(base);
        }
        return acc;
    }

    long double eval(long double x) const {
        return (m[0] * x + m[1]) / (m[2] * x + m[3]);
    }

    MoebiusMap to_mobius() const {
        return MoebiusMap((double)m[0], (double)m[1], (double)m[2], (double)m[3]);
    }
};

} // namespace

StepResult renormalize_R(const Params& p, long r_cap, double family_tol) {
    const BreakPair pair = make_pair(p);
    const Height r = height(pair, r_cap);
    if (r.is_infinite()) {
        throw NotRenormalizable("pair has a fixed point in (-1,0]: height infinite");
    }

    // D(x) = -x/a, D^{-1}(x) = -a x
    const LdMat D{{-1.0L, 0.0L, 0.0L, (long double)p.a}};
    const LdMat Dinv{{-(long double)p.a, 0.0L, 0.0L, 1.0L}};
    const LdMat F = LdMat::from(pair.F);
    const LdMat G = LdMat::from(pair.G);

    const LdMat Fr = F.pow(r.r);
    const LdMat eta_ld = D.mul(Fr.mul(G)).mul(Dinv);
    const LdMat xi_ld = D.mul(F).mul(Dinv);
    MoebiusMap eta = eta_ld.to_mobius();
    MoebiusMap xi = xi_ld.to_mobius();

    const long double ap_ld = eta_ld.eval(0.0L);
    const long double bp_ld = -eta_ld.eval(-1.0L);
    const double ap = (double)ap_ld;
    const double bp = (double)bp_ld;
    const double cp = 1.0 / p.c;
    if (!(bp > 1e-14)) {
        throw DegenerateExtraction("b' <= 1e-14: v' extraction singular (boundary of a stratum)");
    }
    const double vp = (double)(((long double)cp - ap_ld - bp_ld) / bp_ld);

    StepResult res;
    res.new_params = Params::lenient(ap, vp, cp);
    res.r0 = r;
    res.lambda = -ap * p.a;  // F^{r0}(-1), since a' = -F^{r0}(-1)/a
    res.eta = eta;
    res.xi = xi;
    res.rescale = D.to_mobius();
    // At a' = 0 (the b = 0 stratum) the (a,v) chart of the family degenerates
    // and the model G' matrix collapses to zero; only the eta side is
    // comparable there.
    res.residual = projective_distance(eta, model_F(ap, vp, cp));
    if (ap > 1e-12) {
        res.residual =
            std::max(res.residual, projective_distance(xi, model_G(ap, vp, cp)));
    }
    if (res.residual > family_tol) {
        std::ostringstream os;
        os << "renormalized matrices deviate from the model family: residual = "
           << res.residual;
        throw FamilyDeviation(os.str(), res.residual);
    }
    res.eta.set_domain(Interval{-1.0, 0.0});
    res.xi.set_domain(Interval{0.0, ap});
    return res;
}

StepResult renormalize_T(const Params& p, long r_cap, double path_tol) {
    StepResult s1 = renormalize_R(p, r_cap);
    StepResult s2 = renormalize_R(s1.new_params, r_cap);

    // Path one re-done without the double rounding of the intermediate
    // (a',v'): composing the two step rescalings in extended precision keeps
    // the comparison about the algebraic identity, not interface rounding.
    const BreakPair pair = make_pair(p);
    const LdMat F = LdMat::from(pair.F);
    const LdMat G = LdMat::from(pair.G);
    const long r0 = s1.r0.r, r1 = s2.r0.r;

    LdMat path1_eta, path1_xi;
    {
        const LdMat D1{{-1.0L, 0.0L, 0.0L, (long double)p.a}};
        const LdMat D1inv{{-(long double)p.a, 0.0L, 0.0L, 1.0L}};
        const LdMat eta1 = D1.mul(F.pow(r0).mul(G)).mul(D1inv);
        const LdMat xi1 = D1.mul(F).mul(D1inv);
        const long double a1 = eta1.eval(0.0L);
        const LdMat D2{{-1.0L, 0.0L, 0.0L, a1}};
        const LdMat D2inv{{-a1, 0.0L, 0.0L, 1.0L}};
        path1_eta = D2.mul(eta1.pow(r1).mul(xi1)).mul(D2inv);
        path1_xi = D2.mul(eta1).mul(D2inv);
    }
    const long double p1_a = path1_eta.eval(0.0L);
    const long double p1_b = -path1_eta.eval(-1.0L);
    const long double p1_v = ((long double)p.c - p1_a - p1_b) / p1_b;

    // Path two: the composite formula
    //   ( beta o (F^{r0} o G)^{r1} o F o beta^{-1},  beta o F^{r0} o G o beta^{-1} ),
    // beta(x) = -x/lambda, lambda = F^{r0}(-1) < 0.
    const LdMat Fr0 = F.pow(r0);
    const long double lambda = Fr0.eval(-1.0L);
    const LdMat beta{{-1.0L, 0.0L, 0.0L, lambda}};
    const LdMat betainv{{lambda, 0.0L, 0.0L, -1.0L}};
    const LdMat FrG = Fr0.mul(G);
    const LdMat eta2_ld = beta.mul(FrG.pow(r1).mul(F)).mul(betainv);
    const LdMat xi2_ld = beta.mul(FrG).mul(betainv);
    const MoebiusMap eta2 = eta2_ld.to_mobius();
    const MoebiusMap xi2 = xi2_ld.to_mobius();

    const long double a2_ld = eta2_ld.eval(0.0L);
    const long double b2_ld = -eta2_ld.eval(-1.0L);
    const long double v2_ld = ((long double)p.c - a2_ld - b2_ld) / b2_ld;

    const double disagreement = std::max(
        {(double)std::fabs((double)(a2_ld - p1_a)), (double)std::fabs((double)(v2_ld - p1_v)),
         projective_distance(eta2, path1_eta.to_mobius()),
         projective_distance(xi2, path1_xi.to_mobius())});
    if (disagreement > path_tol) {
        std::ostringstream os;
        os << "two-path evaluation of T_c disagrees by " << disagreement;
        throw Error(os.str());
    }

    StepResult res = s2;
    res.r0 = s1.r0;
    res.r1 = s2.r0;
    res.lambda = (double)lambda;
    res.rescale = beta.to_mobius();
    res.residual = std::max(s1.residual, s2.residual);
    return res;
}

PreRenorm prerenormalize(const Params& p, int n, long r_cap) {
    const BreakPair base = make_pair(p);
    MoebiusMap H = base.F, K = base.G;
    H.set_domain(std::nullopt);
    K.set_domain(std::nullopt);
    MoebiusMap gamma = MoebiusMap::identity();

    Params cur = p;
    MoebiusMap eta = H, xi = K;
    for (int level = 0; level < n; ++level) {
        StepResult step;
        try {
            step = renormalize_R(cur, r_cap);
        } catch (const NotRenormalizable&) {
            std::ostringstream os;
            os << "pair is only " << level << " times renormalizable, requested " << n;
            throw NotRenormalizable(os.str());
        }
        const MoebiusMap Hn = mul(moebius_power(H, step.r0.r), K);
        K = H;
        H = Hn;
        gamma = mul(step.rescale, gamma);
        cur = step.new_params;
        eta = step.eta;
        xi = step.xi;
        eta.set_domain(std::nullopt);
        xi.set_domain(std::nullopt);
    }

    PreRenorm pr;
    pr.H = H;
    pr.K = K;
    pr.gamma = gamma;
    if (n > 0) {
        const MoebiusMap gi = gamma.inverse();
        pr.conjugacy_residual =
            std::max(projective_distance(mul(mul(gi, eta), gamma), H),
                     projective_distance(mul(mul(gi, xi), gamma), K));
    }
    return pr;
}

RotationNumber rotation_number(const Params& p, int depth, long r_cap) {
    RotationNumber rn;
    Params cur = p;
    for (int i = 0; i < depth; ++i) {
        Height h;
        try {
            h = height(cur, r_cap);
        } catch (const HeightCapExceeded&) {
            rn.cf.push(Height(r_cap));
            rn.cf.exhausted_cap = true;
            break;
        }
        rn.cf.push(h);
        if (h.is_infinite()) break;
        // rescaling by 1/a_n is no longer trustworthy below this threshold
        if (cur.a < 1e-12) {
            rn.degenerate_halt = true;
            break;
        }
        try {
            // deep in the expansion the family residual may exhaust double
            // conditioning (extreme heights); halt certification there rather
            // than abort
            cur = renormalize_R(cur, r_cap, 1e-6).new_params;
        } catch (const DegenerateExtraction&) {
            rn.degenerate_halt = true;
            break;
        } catch (const FamilyDeviation&) {
            rn.degenerate_halt = true;
            break;
        }
    }
    rn.cf.value_interval(rn.value_lo, rn.value_hi);
    return rn;
}

double birkhoff_rotation_number(const Params& p, long iterations) {
    return CircleLift(make_pair(p)).birkhoff(iterations);
}

namespace {

// Orbit-iteration verdict used as the dynamical cross-check in classify: no
// closed-form shortcut, fixed points are detected by orbit stalling.
enum class DynVerdict { Renormalizable, NonRenormalizable, Undecided };

DynVerdict dynamic_test(const Params& p, long r_cap, Height* k_out) {
    MoebiusMap F(p.c, p.a, -p.v, 1.0);
    double z = -1.0;
    for (long r = 1; r <= r_cap + 1; ++r) {
        const double zn = F.eval(z);
        if (zn > 0.0) {
            if (k_out) *k_out = Height(std::max<long>(r - 1, 1));
            return DynVerdict::Renormalizable;
        }
        if (zn - z < 1e-15 * std::max(1.0, std::fabs(z))) {
            return DynVerdict::NonRenormalizable;  // stalled below zero
        }
        z = zn;
    }
    return DynVerdict::Undecided;
}

} // namespace

RegionClass classify(double a, double v, double c, long r_cap, double band) {
    RegionClass rc;
    rc.in_D = in_D(a, v, c);
    rc.in_Delta = in_Delta(a, v, c);
    if (!rc.in_D || c == 1.0) {
        rc.status = RegionClass::Status::Undecided;
        return rc;
    }

    // closed-form verdict (empty non-renormalizable set for c < 1)
    bool formula_nonrenorm = false;
    bool near_boundary = false;
    if (c > 1.0) {
        const double lower = std::max(0.0, c - v - 1.0);
        const double upper = (v > 0.0) ? (c - 1.0) * (c - 1.0) / (4.0 * v)
                                       : std::numeric_limits<double>::infinity();
        const double vmin = 0.5 * (c - 1.0);
        formula_nonrenorm = (v > vmin) && (a > lower) && (a <= upper);
        near_boundary = std::fabs(v - vmin) < band ||
                        (std::isfinite(upper) && std::fabs(a - upper) < band) ||
                        std::fabs(a - lower) < band;
    }
    rc.boundary_band = near_boundary;

    Height k;
    const DynVerdict dyn = dynamic_test(Params::lenient(a, v, c), r_cap, &k);

    if (near_boundary || dyn == DynVerdict::Undecided) {
        rc.status = RegionClass::Status::Undecided;
        rc.methods_disagree =
            (dyn != DynVerdict::Undecided) &&
            (formula_nonrenorm != (dyn == DynVerdict::NonRenormalizable)) && !near_boundary;
        return rc;
    }

    const bool dyn_nonrenorm = (dyn == DynVerdict::NonRenormalizable);
    if (formula_nonrenorm != dyn_nonrenorm) {
        rc.status = RegionClass::Status::Undecided;
        rc.methods_disagree = true;
        return rc;
    }
    if (dyn_nonrenorm) {
        rc.status = RegionClass::Status::NonRenormalizable;
    } else {
        rc.status = RegionClass::Status::Renormalizable;
        rc.k = k;
    }
    return rc;
}

InvolutionResult involution_I(const Params& p) {
    if (p.a * p.v == 0.0) {
        throw DomainViolation("involution undefined: a*v = 0");
    }
    InvolutionResult r;
    const double ap = (p.c - 1.0 - p.v) / (p.a * p.v);
    const double vp = -p.v / p.c;
    r.image = Params::lenient(ap, vp, 1.0 / p.c);
    r.jacobian_det = (p.c - 1.0 - p.v) / (p.a * p.a * p.c * p.v);
    r.domain_violation = !r.image.in_domain;
    return r;
}

Params involution_I_strict(const Params& p) {
    InvolutionResult r = involution_I(p);
    if (r.domain_violation) {
        std::ostringstream os;
        os << "involution image (a=" << r.image.a << ", v=" << r.image.v
           << ", c=" << r.image.c << ") violates D membership";
        throw DomainViolation(os.str());
    }
    return r.image;
}

Params dual_inverse_R(const Params& image, long r_cap) {
    // image lives at break cx = 1/c; the pre-image lives at break 1/cx.
    const Params y = involution_I_strict(image);
    const StepResult s = renormalize_R(y, r_cap);
    return involution_I_strict(s.new_params);
}

Params dual_inverse_T(const Params& image, long r_cap) {
    const Params y = involution_I_strict(image);
    const StepResult s = renormalize_T(y, r_cap);
    return involution_I_strict(s.new_params);
}

bool duality_consistent_R(const Params& p) {
    if (p.a * p.v == 0.0) return false;
    try {
        return !involution_I(p).domain_violation;
    } catch (const DomainViolation&) {
        return false;
    }
}

bool duality_consistent_T(const Params& p, long r_cap) {
    if (!duality_consistent_R(p)) return false;
    try {
        const StepResult s = renormalize_R(p, r_cap);
        return duality_consistent_R(s.new_params);
    } catch (const Error&) {
        return false;
    }
}

} // namespace brz
