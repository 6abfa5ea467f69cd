#include "brz/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brz/horseshoe.hpp"
#include "brz/sampling.hpp"

namespace brz {

JetT jet_T(const Params& p, long r_cap) {
    // heights are locally constant on the open strata, so they enter the jets
    // as constants
    const StepResult s1 = renormalize_R(p, r_cap);
    const StepResult s2 = renormalize_R(s1.new_params, r_cap);
    const long r0 = s1.r0.r, r1 = s2.r0.r;

    const JetMobius F = JetMobius::family_F(p);
    const JetMobius G = JetMobius::family_G(p);
    const JetMobius Fr0 = jet_power(F, r0);
    const Jet2 lambda = Fr0.eval(-1.0);  // F^{r0}(-1) < 0

    const JetMobius FrG = Fr0 * G;
    JetMobius beta{{Jet2::constant(-1), Jet2::constant(0), Jet2::constant(0), lambda}};
    JetMobius betainv{{lambda, Jet2::constant(0), Jet2::constant(0), Jet2::constant(-1)}};
    const JetMobius eta = beta * jet_power(FrG, r1) * F * betainv;

    const Jet2 a2 = eta.eval(0.0);
    const Jet2 b2 = -eta.eval(-1.0);
    const Jet2 v2 = (Jet2::constant(p.c) - a2 - b2) / b2;

    JetT out;
    out.image = Params::lenient(a2.val, v2.val, p.c);
    out.J = {{{a2.da, a2.dv}, {v2.da, v2.dv}}};
    out.r0 = s1.r0;
    out.r1 = s2.r0;
    out.lambda = lambda.val;
    return out;
}

FdJacobian fd_jacobian_T(const Params& p, double step, long r_cap) {
    FdJacobian fd;
    const StepResult base1 = renormalize_R(p, r_cap);
    const Height h0 = base1.r0;
    const Height h1 = height(base1.new_params, r_cap);

    bool stable = true;
    auto image = [&](double a, double v) {
        const Params q = Params::lenient(a, v, p.c);
        const StepResult s = renormalize_T(q, r_cap);
        if (!(s.r0 == h0) || !(s.r1 && *s.r1 == h1)) stable = false;
        return s.new_params;
    };

    const Params pa1 = image(p.a + step, p.v);
    const Params pa0 = image(p.a - step, p.v);
    const Params pv1 = image(p.a, p.v + step);
    const Params pv0 = image(p.a, p.v - step);
    fd.J = {{{(pa1.a - pa0.a) / (2 * step), (pv1.a - pv0.a) / (2 * step)},
             {(pa1.v - pa0.v) / (2 * step), (pv1.v - pv0.v) / (2 * step)}}};
    fd.heights_stable = stable;
    return fd;
}

JetT jet_T_checked(const Params& p, double tol, long r_cap) {
    JetT jt = jet_T(p, r_cap);
    FdJacobian fd;
    try {
        fd = fd_jacobian_T(p, 1e-6, r_cap);
    } catch (const Error& e) {
        throw IllConditioned(std::string("finite-difference cross-check failed to evaluate: ") +
                             e.what());
    }
    if (!fd.heights_stable) {
        throw IllConditioned("finite-difference stencil crosses a stratum boundary");
    }
    double scale = 0.0, diff = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            scale = std::max(scale, std::fabs(jt.J[i][j]));
            diff = std::max(diff, std::fabs(jt.J[i][j] - fd.J[i][j]));
        }
    if (diff > tol * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "jet/finite-difference mismatch " << diff << " (scale " << scale << ")";
        throw IllConditioned(os.str());
    }
    return jt;
}

JacobianRecord eigensplit(const Mat2& J, double margin) {
    const double tr = J[0][0] + J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double disc = tr * tr - 4.0 * det;
    if (disc <= 0.0) {
        throw NotHyperbolic("complex eigenvalue pair");
    }
    const double s = std::sqrt(disc);
    const double l1 = 0.5 * (tr + s);
    const double l2 = 0.5 * (tr - s);
    const double lu = (std::fabs(l1) >= std::fabs(l2)) ? l1 : l2;
    const double ls = (std::fabs(l1) >= std::fabs(l2)) ? l2 : l1;

    JacobianRecord r;
    r.J = J;
    r.lambda_u = lu;
    r.lambda_s = ls;
    r.margin = std::min(std::fabs(lu) - 1.0, 1.0 - std::fabs(ls));
    if (!(std::fabs(lu) > 1.0 + margin) || !(std::fabs(ls) < 1.0 - margin)) {
        std::ostringstream os;
        os << "eigenvalues " << lu << ", " << ls << " do not straddle modulus one with margin "
           << margin;
        throw NotHyperbolic(os.str());
    }

    auto eigvec = [&](double lambda) {
        // rows of (J - lambda I) are both orthogonal to the eigenvector; use
        // the better-conditioned one
        const double r0x = J[0][0] - lambda, r0y = J[0][1];
        const double r1x = J[1][0], r1y = J[1][1] - lambda;
        double x, y;
        if (std::hypot(r0x, r0y) >= std::hypot(r1x, r1y)) {
            x = -r0y; y = r0x;
        } else {
            x = -r1y; y = r1x;
        }
        const double n = std::hypot(x, y);
        return TangentVector{x / n, y / n};
    };
    r.e_u = eigvec(lu);
    r.e_s = eigvec(ls);
    return r;
}

JacobianRecord hyperbolic_certificate(const Params& p, const Mat2& J, double margin) {
    JacobianRecord r = eigensplit(J, margin);
    r.unsupported_regime = !p.certified_regime;

    // the unstable direction must lie in the cone (either orientation)
    ConeCheck plus = in_cone(p, r.e_u);
    if (plus.verdict != ConeVerdict::Inside) {
        ConeCheck minus = in_cone(p, TangentVector{-r.e_u.alpha, -r.e_u.nu});
        if (minus.verdict == ConeVerdict::Inside) {
            r.e_u = TangentVector{-r.e_u.alpha, -r.e_u.nu};
        } else if (!r.unsupported_regime) {
            throw NotHyperbolic("unstable eigenvector fails the cone test at the base point");
        }
    }
    return r;
}

namespace {

TangentVector mat_apply(const Mat2& J, const TangentVector& v) {
    return {J[0][0] * v.alpha + J[0][1] * v.nu, J[1][0] * v.alpha + J[1][1] * v.nu};
}

TangentVector normalized(const TangentVector& v) {
    const double n = v.norm();
    return {v.alpha / n, v.nu / n};
}

Mat2 inverse(const Mat2& J) {
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    return {{{J[1][1] / det, -J[0][1] / det}, {-J[1][0] / det, J[0][0] / det}}};
}

double angle_between(const TangentVector& u, const TangentVector& w) {
    const double dot = std::fabs(u.alpha * w.alpha + u.nu * w.nu) / (u.norm() * w.norm());
    return std::acos(std::min(1.0, dot));
}

} // namespace

OrbitSplitting orbit_splitting(double c, const SymbolWindow& window, int segment_length) {
    window.check();
    const int k = segment_length;
    // history steps feed the unstable power iteration; keep at least 8
    // backward entries so every shifted window still pins its unstable side
    const int hist =
        std::clamp<int>((static_cast<int>(window.backward.size()) - 8) / 2, 1, 6);
    if ((int)window.backward.size() < 2 * hist + 2) {
        throw Error("orbit_splitting: backward word too short");
    }

    // future margin feeds the stable power iteration; every shifted window
    // must keep a forward word deep enough to solve on
    const int fut = std::clamp<int>(
        (static_cast<int>(window.forward.size()) - 2 * k - 10) / 2, 1, 6);
    if ((int)window.forward.size() < 2 * (k + fut) + 8) {
        throw Error("orbit_splitting: forward word too short for the requested segment");
    }

    std::vector<SymbolWindow> shifted;
    SymbolWindow w0 = window;
    for (int j = 0; j < hist; ++j) w0 = w0.unshift2();
    SymbolWindow w = w0;
    const int total = hist + k + fut;
    AttractorOptions opts;
    opts.depth = std::min<int>(10, static_cast<int>(window.forward.size()));
    for (int j = 0; j < total; ++j) {
        shifted.push_back(w);
        w = w.shift2();
    }

    std::vector<Params> pts(total);
    std::vector<Mat2> jac(total);
    for (int j = 0; j < total; ++j) {
        AttractorOptions o = opts;
        o.depth = std::min<int>(10, static_cast<int>(shifted[j].forward.size()));
        pts[j] = attractor_point(c, shifted[j], o).point;
        jac[j] = jet_T(pts[j]).J;
    }

    OrbitSplitting out;
    for (int j = hist; j < hist + k; ++j) out.points.push_back(pts[j]);

    // unstable field by forward products seeded with the cone direction at
    // the earliest point
    {
        TangentVector u = canonical_cone_vector(pts[0]);
        u = normalized(u);
        for (int j = 0; j < hist; ++j) u = normalized(mat_apply(jac[j], u));
        for (int j = hist; j < hist + k; ++j) {
            out.Eu.push_back(u);
            const TangentVector pushed = mat_apply(jac[j], u);
            out.expansion.push_back(pushed.norm());
            u = normalized(pushed);
        }
    }

    // stable field by inverse products pulled back from the future margin
    for (int j = hist; j < hist + k; ++j) {
        TangentVector s = normalized(canonical_cone_vector(pts[j + fut]));
        // any generic seed converges to E^s under pulled-back inverses
        s = TangentVector{-s.nu, s.alpha};
        for (int m = j + fut - 1; m >= j; --m) s = normalized(mat_apply(inverse(jac[m]), s));
        out.Es.push_back(s);
        out.contraction.push_back(mat_apply(jac[j], s).norm());
    }

    out.min_angle = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        out.min_angle = std::min(out.min_angle, angle_between(out.Eu[j], out.Es[j]));
    }
    if (out.min_angle < 1e-6) {
        throw DegenerateAlignment("stable/unstable directions nearly parallel");
    }

    // smallest k0 with every length-k0 subproduct of expansion factors > 1
    for (int k0 = 1; k0 <= k; ++k0) {
        double worst = std::numeric_limits<double>::infinity();
        for (int j = 0; j + k0 <= k; ++j) {
            double prod = 1.0;
            for (int i = j; i < j + k0; ++i) prod *= out.expansion[i];
            worst = std::min(worst, prod);
        }
        if (worst > 1.0) {
            out.k0 = k0;
            out.lambda = worst;
            break;
        }
    }
    return out;
}

ExpansionReport expansion_report(const Params& p, const TangentVector& vbar, int k,
                                 long r_cap) {
    ExpansionReport rep;
    rep.grad_a.push_back(vbar.alpha);  // A_{0,c} = a, so grad = alpha

    Mat2 cum = {{{1.0, 0.0}, {0.0, 1.0}}};
    Params cur = p;
    for (int j = 1; j <= k; ++j) {
        const JetT jt = jet_T(cur, r_cap);
        Mat2 next;
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l)
                next[i][l] = jt.J[i][0] * cum[0][l] + jt.J[i][1] * cum[1][l];
        cum = next;
        cur = jt.image;
        rep.grad_a.push_back(cum[0][0] * vbar.alpha + cum[0][1] * vbar.nu);
    }

    rep.all_positive =
        std::all_of(rep.grad_a.begin(), rep.grad_a.end(), [](double x) { return x > 0.0; });

    // least-squares slope of log grad_a over j = 1..k
    if (k >= 2 && rep.all_positive) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int j = 1; j <= k; ++j) {
            const double x = j, y = std::log(rep.grad_a[j]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.growth_rate = std::exp(slope);
        rep.delta_hat = rep.growth_rate - 1.0;
    }
    return rep;
}

AprioriScan apriori_scan(double c, int n_samples, unsigned long seed, long r_cap) {
    Sampler smp(seed);
    AprioriScan scan;
    scan.min_lambda = 0.0;
    scan.lambdas.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        Params p;
        try {
            p = smp.sample_Delta_O2(c, r_cap, &scan.rejected);
        } catch (const Error&) {
            ++scan.rejected;
            continue;
        }
        try {
            const StepResult s = renormalize_T(p, r_cap);
            scan.lambdas.push_back(s.lambda);
            scan.min_lambda = std::min(scan.min_lambda, s.lambda);
            ++scan.accepted;
        } catch (const Error&) {
            ++scan.rejected;
        }
    }
    if (scan.min_lambda < 0.0) scan.delta = -1.0 / scan.min_lambda - 1.0;
    return scan;
}

} // namespace brz
