#include "brz/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brz/hyperbolic.hpp"

namespace brz {

void SymbolWindow::check() const {
    for (long r : backward)
        if (r < 1) throw Error("symbol window entries must be >= 1");
    for (long r : forward)
        if (r < 1) throw Error("symbol window entries must be >= 1");
    if (bound) {
        for (long r : backward)
            if (r > *bound) throw Error("entry exceeds the declared type bound");
        for (long r : forward)
            if (r > *bound) throw Error("entry exceeds the declared type bound");
    }
}

SymbolWindow SymbolWindow::shift2() const {
    if (forward.size() < 2) throw Error("shift2: forward word too short");
    SymbolWindow w = *this;
    w.backward.push_back(forward[0]);
    w.backward.push_back(forward[1]);
    w.forward.erase(w.forward.begin(), w.forward.begin() + 2);
    return w;
}

SymbolWindow SymbolWindow::unshift2() const {
    if (backward.size() < 2) throw Error("unshift2: backward word too short");
    SymbolWindow w = *this;
    w.forward.insert(w.forward.begin(), backward.end() - 2, backward.end());
    w.backward.resize(w.backward.size() - 2);
    return w;
}

SymbolWindow SymbolWindow::periodic(const std::vector<long>& word, int back_copies,
                                    int fwd_copies) {
    SymbolWindow w;
    for (int i = 0; i < back_copies; ++i)
        w.backward.insert(w.backward.end(), word.begin(), word.end());
    for (int i = 0; i < fwd_copies; ++i)
        w.forward.insert(w.forward.end(), word.begin(), word.end());
    w.check();
    return w;
}

SymbolDistance symbol_distance(const SymbolWindow& s, const SymbolWindow& t) {
    SymbolDistance d;
    const size_t nf = std::min(s.forward.size(), t.forward.size());
    const size_t nb = std::min(s.backward.size(), t.backward.size());
    for (size_t i = 0; i < nf; ++i) {
        d.value += std::fabs(1.0 / s.forward[i] - 1.0 / t.forward[i]) * std::ldexp(1.0, -(int)i);
    }
    for (size_t j = 1; j <= nb; ++j) {
        const long rs = s.backward[s.backward.size() - j];
        const long rt = t.backward[t.backward.size() - j];
        d.value += std::fabs(1.0 / rs - 1.0 / rt) * std::ldexp(1.0, -(int)j);
    }
    d.truncation_bound = std::ldexp(1.0, 1 - (int)nf) + std::ldexp(1.0, -(int)nb);
    return d;
}

Params Transversal::at(double t) const {
    if (c > 1.0) return Params::lenient(t, anchor_v, c);
    const double a0 = anchor_a * std::exp(-anchor_v / c);
    return Params::lenient(a0 * std::exp(t / c), t, c);
}

TangentVector Transversal::tangent(double t) const {
    if (c > 1.0) return TangentVector{1.0, 0.0};
    const Params p = at(t);
    return TangentVector{p.a, c};  // d/dt (a0 e^{t/c}, t) ~ (a/c, 1) ~ (a, c)
}

Transversal transversal_family(double c, double anchor_a, double anchor_v) {
    if (!(c > 0.5 && c < 2.0) || c == 1.0) {
        throw UnsupportedBreak("transversal families are defined for c in (0.5,2)");
    }
    Transversal tr;
    tr.c = c;
    tr.anchor_a = anchor_a;
    tr.anchor_v = anchor_v;
    if (c > 1.0) {
        tr.t_lo = std::max(0.0, c - 1.0 - anchor_v) + 1e-9;
        tr.t_hi = c;
    } else {
        tr.t_lo = c - 1.0 + 1e-9;
        tr.t_hi = -1e-9;
        // keep a <= c along the whole segment
        const double a0 = anchor_a * std::exp(-anchor_v / c);
        if (a0 > c) tr.t_hi = std::min(tr.t_hi, c * std::log(c / a0));
    }
    return tr;
}

namespace {

int cmp_at(double c, const Transversal& tr, double t, const std::vector<Height>& target,
           int depth, long r_cap) {
    (void)c;
    const RotationNumber rn = rotation_number(tr.at(t), depth, r_cap);
    return compare_to_word(rn.cf, target, depth);
}

} // namespace

TransversalSolve solve_on_transversal(double c, const Transversal& tr,
                                      const std::vector<Height>& target, int depth,
                                      long r_cap, double t_tol) {
    for (const Height& h : target)
        if (!h.is_infinite() && h.r < 1) throw Error("target entries must be >= 1");

    double lo = tr.t_lo, hi = tr.t_hi;
    int clo = cmp_at(c, tr, lo, target, depth, r_cap);
    int chi = cmp_at(c, tr, hi, target, depth, r_cap);
    if (clo > 0 || chi < 0) {
        std::ostringstream os;
        os << "transversal rotation-number range excludes the target word (cmp at ends: "
           << clo << ", " << chi << ")";
        throw PrefixUnreachable(os.str());
    }

    bool have_match = false;
    double match_t = 0.0;
    if (clo == 0) { have_match = true; match_t = lo; }
    if (chi == 0) { have_match = true; match_t = hi; }

    int it = 0;
    while (hi - lo > t_tol && it++ < 200) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // double resolution exhausted
        const int cm = cmp_at(c, tr, mid, target, depth, r_cap);
        if (cm < 0) {
            lo = mid;
        } else if (cm > 0) {
            hi = mid;
        } else {
            have_match = true;
            match_t = mid;
            lo = mid;  // walk the matched set upward while shrinking the bracket
        }
    }

    TransversalSolve sol;
    sol.bracket = hi - lo;
    // prefer the midpoint when it matches, per the bisection contract
    for (double t : {0.5 * (lo + hi), hi, lo}) {
        if (cmp_at(c, tr, t, target, depth, r_cap) == 0) {
            sol.t = t;
            sol.point = tr.at(t);
            sol.matched_depth = depth;
            return sol;
        }
    }
    if (have_match) {
        sol.t = match_t;
        sol.point = tr.at(match_t);
        sol.matched_depth = depth;
        return sol;
    }
    throw ToleranceStall("bracket collapsed before the prefix matched (near-parabolic regime)");
}

namespace {

std::vector<Height> to_word(const std::vector<long>& entries) {
    std::vector<Height> w;
    w.reserve(entries.size());
    for (long r : entries) w.push_back(Height(r));
    return w;
}

// target word truncated/extended to `depth` by periodic repetition
std::vector<Height> periodized_word(const std::vector<long>& word, int depth) {
    std::vector<Height> w;
    w.reserve(depth);
    for (int i = 0; i < depth; ++i) w.push_back(Height(word[i % word.size()]));
    return w;
}

TransversalSolve solve_forward_at(double c, const std::vector<Height>& word, int depth,
                                  double transversal_id, long r_cap) {
    Transversal tr;
    if (c > 1.0) {
        tr = transversal_family(c, 0.5 * c, transversal_id);
    } else {
        tr = transversal_family(c, transversal_id, 0.0);
    }
    return solve_on_transversal(c, tr, word, depth, r_cap);
}

} // namespace

int ParamCurve::gaps() const {
    int g = 0;
    for (const auto& v : vertices)
        if (!v.ok) ++g;
    return g;
}

ParamCurve trace_stable_curve(double c, const std::vector<long>& forward_word, int depth,
                              int n_samples, long r_cap) {
    if (!(c > 0.5 && c < 2.0) || c == 1.0) {
        throw UnsupportedBreak("curve tracing is supported for c in (0.5,2)");
    }
    ParamCurve curve;
    curve.c = c;
    curve.word = to_word(forward_word);
    const std::vector<Height> target = periodized_word(forward_word, depth);

    std::vector<double> ids;
    if (c > 1.0) {
        const double m = 0.03 * (c - 1.0);
        for (int i = 0; i < n_samples; ++i)
            ids.push_back(m + (c - 1.0 - 2 * m) * i / std::max(1, n_samples - 1));
    } else {
        for (int i = 0; i < n_samples; ++i)
            ids.push_back(c * (0.06 + 0.88 * i / std::max(1, n_samples - 1)));
    }

    auto solve_id = [&](double id) {
        CurveVertex vx;
        vx.transversal_id = id;
        try {
            const TransversalSolve s = solve_forward_at(c, target, depth, id, r_cap);
            vx.point = s.point;
            vx.t = s.t;
            vx.tolerance = s.bracket;
            vx.ok = true;
        } catch (const Error&) {
            vx.ok = false;
        }
        return vx;
    };

    for (double id : ids) curve.vertices.push_back(solve_id(id));

    // one adaptive pass: refine where the polyline bends sharply
    std::vector<CurveVertex> refined;
    for (size_t i = 0; i < curve.vertices.size(); ++i) {
        refined.push_back(curve.vertices[i]);
        if (i + 1 < curve.vertices.size() && i >= 1) {
            const auto &p0 = curve.vertices[i - 1], &p1 = curve.vertices[i],
                       &p2 = curve.vertices[i + 1];
            if (p0.ok && p1.ok && p2.ok) {
                const double dd = std::fabs((p2.point.a - p1.point.a) - (p1.point.a - p0.point.a)) +
                                  std::fabs((p2.point.v - p1.point.v) - (p1.point.v - p0.point.v));
                if (dd > 0.02) {
                    refined.push_back(
                        solve_id(0.5 * (p1.transversal_id + p2.transversal_id)));
                }
            }
        }
    }
    curve.vertices = std::move(refined);
    std::sort(curve.vertices.begin(), curve.vertices.end(),
              [](const CurveVertex& x, const CurveVertex& y) {
                  return x.transversal_id < y.transversal_id;
              });
    return curve;
}

ParamCurve trace_unstable_curve(double c, const std::vector<long>& backward_word, int depth,
                                int n_samples, long r_cap) {
    std::vector<long> reversed(backward_word.rbegin(), backward_word.rend());
    const double cp = 1.0 / c;
    ParamCurve dual = trace_stable_curve(cp, reversed, depth, n_samples, r_cap);

    ParamCurve curve;
    curve.c = c;
    curve.word = to_word(backward_word);
    curve.is_unstable = true;
    for (const CurveVertex& vx : dual.vertices) {
        CurveVertex im = vx;
        if (vx.ok) {
            try {
                const InvolutionResult ir = involution_I(vx.point);
                im.point = ir.image;
                im.involution_flagged = ir.domain_violation;
            } catch (const DomainViolation&) {
                im.ok = false;
                im.involution_flagged = true;
            }
        }
        curve.vertices.push_back(im);
    }
    return curve;
}

PeriodicPoint find_periodic_point(double c, const std::vector<long>& word, double tol,
                                  long r_cap) {
    if (word.empty() || word.size() % 2 != 0) {
        throw Error("periodic word must have even length 2p");
    }
    if (!(c > 0.5 && c < 2.0) || c == 1.0) {
        throw UnsupportedBreak("periodic points are certified for c in (0.5,2)");
    }
    const int p = static_cast<int>(word.size()) / 2;

    // Seed on the stable curve of the periodized word. The seed's distance to
    // the fixed point is the matched stratum width, so deeper is better, but
    // wide multipliers push deep strata below double resolution; back off
    // until the solve succeeds.
    Params x;
    bool seeded = false;
    const double span = (c > 1.0) ? c - 1.0 : -(c - 1.0);
    for (int depth = std::max<int>(24, 2 * p + 12); depth >= 2 * p + 4; depth -= 4) {
        const std::vector<Height> target = periodized_word(word, depth);
        for (double frac : {0.5, 0.35, 0.65}) {
            const double seed_id = (c > 1.0) ? frac * span : c * (0.3 + 0.5 * frac);
            try {
                x = solve_forward_at(c, target, depth, seed_id, r_cap).point;
                seeded = true;
                break;
            } catch (const Error&) {
                continue;
            }
        }
        if (seeded) break;
    }
    if (!seeded) {
        throw NoConvergence("could not seed on the stable curve of the periodized word");
    }

    auto step_Tp = [&](const Params& q) {
        Params y = q;
        for (int j = 0; j < p; ++j) {
            const StepResult s = renormalize_T(y, r_cap);
            const long w0 = word[2 * j], w1 = word[2 * j + 1];
            if (s.r0.r != w0 || !s.r1 || s.r1->r != w1) {
                std::ostringstream os;
                os << "heights (" << s.r0.r << "," << (s.r1 ? s.r1->r : -1)
                   << ") drifted from word (" << w0 << "," << w1 << ") at step " << j;
                throw CombinatoricsMismatch(os.str());
            }
            y = s.new_params;
        }
        return y;
    };

    // Forward iteration contracts toward the orbit until the unstable drift
    // inherited from the seed takes over; keep the best point of the plateau
    // and leave the rest to Newton.
    Params best = x;
    double best_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        Params y;
        try {
            y = step_Tp(x);
        } catch (const Error&) {
            break;  // left the word's stratum: the plateau is behind us
        }
        const double step = std::hypot(y.a - x.a, y.v - x.v);
        if (step < best_step) {
            best_step = step;
            best = y;
        }
        if (step < 1e-8 || step > 4.0 * best_step) break;
        x = y;
    }
    x = best;

    // Newton polish on T^p(x) - x = 0 with the propagated Jacobian
    for (int it = 0; it < 60; ++it) {
        Params y = x;
        Mat2 J = {{{1, 0}, {0, 1}}};
        for (int j = 0; j < p; ++j) {
            const JetT jt = jet_T(y, r_cap);
            Mat2 next;
            for (int i = 0; i < 2; ++i)
                for (int l = 0; l < 2; ++l)
                    next[i][l] = jt.J[i][0] * J[0][l] + jt.J[i][1] * J[1][l];
            J = next;
            y = jt.image;
        }
        const double fa = y.a - x.a, fv = y.v - x.v;
        if (std::hypot(fa, fv) < 0.25 * tol) break;
        const Mat2 A = {{{J[0][0] - 1.0, J[0][1]}, {J[1][0], J[1][1] - 1.0}}};
        const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
        if (std::fabs(det) < 1e-14) throw NoConvergence("Newton matrix singular");
        const double da = (-fa * A[1][1] + fv * A[0][1]) / det;
        const double dv = (fa * A[1][0] - fv * A[0][0]) / det;
        x = Params::lenient(x.a + da, x.v + dv, c);
        if (std::hypot(da, dv) < 1e-15) break;
    }

    PeriodicPoint out;
    out.point = validate_params(x.a, x.v, c);
    out.period = p;

    // verify the cycle combinatorics and the residual
    Params y = x;
    for (int j = 0; j < p; ++j) {
        const StepResult s = renormalize_T(y, r_cap);
        out.heights_verified.push_back(s.r0.r);
        out.heights_verified.push_back(s.r1->r);
        if (s.r0.r != word[2 * j] || s.r1->r != word[2 * j + 1]) {
            throw CombinatoricsMismatch("cycle heights do not reproduce the word");
        }
        y = s.new_params;
    }
    out.residual = std::hypot(y.a - x.a, y.v - x.v);
    if (!(out.residual <= tol)) {
        std::ostringstream os;
        os << "periodic point residual " << out.residual << " exceeds tolerance " << tol;
        throw NoConvergence(os.str());
    }
    return out;
}

namespace {

struct IntersectionData {
    Params point;
    double residual = 0.0;
    double stable_v = 0.0;      // transversal of the final stable solve
    double unstable_t = 0.0;    // parameter of the final unstable solve
};

// Signed offset between the unstable curve point at parameter t (on the dual
// side) and the stable curve solved on the vertical through its image.
// Assumes c > 1 so stable transversals are verticals.
IntersectionData intersect_curves(double c, const std::vector<Height>& fwd_target,
                                  int depth, const std::vector<long>& backward,
                                  const AttractorOptions& opts) {
    const double cp = 1.0 / c;
    // most recent backward symbols come first after reversal; the dual-side
    // stratum narrows geometrically with depth, so cap it above the bisection
    // resolution
    std::vector<long> reversed(backward.rbegin(), backward.rend());
    if ((int)reversed.size() > opts.back_solve_depth) reversed.resize(opts.back_solve_depth);
    const std::vector<Height> bwd_target = to_word(reversed);

    auto unstable_at = [&](double t) -> Params {
        const TransversalSolve s =
            solve_forward_at(cp, bwd_target, (int)bwd_target.size(), t, opts.r_cap);
        return involution_I(s.point).image;  // lenient: geometry may leave Delta
    };

    auto offset = [&](double t, Params* stable_pt) -> double {
        const Params u = unstable_at(t);
        if (!(u.v > 1e-9 && u.v < c - 1.0 - 1e-9)) {
            throw PrefixUnreachable("unstable image leaves the Delta strip");
        }
        const TransversalSolve s = solve_forward_at(c, fwd_target, depth, u.v, opts.r_cap);
        if (stable_pt) *stable_pt = s.point;
        return u.a - s.point.a;
    };

    // Coarse scan of the dual-side transversal range for a sign change. The
    // exponential transversals are indexed by their a-value at v = 0; curves
    // through the lower part of Delta_{1/c} have indices beyond c', up to
    // c' e^{(1-c')/c'} at the far corner.
    const double tlo = 0.02 * cp, thi = cp * std::exp((1.0 - cp) / cp) * 0.999;
    double prev_t = 0.0, prev_g = 0.0;
    bool have_prev = false, bracketed = false;
    double blo = 0.0, bhi = 0.0, glo = 0.0;
    for (int i = 0; i < opts.n_scan; ++i) {
        const double t = tlo + (thi - tlo) * i / (opts.n_scan - 1);
        double g;
        try {
            g = offset(t, nullptr);
        } catch (const Error&) {
            have_prev = false;
            continue;
        }
        if (have_prev && ((prev_g < 0.0) != (g < 0.0))) {
            blo = prev_t; bhi = t; glo = prev_g;
            bracketed = true;
            break;
        }
        prev_t = t; prev_g = g; have_prev = true;
    }
    if (!bracketed) {
        throw NoIntersection("no sign change of the transversal offset along the scan");
    }

    IntersectionData out;
    out.unstable_t = 0.5 * (blo + bhi);
    Params stable_pt;
    bool have_pt = false;
    double g = glo;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (blo + bhi);
        if (mid <= blo || mid >= bhi) break;
        try {
            g = offset(mid, &stable_pt);
            have_pt = true;
        } catch (const Error&) {
            // treat an unreachable probe as the near side to keep the bracket valid
            bhi = mid;
            continue;
        }
        if ((g < 0.0) == (glo < 0.0)) {
            blo = mid;
        } else {
            bhi = mid;
        }
        out.unstable_t = mid;
        if (std::fabs(g) < opts.refine_tol) break;
    }
    if (!have_pt) {
        throw NoIntersection("offset refinement never produced a stable-curve point");
    }
    out.point = stable_pt;
    out.residual = std::fabs(g);
    out.stable_v = stable_pt.v;
    return out;
}

} // namespace

AttractorPoint attractor_point(double c, const SymbolWindow& window,
                               const AttractorOptions& opts) {
    window.check();
    if (window.forward.empty() || window.backward.empty()) {
        throw Error("attractor window must be nonempty on both sides");
    }
    if (!(c > 1.0 && c < 2.0)) {
        throw UnsupportedBreak("attractor_point intersects vertical stable transversals; "
                               "use the dual parameter for c < 1");
    }

    AttractorPoint out;
    out.window = window;
    const int depth = std::min<int>(opts.depth, (int)window.forward.size());
    const std::vector<Height> fwd = to_word(window.forward);

    try {
        const IntersectionData xs =
            intersect_curves(c, fwd, depth, window.backward, opts);
        out.point = xs.point;
        out.residual = xs.residual;
        out.method = AttractorMethod::CurveIntersection;
    } catch (const NoIntersection&) {
        // fall back to shadowing by the periodized window
        std::vector<long> unit = window.forward;
        unit.insert(unit.end(), window.backward.begin(), window.backward.end());
        if (unit.size() % 2 != 0) unit.insert(unit.end(), unit.begin(), unit.end());
        const PeriodicPoint pp = find_periodic_point(c, unit, 1e-8, opts.r_cap);
        out.point = pp.point;
        out.residual = pp.residual;
        out.method = AttractorMethod::PeriodicShadow;
    }

    // forward verification: the point reproduces the forward word
    const RotationNumber rn = rotation_number(out.point, depth, opts.r_cap);
    if (compare_to_word(rn.cf, fwd, depth) != 0) {
        throw CombinatoricsMismatch("attractor point fails forward-word recomputation");
    }
    // backward verification through the dual inverse chain, as far as defined
    try {
        Params q = out.point;
        const int steps = std::min<int>(opts.back_depth / 2,
                                        (int)window.backward.size() / 2);
        for (int m = 1; m <= steps; ++m) {
            q = dual_inverse_T(q, opts.r_cap);
            const RotationNumber rq = rotation_number(q, 2, opts.r_cap);
            const size_t nb = window.backward.size();
            if (rq.cf.depth() < 2 ||
                rq.cf.entries[0].r != window.backward[nb - 2 * m] ||
                rq.cf.entries[1].r != window.backward[nb - 2 * m + 1]) {
                throw CombinatoricsMismatch("attractor point fails backward-word verification");
            }
        }
    } catch (const DomainViolation&) {
        // involution chain left the verified domain; the forward check stands
    }

    if (opts.estimate_depth_error && (int)window.forward.size() >= depth + 2) {
        AttractorOptions deeper = opts;
        deeper.depth = depth + 2;
        deeper.estimate_depth_error = false;
        try {
            const AttractorPoint refd = attractor_point(c, window, deeper);
            out.depth_error = std::hypot(refd.point.a - out.point.a,
                                         refd.point.v - out.point.v);
        } catch (const Error&) {
            out.depth_error = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

TransversalityAngle transversality_angle(double c, const SymbolWindow& window,
                                         const AttractorOptions& opts) {
    window.check();
    const int depth = std::min<int>(opts.depth, (int)window.forward.size());
    const std::vector<Height> fwd = to_word(window.forward);
    const IntersectionData xs = intersect_curves(c, fwd, depth, window.backward, opts);
    const double v0 = xs.point.v;
    const double tc = xs.unstable_t;
    const double h = std::max(1e-4, 1e-3 * (c - 1.0));

    auto stable_a = [&](double v) {
        return solve_forward_at(c, fwd, depth, v, opts.r_cap).point.a;
    };
    const double sc = stable_a(v0);
    const double sp = stable_a(v0 + h), sm = stable_a(v0 - h);
    const double slope_s = (sp - sm) / (2 * h);
    const double slope_s_one = (sp - sc) / h;

    // unstable tangent at the found dual parameter, through the involution
    const double cp = 1.0 / c;
    std::vector<long> reversed(window.backward.rbegin(), window.backward.rend());
    if ((int)reversed.size() > opts.back_solve_depth) reversed.resize(opts.back_solve_depth);
    const std::vector<Height> bwd = to_word(reversed);
    auto unstable_pt = [&](double t) {
        return involution_I(solve_forward_at(cp, bwd, (int)bwd.size(), t, opts.r_cap).point)
            .image;
    };
    const double ht = 0.004 * cp;
    const Params uc = unstable_pt(tc);
    Params up, um;
    bool two_sided = true;
    try {
        up = unstable_pt(tc + ht);
        um = unstable_pt(tc - ht);
    } catch (const Error&) {
        two_sided = false;  // fall back to a one-sided stencil at the range edge
        up = unstable_pt(tc + (tc > 0.5 * cp ? -2 * ht : 2 * ht));
        um = uc;
    }
    const double ta_sym[2] = {up.a - um.a, up.v - um.v};
    const double ta_one[2] = {up.a - uc.a, up.v - uc.v};

    auto angle = [](double sa, double sv, double ua, double uv) {
        const double dot = sa * ua + sv * uv;
        const double cosang = std::fabs(dot) / (std::hypot(sa, sv) * std::hypot(ua, uv));
        return std::acos(std::min(1.0, cosang));
    };
    TransversalityAngle res;
    res.radians = angle(slope_s, 1.0, ta_sym[0], ta_sym[1]);
    const double alt1 = angle(slope_s_one, 1.0, ta_sym[0], ta_sym[1]);
    const double alt2 = angle(slope_s, 1.0, ta_one[0], ta_one[1]);
    res.error_estimate =
        std::max(std::fabs(res.radians - alt1), std::fabs(res.radians - alt2));
    if (!two_sided) res.error_estimate *= 2.0;
    return res;
}

} // namespace brz
