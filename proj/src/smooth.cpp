#include "brz/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace brz {

GeneralBreakMap::GeneralBreakMap(const Params& base, double epsilon)
    : base_(base), eps_(epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw Error("conjugacy amplitude must lie in [0,1)");
    }
    pair_ = make_pair(base);
    base_lift_ = std::make_unique<CircleLift>(pair_);
}

double GeneralBreakMap::h(double x) const {
    return x + eps_ / (2.0 * std::numbers::pi) * std::sin(2.0 * std::numbers::pi * x);
}

double GeneralBreakMap::h_prime(double x) const {
    return 1.0 + eps_ * std::cos(2.0 * std::numbers::pi * x);
}

double GeneralBreakMap::h_inverse(double y) const {
    // h(x) - x is 1-periodic and bounded by eps/2pi, so the root is bracketed;
    // Newton with the bracket as a safeguard
    double lo = y - eps_ / (2.0 * std::numbers::pi);
    double hi = y + eps_ / (2.0 * std::numbers::pi);
    double x = y;
    for (int it = 0; it < 200; ++it) {
        const double fx = h(x) - y;
        if (std::fabs(fx) < 1e-15 * std::max(1.0, std::fabs(y))) return x;
        if (fx > 0.0)
            hi = x;
        else
            lo = x;
        double xn = x - fx / h_prime(x);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x) return x;
        x = xn;
    }
    return x;
}

double GeneralBreakMap::lift(double x) const {
    return h(base_lift_->eval(h_inverse(x)));
}

double GeneralBreakMap::lift_iterate(double x, long n) const {
    double y = x;
    for (long i = 0; i < n; ++i) y = lift(y);
    return y;
}

double GeneralBreakMap::birkhoff(long iterations) const {
    // h commutes with x -> x+1, so the winding bookkeeping survives conjugation
    double y = 0.0;
    long winding = 0;
    for (long i = 0; i < iterations; ++i) {
        y = lift(y);
        while (y > 0.0) { y -= 1.0; ++winding; }
        while (y <= -1.0) { y += 1.0; --winding; }
    }
    return (static_cast<double>(winding) + y) / static_cast<double>(iterations);
}

double GeneralBreakMap::eta0(double x) const {
    MoebiusMap F = pair_.F;
    F.set_domain(std::nullopt);
    return h(F.eval(h_inverse(x)));
}

double GeneralBreakMap::xi0(double x) const {
    MoebiusMap G = pair_.G;
    G.set_domain(std::nullopt);
    return h(G.eval(h_inverse(x)));
}

double GeneralBreakMap::break_ratio_fd(double step) const {
    const double z = break_point();
    // one-sided slopes of the circle map's first-return branches at the junction
    const double left = (lift(z) - lift(z - step)) / step;
    const double right = (lift(z + step) - lift(z)) / step;
    return left / right;
}

namespace {

struct LevelEvaluator {
    // recursive pointwise evaluation; level 0 wraps the conjugated pair
    const GeneralBreakMap* f = nullptr;
    std::vector<double> a;       // a_k per level (memoized scale factors)
    std::vector<long> heights;   // r_k per level
    mutable long evals = 0;
    long budget = 10000000;

    double eta(int level, double x) const {
        if (level == 0) {
            if (++evals > budget) throw IterateBudgetExceeded("evaluation budget exhausted");
            return f->eta0(x);
        }
        // eta_k = alpha o eta_{k-1}^{r} o xi_{k-1} o alpha^{-1}, alpha = -x/a_{k-1}
        const double ak = a[level - 1];
        double y = xi(level - 1, -ak * x);
        const long r = heights[level - 1];
        for (long i = 0; i < r; ++i) y = eta(level - 1, y);
        return -y / ak;
    }

    double xi(int level, double x) const {
        if (level == 0) {
            if (++evals > budget) throw IterateBudgetExceeded("evaluation budget exhausted");
            return f->xi0(x);
        }
        const double ak = a[level - 1];
        return -eta(level - 1, -ak * x) / ak;
    }
};

} // namespace

std::vector<GeneralRenorm> general_renormalize(const GeneralBreakMap& f, int n,
                                               const GeneralPipelineOptions& opts) {
    LevelEvaluator ev;
    ev.f = &f;
    ev.budget = opts.eval_budget;

    std::vector<GeneralRenorm> out;
    for (int level = 0; level <= n; ++level) {
        GeneralRenorm rec;
        rec.level = level;
        rec.a = ev.eta(level, 0.0);
        rec.b = -ev.eta(level, -1.0);
        if (!(rec.a > opts.a_min)) {
            std::ostringstream os;
            os << "a_" << level << " = " << rec.a << " below certification threshold";
            throw DegenerateExtraction(os.str());
        }

        rec.grid_eta_x.resize(opts.grid_n + 1);
        rec.grid_eta_y.resize(opts.grid_n + 1);
        for (int i = 0; i <= opts.grid_n; ++i) {
            const double x = -1.0 + static_cast<double>(i) / opts.grid_n;
            rec.grid_eta_x[i] = x;
            rec.grid_eta_y[i] = ev.eta(level, x);
        }
        rec.grid_xi_x.resize(opts.grid_n + 1);
        rec.grid_xi_y.resize(opts.grid_n + 1);
        for (int i = 0; i <= opts.grid_n; ++i) {
            const double x = rec.a * static_cast<double>(i) / opts.grid_n;
            rec.grid_xi_x[i] = x;
            rec.grid_xi_y[i] = ev.xi(level, x);
        }

        // height of this level from the sampled orbit of xi(0) = -1 under eta
        if (level < n) {
            long r = 0;
            double z = -1.0;
            bool crossed = false;
            for (long k = 1; k <= opts.r_cap; ++k) {
                const double zn = ev.eta(level, z);
                if (zn > 0.0) {
                    r = k - 1;
                    crossed = true;
                    break;
                }
                if (zn - z < 1e-14) break;  // stalling toward a fixed point
                z = zn;
            }
            if (!crossed || r < 1) {
                rec.height_consumed = Height::infinity();
                rec.evals_used = ev.evals;
                rec.a_chain = ev.a;
                rec.r_chain = ev.heights;
                out.push_back(std::move(rec));
                break;
            }
            rec.height_consumed = Height(r);
            rec.a_chain = ev.a;
            rec.r_chain = ev.heights;
            ev.a.push_back(rec.a);
            ev.heights.push_back(r);
        } else {
            rec.a_chain = ev.a;
            rec.r_chain = ev.heights;
        }
        rec.evals_used = ev.evals;
        out.push_back(std::move(rec));
    }
    return out;
}

double eval_eta(const GeneralBreakMap& f, const GeneralRenorm& rec, double x) {
    LevelEvaluator ev;
    ev.f = &f;
    ev.a.assign(rec.a_chain.begin(), rec.a_chain.begin() + rec.level);
    ev.heights.assign(rec.r_chain.begin(), rec.r_chain.begin() + rec.level);
    return ev.eta(rec.level, x);
}

double eval_xi(const GeneralBreakMap& f, const GeneralRenorm& rec, double x) {
    LevelEvaluator ev;
    ev.f = &f;
    ev.a.assign(rec.a_chain.begin(), rec.a_chain.begin() + rec.level);
    ev.heights.assign(rec.r_chain.begin(), rec.r_chain.begin() + rec.level);
    return ev.xi(rec.level, x);
}

ModelFit fit_model(const GeneralRenorm& level, double c_n) {
    ModelFit fit;
    fit.a = level.a;
    fit.b = level.b;
    fit.c = c_n;
    if (!(level.b > 1e-12)) {
        throw DegenerateExtraction("b_n too small for the v_n extraction");
    }
    fit.v = (c_n - level.a - level.b) / level.b;

    const MoebiusMap F(c_n, fit.a, -fit.v, 1.0);
    const MoebiusMap G(fit.a, -fit.a * c_n, 1.0 + fit.v - c_n, fit.a * c_n);

    double sup_eta = 0.0, sup_xi = 0.0;
    for (size_t i = 0; i < level.grid_eta_x.size(); ++i) {
        sup_eta = std::max(sup_eta,
                           std::fabs(level.grid_eta_y[i] - F.eval(level.grid_eta_x[i])));
    }
    for (size_t i = 0; i < level.grid_xi_x.size(); ++i) {
        sup_xi = std::max(sup_xi,
                          std::fabs(level.grid_xi_y[i] - G.eval(level.grid_xi_x[i])));
    }
    fit.dist_c0_xi_raw = sup_xi;
    fit.dist_c0 = sup_eta + fit.a * sup_xi;

    // derivative discrepancies share the stencil between sample and model, so
    // the finite-difference truncation cancels to first order
    auto fd_disc = [](const std::vector<double>& x, const std::vector<double>& y,
                      const MoebiusMap& m) {
        double d1 = 0.0, d2 = 0.0;
        for (size_t i = 1; i + 1 < x.size(); ++i) {
            const double hgrid = x[i + 1] - x[i];
            if (hgrid <= 0) continue;
            const double fd1 = (y[i + 1] - y[i - 1]) / (2 * hgrid);
            const double md1 = (m.eval(x[i + 1]) - m.eval(x[i - 1])) / (2 * hgrid);
            const double fd2 = (y[i + 1] - 2 * y[i] + y[i - 1]) / (hgrid * hgrid);
            const double md2 =
                (m.eval(x[i + 1]) - 2 * m.eval(x[i]) + m.eval(x[i - 1])) / (hgrid * hgrid);
            d1 = std::max(d1, std::fabs(fd1 - md1));
            d2 = std::max(d2, std::fabs(fd2 - md2));
        }
        return d1 + d2;
    };
    fit.dist_c2 = fit.dist_c0 + fd_disc(level.grid_eta_x, level.grid_eta_y, F) +
                  fit.a * fd_disc(level.grid_xi_x, level.grid_xi_y, G);
    return fit;
}

ConvergenceReport convergence_report(const GeneralBreakMap& f, int levels,
                                     const GeneralPipelineOptions& opts) {
    const std::vector<GeneralRenorm> recs = general_renormalize(f, levels, opts);
    ConvergenceReport rep;
    const double c = f.base().c;
    for (const GeneralRenorm& rec : recs) {
        if (rec.level == 0) continue;  // level 0 is the input pair itself
        const double cn = (rec.level % 2 == 0) ? c : 1.0 / c;
        rep.levels.push_back(fit_model(rec, cn));
        rep.c_n.push_back(cn);
    }

    rep.monotone_c0 = true;
    for (size_t i = 1; i < rep.levels.size(); ++i) {
        if (rep.levels[i].dist_c0 > rep.levels[i - 1].dist_c0) rep.monotone_c0 = false;
    }

    // log-linear fit dist_c0(n) ~ C lambda^n
    size_t n = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < rep.levels.size(); ++i) {
        const double d = rep.levels[i].dist_c0;
        if (d <= 0) continue;
        const double x = static_cast<double>(i + 1), y = std::log(d);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n >= 2) {
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.lambda_hat = std::exp(slope);
        double rss = 0.0;
        const double icept = (sy - slope * sx) / n;
        for (size_t i = 0; i < rep.levels.size(); ++i) {
            const double d = rep.levels[i].dist_c0;
            if (d <= 0) continue;
            const double r = std::log(d) - (icept + slope * (i + 1));
            rss += r * r;
        }
        rep.fit_residual = std::sqrt(rss / n);
    }
    return rep;
}

ContractionReport same_rho_contraction(const Params& p1, const Params& p2, int n,
                                       long r_cap) {
    ContractionReport rep;
    Params x = p1, y = p2;
    rep.distances.push_back(std::hypot(x.a - y.a, x.v - y.v));
    for (int j = 1; j <= n; ++j) {
        x = renormalize_T(x, r_cap).new_params;
        y = renormalize_T(y, r_cap).new_params;
        rep.distances.push_back(std::hypot(x.a - y.a, x.v - y.v));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int j = 0; j <= n; ++j) {
        if (rep.distances[j] <= 0) continue;
        sx += j; sy += std::log(rep.distances[j]);
        sxx += double(j) * j; sxy += j * std::log(rep.distances[j]);
        ++m;
    }
    if (m >= 2) rep.rate = std::exp((m * sxy - sx * sy) / (m * sxx - sx * sx));
    return rep;
}

} // namespace brz
