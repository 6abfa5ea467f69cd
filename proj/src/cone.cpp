#include "brz/cone.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace brz {

double dF_da(const Params& p, double z) {
    return 1.0 / (1.0 - p.v * z);
}

double dF_dv(const Params& p, double z) {
    const double den = 1.0 - p.v * z;
    return z * (p.a + p.c * z) / (den * den);
}

double dF_dz(const Params& p, double z) {
    const double den = 1.0 - p.v * z;
    return (p.c + p.a * p.v) / (den * den);
}

static double Gden(const Params& p, double z) {
    return p.a * p.c + z * (1.0 + p.v - p.c);
}

double dG_da(const Params& p, double z) {
    const double D = Gden(p, z);
    return (z - p.c) * z * (1.0 + p.v - p.c) / (D * D);
}

double dG_dv(const Params& p, double z) {
    const double D = Gden(p, z);
    return -p.a * (z - p.c) * z / (D * D);
}

double dG_dz(const Params& p, double z) {
    const double D = Gden(p, z);
    return p.a * p.c * (p.a + 1.0 + p.v - p.c) / (D * D);
}

double dir_deriv_F(const Params& p, const TangentVector& vbar, double x) {
    return vbar.alpha * dF_da(p, x) + vbar.nu * dF_dv(p, x);
}

double dir_deriv_GF(const Params& p, const TangentVector& vbar, double x) {
    const double Fx = (p.a + p.c * x) / (1.0 - p.v * x);
    const double inner = dir_deriv_F(p, vbar, x);
    return dG_dz(p, Fx) * inner + vbar.alpha * dG_da(p, Fx) + vbar.nu * dG_dv(p, Fx);
}

namespace {

// Golden-section refinement of a local minimum bracketed by three grid points.
double refine_min(const std::function<double(double)>& f, double lo, double hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

// Infimum of f over [lo,hi]: grid scan, then refine around every interior
// local minimum.
double infimum_on(const std::function<double(double)>& f, double lo, double hi, int n) {
    if (hi <= lo) return f(lo);
    std::vector<double> vals(n + 1);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        vals[i] = f(x);
        best = std::min(best, vals[i]);
    }
    const double h = (hi - lo) / n;
    for (int i = 1; i < n; ++i) {
        if (vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1]) {
            best = std::min(best, refine_min(f, lo + (i - 1) * h, lo + (i + 1) * h));
        }
    }
    return best;
}

} // namespace

ConeCheck in_cone(const Params& p, const TangentVector& vbar, int grid_n, double margin) {
    ConeCheck res;
    res.unsupported_regime = !p.certified_regime;

    const auto fF = [&](double x) { return dir_deriv_F(p, vbar, x); };
    const auto fGF = [&](double x) { return dir_deriv_GF(p, vbar, x); };

    const double infF = infimum_on(fF, -1.0, p.z_star, grid_n);
    const double infGF = infimum_on(fGF, p.z_star, 0.0, grid_n);

    if (infF <= infGF) {
        res.infimum = infF;
    } else {
        res.infimum = infGF;
    }
    // recover an approximate argmin for reporting
    {
        const std::function<double(double)> f =
            (infF <= infGF) ? std::function<double(double)>(fF)
                            : std::function<double(double)>(fGF);
        const double lo = (infF <= infGF) ? -1.0 : p.z_star;
        const double hi = (infF <= infGF) ? p.z_star : 0.0;
        double bx = lo, bv = f(lo);
        for (int i = 0; i <= grid_n; ++i) {
            const double x = lo + (hi - lo) * i / grid_n;
            const double v = f(x);
            if (v < bv) { bv = v; bx = x; }
        }
        res.arg_x = bx;
    }

    if (res.infimum > margin)
        res.verdict = ConeVerdict::Inside;
    else if (res.infimum < -margin)
        res.verdict = ConeVerdict::Outside;
    else
        res.verdict = ConeVerdict::Undecided;
    return res;
}

TangentVector canonical_cone_vector(const Params& p) {
    if (!(p.c > 0.5 && p.c < 2.0) || p.c == 1.0) {
        throw UnsupportedBreak("canonical cone direction is only known for c in (0.5,2)");
    }
    if (p.c > 1.0) return TangentVector{1.0, 0.0};
    return TangentVector{p.a, p.c};
}

} // namespace brz
