#include "brz/params.hpp"

#include <sstream>

namespace brz {

static void fill_derived(Params& p) {
    p.b = (p.c - p.a) / (1.0 + p.v);
    p.z_star = -p.a / p.c;
    p.certified_regime = (p.c > 0.5 && p.c < 2.0 && p.c != 1.0);
}

Params Params::lenient(double a, double v, double c) {
    Params p;
    p.a = a;
    p.v = v;
    p.c = c;
    p.in_domain = in_D(a, v, c) && c != 1.0 && c > 0.0;
    fill_derived(p);
    return p;
}

bool in_D(double a, double v, double c) {
    return a > 0.0 && a <= c && a + v > c - 1.0;
}

bool in_Delta(double a, double v, double c, double tol) {
    if (!(a > 0.0 && a <= c + tol && a + v > c - 1.0 - tol)) return false;
    if (c > 1.0) return v >= -tol && v <= c - 1.0 + tol;
    return v >= c - 1.0 - tol && v <= tol;
}

Params validate_params(double a, double v, double c) {
    if (c == 1.0) throw UnsupportedBreak("c = 1 is not a break (c^2 = 1)");
    std::vector<std::string> bad;
    if (!(c > 0.0)) bad.push_back("c > 0");
    if (!(a > 0.0)) bad.push_back("a > 0");
    if (c > 0.0 && !(a <= c)) bad.push_back("a <= c");
    if (!(a + v > c - 1.0)) bad.push_back("a + v > c - 1");
    const double b = (c - a) / (1.0 + v);
    if (!(b >= 0.0 && b < 1.0)) bad.push_back("b = (c-a)/(1+v) in [0,1)");
    if (!bad.empty()) {
        std::ostringstream os;
        os << "parameter constraints violated at (a=" << a << ", v=" << v << ", c=" << c << "):";
        for (const auto& s : bad) os << " [" << s << "]";
        throw ConstraintViolation(os.str());
    }
    Params p;
    p.a = a;
    p.v = v;
    p.c = c;
    p.in_domain = true;
    fill_derived(p);
    return p;
}

BreakPair make_pair(const Params& p) {
    BreakPair bp;
    bp.params = p;
    bp.b = p.b;
    bp.z_star = p.z_star;
    bp.F = MoebiusMap(p.c, p.a, -p.v, 1.0, Interval{-1.0, 0.0});
    bp.G = MoebiusMap(p.a, -p.a * p.c, 1.0 + p.v - p.c, p.a * p.c, Interval{0.0, p.a});
    return bp;
}

FirstReturn first_return(const BreakPair& pair) {
    FirstReturn fr;
    fr.z_star = pair.z_star;
    fr.branch_F = pair.F;
    fr.branch_F.set_domain(Interval{-1.0, pair.z_star});
    MoebiusMap g = pair.G;
    g.set_domain(std::nullopt);  // composed map carries its own domain below
    MoebiusMap f = pair.F;
    f.set_domain(Interval{pair.z_star, 0.0});
    fr.branch_GF = moebius_compose(g, f);
    return fr;
}

CircleLift::CircleLift(const BreakPair& pair) : z_star_(pair.z_star) {
    FirstReturn fr = first_return(pair);
    F_ = fr.branch_F;
    GF_ = fr.branch_GF;
}

double CircleLift::eval(double x) const {
    // reduce to the fundamental domain (-1, 0]
    const double n = std::ceil(x);
    const double y = x - n;
    double val;
    if (y <= z_star_)
        val = F_.eval(y);
    else
        val = GF_.eval(y) + 1.0;
    return val + n;
}

double CircleLift::iterate(double x, long n) const {
    double y = x;
    for (long i = 0; i < n; ++i) y = eval(y);
    return y;
}

double CircleLift::birkhoff(long iterations) const {
    double y = 0.0;  // in (-1, 0]
    long winding = 0;
    for (long i = 0; i < iterations; ++i) {
        if (y <= z_star_) {
            y = F_.eval(y);
        } else {
            y = GF_.eval(y);
            ++winding;
        }
    }
    return (static_cast<double>(winding) + y) / static_cast<double>(iterations);
}

double check_commutation(const BreakPair& pair, int grid_n) {
    const double c2 = pair.params.c * pair.params.c;
    MoebiusMap F = pair.F, G = pair.G;
    F.set_domain(std::nullopt);
    G.set_domain(std::nullopt);
    double worst = 0.0;
    for (int i = 0; i <= grid_n; ++i) {
        const double z = pair.z_star + (0.0 - pair.z_star) * i / grid_n;
        // guard every denominator; skip points within rounding of a pole
        const double fz = F.denominator(z);
        if (std::fabs(fz) < 1e-9) continue;
        const double Fz = F.eval(z);
        if (std::fabs(G.denominator(Fz)) < 1e-9) continue;
        const double gz = G.denominator(c2 * z);
        if (std::fabs(gz) < 1e-9) continue;
        const double Gcz = G.eval(c2 * z);
        if (std::fabs(F.denominator(Gcz)) < 1e-9) continue;
        const double lhs = G.eval(Fz);
        const double rhs = F.eval(Gcz);
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return worst;
}

} // namespace brz
