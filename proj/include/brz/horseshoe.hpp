#pragma once

#include <optional>
#include <vector>

#include "brz/cf.hpp"
#include "brz/cone.hpp"
#include "brz/renorm.hpp"

namespace brz {

// Finite window of a bi-infinite height sequence, aligned at index 0:
// backward holds (..., r_{-2}, r_{-1}), forward holds (r_0, r_1, ...).
struct SymbolWindow {
    std::vector<long> backward;
    std::vector<long> forward;
    std::optional<long> bound;  // B, when the window is of bounded type

    void check() const;

    // sigma^2: two forward entries move to the end of backward.
    SymbolWindow shift2() const;
    // sigma^{-2}: two backward entries return to the front of forward.
    SymbolWindow unshift2() const;

    // Periodic window made by repeating `word` both ways.
    static SymbolWindow periodic(const std::vector<long>& word, int back_copies,
                                 int fwd_copies);
};

// d(s,t) = sum over shared indices of |1/r_i - 1/t_i| 2^{-|i|}; the reported
// bound covers the ignored tails of both sides.
struct SymbolDistance {
    double value = 0.0;
    double truncation_bound = 0.0;
};
SymbolDistance symbol_distance(const SymbolWindow& s, const SymbolWindow& t);

// One-parameter transversal family through an anchor: the vertical segment
// {v = anchor_v} for c > 1, the curve {a = a0 exp(v/c)} for c in (0.5,1). In
// both cases the tangent lies in the cone at every interior point.
struct Transversal {
    double c = 0.0;
    double anchor_a = 0.0, anchor_v = 0.0;
    double t_lo = 0.0, t_hi = 0.0;  // parameter range inside Delta_c

    // point at parameter t (t = a for c > 1, t = v for c < 1)
    Params at(double t) const;
    TangentVector tangent(double t) const;
};

Transversal transversal_family(double c, double anchor_a, double anchor_v);

// Monotone bisection along the transversal for the parameter whose
// continued-fraction prefix matches `target` to `depth` entries.
struct TransversalSolve {
    Params point;
    double bracket = 0.0;       // final bracket width in the transversal parameter
    double t = 0.0;
    int matched_depth = 0;
};

TransversalSolve solve_on_transversal(double c, const Transversal& tr,
                                      const std::vector<Height>& target, int depth,
                                      long r_cap = kDefaultHeightCap,
                                      double t_tol = 1e-12);

// Polyline approximation of a curve L_{c,(...)} in the (a,v) plane.
struct CurveVertex {
    Params point;
    double t = 0.0;            // transversal parameter at the solve
    double transversal_id = 0; // which transversal (v for c>1, a0 for c<1)
    double tolerance = 0.0;
    bool ok = false;           // false marks a gap (solve failed)
    bool involution_flagged = false;
};

struct ParamCurve {
    double c = 0.0;
    std::vector<Height> word;
    std::vector<CurveVertex> vertices;
    bool is_unstable = false;

    int gaps() const;
};

ParamCurve trace_stable_curve(double c, const std::vector<long>& forward_word, int depth,
                              int n_samples, long r_cap = kDefaultHeightCap);

// Stable curve of 1/c for the reversed word, mapped through the involution
// (Prop: L_{1/c,(...,r_-2,r_-1)} = I_c(L_{c,(r_-1,r_-2,...)})).
ParamCurve trace_unstable_curve(double c, const std::vector<long>& backward_word,
                                int depth, int n_samples,
                                long r_cap = kDefaultHeightCap);

// Periodic point of T_c for a word of even length 2p: seeded on the stable
// curve of the periodized word, iterated to Cauchy tolerance, then polished by
// Newton on the fixed-point equation using the propagated Jacobian.
struct PeriodicPoint {
    Params point;
    int period = 0;             // p, in T_c steps
    double residual = 0.0;      // |T_c^p(point) - point|
    std::vector<long> heights_verified;  // the 2p heights along the cycle
};

PeriodicPoint find_periodic_point(double c, const std::vector<long>& word,
                                  double tol = 1e-10, long r_cap = kDefaultHeightCap);

enum class AttractorMethod { CurveIntersection, PeriodicShadow };

struct AttractorPoint {
    Params point;
    SymbolWindow window;
    double residual = 0.0;
    AttractorMethod method = AttractorMethod::CurveIntersection;
    // self-estimate of the depth-truncation error (distance between the
    // points solved at depth d and d+2)
    double depth_error = 0.0;
};

struct AttractorOptions {
    int depth = 10;             // forward prefix depth to match
    int back_depth = 4;         // backward entries verified through T^{-1}
    int back_solve_depth = 12;  // backward symbols used to pin the unstable curve
    int n_scan = 25;            // coarse scan points for the intersection bracket
    double refine_tol = 1e-9;
    long r_cap = kDefaultHeightCap;
    bool estimate_depth_error = false;
};

AttractorPoint attractor_point(double c, const SymbolWindow& window,
                               const AttractorOptions& opts = {});

// Angle between the local tangents of the stable and unstable polylines at
// the intersection, with a discretization error estimate from one-sided
// differences.
struct TransversalityAngle {
    double radians = 0.0;
    double error_estimate = 0.0;
};

TransversalityAngle transversality_angle(double c, const SymbolWindow& window,
                                         const AttractorOptions& opts = {});

} // namespace brz
