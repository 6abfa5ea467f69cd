#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "brz/mobius.hpp"

namespace brz {

// Location of a Moebius pair in parameter space. Invariants when in_domain:
//   0 < a <= c            (constraint I)
//   a + v > c - 1         (membership in D_c)
//   b = (c-a)/(1+v) in [0,1)
// c = 1 is rejected everywhere. certified_regime records c in (0.5,2); outside
// of it computations are permitted but every certificate is tagged unsupported.
struct Params {
    double a = 0.0;
    double v = 0.0;
    double c = 0.0;
    double b = 0.0;       // (c-a)/(1+v)
    double z_star = 0.0;  // -a/c = F^{-1}(0)
    bool in_domain = false;
    bool certified_regime = false;

    // Lenient constructor for boundary/degenerate points produced mid-chain
    // (e.g. the a' = 0 image of the b = 0 stratum). Derived fields are still
    // filled in; in_domain records whether the strict constraints hold.
    static Params lenient(double a, double v, double c);
};

// Strict public gate: returns a validated Params or throws listing every
// violated constraint. c = 1 throws UnsupportedBreak.
Params validate_params(double a, double v, double c);

// Region D_c = {0 < a <= c, a + v > c - 1}.
bool in_D(double a, double v, double c);

// Compact invariant region: 0 <= v <= c-1 for c > 1, c-1 <= v <= 0 for c < 1
// (intersected with D_c).
bool in_Delta(double a, double v, double c, double tol = 0.0);

// Tangent vector (alpha, nu) at a point of the (a,v) plane.
struct TangentVector {
    double alpha = 0.0;
    double nu = 0.0;

    double norm() const { return std::hypot(alpha, nu); }
};

// The Moebius pair zeta_{a,v,c} together with its derived data.
//   F: [-1,0] -> [-b,a],  matrix ((c, a), (-v, 1))
//   G: [0,a]  -> [-1,-b], matrix ((a, -ac), (1+v-c, ac))
struct BreakPair {
    Params params;
    MoebiusMap F;
    MoebiusMap G;
    double b = 0.0;
    double z_star = 0.0;
};

// Build the pair from validated parameters.
BreakPair make_pair(const Params& p);

// First-return pair of the interval [-1,0]:
//   branch_F = F restricted to [-1, z*],  branch_GF = G o F on [z*, 0].
struct FirstReturn {
    MoebiusMap branch_F;
    MoebiusMap branch_GF;
    double z_star = 0.0;
};

FirstReturn first_return(const BreakPair& pair);

// Lift of the circle map f_{a,v,c} built from tau = (F on [-1,z*], GF on [z*,0])
// under the identification of [-1,0] with the circle. Strictly increasing and
// commutes with x -> x+1.
class CircleLift {
public:
    explicit CircleLift(const BreakPair& pair);

    double eval(double x) const;

    // N-fold iterate of the lift.
    double iterate(double x, long n) const;

    // (lift^N(0) - 0)/N computed with the winding number tracked separately,
    // so no precision is lost to the growth of the iterates.
    double birkhoff(long iterations) const;

private:
    MoebiusMap F_;
    MoebiusMap GF_;
    double z_star_;
};

inline CircleLift circle_map(const BreakPair& pair) { return CircleLift(pair); }

inline double circle_lift_eval(const CircleLift& lift, double x, long iterations) {
    return lift.iterate(x, iterations);
}

// sup over a grid of |G(F(z)) - F(G(c^2 z))| for z in [z*, 0]; points where a
// denominator degenerates are skipped.
double check_commutation(const BreakPair& pair, int grid_n);

} // namespace brz
