#pragma once

#include "brz/params.hpp"

namespace brz {

// Closed-form parameter partials of the two family maps. D = ac + z(1+v-c).
double dF_da(const Params& p, double z);   // 1/(1-vz)
double dF_dv(const Params& p, double z);   // z(a+cz)/(1-vz)^2
double dF_dz(const Params& p, double z);   // (c+av)/(1-vz)^2
double dG_da(const Params& p, double z);   // (z-c) z (1+v-c)/D^2
double dG_dv(const Params& p, double z);   // -a (z-c) z / D^2
double dG_dz(const Params& p, double z);   // ac (a+1+v-c)/D^2

// Directional derivative of the first-return branches with respect to the
// parameters, at fixed phase point x:
//   grad_v F(x)       for x in [-1, z*]
//   grad_v (G o F)(x) for x in [z*, 0]
double dir_deriv_F(const Params& p, const TangentVector& vbar, double x);
double dir_deriv_GF(const Params& p, const TangentVector& vbar, double x);

enum class ConeVerdict { Inside, Outside, Undecided };

struct ConeCheck {
    ConeVerdict verdict = ConeVerdict::Undecided;
    double infimum = 0.0;    // certified infimum of both directional derivatives
    double arg_x = 0.0;      // where the infimum is attained
    bool unsupported_regime = false;  // c outside (0.5,2)
};

// Membership of vbar in the cone C_{a,v}: infimum over both branch domains of
// the two directional derivatives, bracketed by grid evaluation plus local
// refinement of interior minima (the derivatives are rational in x, so minima
// are isolated). Verdict is Undecided when |inf| <= margin, never silently
// classified.
ConeCheck in_cone(const Params& p, const TangentVector& vbar, int grid_n = 256,
                  double margin = 1e-10);

// (1,0) for c > 1, (a,c) for c in (0.5,1). Throws UnsupportedBreak outside
// (0.5,2).
TangentVector canonical_cone_vector(const Params& p);

} // namespace brz
