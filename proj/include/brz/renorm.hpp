#pragma once

#include <optional>

#include "brz/cf.hpp"
#include "brz/params.hpp"

namespace brz {

inline constexpr long kDefaultHeightCap = 1000000;

// Smallest r >= 1 with F^r(-1) <= 0 < F^{r+1}(-1), computed by iterating the
// endpoint orbit. A real fixed point of F in (-1, 0] (root of
// v z^2 + (c-1) z + a = 0) means the orbit never crosses zero: Infinity.
// Above the cap with no fixed point detected: HeightCapExceeded.
Height height(const BreakPair& pair, long r_cap = kDefaultHeightCap);
Height height(const Params& p, long r_cap = kDefaultHeightCap);

// Closed-form fixed-point test on which `height` shortcuts to Infinity.
std::optional<double> f_fixed_point_in_unit(const Params& p);

// One renormalization step, or the double step T_c = R_{1/c} o R_c.
struct StepResult {
    Params new_params;
    Height r0;                       // height consumed by the (first) R step
    std::optional<Height> r1;        // second height (T step only)
    double lambda = 0.0;             // F^{r0}(-1), recorded on T steps
    double residual = 0.0;           // projective distance from the model family
    MoebiusMap eta;                  // renormalized pair, eta' on [-1,0]
    MoebiusMap xi;                   // xi' on [0,a']
    MoebiusMap rescale;              // the accumulated rescaling of this step
};

// R_c: builds eta' = D o F^r o G o D^{-1}, xi' = D o F o D^{-1} with
// D(x) = -x/a, extracts a' = eta'(0), b' = -eta'(-1), c' = 1/c,
// v' = (c'-a'-b')/b', and asserts the matrices are projectively within
// `family_tol` of (F_{a',v',1/c}, G_{a',v',1/c}).
StepResult renormalize_R(const Params& p, long r_cap = kDefaultHeightCap,
                         double family_tol = 1e-9);

// T_c = R_{1/c} o R_c, evaluated both as two R steps and independently through
// the composite (F^{r0} o G)^{r1} o F with rescaling x -> -x/lambda; the two
// paths must agree to `path_tol`.
StepResult renormalize_T(const Params& p, long r_cap = kDefaultHeightCap,
                         double path_tol = 1e-11);

// n-th pre-renormalization: the un-rescaled composition pair
//   H_{n+1} = H_n^{r_n} o K_n,  K_{n+1} = H_n,  (H_0, K_0) = (F, G),
// together with the accumulated rescaling gamma_n = alpha_n o ... o alpha_1.
struct PreRenorm {
    MoebiusMap H;
    MoebiusMap K;
    MoebiusMap gamma;
    // conjugating the n-th renormalized matrices by gamma^{-1} must reproduce
    // (H, K) projectively; the worst of the two distances:
    double conjugacy_residual = 0.0;
};

PreRenorm prerenormalize(const Params& p, int n, long r_cap = kDefaultHeightCap);

// Continued-fraction expansion of the rotation number: iterates renormalize_R
// collecting heights until `depth` entries, an Infinity, or a_n < 1e-12 halts
// expansion. The value interval covers every tail consistent with the entries.
struct RotationNumber {
    ContinuedFraction cf;
    double value_lo = 0.0;
    double value_hi = 0.0;
    bool degenerate_halt = false;  // a_n fell below threshold before depth
};

RotationNumber rotation_number(const Params& p, int depth, long r_cap = kDefaultHeightCap);

// Independent dynamical oracle: (lift^N(0) - 0)/N, error O(1/N).
double birkhoff_rotation_number(const Params& p, long iterations);

// Region classification per the displayed inequalities, cross-checked against
// a pure orbit-iteration test (no closed-form shortcut).
struct RegionClass {
    bool in_D = false;
    bool in_Delta = false;
    enum class Status { NonRenormalizable, Renormalizable, Undecided } status = Status::Undecided;
    Height k;          // height when Renormalizable
    bool boundary_band = false;   // within the 1e-3 exclusion band
    bool methods_disagree = false;
};

RegionClass classify(double a, double v, double c, long r_cap = kDefaultHeightCap,
                     double band = 1e-3);

// Parameter involution I_c(a,v) = ((c-1-v)/(av), -v/c) with c' = 1/c.
struct InvolutionResult {
    Params image;            // at break 1/c (lenient: may fall outside D_{1/c})
    double jacobian_det = 0.0;
    bool domain_violation = false;  // image fails D_{1/c} membership
};

InvolutionResult involution_I(const Params& p);

// Require a clean involution image; throws DomainViolation otherwise.
Params involution_I_strict(const Params& p);

// R_c^{-1} = I_{1/c} o R_c o I_{1/c}, applied to a point of D_{1/c} in the
// image of R_c. The result is always a pre-image of `image` under
// renormalize_R; it coincides with the original point exactly when that point
// was duality-consistent (see below). R_c forgets the height it consumed, so
// distinct strata share images and the conjugated inverse selects the branch
// whose dual data stays inside D.
Params dual_inverse_R(const Params& image, long r_cap = kDefaultHeightCap);

// T_c^{-1} = I_{1/c} o T_{1/c} o I_c.
Params dual_inverse_T(const Params& image, long r_cap = kDefaultHeightCap);

// dual_inverse_R(renormalize_R(p)) == p exactly on this set: the involution
// image of p stays inside D_{1/c}.
bool duality_consistent_R(const Params& p);

// dual_inverse_T(renormalize_T(p)) == p on this set: both R-levels of p are
// duality-consistent.
bool duality_consistent_T(const Params& p, long r_cap = kDefaultHeightCap);

} // namespace brz
