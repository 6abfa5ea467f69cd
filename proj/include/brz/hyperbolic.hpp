#pragma once

#include <array>
#include <vector>

#include "brz/cone.hpp"
#include "brz/jet.hpp"
#include "brz/renorm.hpp"

namespace brz {

using Mat2 = std::array<std::array<double, 2>, 2>;

// Exact parameter-space Jacobian of T_c at p, propagated on matrix-entry jets
// through the composite (F^{r0} o G)^{r1} o F, its lambda-rescaling, and the
// (a',b') -> v' extraction.
struct JetT {
    Params image;
    Mat2 J{};
    Height r0, r1;
    double lambda = 0.0;
};

JetT jet_T(const Params& p, long r_cap = kDefaultHeightCap);

// Same, validated against central finite differences of the two-step map
// (step 1e-6); throws IllConditioned when the cross-check exceeds `tol`.
JetT jet_T_checked(const Params& p, double tol = 1e-6, long r_cap = kDefaultHeightCap);

// Finite-difference Jacobian of T_c (test oracle; steps that cross a stratum
// boundary make it meaningless, so height stability is reported).
struct FdJacobian {
    Mat2 J{};
    bool heights_stable = false;
};
FdJacobian fd_jacobian_T(const Params& p, double step = 1e-6,
                         long r_cap = kDefaultHeightCap);

// Eigen-splitting of a parameter-space Jacobian.
struct JacobianRecord {
    Mat2 J{};
    double lambda_u = 0.0, lambda_s = 0.0;
    TangentVector e_u, e_s;   // unit vectors
    double margin = 0.0;      // min(|lambda_u| - 1, 1 - |lambda_s|)
    bool unsupported_regime = false;
};

// Closed-form 2x2 eigendecomposition; certifies hyperbolicity when the real
// eigenvalues straddle modulus one with margin >= `margin`; throws
// NotHyperbolic otherwise (complex pair, or straddling failure).
JacobianRecord eigensplit(const Mat2& J, double margin = 1e-3);

// eigensplit plus the cone test on e_u at the base point; the record is
// tagged unsupported when c lies outside (0.5,2).
JacobianRecord hyperbolic_certificate(const Params& p, const Mat2& J,
                                      double margin = 1e-3);

// Splitting fields along the orbit of a bi-infinite height window, with the
// per-step expansion/contraction factors and the smallest k0 for which every
// length-k0 subproduct expands uniformly.
struct OrbitSplitting {
    std::vector<Params> points;          // iota(sigma^{2j} w), j = 0..k-1
    std::vector<TangentVector> Eu;
    std::vector<TangentVector> Es;
    std::vector<double> expansion;       // |J_j e_u_j|
    std::vector<double> contraction;     // |J_j e_s_j|
    int k0 = -1;                         // -1 when no uniform window was found
    double lambda = 0.0;                 // min length-k0 subproduct factor
    double min_angle = 0.0;              // worst E_u/E_s alignment angle
};

struct SymbolWindow;  // defined in horseshoe.hpp

OrbitSplitting orbit_splitting(double c, const SymbolWindow& window, int segment_length);

// Directional derivatives grad_v A_{j,c}(p) for j = 0..k along the T_c orbit,
// with a least-squares geometric fit of their growth.
struct ExpansionReport {
    std::vector<double> grad_a;   // j = 0..k
    double growth_rate = 0.0;     // fitted 1 + delta
    double delta_hat = 0.0;
    bool all_positive = false;
};

ExpansionReport expansion_report(const Params& p, const TangentVector& vbar, int k,
                                 long r_cap = kDefaultHeightCap);

// Records lambda from renormalize_T over samples of Delta_c n O^2_c.
struct AprioriScan {
    double min_lambda = 0.0;
    double delta = 0.0;         // -1/min_lambda - 1
    int accepted = 0;
    int rejected = 0;
    std::vector<double> lambdas;
};

AprioriScan apriori_scan(double c, int n_samples, unsigned long seed = 20240531,
                         long r_cap = 100000);

} // namespace brz
