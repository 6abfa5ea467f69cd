#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "brz/horseshoe.hpp"
#include "brz/renorm.hpp"

namespace brz {

// Genuinely smooth (non-Moebius) break map built by conjugating the model
// circle map with h(x) = x + (eps/2pi) sin(2pi x). h fixes 0 and commutes
// with x -> x+1, so the conjugated lift is again a circle-map lift with the
// same rotation number and the same break size.
class GeneralBreakMap {
public:
    GeneralBreakMap(const Params& base, double epsilon);

    const Params& base() const { return base_; }
    double epsilon() const { return eps_; }

    double h(double x) const;
    double h_prime(double x) const;
    double h_inverse(double y) const;   // bisection + Newton to 1e-14

    // lift of f = h o f_base o h^{-1}
    double lift(double x) const;
    double lift_iterate(double x, long n) const;
    double birkhoff(long iterations) const;

    // the conjugated pair on [-1, h(a)]:
    //   eta0 = h o F o h^{-1} on [-1,0],  xi0 = h o G o h^{-1} on [0, h(a)]
    double eta0(double x) const;
    double xi0(double x) const;

    // branch junction of the first-return map, where the derivative breaks
    double break_point() const { return h(base_.z_star); }

    // one-sided derivative ratio at the break point, by finite differences
    double break_ratio_fd(double step = 1e-7) const;

private:
    Params base_;
    double eps_;
    BreakPair pair_;
    std::unique_ptr<CircleLift> base_lift_;
};

// One level of the sampled renormalization pipeline.
struct GeneralRenorm {
    int level = 0;
    double a = 0.0;        // eta_n(0)
    double b = 0.0;        // -eta_n(-1)
    Height height_consumed;        // r_n of this level (consumed to build the next)
    std::vector<double> grid_eta_x, grid_eta_y;   // eta_n on [-1,0]
    std::vector<double> grid_xi_x, grid_xi_y;     // xi_n on [0,a_n]
    long evals_used = 0;   // cumulative level-0 evaluation count
    // scale factors and heights of the levels below, for re-evaluation
    std::vector<double> a_chain;
    std::vector<long> r_chain;
};

// Pointwise re-evaluation of the level pair recorded in `rec` (recursion all
// the way down to the conjugated base pair).
double eval_eta(const GeneralBreakMap& f, const GeneralRenorm& rec, double x);
double eval_xi(const GeneralBreakMap& f, const GeneralRenorm& rec, double x);

struct GeneralPipelineOptions {
    int grid_n = 256;
    long r_cap = 100000;
    long eval_budget = 10000000;  // cost grows like the product of heights
    double a_min = 1e-9;          // depth certification stops below this
};

// Levels 0..n of the recursion eta_{k+1} = alpha o eta_k^{r_k} o xi_k o alpha^{-1},
// xi_{k+1} = alpha o eta_k o alpha^{-1}, alpha(x) = -x/a_k, evaluated pointwise.
std::vector<GeneralRenorm> general_renormalize(const GeneralBreakMap& f, int n,
                                               const GeneralPipelineOptions& opts = {});

// Fit of one sampled level against the model family at break c_n.
struct ModelFit {
    double a = 0.0, b = 0.0, v = 0.0, c = 0.0;
    double dist_c0 = 0.0;        // sup|eta - F| + a_n sup|xi - G| (theorem scaling)
    double dist_c2 = 0.0;        // adds first/second central-difference discrepancies
    double dist_c0_xi_raw = 0.0; // unscaled sup|xi - G|
};

ModelFit fit_model(const GeneralRenorm& level, double c_n);

struct ConvergenceReport {
    std::vector<ModelFit> levels;     // n = 1..N
    std::vector<double> c_n;          // c for even n, 1/c for odd
    double lambda_hat = 0.0;          // log-linear fit of dist_c0 over n
    double fit_residual = 0.0;        // rms residual of the regression
    bool monotone_c0 = false;
};

ConvergenceReport convergence_report(const GeneralBreakMap& f, int levels,
                                     const GeneralPipelineOptions& opts = {});

// ||T_c^j(p1) - T_c^j(p2)|| for j = 0..n, with the fitted geometric rate.
struct ContractionReport {
    std::vector<double> distances;
    double rate = 0.0;
};

ContractionReport same_rho_contraction(const Params& p1, const Params& p2, int n,
                                       long r_cap = kDefaultHeightCap);

} // namespace brz
