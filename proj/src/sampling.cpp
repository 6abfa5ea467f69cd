#include "brz/sampling.hpp"

#include "brz/hyperbolic.hpp"

namespace brz {

Params Sampler::sample_D(double c, double v_span) {
    for (int tries = 0; tries < 10000; ++tries) {
        const double a = uniform(0.02 * c, c);
        const double v = uniform(c - 1.0 - a, c - 1.0 - a + v_span);
        if (!in_D(a, v, c)) continue;
        const double b = (c - a) / (1.0 + v);
        if (!(b >= 0.0 && b < 1.0)) continue;
        if (a + v - (c - 1.0) < 1e-6) continue;  // stay off the D boundary
        return validate_params(a, v, c);
    }
    throw Error("sample_D: rejection sampling failed");
}

Params Sampler::sample_Delta(double c, double margin) {
    const double vlo = (c > 1.0) ? 0.0 : c - 1.0;
    const double vhi = (c > 1.0) ? c - 1.0 : 0.0;
    for (int tries = 0; tries < 10000; ++tries) {
        const double v = uniform(vlo + margin * (vhi - vlo), vhi - margin * (vhi - vlo));
        const double alo = std::max(1e-3, c - 1.0 - v + 1e-3);
        const double a = uniform(alo, c * (1.0 - 1e-4));
        if (!in_Delta(a, v, c)) continue;
        return validate_params(a, v, c);
    }
    throw Error("sample_Delta: rejection sampling failed");
}

Params Sampler::sample_Delta_O2(double c, long r_cap, int* rejected) {
    for (int tries = 0; tries < 100000; ++tries) {
        Params p = sample_Delta(c);
        try {
            const StepResult s1 = renormalize_R(p, r_cap);
            if (height(s1.new_params, r_cap).is_infinite()) {
                if (rejected) ++*rejected;
                continue;
            }
            return p;
        } catch (const Error&) {
            if (rejected) ++*rejected;
        }
    }
    throw Error("sample_Delta_O2: rejection sampling failed");
}

Params Sampler::sample_Delta_O2_fd_stable(double c, long r_cap, double step,
                                          long max_height) {
    for (int tries = 0; tries < 1000; ++tries) {
        Params p = sample_Delta_O2(c, r_cap);
        bool stable = true;
        Height h0, h1;
        try {
            const StepResult s = renormalize_R(p, r_cap);
            h0 = s.r0;
            h1 = height(s.new_params, r_cap);
        } catch (const Error&) {
            continue;
        }
        // finite differences at step 1e-6 are meaningful only where the map
        // is not nearly parabolic and the derivative scale is moderate
        if (h0.r > max_height || h1.is_infinite() || h1.r > max_height) continue;
        try {
            const FdJacobian fd = fd_jacobian_T(p, 1e-6, r_cap);
            double scale = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) scale = std::max(scale, std::fabs(fd.J[i][j]));
            if (!fd.heights_stable || scale > 200.0) continue;
        } catch (const Error&) {
            continue;
        }
        const double da[4] = {step, -step, 0.0, 0.0};
        const double dv[4] = {0.0, 0.0, step, -step};
        for (int i = 0; i < 4 && stable; ++i) {
            try {
                const Params q = Params::lenient(p.a + da[i], p.v + dv[i], c);
                const StepResult s = renormalize_R(q, r_cap);
                if (!(s.r0 == h0) || !(height(s.new_params, r_cap) == h1)) stable = false;
            } catch (const Error&) {
                stable = false;
            }
        }
        if (stable) return p;
    }
    throw Error("sample_Delta_O2_fd_stable: rejection sampling failed");
}

} // namespace brz
