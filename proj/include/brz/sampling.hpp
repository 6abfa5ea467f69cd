#pragma once

#include <random>

#include "brz/renorm.hpp"

namespace brz {

// Seeded parameter-space samplers. All sampling in tests and the CLI goes
// through these so that a fixed seed reproduces runs byte for byte.
class Sampler {
public:
    explicit Sampler(unsigned long seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    long uniform_int(long lo, long hi) {
        return std::uniform_int_distribution<long>(lo, hi)(rng_);
    }

    // Random point of D_c (v capped above for samplability).
    Params sample_D(double c, double v_span = 2.0);

    // Random point of the compact region Delta_c, margins away from its
    // boundary.
    Params sample_Delta(double c, double margin = 0.01);

    // Rejection sampling of Delta_c n O^2_c; `rejected` counts discards.
    Params sample_Delta_O2(double c, long r_cap, int* rejected = nullptr);

    // Like sample_Delta_O2, and additionally requires the two heights to be
    // stable under +-step perturbations of a and v (needed by
    // finite-difference cross-checks, which are meaningless across stratum
    // boundaries).
    Params sample_Delta_O2_fd_stable(double c, long r_cap, double step = 2e-6,
                                     long max_height = 50);

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace brz
