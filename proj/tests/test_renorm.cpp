#include <doctest.h>

#include <cmath>

#include "brz/renorm.hpp"
#include "brz/sampling.hpp"

using namespace brz;

TEST_CASE("height of (1, 0.5, 2) is 2 (hand iteration -1 -> -2/3 -> -1/4 -> 4/9)") {
    const Params p = validate_params(1.0, 0.5, 2.0);
    const BreakPair pair = make_pair(p);
    MoebiusMap F = pair.F;
    F.set_domain(std::nullopt);
    CHECK(F.eval(-1.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(F.eval(-2.0 / 3.0) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(F.eval(-0.25) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(height(p).r == 2);
}

TEST_CASE("b = 0 stratum has height 1") {
    const Params p = validate_params(1.5, 0.3, 1.5);  // a = c
    CHECK(height(p).r == 1);
}

TEST_CASE("fixed point of F forces infinite height") {
    // (0.2, 1, 2): v z^2 + z + 0.2 = 0 has root (-1+sqrt(0.2))/2 in (-1,0)
    const Params p = validate_params(0.2, 1.0, 2.0);
    const auto fix = f_fixed_point_in_unit(p);
    REQUIRE(fix.has_value());
    CHECK(*fix == doctest::Approx(-0.27639320225002106).epsilon(1e-12));
    CHECK(height(p).is_infinite());
}

TEST_CASE("renormalize_R at (1, 0.5, 2): frozen values from exact rational iteration") {
    const Params p = validate_params(1.0, 0.5, 2.0);
    const StepResult s = renormalize_R(p);
    CHECK(s.r0.r == 2);
    CHECK(s.new_params.a == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.new_params.v == doctest::Approx(-7.0 / 16.0).epsilon(1e-12));
    CHECK(s.new_params.c == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.new_params.b == doctest::Approx(4.0 / 9.0).epsilon(1e-11));
    CHECK(s.residual <= 1e-9);
    // image lies in Delta_{1/2} = {c-1 <= v <= 0}
    CHECK(in_Delta(s.new_params.a, s.new_params.v, 0.5));
}

TEST_CASE("family invariance on random renormalizable parameters") {
    Sampler smp(41);
    for (double c : {0.6, 0.8, 1.5, 1.9}) {
        int done = 0;
        while (done < 100) {
            const Params p = smp.sample_D(c);
            try {
                const StepResult s = renormalize_R(p, 20000);
                CHECK(s.residual <= 1e-9);
                ++done;
            } catch (const Error&) {
                // non-renormalizable or capped sample, draw again
            }
        }
    }
}

TEST_CASE("CF shift under renormalization") {
    const Params p = validate_params(1.0, 0.5, 2.0);
    const RotationNumber top = rotation_number(p, 11);
    const StepResult s = renormalize_R(p);
    const RotationNumber shifted = rotation_number(s.new_params, 10);
    REQUIRE(top.cf.depth() >= 11);
    REQUIRE(shifted.cf.depth() >= 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(top.cf.entries[i + 1].r == shifted.cf.entries[i].r);
    }
}

TEST_CASE("a = c: rho = [1, inf] = 1 and the image is non-renormalizable") {
    const Params p = validate_params(1.5, 0.3, 1.5);
    const RotationNumber rn = rotation_number(p, 10);
    REQUIRE(rn.cf.depth() == 2);
    CHECK(rn.cf.entries[0].r == 1);
    CHECK(rn.cf.entries[1].is_infinite());
    CHECK(rn.value_lo == doctest::Approx(1.0));
    CHECK(rn.value_hi == doctest::Approx(1.0));
}

TEST_CASE("non-renormalizable sample: rho = [inf] = 0") {
    const Params p = validate_params(0.2, 1.0, 2.0);
    const RotationNumber rn = rotation_number(p, 10);
    REQUIRE(rn.cf.depth() == 1);
    CHECK(rn.cf.entries[0].is_infinite());
    CHECK(rn.value_lo == doctest::Approx(0.0));
    CHECK(rn.value_hi == doctest::Approx(0.0));
}

TEST_CASE("renormalize_T at (1, 0.5, 2): lambda = F^2(-1) = -1/4, image (16/9, 11/18)") {
    const Params p = validate_params(1.0, 0.5, 2.0);
    const StepResult s = renormalize_T(p);
    CHECK(s.lambda == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(s.r0.r == 2);
    REQUIRE(s.r1.has_value());
    CHECK(s.r1->r == 1);
    CHECK(s.new_params.a == doctest::Approx(16.0 / 9.0).epsilon(1e-11));
    CHECK(s.new_params.v == doctest::Approx(11.0 / 18.0).epsilon(1e-11));
    CHECK(s.new_params.c == doctest::Approx(2.0));
}

TEST_CASE("two-path agreement and Delta invariance of T on random samples") {
    Sampler smp(43);
    for (double c : {1.5, 0.8}) {
        int done = 0;
        while (done < 100) {
            Params p;
            try {
                p = smp.sample_Delta_O2(c, 20000);
            } catch (const Error&) {
                break;
            }
            // renormalize_T itself asserts two-path agreement at 1e-11
            const StepResult s = renormalize_T(p, 20000);
            CHECK(in_Delta(s.new_params.a, s.new_params.v, c, 1e-10));
            ++done;
        }
        CHECK(done == 100);
    }
}

TEST_CASE("prerenormalize") {
    const Params p = validate_params(1.0, 0.5, 2.0);
    SUBCASE("n = 0 is the pair itself with identity rescaling") {
        const PreRenorm pr = prerenormalize(p, 0);
        const BreakPair pair = make_pair(p);
        CHECK(projective_distance(pr.H, pair.F) < 1e-14);
        CHECK(projective_distance(pr.K, pair.G) < 1e-14);
        CHECK(projective_distance(pr.gamma, MoebiusMap::identity()) < 1e-14);
    }
    SUBCASE("n = 1: H = F^{r0} o G as a single matrix product") {
        const PreRenorm pr = prerenormalize(p, 1);
        const BreakPair pair = make_pair(p);
        MoebiusMap F = pair.F, G = pair.G;
        F.set_domain(std::nullopt);
        G.set_domain(std::nullopt);
        const MoebiusMap expected = moebius_compose(moebius_power(F, 2), G);
        CHECK(projective_distance(pr.H, expected) < 1e-13);
        CHECK(projective_distance(pr.K, pair.F) < 1e-14);
    }
    SUBCASE("conjugacy identity to depth 6") {
        for (int n = 1; n <= 6; ++n) {
            const PreRenorm pr = prerenormalize(p, n);
            CHECK(pr.conjugacy_residual <= 1e-9);
        }
    }
}

TEST_CASE("Birkhoff oracle") {
    SUBCASE("a = c gives rho = 1") {
        const Params p = validate_params(1.5, 0.3, 1.5);
        CHECK(std::fabs(birkhoff_rotation_number(p, 100000) - 1.0) <= 2e-5);
    }
    SUBCASE("non-renormalizable gives rho = 0") {
        const Params p = validate_params(0.2, 1.0, 2.0);
        CHECK(std::fabs(birkhoff_rotation_number(p, 100000)) <= 2e-5);
    }
    SUBCASE("(1, 0.5, 2): continued fraction value within 1e-5 of Birkhoff at N = 1e6") {
        const Params p = validate_params(1.0, 0.5, 2.0);
        const RotationNumber rn = rotation_number(p, 25);
        const double rho = birkhoff_rotation_number(p, 1000000);
        CHECK(std::fabs(0.5 * (rn.value_lo + rn.value_hi) - rho) <= 1e-5);
    }
}

TEST_CASE("CF agrees with Birkhoff to 1e-8 at depth 15") {
    const Params p = validate_params(1.0, 0.5, 2.0);
    const RotationNumber rn = rotation_number(p, 15);
    CHECK(rn.cf.entries[0].r == 2);
    // depth-15 interval is tighter than 1e-8; Birkhoff at 1e7 iterates is ~1e-7
    const double rho = birkhoff_rotation_number(p, 10000000);
    CHECK(rn.value_lo - 1e-7 <= rho);
    CHECK(rho <= rn.value_hi + 1e-7);
    CHECK(rn.value_hi - rn.value_lo < 1e-8);
}

TEST_CASE("classify") {
    SUBCASE("(0.2, 1, 2) is non-renormalizable by the closed form") {
        const RegionClass rc = classify(0.2, 1.0, 2.0);
        CHECK(rc.in_D);
        CHECK(rc.status == RegionClass::Status::NonRenormalizable);
        CHECK_FALSE(rc.methods_disagree);
    }
    SUBCASE("c = 0.8 samples are always renormalizable") {
        Sampler smp(47);
        for (int i = 0; i < 200; ++i) {
            const Params p = smp.sample_D(0.8);
            const RegionClass rc = classify(p.a, p.v, 0.8);
            CHECK(rc.status == RegionClass::Status::Renormalizable);
        }
    }
    SUBCASE("tangency curve for c = 3 is v = 1/a on a in (0,1)") {
        // on the curved boundary a = (c-1)^2/(4v) the fixed point is tangent
        for (double a : {0.3, 0.5, 0.9}) {
            const double v = 1.0 / a;  // (c-1)^2/(4v) = 1/v at c = 3
            CHECK(a == doctest::Approx((3.0 - 1.0) * (3.0 - 1.0) / (4.0 * v)));
            const RegionClass rc = classify(a, v, 3.0);
            CHECK(rc.boundary_band);  // sits exactly on the boundary
        }
    }
}

TEST_CASE("involution") {
    SUBCASE("I_2(1, 0.9) = (1/9, -0.45), inside D_{1/2} and Delta_{1/2}") {
        const Params p = validate_params(1.0, 0.9, 2.0);
        const InvolutionResult r = involution_I(p);
        CHECK(r.image.a == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
        CHECK(r.image.v == doctest::Approx(-0.45).epsilon(1e-14));
        CHECK(r.image.c == doctest::Approx(0.5));
        CHECK_FALSE(r.domain_violation);
        CHECK(in_Delta(r.image.a, r.image.v, 0.5));
    }
    SUBCASE("documented domain violation: I_2(1, 0.5) has a' > c'") {
        const Params p = validate_params(1.0, 0.5, 2.0);
        const InvolutionResult r = involution_I(p);
        CHECK(r.image.a == doctest::Approx(1.0));
        CHECK(r.domain_violation);
        CHECK_THROWS_AS(involution_I_strict(p), DomainViolation);
    }
    SUBCASE("involution round trip on 1000 samples") {
        Sampler smp(53);
        int tested = 0;
        while (tested < 1000) {
            const double c = (tested % 2) ? 1.5 : 0.8;
            const Params p = smp.sample_D(c);
            if (p.v == 0.0) continue;
            InvolutionResult r1;
            try {
                r1 = involution_I(p);
            } catch (const DomainViolation&) {
                continue;
            }
            const InvolutionResult r2 = involution_I(r1.image);
            CHECK(std::fabs(r2.image.a - p.a) <= 1e-12 * std::max(1.0, std::fabs(p.a)));
            CHECK(std::fabs(r2.image.v - p.v) <= 1e-12 * std::max(1.0, std::fabs(p.v)));
            ++tested;
        }
    }
    SUBCASE("Jacobian determinant sign") {
        const Params p = validate_params(1.0, 0.9, 2.0);
        const InvolutionResult r = involution_I(p);
        // (c-1-v)/(a^2 c v) with c-1-v = 0.1 > 0
        CHECK(r.jacobian_det == doctest::Approx(0.1 / (1.0 * 2.0 * 0.9)).epsilon(1e-13));
        CHECK(r.jacobian_det > 0.0);
    }
}

TEST_CASE("dual inverse recovers pre-images on the duality-consistent set") {
    // R_c forgets its height, so strata share images; the conjugated inverse
    // returns the original point exactly when I_c(p) stays inside D_{1/c}
    Sampler smp(59);
    int done = 0, tried = 0;
    while (done < 200 && tried < 8000) {
        ++tried;
        const double c = (done % 2) ? 1.5 : 0.8;
        Params p;
        try {
            p = smp.sample_Delta_O2(c, 20000);
        } catch (const Error&) {
            continue;
        }
        if (!duality_consistent_R(p)) continue;
        const StepResult s = renormalize_R(p, 20000);
        const Params back = dual_inverse_R(s.new_params, 20000);
        CHECK(std::fabs(back.a - p.a) <= 1e-8);
        CHECK(std::fabs(back.v - p.v) <= 1e-8);
        ++done;
    }
    CHECK(done == 200);
}

TEST_CASE("R forgets its height: strata share images (exact rational witness)") {
    // R_2(1, 1/2) and R_2(4/7, 7/8) both equal (1/4, -7/16) at break 1/2, with
    // heights 2 and 4; computed by hand in exact fractions. This is why the
    // conjugated inverse only recovers points on the duality-consistent set.
    const StepResult s1 = renormalize_R(validate_params(1.0, 0.5, 2.0));
    const StepResult s2 = renormalize_R(validate_params(4.0 / 7.0, 7.0 / 8.0, 2.0));
    CHECK(s1.r0.r == 2);
    CHECK(s2.r0.r == 4);
    CHECK(s1.new_params.a == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(s2.new_params.a == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(s1.new_params.v == doctest::Approx(-7.0 / 16.0).epsilon(1e-13));
    CHECK(s2.new_params.v == doctest::Approx(-7.0 / 16.0).epsilon(1e-13));
    CHECK_FALSE(duality_consistent_R(validate_params(1.0, 0.5, 2.0)));
    CHECK(duality_consistent_R(validate_params(1.0, 0.9, 2.0)));
}

TEST_CASE("duality preserves the height") {
    Sampler smp(61);
    int done = 0, tried = 0;
    while (done < 100 && tried < 4000) {
        ++tried;
        const double c = (done % 2) ? 1.5 : 0.8;
        Params p;
        try {
            p = smp.sample_Delta_O2(c, 20000);
        } catch (const Error&) {
            continue;
        }
        if (!duality_consistent_R(p)) continue;
        try {
            const Params dual = involution_I_strict(p);
            const Params back = dual_inverse_R(dual, 20000);
            CHECK(height(back, 20000) == height(p, 20000));
            ++done;
        } catch (const Error&) {
            continue;
        }
    }
    CHECK(done == 100);
}

TEST_CASE("dual inverse of T round trip") {
    Sampler smp(67);
    int done = 0, tried = 0;
    while (done < 50 && tried < 2000) {
        ++tried;
        Params p;
        try {
            p = smp.sample_Delta_O2(1.5, 20000);
        } catch (const Error&) {
            continue;
        }
        if (!duality_consistent_T(p, 20000)) continue;
        try {
            const StepResult s = renormalize_T(p, 20000);
            const Params back = dual_inverse_T(s.new_params, 20000);
            CHECK(std::fabs(back.a - p.a) <= 1e-7);
            CHECK(std::fabs(back.v - p.v) <= 1e-7);
            ++done;
        } catch (const DomainViolation&) {
            continue;
        }
    }
    CHECK(done == 50);
}

TEST_CASE("sigma^2 at the parameter level") {
    Sampler smp(71);
    int done = 0;
    while (done < 50) {
        Params p;
        try {
            p = smp.sample_Delta_O2(1.5, 20000);
        } catch (const Error&) {
            continue;
        }
        RotationNumber before = rotation_number(p, 12, 20000);
        if (before.cf.depth() < 12 || before.cf.terminated() || before.cf.exhausted_cap)
            continue;
        const StepResult s = renormalize_T(p, 20000);
        const RotationNumber after = rotation_number(s.new_params, 10, 20000);
        if (after.cf.depth() < 10 || after.cf.exhausted_cap) continue;
        for (int i = 0; i < 10; ++i) {
            CHECK(after.cf.entries[i].r == before.cf.entries[i + 2].r);
        }
        ++done;
    }
}

TEST_CASE("recorded lambda stays in (-1, 0) with an a priori margin") {
    Sampler smp(73);
    double min_lambda = 0.0;
    int done = 0;
    while (done < 200) {
        Params p;
        try {
            p = smp.sample_Delta_O2(1.5, 20000);
        } catch (const Error&) {
            continue;
        }
        const StepResult s = renormalize_T(p, 20000);
        CHECK(s.lambda < 0.0);
        CHECK(s.lambda > -1.0);
        min_lambda = std::min(min_lambda, s.lambda);
        ++done;
    }
    // fitted delta = -1/min - 1 > 0
    CHECK(-1.0 / min_lambda - 1.0 > 0.0);
}

TEST_CASE("rotation number monotone along a vertical scan at c = 1.5") {
    const double c = 1.5, v = 0.25;
    double prev = -1.0;
    for (int i = 0; i < 100; ++i) {
        const double a = 0.26 + (c - 0.27) * i / 99.0;
        if (!in_D(a, v, c)) continue;
        const RotationNumber rn = rotation_number(Params::lenient(a, v, c), 18, 100000);
        const double mid = 0.5 * (rn.value_lo + rn.value_hi);
        CHECK(mid >= prev - 1e-12);
        prev = mid;
    }
}

TEST_CASE("figure-2 strata structure at c = 3") {
    // the curved boundary of the non-renormalizable region is v = 1/a on (0,1)
    for (double a : {0.3, 0.5, 0.8}) {
        const RegionClass below = classify(a, 1.0 / a - 0.05, 3.0);
        const RegionClass above = classify(a, 1.0 / a + 0.05, 3.0);
        CHECK(below.status == RegionClass::Status::NonRenormalizable);
        CHECK(above.status == RegionClass::Status::Renormalizable);
    }

    SUBCASE("heights are non-increasing in a along verticals") {
        for (double v : {0.9, 1.4, 2.2}) {
            long prev = std::numeric_limits<long>::max();
            for (int i = 0; i < 120; ++i) {
                const double a = 0.02 + (3.0 - 0.04) * i / 119.0;
                if (!in_D(a, v, 3.0)) continue;
                const RegionClass rc = classify(a, v, 3.0, 200000);
                long h;
                if (rc.status == RegionClass::Status::NonRenormalizable)
                    h = std::numeric_limits<long>::max();
                else if (rc.status == RegionClass::Status::Renormalizable)
                    h = rc.k.r;
                else
                    continue;  // undecided band
                CHECK(h <= prev);
                prev = h;
            }
        }
    }
}
