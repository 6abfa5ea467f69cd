#include <doctest.h>

#include <cmath>

#include "brz/horseshoe.hpp"
#include "brz/smooth.hpp"

using namespace brz;

TEST_CASE("conjugated map construction") {
    const Params base = validate_params(1.0, 0.5, 2.0);

    SUBCASE("epsilon = 0 coincides with the Moebius circle map pointwise") {
        GeneralBreakMap f(base, 0.0);
        const CircleLift lift(make_pair(base));
        for (int i = 0; i <= 200; ++i) {
            const double x = -1.0 + i / 200.0;
            CHECK(std::fabs(f.lift(x) - lift.eval(x)) <= 1e-14);
        }
    }
    SUBCASE("h inverse is exact to 1e-14") {
        GeneralBreakMap f(base, 0.3);
        for (int i = 0; i <= 500; ++i) {
            const double y = -2.0 + 4.0 * i / 500.0;
            CHECK(std::fabs(f.h(f.h_inverse(y)) - y) <= 1e-14);
        }
    }
    SUBCASE("lift is increasing and commutes with x -> x + 1") {
        GeneralBreakMap f(base, 0.3);
        for (int i = 0; i < 300; ++i) {
            const double x = -1.0 + i / 300.0;
            CHECK(f.lift(x + 1e-7) > f.lift(x));
            CHECK(std::fabs(f.lift(x + 1.0) - f.lift(x) - 1.0) <= 1e-12);
        }
    }
    SUBCASE("one-sided derivative ratio at the break equals c^2 = 4") {
        GeneralBreakMap f(base, 0.3);
        CHECK(std::fabs(f.break_ratio_fd() - 4.0) <= 1e-6 * 4.0);
    }
    SUBCASE("conjugation preserves the rotation number (Birkhoff oracle)") {
        GeneralBreakMap f(base, 0.3);
        const double rho_f = f.birkhoff(1000000);
        const double rho_base = birkhoff_rotation_number(base, 1000000);
        CHECK(std::fabs(rho_f - rho_base) <= 1e-6);
    }
    SUBCASE("amplitude outside [0,1) is rejected") {
        CHECK_THROWS_AS(GeneralBreakMap(base, 1.0), Error);
        CHECK_THROWS_AS(GeneralBreakMap(base, -0.1), Error);
    }
}

TEST_CASE("pipeline agreement with the Moebius chain at epsilon = 0") {
    const Params base = validate_params(1.0, 0.5, 2.0);
    GeneralBreakMap f(base, 0.0);
    const auto recs = general_renormalize(f, 6);
    REQUIRE(recs.size() == 7);

    Params cur = base;
    for (const GeneralRenorm& rec : recs) {
        if (rec.level == 0) {
            CHECK(rec.a == doctest::Approx(base.a).epsilon(1e-14));
            CHECK(rec.b == doctest::Approx(base.b).epsilon(1e-14));
            continue;
        }
        const StepResult s = renormalize_R(cur);
        CHECK(std::fabs(rec.a - s.new_params.a) <= 1e-10);
        CHECK(std::fabs(rec.b - s.new_params.b) <= 1e-10);
        cur = s.new_params;
    }
}

TEST_CASE("heights of the conjugated map match the base at every level") {
    const Params base = validate_params(1.0, 0.5, 2.0);
    GeneralBreakMap f(base, 0.3);
    const auto recs = general_renormalize(f, 6);
    const RotationNumber rn = rotation_number(base, 7);
    for (const GeneralRenorm& rec : recs) {
        if (rec.level >= 6) continue;
        CHECK(rec.height_consumed.r == rn.cf.entries[rec.level].r);
    }
}

TEST_CASE("endpoint normalization at every level") {
    const Params base = validate_params(1.0, 0.5, 2.0);
    GeneralBreakMap f(base, 0.3);
    const auto recs = general_renormalize(f, 5);
    for (const GeneralRenorm& rec : recs) {
        // xi_n(0) = -1 exactly by construction of the rescaling
        CHECK(rec.grid_xi_y.front() == -1.0);
        // eta_n endpoints reproduce a_n and -b_n
        CHECK(rec.grid_eta_y.back() == doctest::Approx(rec.a).epsilon(1e-13));
        CHECK(rec.grid_eta_y.front() == doctest::Approx(-rec.b).epsilon(1e-13));
    }
}

TEST_CASE("model fit distances") {
    const Params base = validate_params(1.0, 0.5, 2.0);

    SUBCASE("epsilon = 0: the map is already in the family at every level") {
        GeneralBreakMap f(base, 0.0);
        ConvergenceReport rep = convergence_report(f, 6);
        for (const ModelFit& m : rep.levels) {
            CHECK(m.dist_c0 <= 1e-10);
        }
    }
    SUBCASE("epsilon = 0.3: geometric decay with a fitted rate below one") {
        GeneralBreakMap f(base, 0.3);
        ConvergenceReport rep = convergence_report(f, 8);
        REQUIRE(rep.levels.size() == 8);
        CHECK(rep.lambda_hat < 1.0);
        // measured transient: the r = 1 step from level 1 to level 2 amplifies
        // before the contraction takes over; monotone from level 2 on
        for (size_t i = 2; i < rep.levels.size(); ++i) {
            CHECK(rep.levels[i].dist_c0 < rep.levels[i - 1].dist_c0);
        }
        // c_n alternation: 1/c at odd levels, c at even
        for (size_t i = 0; i < rep.c_n.size(); ++i) {
            const int n = static_cast<int>(i) + 1;
            CHECK(rep.c_n[i] == doctest::Approx(n % 2 == 0 ? 2.0 : 0.5));
        }
        // G-side distance times a_n stays bounded (theorem's 1/a_n scaling)
        for (const ModelFit& m : rep.levels) {
            CHECK(m.a * m.dist_c0_xi_raw <= 1.0);
        }
        CHECK(rep.levels.back().a * rep.levels.back().dist_c0_xi_raw <= 1e-6);
    }
    SUBCASE("smaller perturbations fit no worse (trend, reported descriptively)") {
        GeneralBreakMap f1(base, 0.1);
        GeneralBreakMap f3(base, 0.3);
        const ConvergenceReport r1 = convergence_report(f1, 8);
        const ConvergenceReport r3 = convergence_report(f3, 8);
        CHECK(r1.lambda_hat <= 1.05 * r3.lambda_hat);
    }
}

TEST_CASE("commutation limit at deep levels") {
    // rescaled eta_n o xi_n and xi_n o eta_n(c_n^2 .) approach each other as the
    // pair converges to the family, which satisfies the identity exactly
    const Params base = validate_params(1.0, 0.5, 2.0);
    GeneralBreakMap f(base, 0.3);
    const auto recs = general_renormalize(f, 6);
    ConvergenceReport rep = convergence_report(f, 6);

    auto comm = [&](const GeneralRenorm& rec, double cn) {
        const double c2 = cn * cn;
        double worst = 0.0;
        for (int i = 1; i < 32; ++i) {
            // G(F(z)) = F(G(c^2 z)) with F = eta, G = xi; sample z where both
            // sides stay inside the branch domains
            const double zstar = -rec.a / cn;
            const double z = zstar * i / 33.0;
            const double Fz = eval_eta(f, rec, z);
            if (!(Fz >= 0.0 && Fz <= rec.a)) continue;
            const double gz_arg = c2 * z;
            if (!(gz_arg >= -1.0 && gz_arg <= rec.a)) continue;
            const double lhs = eval_xi(f, rec, Fz);
            const double rhs = eval_eta(f, rec, eval_xi(f, rec, gz_arg));
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
        return worst;
    };

    const double c3 = comm(recs[3], 0.5);
    const double c6 = comm(recs[6], 2.0);
    CHECK(c6 < c3);
    CHECK(c6 <= 20.0 * rep.levels[5].dist_c0 + 1e-9);
}

TEST_CASE("contraction on a golden level set") {
    // two points on the golden curve at c = 1.5 contract under T with a
    // fitted rate below one over 8 steps
    std::vector<Height> target(26, Height(1));
    const Transversal t1 = transversal_family(1.5, 0.75, 0.1);
    const Transversal t2 = transversal_family(1.5, 0.75, 0.4);
    const Params p1 = solve_on_transversal(1.5, t1, target, 26).point;
    const Params p2 = solve_on_transversal(1.5, t2, target, 26).point;

    const ContractionReport rep = same_rho_contraction(p1, p2, 8);
    REQUIRE(rep.distances.size() == 9);
    CHECK(rep.distances[0] > 0.1);
    CHECK(rep.rate < 1.0);
    CHECK(rep.distances[8] < rep.distances[0]);
}
