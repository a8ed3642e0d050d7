#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "zlab/dynamics.hpp"
#include "zlab/energetics.hpp"
#include "zlab/groundstate.hpp"

using namespace zlab;
using testhelp::random_state;

TEST_CASE("the two Hamiltonian forms agree on random states") {
    Grid2D g(64, 2.0 * M_PI);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const ZakharovState st = random_state(g, rng, 0.5 + 0.02 * trial);
        const double N = 2.0 + (trial % 7);
        const double s = 0.90 + 0.001 * (trial % 10);
        const EnergyReport er = energy_report(st, N, s);
        const double scale =
            std::max({std::abs(er.H_vform), std::abs(er.H_plusform), 1e-30});
        CHECK(std::abs(er.H_vform - er.H_plusform) <= 1e-10 * scale);
    }
}

TEST_CASE("modified energy splits into its positive part plus the wave term") {
    Grid2D g(64, 2.0 * M_PI);
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const ZakharovState st = random_state(g, rng, 0.4 + 0.03 * trial);
        const double N = 1.5 + 0.5 * (trial % 9);
        const double s = 0.92 + 0.0007 * trial;
        const EnergyReport er = energy_report(st, N, s);
        const double scale =
            std::max({std::abs(er.modified_H), std::abs(er.H1), er.Iv_half, 1e-30});
        CHECK(std::abs(er.modified_H - (er.H1 + er.Iv_half)) <= 1e-10 * scale);
        CHECK(er.identity_residual <= 1e-10 * scale);
        CHECK(er.Iv_half >= 0.0);
    }
}

TEST_CASE("energy report basics") {
    Grid2D g(64, 16.0);
    std::mt19937_64 rng(33);
    const ZakharovState st = random_state(g, rng, 1.0);
    const EnergyReport er = energy_report(st, 4.0, 0.95);
    CHECK(er.mass == Catch::Approx(l2_norm_sq(st.u)).epsilon(1e-12));

    // with N at the grid limit the smoothing is the identity, so the modified
    // energy coincides with the plain Hamiltonian
    const EnergyReport big = energy_report(st, 1e9, 0.95);
    CHECK(std::abs(big.modified_H - big.H_vform) < 1e-9 * std::max(1.0, std::abs(big.H_vform)));
}

namespace {

// centered difference of the modified energy along the evolution, resolved
// with substeps well below the window so the quotient converges at rate h^2
double flow_derivative(const ZakharovState& st, double N, double s, double h) {
    const int sub = 16;
    Stepper fwd(st), bwd(st);
    for (int i = 0; i < sub; ++i) fwd.step(h / sub);
    for (int i = 0; i < sub; ++i) bwd.step(-h / sub);
    const double ep = energy_report(fwd.snapshot(), N, s).modified_H;
    const double em = energy_report(bwd.snapshot(), N, s).modified_H;
    return (ep - em) / (2.0 * h);
}

}  // namespace

TEST_CASE("commutator sum matches the flow derivative of the modified energy") {
    Grid2D g(64, 16.0);
    // a generic point on a focusing trajectory
    const RadialProfile prof = solve_townes();
    Stepper sp(build_initial_state(testhelp::gaussian_data(1.1), g, &prof));
    for (int i = 0; i < 50; ++i) sp.step(2e-3);
    const ZakharovState st = sp.snapshot();

    const double N = 3.0, s = 0.95;
    const double predicted = commutator_terms(st, N, s).sum();

    const double h = 4e-3;
    const double e1 = std::abs(flow_derivative(st, N, s, h) - predicted);
    const double e2 = std::abs(flow_derivative(st, N, s, 0.5 * h) - predicted);
    REQUIRE(e2 > 0.0);
    const double ratio = e1 / e2;
    INFO("errors " << e1 << " -> " << e2 << ", ratio " << ratio);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
    // and the prediction is itself accurate at the scale of the state
    CHECK(e2 < 1e-4 * std::max(1.0, std::abs(predicted)));
}

TEST_CASE("commutator terms vanish when the smoothing is inactive") {
    Grid2D g(64, 2.0 * M_PI);
    std::mt19937_64 rng(35);

    SECTION("band-limited data below the cutoff") {
        ZakharovState st(g);
        st.u = random_band_field(g, rng, 1.0, 3.0, 0.0, 1.0, false);
        st.n = random_band_field(g, rng, 1.0, 3.0, 0.0, 1.0, true);
        Field2D nuh = spectral(random_band_field(g, rng, 1.0, 3.0, 0.0, 0.7, true));
        nuh[0] = 0.0;
        st.nu = physical(nuh);
        project_real(st.nu);
        // products of band-3 data reach band 6; N = 7 keeps I exactly trivial
        const CommutatorTerms ct = commutator_terms(st, 7.0, 0.95);
        CHECK(std::abs(ct.term_1) < 1e-10);
        CHECK(std::abs(ct.term_2) < 1e-10);
        CHECK(std::abs(ct.term_3) < 1e-10);
    }

    SECTION("cutoff beyond the grid") {
        const ZakharovState st = random_state(g, rng);
        const CommutatorTerms ct = commutator_terms(st, 1e8, 0.95);
        CHECK(std::abs(ct.sum()) < 1e-10);
    }
}

TEST_CASE("scheduling exponent arithmetic") {
    // the borderline regularity gives exponent (10+0)/ (7s-6) ... = 2 exactly
    const Rational s0(16, 17);
    CHECK(ps_exponent_rational(s0, Rational(0)) == Rational(2));

    // frozen floating-point reference at the working parameters
    CHECK(schedule_exponent(0.95, 0.001) == Catch::Approx(15.502).epsilon(1e-3));

    // strictly inside the admissible window the growth cost stays below 2
    for (int i = 1; i <= 50; ++i) {
        const double s = 16.0 / 17.0 + (1.0 - 16.0 / 17.0) * i / 51.0;
        const double strict = (17.0 * s - 16.0) / (69.0 - 68.0 * s);
        for (int j = 1; j <= 50; ++j) {
            const double eps = strict * j / 51.0;
            const EpsilonRange er = epsilon_range_valid(s, eps);
            REQUIRE(er.ok());
            CHECK(ps_exponent(s, eps) < 2.0);
        }
    }
}

TEST_CASE("admissible window for the schedule steepness") {
    // frozen strict bound at s = 0.95
    const double strict95 = (17.0 * 0.95 - 16.0) / (69.0 - 68.0 * 0.95);
    CHECK(strict95 == Catch::Approx(0.034090909).epsilon(1e-6));
    CHECK(epsilon_range_valid(0.95, 0.9 * strict95).ok());
    CHECK_FALSE(epsilon_range_valid(0.95, 1.1 * strict95).valid_strict);
    CHECK_FALSE(epsilon_range_valid(0.95, 0.0).ok());
    CHECK_FALSE(epsilon_range_valid(0.95, -0.01).ok());

    std::mt19937_64 rng(36);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * std::ldexp(static_cast<double>(rng() >> 11), -53);
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const double s = uni(16.0 / 17.0 + 1e-6, 1.0 - 1e-6);
        const double eps = uni(-0.01, 0.1);
        const EpsilonRange er = epsilon_range_valid(s, eps);
        const double strict = (17.0 * s - 16.0) / (69.0 - 68.0 * s);
        const double loose = (17.0 - 16.0 * s) / (69.0 - 68.0 * s);
        CHECK(er.valid_strict == (eps > 0.0 && eps < strict));
        CHECK(er.valid_loose == (eps > 0.0 && eps < loose));
        CHECK(er.denominator_positive == (7.0 * s - 6.0 - (35.0 - 34.0 * s) * eps > 0.0));
    }
}

TEST_CASE("cutoff schedule from the running maximum") {
    ISchedule sched;
    sched.s = 0.95;
    sched.eps = 1e-3;
    sched.n_min = 4.0;
    sched.n_max = 64.0;

    CHECK(n_schedule(0.0, sched) == 4.0);          // clamped up to the floor
    CHECK(n_schedule(1.0, sched) == 4.0);          // 1^p = 1 < n_min
    CHECK(n_schedule(1e9, sched) == 64.0);         // clamped down to the cap
    const double lam = 1.2;
    CHECK(n_schedule(lam, sched) ==
          Catch::Approx(std::pow(lam, schedule_exponent(0.95, 1e-3))).epsilon(1e-12));
    // monotone in the running maximum
    double prev = 0.0;
    for (double l = 0.5; l < 3.0; l += 0.1) {
        const double v = n_schedule(l, sched);
        CHECK(v >= prev);
        prev = v;
    }

    sched.fixed_n = 12.0;
    CHECK(n_schedule(1e9, sched) == 12.0);
}

TEST_CASE("rational helper") {
    CHECK(Rational(4, 6) == Rational(2, 3));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
    CHECK(Rational(-4, 8) == Rational(-1, 2));
    CHECK(Rational(1, 2) - Rational(3, 4) == Rational(-1, 4));
    CHECK((Rational(1, 2) / Rational(3, 2)) == Rational(1, 3));
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}
