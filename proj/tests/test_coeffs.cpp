#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "parmx/coeffs.hpp"

using namespace parmx;

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Random Leslie set satisfying the Parodi relation alpha2+alpha3 = alpha6-alpha5,
// which is what makes the two closed forms of h coincide.
LeslieParameters random_parodi(std::mt19937_64& rng) {
    LeslieParameters p;
    p.alpha1 = 2.0 * uniform01(rng) - 1.0;
    p.alpha2 = 2.0 * uniform01(rng) - 1.0;
    p.alpha3 = 2.0 * uniform01(rng) - 1.0;
    p.alpha4 = 2.0 * uniform01(rng);
    p.alpha5 = 2.0 * uniform01(rng) - 1.0;
    p.alpha6 = p.alpha5 + p.alpha2 + p.alpha3;
    p.K1 = 0.5 + uniform01(rng);
    p.K3 = 0.5 + uniform01(rng);
    return p;
}

}  // namespace

TEST_CASE("g at the axis angles keeps only the surviving terms") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        LeslieParameters p = random_parodi(rng);
        CHECK(eval_g(p, 0.0) ==
              doctest::Approx(0.5 * (p.alpha3 + p.alpha6) + 0.5 * p.alpha4).epsilon(1e-14));
        CHECK(eval_g(p, M_PI / 2) ==
              doctest::Approx(0.5 * (p.alpha5 - p.alpha2) + 0.5 * p.alpha4).epsilon(1e-13));
    }
}

TEST_CASE("g at the diagonal matches hand arithmetic") {
    LeslieParameters p{1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    // 1*(1/4) + (2/2)*(1/2) + (2/2)*(1/2) + 1/2
    CHECK(eval_g(p, M_PI / 4) == doctest::Approx(1.75).epsilon(1e-14));
}

TEST_CASE("g derivative matches finite differences") {
    std::mt19937_64 rng(12);
    LeslieParameters p = random_parodi(rng);
    const double h = 1e-6;
    for (double th : {0.2, 1.0, 2.3, 4.0}) {
        double fd = (eval_g(p, th + h) - eval_g(p, th - h)) / (2 * h);
        CHECK(eval_g_dtheta(p, th) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("h closed forms") {
    std::mt19937_64 rng(13);
    LeslieParameters p = random_parodi(rng);
    CHECK(eval_h(p, M_PI / 4) == doctest::Approx(0.5 * p.gamma1()).epsilon(1e-13));
    CHECK(eval_h_trig_form(p, 0.0) == doctest::Approx(p.alpha3).epsilon(1e-14));

    SUBCASE("the two forms agree under Parodi at random inputs") {
        for (int i = 0; i < 1000; ++i) {
            LeslieParameters q = random_parodi(rng);
            double th = 8.0 * (uniform01(rng) - 0.5);
            CHECK(std::abs(eval_h(q, th) - eval_h_trig_form(q, th)) < 1e-12);
        }
    }
    SUBCASE("derived viscosity identities") {
        CHECK(p.gamma1() == p.alpha3 - p.alpha2);
        CHECK(p.gamma2() == p.alpha6 - p.alpha5);
        CHECK(p.satisfies_parodi());
    }
}

TEST_CASE("c^2 interpolates the Frank constants") {
    LeslieParameters p;
    p.K1 = 1.0;
    p.K3 = 2.0;
    CHECK(eval_c2(p, 0.0) == doctest::Approx(1.0));
    CHECK(eval_c2(p, M_PI / 2) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(eval_c2(p, M_PI / 4) == doctest::Approx(1.5).epsilon(1e-13));

    std::mt19937_64 rng(14);
    for (int i = 0; i < 200; ++i) {
        double th = 8.0 * (uniform01(rng) - 0.5);
        double v = eval_c2(p, th);
        CHECK(v >= 1.0 - 1e-14);
        CHECK(v <= 2.0 + 1e-14);
    }
    p.K1 = -1.0;
    CHECK_THROWS_AS(eval_c2(p, 0.3), std::invalid_argument);
}

TEST_CASE("constant theta collapses the field to a constant") {
    LeslieParameters p{0.4, -0.3, 0.5, 1.8, 0.1, 0.3, 1.0, 1.0};
    const double th0 = 0.7;
    CoefficientField f = field_from_theta(p, [&](double, double) { return th0; });
    CHECK(f.k_lower == doctest::Approx(eval_g(p, th0)).epsilon(1e-12));
    CHECK(f.k_upper == doctest::Approx(eval_g(p, th0)).epsilon(1e-12));
    CHECK(f(1.3, 0.2) == doctest::Approx(eval_g(p, th0)));
    // a constant field has zero measured Hölder seminorm
    CHECK(estimate_holder_constant(f.evaluate, 0.5, 8.0, 1.0, 2000, 99) == 0.0);
    CHECK(f.time_invariant);
}

TEST_CASE("pure alpha4 gives unit diffusivity whatever theta does") {
    LeslieParameters p;
    p.alpha4 = 2.0;
    CoefficientField f =
        field_from_theta(p, [](double x, double t) { return std::sin(3.0 * x + t); });
    CHECK(f.k_lower == doctest::Approx(1.0));
    CHECK(f.k_upper == doctest::Approx(1.0));
    CHECK(f(0.4, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("sinusoidal theta: bounds bracket a dense sweep") {
    LeslieParameters p{0.4, -0.3, 0.5, 1.8, 0.1, 0.3, 1.0, 1.0};
    CoefficientField f =
        field_from_theta(p, [](double x, double) { return std::sin(x); });
    std::mt19937_64 rng(15);
    for (int i = 0; i < 10000; ++i) {
        double x = 32.0 * (uniform01(rng) - 0.5);
        double t = uniform01(rng);
        double v = f(x, t);
        CHECK(v >= f.k_lower - 1e-12);
        CHECK(v <= f.k_upper + 1e-12);
        CHECK(v > 0.0);
    }
    CHECK(f.time_invariant);
}

TEST_CASE("degenerate g is rejected") {
    LeslieParameters p;
    p.alpha4 = -1.0;  // g = -1/2 everywhere
    CHECK_THROWS_AS(field_from_theta(p, [](double, double) { return 0.0; }),
                    std::invalid_argument);
}

TEST_CASE("field derivative matches central differences of the field") {
    CoefficientField f = smoothstep_field(0.5, 2.0, -1.0, 2.0);
    const double h = 1e-5;
    for (double x : {-1.5, -0.8, 0.0, 0.7, 1.2}) {
        double fd = (f(x + h, 0.1) - f(x - h, 0.1)) / (2 * h);
        CHECK(f.evaluate_dx(x, 0.1) == doctest::Approx(fd).epsilon(1e-8));
    }

    LeslieParameters p{0.4, -0.3, 0.5, 1.8, 0.1, 0.3, 1.0, 1.0};
    CoefficientField g =
        field_from_theta(p, [](double x, double) { return 0.6 * std::sin(0.9 * x); });
    for (double x : {-2.0, 0.3, 1.9}) {
        double fd = (g(x + h, 0.0) - g(x - h, 0.0)) / (2 * h);
        CHECK(g.evaluate_dx(x, 0.0) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("smoothstep field: bounds, positivity sandwich, kx integrability") {
    CoefficientField f = smoothstep_field(0.5, 2.0, -1.0, 2.0);
    CHECK(f.k_lower == 0.5);
    CHECK(f.k_upper == 2.0);
    std::mt19937_64 rng(16);
    for (int i = 0; i < 10000; ++i) {
        double x = 24.0 * (uniform01(rng) - 0.5);
        double t = uniform01(rng);
        double v = f(x, t);
        CHECK(v >= f.k_lower - 1e-14);
        CHECK(v <= f.k_upper + 1e-14);
    }
    // |k_x| has compact support here, so the L2-in-x bound is finite and positive.
    double kx2 = kx_l2_bound(f, 10.0, 1.0);
    CHECK(kx2 > 0.0);
    CHECK(kx2 < 10.0);
    CHECK(f.holder_constant > 0.0);
    CHECK(constant_field(1.0).holder_constant == 0.0);
}

TEST_CASE("catalog rejects nonsense parameters") {
    CHECK_THROWS_AS(constant_field(0.0), std::invalid_argument);
    CHECK_THROWS_AS(smoothstep_field(2.0, 1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(smoothstep_field(1.0, 2.0, 0.0, -1.0), std::invalid_argument);
}
