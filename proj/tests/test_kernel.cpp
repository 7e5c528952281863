#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "parmx/kernel.hpp"
#include "parmx/quadrature.hpp"

using namespace parmx;

namespace {
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
}  // namespace

TEST_CASE("peak value is one when the prefactor cancels") {
    FrozenKernel K{0.5, 0.0, 1.0};
    CHECK(K.value(0.5, 1.0 / (4.0 * M_PI)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kernel is even about its source point") {
    FrozenKernel K{0.3, 0.1, 1.7};
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        double x = 0.3 + 4.0 * (uniform01(rng) - 0.5);
        double t = 0.1 + 0.01 + uniform01(rng);
        CHECK(K.value(x, t) == doctest::Approx(K.value(2.0 * 0.3 - x, t)).epsilon(1e-14));
    }
}

TEST_CASE("unit mass across time scales") {
    QuadratureConfig cfg;
    for (double dt : {1e-4, 1e-2, 1.0, 10.0}) {
        FrozenKernel K{0.0, 0.0, 1.3};
        double width = std::sqrt(2.0 * K.k_frozen * dt);
        double mass = gaussian_space_integral(
            [&](double x) { return K.value(x, dt); }, 0.0, width, cfg);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("rejects evaluation at or before the source time") {
    FrozenKernel K{0.0, 0.5, 1.0};
    CHECK_THROWS_AS(K.value(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(K.value(0.0, 0.2), std::domain_error);
    CHECK_THROWS_AS(K.dx(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(K.dt(1.0, 0.4), std::domain_error);
}

TEST_CASE("space derivative vanishes at the source point") {
    FrozenKernel K{-0.7, 0.0, 2.0};
    CHECK(K.dx(-0.7, 0.3) == 0.0);
}

TEST_CASE("frozen heat equation holds to machine precision") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        FrozenKernel K{2.0 * uniform01(rng) - 1.0, 0.2 * uniform01(rng),
                       0.5 + 1.5 * uniform01(rng)};
        double x = K.xi + 6.0 * (uniform01(rng) - 0.5);
        double t = K.tau + 0.01 + uniform01(rng);
        double lhs = K.dt(x, t);
        double rhs = K.k_frozen * K.dxx(x, t);
        double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        CHECK(std::abs(lhs - rhs) / scale < 1e-12);
    }
}

TEST_CASE("space derivative matches central differences") {
    FrozenKernel K{0.2, 0.0, 0.8};
    const double h = 1e-5;
    for (double x : {-1.0, 0.0, 0.21, 1.5}) {
        double t = 0.4;
        double fd = (K.value(x + h, t) - K.value(x - h, t)) / (2.0 * h);
        double an = K.dx(x, t);
        double scale = std::max(std::abs(an), 1e-12);
        CHECK(std::abs(fd - an) / scale < 1e-6);
    }
}

TEST_CASE("time derivative matches central differences") {
    FrozenKernel K{0.0, 0.0, 1.2};
    const double h = 1e-6;
    for (double x : {-0.5, 0.3}) {
        double t = 0.5;
        double fd = (K.value(x, t + h) - K.value(x, t - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(K.dt(x, t)).epsilon(1e-6));
    }
}

TEST_CASE("holder quotient of the space derivative") {
    FrozenKernel K{0.4, 0.0, 1.0};
    const double t = 0.7;

    SUBCASE("odd symmetry about the source: equal magnitudes, doubled difference") {
        // dx is odd about xi, so symmetric points carry opposite equal values and
        // the quotient equals 2|dx| / |x2-x1|^alpha.
        const double a = 0.3, alpha = 0.5;
        CHECK(std::abs(K.dx(0.4 + a, t)) ==
              doctest::Approx(std::abs(K.dx(0.4 - a, t))).epsilon(1e-14));
        double expected = 2.0 * std::abs(K.dx(0.4 + a, t)) / std::pow(2.0 * a, alpha);
        CHECK(K.holder_quotient_dx(0.4 - a, 0.4 + a, t, alpha) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("alpha -> 0 recovers the plain difference") {
        double q = K.holder_quotient_dx(0.1, 0.9, t, 1e-12);
        CHECK(q == doctest::Approx(std::abs(K.dx(0.9, t) - K.dx(0.1, t))).epsilon(1e-9));
    }
    SUBCASE("random instances recompose from the parts") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 20; ++i) {
            double x1 = 2.0 * uniform01(rng) - 1.0;
            double x2 = x1 + 0.1 + uniform01(rng);
            double alpha = 0.1 + 0.8 * uniform01(rng);
            double expect = std::abs(K.dx(x2, t) - K.dx(x1, t)) /
                            std::pow(std::abs(x2 - x1), alpha);
            CHECK(K.holder_quotient_dx(x1, x2, t, alpha) == doctest::Approx(expect));
        }
    }
    SUBCASE("coincident points are rejected") {
        CHECK_THROWS_AS(K.holder_quotient_dx(0.2, 0.2, t, 0.5), std::invalid_argument);
    }
}

TEST_CASE("delta recovery against a smooth bump") {
    QuadratureConfig cfg;
    auto phi = [](double xi) {
        double z = xi / 0.8;
        return std::abs(z) < 1.0 ? std::exp(-1.0 / (1.0 - z * z)) : 0.0;
    };
    const double x = 0.2, k = 1.1;
    double prev = 1e300;
    for (double s : {1e-1, 1e-2, 1e-3}) {
        auto integrand = [&](double xi) {
            FrozenKernel K{xi, 0.0, k};
            return K.value(x, s) * phi(xi);
        };
        double width = std::sqrt(2.0 * k * s);
        double v = gaussian_space_integral(integrand, x, width, cfg, 0.1);
        double err = std::abs(v - phi(x));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("underflow flooring") {
    CHECK(safe_exp(-800.0) == 0.0);
    CHECK(safe_exp(-1.0) == doctest::Approx(std::exp(-1.0)));
    FrozenKernel K{0.0, 0.0, 1.0};
    CHECK(K.value(100.0, 1e-4) == 0.0);
}
