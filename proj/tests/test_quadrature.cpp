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

TEST_CASE("gaussian window integral reproduces the Gaussian mass") {
    QuadratureConfig cfg;
    double v = gaussian_space_integral([](double xi) { return std::exp(-(xi - 2.0) * (xi - 2.0)); },
                                       2.0, 1.0, cfg);
    CHECK(v == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
}

TEST_CASE("odd integrand about the center cancels") {
    QuadratureConfig cfg;
    double v = gaussian_space_integral(
        [](double xi) { return xi * std::exp(-xi * xi); }, 0.0, 1.0, cfg);
    CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("gaussian polynomial moments match closed forms") {
    QuadratureConfig cfg;
    // ∫ z^2 e^{-z^2} = sqrt(pi)/2, ∫ z^4 e^{-z^2} = 3 sqrt(pi)/4
    double m2 = gaussian_space_integral(
        [](double z) { return z * z * std::exp(-z * z); }, 0.0, 1.0, cfg);
    double m4 = gaussian_space_integral(
        [](double z) { return z * z * z * z * std::exp(-z * z); }, 0.0, 1.0, cfg);
    CHECK(m2 == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-10));
    CHECK(m4 == doctest::Approx(3.0 * std::sqrt(M_PI) / 4.0).epsilon(1e-10));
}

TEST_CASE("non-finite integrand reports the offending abscissa") {
    QuadratureConfig cfg;
    CHECK_THROWS_WITH_AS(
        gaussian_space_integral([](double xi) { return xi > 0.5 ? 1.0 / 0.0 : 1.0; }, 0.0,
                                1.0, cfg),
        doctest::Contains("non-finite"), std::runtime_error);
}

TEST_CASE("singular time integral closed forms") {
    QuadratureConfig cfg;
    auto one = [](double) { return 1.0; };
    CHECK(singular_time_integral(one, 0.0, 1.0, 0.5, cfg) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(singular_time_integral(one, 0.0, 0.7, 0.0, cfg) == doctest::Approx(0.7).epsilon(1e-12));
    // ∫_0^1 (1-tau)^(-1/2) tau dtau = 4/3
    auto lin = [](double tau) { return tau; };
    CHECK(singular_time_integral(lin, 0.0, 1.0, 0.5, cfg) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("non-integrable endpoint powers are rejected") {
    QuadratureConfig cfg;
    auto one = [](double) { return 1.0; };
    CHECK_THROWS_AS(singular_time_integral(one, 0.0, 1.0, 1.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(singular_time_integral(one, 0.0, 1.0, 0.97, cfg), std::invalid_argument);
}

TEST_CASE("singular time integral converges at order >= 2 in panel count") {
    QuadratureConfig ref;
    ref.time_points = 2;  // low per-panel order so panel refinement drives the error
    ref.time_panels = 64;
    auto phi = [](double tau) { return std::exp(2.0 * tau) * std::cos(tau); };
    double truth = singular_time_integral(phi, 0.0, 1.0, 0.5, ref);

    QuadratureConfig c2 = ref, c4 = ref;
    c2.time_panels = 2;
    c4.time_panels = 4;
    double e2 = std::abs(singular_time_integral(phi, 0.0, 1.0, 0.5, c2) - truth);
    double e4 = std::abs(singular_time_integral(phi, 0.0, 1.0, 0.5, c4) - truth);
    REQUIRE(e4 > 0.0);
    double order = std::log2(e2 / e4);
    CHECK(order >= 2.0);
}

TEST_CASE("volterra layer with zero density vanishes") {
    QuadratureConfig cfg;
    LayerGeometry geom;
    geom.window = [](double) { return SliceWindow{0.0, 1.0}; };
    double v = spacetime_volterra_layer([](double, double) { return 1.0; },
                                        [](double, double) { return 0.0; }, 0.0, 1.0,
                                        geom, cfg);
    CHECK(v == 0.0);
}

TEST_CASE("volterra layer reproduces the heat-kernel semigroup identity") {
    // ∫_tau^t ∫ H(x-y, t-s) H(y-xi, s-tau) dy ds = (t - tau) H(x-xi, t-tau)
    QuadratureConfig cfg;
    const double k = 0.7, x = 0.3, xi = -0.4, tau = 0.1, t = 0.9;
    auto kernel = [&](double y, double s) {
        FrozenKernel K{y, s, k};
        return K.value(x, t);
    };
    auto density = [&](double y, double s) {
        FrozenKernel K{xi, tau, k};
        return K.value(y, s);
    };
    LayerGeometry geom;
    geom.left_exponent = 0.0;   // the space-integrated slice is constant in s here
    geom.right_exponent = 0.0;
    geom.window = [&](double s) {
        double v1 = 2.0 * k * (t - s), v2 = 2.0 * k * (s - tau);
        if (v1 <= 0.0 || v2 <= 0.0) return SliceWindow{};
        return SliceWindow{(x * v2 + xi * v1) / (v1 + v2), std::sqrt(v1 * v2 / (v1 + v2))};
    };
    double v = spacetime_volterra_layer(kernel, density, tau, t, geom, cfg);
    FrozenKernel K{xi, tau, k};
    double expected = (t - tau) * K.value(x, t);
    CHECK(v == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("volterra layer of a unit box is its area") {
    QuadratureConfig cfg;
    const double B = 1.5;
    LayerGeometry geom;
    geom.window = [&](double) { return SliceWindow{0.0, B / cfg.space_halfwidth_sigmas}; };
    double v = spacetime_volterra_layer([](double, double) { return 1.0; },
                                        [](double, double) { return 1.0; }, 0.0, 2.0,
                                        geom, cfg);
    CHECK(v == doctest::Approx(2.0 * 2.0 * B).epsilon(1e-12));
}

TEST_CASE("volterra layer refinement keeps randomized smooth cases within tolerance") {
    QuadratureConfig tight;
    tight.rel_tol = 1e-9;
    std::mt19937_64 rng(0xabcdef12ULL);
    int bad = 0;
    const int cases = 100;
    for (int c = 0; c < cases; ++c) {
        double a = 0.5 + uniform01(rng), b = 0.3 + uniform01(rng);
        double w = 0.5 + uniform01(rng);
        auto kernel = [&](double y, double s) { return std::exp(-a * y * y) * (1.0 + 0.3 * s); };
        auto density = [&](double y, double s) { return std::cos(b * y) + 0.1 * s; };
        LayerGeometry geom;
        geom.window = [&](double) { return SliceWindow{0.0, w}; };
        QuadratureConfig loose = tight;
        loose.rel_tol = 1e-6;
        double v1 = spacetime_volterra_layer(kernel, density, 0.0, 1.0, geom, loose);
        double v2 = spacetime_volterra_layer(kernel, density, 0.0, 1.0, geom, tight);
        if (std::abs(v1 - v2) > std::max(loose.abs_tol, loose.rel_tol * std::abs(v2)) * 10.0)
            ++bad;
    }
    CHECK(bad <= cases / 100);
}

TEST_CASE("config validation rejects nonsense") {
    QuadratureConfig cfg;
    cfg.space_halfwidth_sigmas = 2.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}
