#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "parmx/reference.hpp"

using namespace parmx;

namespace {

ProblemSpec gaussian_spec() {
    ProblemSpec spec;
    spec.field = constant_field(1.0);
    spec.T = 0.4;
    spec.L = 10.0;
    spec.w0 = [](double x) { return std::exp(-0.5 * x * x); };
    spec.w0_prime = [](double x) { return -x * std::exp(-0.5 * x * x); };
    return spec;
}

double gaussian_exact(double x, double t) {
    const double var = 1.0 + 2.0 * t;
    return std::sqrt(1.0 / var) * std::exp(-0.5 * x * x / var);
}

}  // namespace

TEST_CASE("finite differences keep zero data at zero") {
    ProblemSpec spec;
    spec.field = constant_field(1.0);
    spec.T = 0.3;
    spec.L = 5.0;
    SolutionField sol = crank_nicolson_solve(spec, FDGrid{5.0, 64, 64});
    for (double v : sol.w) CHECK(v == 0.0);
}

TEST_CASE("finite differences track the Gaussian spreading law") {
    ProblemSpec spec = gaussian_spec();
    SolutionField sol = crank_nicolson_solve(spec, FDGrid{10.0, 512, 512});
    double worst = 0.0;
    for (size_t it = 0; it < sol.ts.size(); it += 64) {
        for (size_t ix = 0; ix < sol.xs.size(); ix += 8) {
            worst = std::max(worst, std::abs(sol.w[sol.idx(it, ix)] -
                                             gaussian_exact(sol.xs[ix], sol.ts[it])));
        }
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("finite-difference refinement converges at second order") {
    // Manufactured instance: w* = e^{-x^2/2}(1 + t/2) under a smoothstep diffusivity.
    CoefficientField field = smoothstep_field(0.6, 1.4, -0.8, 1.6);
    const double gamma = 0.5;
    auto wstar = [](double x, double t) { return std::exp(-0.5 * x * x) * (1.0 + 0.5 * t); };

    ProblemSpec spec;
    spec.field = field;
    spec.gamma = gamma;
    spec.T = 0.4;
    spec.L = 9.0;
    spec.w0 = [&](double x) { return wstar(x, 0.0); };
    spec.w0_prime = [&](double x) { return -x * wstar(x, 0.0); };
    spec.f = [&, field](double x, double t) {
        double wt = 0.5 * std::exp(-0.5 * x * x);
        double wxx = (x * x - 1.0) * wstar(x, t);
        return wt - field(x, t) * wxx + gamma * wstar(x, t);
    };

    auto sup_error = [&](int n) {
        SolutionField sol = crank_nicolson_solve(spec, FDGrid{9.0, n, n});
        double worst = 0.0;
        for (size_t ix = 0; ix < sol.xs.size(); ++ix)
            worst = std::max(worst, std::abs(sol.w[sol.idx(n, ix)] -
                                             wstar(sol.xs[ix], spec.T)));
        return worst;
    };
    double e128 = sup_error(128);
    double e256 = sup_error(256);
    double e512 = sup_error(512);
    double order1 = std::log2(e128 / e256);
    double order2 = std::log2(e256 / e512);
    CHECK(order1 >= 1.8);
    CHECK(order2 >= 1.8);
}

TEST_CASE("the oracle field satisfies the weak identity") {
    ProblemSpec spec = gaussian_spec();
    spec.f = [](double x, double t) { return std::exp(-x * x) * (1.0 + 0.5 * t); };
    SolutionField sol = crank_nicolson_solve(spec, FDGrid{10.0, 512, 512});

    auto phis = seeded_test_functions(12, spec.L, 0.0, spec.T, 1234);
    for (const auto& phi : phis) {
        CHECK(weak_residual_normalized(sol, spec, phi) < 1e-3);
    }

    SUBCASE("zero-amplitude test function gives a zero residual") {
        BumpTestFunction phi{0.0, 2.0, 0.2, 0.1, 0.0};
        CHECK(weak_residual(sol, spec, phi) == 0.0);
    }
    SUBCASE("a bump perturbation inflates the residual by an order of magnitude") {
        BumpTestFunction phi = phis.front();
        double base = std::abs(weak_residual(sol, spec, phi));
        SolutionField bad = sol;
        BumpTestFunction dent{phi.cx, phi.rx, phi.ct, phi.rt, 0.1};
        for (size_t it = 0; it < bad.ts.size(); ++it)
            for (size_t ix = 0; ix < bad.xs.size(); ++ix) {
                bad.w[bad.idx(it, ix)] += dent.value(bad.xs[ix], bad.ts[it]);
                bad.w_x[bad.idx(it, ix)] += dent.dx(bad.xs[ix], bad.ts[it]);
            }
        double perturbed = std::abs(weak_residual(bad, spec, phi));
        CHECK(perturbed > 10.0 * base);
    }
    SUBCASE("support escaping the grid is rejected") {
        BumpTestFunction phi{9.9, 1.0, 0.2, 0.1, 1.0};
        CHECK_THROWS_AS(weak_residual(sol, spec, phi), std::invalid_argument);
    }
}

TEST_CASE("seeded test functions are reproducible and inside the domain") {
    auto a = seeded_test_functions(20, 8.0, 0.01, 0.5, 777);
    auto b = seeded_test_functions(20, 8.0, 0.01, 0.5, 777);
    REQUIRE(a.size() == 20);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].cx == b[i].cx);
        CHECK(a[i].ct == b[i].ct);
        CHECK(a[i].cx - a[i].rx > -8.0);
        CHECK(a[i].cx + a[i].rx < 8.0);
        CHECK(a[i].ct - a[i].rt > 0.01);
        CHECK(a[i].ct + a[i].rt < 0.5);
    }
    CHECK_THROWS_AS(seeded_test_functions(0, 8.0, 0.0, 0.5, 1), std::invalid_argument);
}

TEST_CASE("initial trace errors decrease toward zero time") {
    ProblemSpec spec = gaussian_spec();
    ParametrixConfig pcfg;
    pcfg.table_space_points = 65;
    pcfg.table_time_points = 21;
    pcfg.source_lattice_points = 9;
    pcfg.max_series_terms = 3;
    FundamentalSolution E(spec.field, 0.0, spec.T, spec.L, pcfg);
    std::vector<double> panel = linspace(-2.0, 2.0, 7);
    auto errs = initial_trace_check(E, spec, {1e-1, 1e-2, 1e-3}, panel);
    REQUIRE(errs.size() == 3);
    CHECK(errs[0] > errs[1]);
    CHECK(errs[1] > errs[2]);
    CHECK(errs[2] < 1e-2);

    SUBCASE("zero data trace vanishes identically") {
        ProblemSpec zero = spec;
        zero.w0 = [](double) { return 0.0; };
        zero.w0_prime = [](double) { return 0.0; };
        auto z = initial_trace_check(E, zero, {1e-1, 1e-2}, panel);
        for (double e : z) CHECK(e == 0.0);
    }
}

TEST_CASE("bump test function derivatives are analytic") {
    BumpTestFunction phi{0.3, 1.2, 0.25, 0.15, 1.7};
    const double h = 1e-6;
    for (double x : {-0.5, 0.3, 1.1}) {
        for (double t : {0.15, 0.25, 0.35}) {
            double fdx = (phi.value(x + h, t) - phi.value(x - h, t)) / (2 * h);
            double fdt = (phi.value(x, t + h) - phi.value(x, t - h)) / (2 * h);
            CHECK(phi.dx(x, t) == doctest::Approx(fdx).epsilon(1e-5).scale(1.0));
            CHECK(phi.dt(x, t) == doctest::Approx(fdt).epsilon(1e-5).scale(1.0));
        }
    }
    // vanishes with derivatives outside the support
    CHECK(phi.value(0.3 + 1.3, 0.25) == 0.0);
    CHECK(phi.dx(0.3 + 1.3, 0.25) == 0.0);
    CHECK(phi.dt(0.3, 0.25 + 0.16) == 0.0);
}
