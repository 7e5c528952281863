#include "parmx/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "parmx/quadrature.hpp"

namespace parmx {

namespace {

double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;
}

}  // namespace

CoefficientField constant_field(double k0) {
    if (!(k0 > 0.0)) throw std::invalid_argument("constant_field: k0 must be positive");
    CoefficientField f;
    f.evaluate = [k0](double, double) { return k0; };
    f.evaluate_dx = [](double, double) { return 0.0; };
    f.k_lower = f.k_upper = k0;
    f.holder_constant = 0.0;
    f.time_invariant = true;
    f.name = "constant";
    return f;
}

CoefficientField smoothstep_field(double k_min, double k_max, double x0, double width) {
    if (!(k_min > 0.0) || !(k_max >= k_min))
        throw std::invalid_argument("smoothstep_field: need 0 < k_min <= k_max");
    if (!(width > 0.0)) throw std::invalid_argument("smoothstep_field: width must be positive");
    auto k = [=](double x, double) {
        double z = std::clamp((x - x0) / width, 0.0, 1.0);
        return k_min + (k_max - k_min) * z * z * (3.0 - 2.0 * z);
    };
    auto kx = [=](double x, double) {
        double z = (x - x0) / width;
        if (z <= 0.0 || z >= 1.0) return 0.0;
        return (k_max - k_min) * 6.0 * z * (1.0 - z) / width;
    };
    CoefficientField f;
    f.evaluate = k;
    f.evaluate_dx = kx;
    f.k_lower = k_min;
    f.k_upper = k_max;
    // Lipschitz on a bounded window dominates any 1/2-Hölder seminorm there.
    f.holder_constant = estimate_holder_constant(k, 0.5, std::abs(x0) + width + 8.0, 1.0,
                                                 10000, 0x5eedULL);
    f.time_invariant = true;
    f.name = "smoothstep";
    return f;
}

bool LeslieParameters::satisfies_parodi(double tol) const {
    return std::abs((alpha2 + alpha3) - (alpha6 - alpha5)) <= tol;
}

double eval_g(const LeslieParameters& p, double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    const double s2 = s * s, c2 = c * c;
    return p.alpha1 * s2 * c2 + 0.5 * (p.alpha5 - p.alpha2) * s2 +
           0.5 * (p.alpha3 + p.alpha6) * c2 + 0.5 * p.alpha4;
}

double eval_g_dtheta(const LeslieParameters& p, double theta) {
    const double s2t = std::sin(2.0 * theta);
    return 0.5 * p.alpha1 * std::sin(4.0 * theta) +
           0.5 * (p.alpha5 - p.alpha2 - p.alpha3 - p.alpha6) * s2t;
}

double eval_h(const LeslieParameters& p, double theta) {
    return 0.5 * (p.gamma1() + p.gamma2() * std::cos(2.0 * theta));
}

double eval_h_trig_form(const LeslieParameters& p, double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    return p.alpha3 * c * c - p.alpha2 * s * s;
}

double eval_c2(const LeslieParameters& p, double theta) {
    if (!(p.K1 > 0.0) || !(p.K3 > 0.0))
        throw std::invalid_argument("eval_c2: Frank constants must be positive");
    const double s = std::sin(theta), c = std::cos(theta);
    return p.K1 * c * c + p.K3 * s * s;
}

CoefficientField field_from_theta(const LeslieParameters& p, const SpaceTimeFn& theta_field) {
    // Degeneracy gate over a whole period: a parameter set whose g dips to zero
    // anywhere is rejected outright.
    const int n = 4096;
    double g_period_min = eval_g(p, 0.0);
    for (int i = 1; i < n; ++i)
        g_period_min = std::min(g_period_min, eval_g(p, 2.0 * M_PI * i / n));
    if (!(g_period_min > 0.0))
        throw std::invalid_argument(
            "field_from_theta: g(theta) is not positively bounded below; the diffusion "
            "coefficient would degenerate");

    // Bounds from the range the prescribed angle actually visits (desk-scale box).
    double th_min = theta_field(0.0, 0.0), th_max = th_min;
    for (int i = 0; i <= 400; ++i) {
        for (int j = 0; j <= 8; ++j) {
            double th = theta_field(-20.0 + 40.0 * i / 400, j / 8.0);
            th_min = std::min(th_min, th);
            th_max = std::max(th_max, th);
        }
    }
    double g_min = eval_g(p, th_min), g_max = g_min;
    for (int i = 0; i <= 2048; ++i) {
        double g = eval_g(p, th_min + (th_max - th_min) * i / 2048);
        g_min = std::min(g_min, g);
        g_max = std::max(g_max, g);
    }

    auto k = [p, theta_field](double x, double t) { return eval_g(p, theta_field(x, t)); };
    auto kx = [p, theta_field](double x, double t) {
        const double h = 1e-5;
        double theta_x = (theta_field(x + h, t) - theta_field(x - h, t)) / (2.0 * h);
        return eval_g_dtheta(p, theta_field(x, t)) * theta_x;
    };

    CoefficientField f;
    f.evaluate = k;
    f.evaluate_dx = kx;
    f.k_lower = g_min;
    f.k_upper = g_max;
    f.holder_constant = estimate_holder_constant(k, 0.5, 16.0, 1.0, 10000, 0x7177ULL);

    // A prescribed angle that ignores t gives a time-invariant diffusivity.
    std::mt19937_64 rng(0x1234abcdULL);
    bool invariant = true;
    for (int i = 0; i < 64 && invariant; ++i) {
        double x = 32.0 * (uniform01(rng) - 0.5);
        double t1 = uniform01(rng), t2 = uniform01(rng);
        if (std::abs(k(x, t1) - k(x, t2)) > 1e-13 * std::max(1.0, std::abs(k(x, t1))))
            invariant = false;
    }
    f.time_invariant = invariant;
    f.name = "g_of_theta";
    return f;
}

double estimate_holder_constant(const SpaceTimeFn& k, double exponent, double x_halfwidth,
                                double t_max, int pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int i = 0; i < pairs; ++i) {
        double t = t_max * uniform01(rng);
        double x1 = x_halfwidth * (2.0 * uniform01(rng) - 1.0);
        // Mix separations across scales so short-range roughness is represented.
        double sep = x_halfwidth * std::pow(2.0, -12.0 * uniform01(rng));
        double x2 = x1 + (uniform01(rng) < 0.5 ? sep : -sep);
        double q = std::abs(k(x2, t) - k(x1, t)) / std::pow(std::abs(x2 - x1), exponent);
        best = std::max(best, q);
        // Same-place pairs in t with the parabolic exponent.
        double t2 = std::min(t_max, t + t_max * std::pow(2.0, -12.0 * uniform01(rng)));
        if (t2 > t) {
            double qt = std::abs(k(x1, t2) - k(x1, t)) / std::pow(t2 - t, 0.5 * exponent);
            best = std::max(best, qt);
        }
    }
    return best;
}

double kx_l2_bound(const CoefficientField& field, double x_halfwidth, double t_max) {
    QuadratureConfig cfg;
    double sup = 0.0;
    for (int j = 0; j <= 8; ++j) {
        double t = t_max * j / 8.0;
        auto f = [&](double x) {
            double v = field.evaluate_dx(x, t);
            return v * v;
        };
        double v = gauss_panels(f, -x_halfwidth, x_halfwidth, 256, 4);
        sup = std::max(sup, v);
    }
    return std::sqrt(sup);
}

}  // namespace parmx
