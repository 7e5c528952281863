#include "parmx/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace parmx {

void QuadratureConfig::validate() const {
    if (space_halfwidth_sigmas < 4.0)
        throw std::invalid_argument("quadrature: space_halfwidth_sigmas must be >= 4");
    if (space_points < 2 || time_points < 2)
        throw std::invalid_argument("quadrature: need at least 2 Gauss points per panel");
    if (time_panels < 2)
        throw std::invalid_argument("quadrature: need at least 2 time panels");
    if (!(singular_exponent_cap >= 0.0 && singular_exponent_cap < 1.0))
        throw std::invalid_argument("quadrature: singular_exponent_cap must lie in [0,1)");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument("quadrature: tolerances must be positive");
}

namespace {

// Nodes by Newton iteration on P_n with the usual Chebyshev initial guess.
GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
    return it->second;
}

double gauss_panels(const std::function<double(double)>& f, double a, double b,
                    int panels, int points_per_panel) {
    if (!(b > a)) return 0.0;
    const GaussRule& rule = gauss_rule(points_per_panel);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double acc = 0.0;
        for (int i = 0; i < points_per_panel; ++i)
            acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        total += 0.5 * h * acc;
    }
    return total;
}

namespace {

double window_integral(const std::function<double(double)>& f, double lo, double hi,
                       double panel_scale, int points, double max_panel) {
    if (!(hi > lo)) return 0.0;
    double ps = panel_scale;
    if (max_panel > 0.0) ps = std::min(ps, max_panel);
    int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / ps)));
    const GaussRule& rule = gauss_rule(points);
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double mid = a + 0.5 * h;
        double acc = 0.0;
        for (int i = 0; i < points; ++i) {
            const double xi = mid + 0.5 * h * rule.nodes[i];
            const double v = f(xi);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "gaussian_space_integral: non-finite integrand at xi=" << xi;
                throw std::runtime_error(msg.str());
            }
            acc += rule.weights[i] * v;
        }
        total += 0.5 * h * acc;
    }
    return total;
}

}  // namespace

double gaussian_space_integral(const std::function<double(double)>& f, double center,
                               double width, const QuadratureConfig& cfg,
                               double max_panel, double* truncation_estimate) {
    if (!(width > 0.0))
        throw std::invalid_argument("gaussian_space_integral: width must be positive");
    const double m = cfg.space_halfwidth_sigmas;
    const double lo = center - m * width;
    const double hi = center + m * width;
    const double value = window_integral(f, lo, hi, width, cfg.space_points, max_panel);
    if (truncation_estimate) {
        // Outermost panel pair as a crude tail proxy.
        const double edge = window_integral(f, lo, lo + width, width, cfg.space_points, max_panel) +
                            window_integral(f, hi - width, hi, width, cfg.space_points, max_panel);
        *truncation_estimate = std::abs(edge);
    }
    return value;
}

double gaussian_space_integral_clipped(const std::function<double(double)>& f,
                                       double center, double width, double lo, double hi,
                                       const QuadratureConfig& cfg, double max_panel) {
    if (!(width > 0.0))
        throw std::invalid_argument("gaussian_space_integral: width must be positive");
    const double m = cfg.space_halfwidth_sigmas;
    const double a = std::max(lo, center - m * width);
    const double b = std::min(hi, center + m * width);
    return window_integral(f, a, b, width, cfg.space_points, max_panel);
}

namespace {

// Composite Gauss on [0, umax] with panel sizes graded geometrically toward 0,
// where the substituted integrand may still carry a Hölder modulus.
double graded_panels(const std::function<double(double)>& g, double umax, int panels,
                     int points) {
    const GaussRule& rule = gauss_rule(points);
    const double ratio = 0.55;
    double total = 0.0;
    double hi = umax;
    for (int p = 0; p < panels; ++p) {
        const double lo = (p == panels - 1) ? 0.0 : hi * ratio;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double acc = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * g(mid + half * rule.nodes[i]);
        total += half * acc;
        hi = lo;
    }
    return total;
}

// ∫_{t0}^{t1} (t1-τ)^(-p) φ(τ) dτ with τ = t1 - u^(1/(1-p)); integrand becomes
// φ(τ(u)) / (1-p) on u in [0, (t1-t0)^(1-p)].
double singular_right(const std::function<double(double)>& phi, double t0, double t1,
                      double p, int panels, int points) {
    const double q = 1.0 / (1.0 - p);
    const double umax = std::pow(t1 - t0, 1.0 - p);
    auto g = [&](double u) {
        double tau = t1 - std::pow(u, q);
        tau = std::clamp(tau, t0, t1);
        return phi(tau) / (1.0 - p);
    };
    return graded_panels(g, umax, panels, points);
}

double singular_left(const std::function<double(double)>& phi, double t0, double t1,
                     double p, int panels, int points) {
    const double q = 1.0 / (1.0 - p);
    const double umax = std::pow(t1 - t0, 1.0 - p);
    auto g = [&](double u) {
        double tau = t0 + std::pow(u, q);
        tau = std::clamp(tau, t0, t1);
        return phi(tau) / (1.0 - p);
    };
    return graded_panels(g, umax, panels, points);
}

}  // namespace

double singular_time_integral(const std::function<double(double)>& phi, double t0,
                              double t1, double p, const QuadratureConfig& cfg) {
    if (!(t1 > t0)) return 0.0;
    if (p < 0.0 || p >= std::max(cfg.singular_exponent_cap, 0.0))
        throw std::invalid_argument(
            "singular_time_integral: endpoint power must lie in [0, cap); the "
            "singularity is not integrable enough to be treated in time alone");
    return singular_right(phi, t0, t1, p, cfg.time_panels, cfg.time_points);
}

double singular_time_integral_left(const std::function<double(double)>& phi, double t0,
                                   double t1, double p, const QuadratureConfig& cfg) {
    if (!(t1 > t0)) return 0.0;
    if (p < 0.0 || p >= std::max(cfg.singular_exponent_cap, 0.0))
        throw std::invalid_argument(
            "singular_time_integral: endpoint power must lie in [0, cap)");
    return singular_left(phi, t0, t1, p, cfg.time_panels, cfg.time_points);
}

double spacetime_volterra_layer(const std::function<double(double, double)>& kernel,
                                const std::function<double(double, double)>& density,
                                double t0, double t1, const LayerGeometry& geom,
                                const QuadratureConfig& cfg) {
    if (!(t1 > t0)) return 0.0;
    if (geom.left_exponent >= cfg.singular_exponent_cap ||
        geom.right_exponent >= cfg.singular_exponent_cap)
        throw std::invalid_argument("spacetime_volterra_layer: endpoint exponent too strong");

    auto slice = [&](double s) -> double {
        SliceWindow win = geom.window(s);
        if (!(win.width > 0.0)) return 0.0;
        auto f = [&](double y) { return kernel(y, s) * density(y, s); };
        const double m = cfg.space_halfwidth_sigmas;
        return window_integral(f, win.center - m * win.width, win.center + m * win.width,
                               win.width, cfg.space_points, geom.max_space_panel);
    };

    // slice(s) is the full integrand; the singular integrators apply the endpoint
    // weight themselves, so hand them the compensated factor.
    auto evaluate = [&](int panels) {
        const double mid = 0.5 * (t0 + t1);
        auto left_phi = [&](double s) {
            return slice(s) * std::pow(s - t0, geom.left_exponent);
        };
        auto right_phi = [&](double s) {
            return slice(s) * std::pow(t1 - s, geom.right_exponent);
        };
        double left = geom.left_exponent > 0.0
                          ? singular_left(left_phi, t0, mid, geom.left_exponent, panels,
                                          cfg.time_points)
                          : gauss_panels(slice, t0, mid, panels, cfg.time_points);
        double right = geom.right_exponent > 0.0
                           ? singular_right(right_phi, mid, t1, geom.right_exponent,
                                            panels, cfg.time_points)
                           : gauss_panels(slice, mid, t1, panels, cfg.time_points);
        return left + right;
    };

    int panels = std::max(2, geom.time_panels);
    double coarse = evaluate(panels);
    double fine = evaluate(2 * panels);
    double err = std::abs(fine - coarse);
    if (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(fine))) {
        double finer = evaluate(4 * panels);
        err = std::abs(finer - fine);
        fine = finer;
        if (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(fine))) {
            std::ostringstream msg;
            msg << "spacetime_volterra_layer: refinement cap reached, estimated error "
                << err << " exceeds tolerance on [" << t0 << ", " << t1 << "]";
            throw std::runtime_error(msg.str());
        }
    }
    return fine;
}

}  // namespace parmx
