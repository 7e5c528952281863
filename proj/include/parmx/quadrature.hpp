#pragma once

#include <functional>
#include <span>
#include <vector>

namespace parmx {

/// Tunables for the Gaussian-window and weakly singular integrators.
struct QuadratureConfig {
    double space_halfwidth_sigmas = 8.0;  // truncate Gaussian windows at this many widths
    int space_points = 8;                 // Gauss-Legendre points per space panel
    int time_points = 6;                  // Gauss-Legendre points per time panel
    int time_panels = 8;                  // panels for the substituted time integrals
    double singular_exponent_cap = 0.95;  // reject time singularities at or above this power
    double abs_tol = 1e-10;
    double rel_tol = 1e-7;

    void validate() const;  // throws std::invalid_argument on nonsense
};

/// n-point Gauss-Legendre rule on [-1, 1]. Cached; thread-safe after first use.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_rule(int n);

/// Integrate f over [a, b] with composite Gauss-Legendre panels.
double gauss_panels(const std::function<double(double)>& f, double a, double b,
                    int panels, int points_per_panel);

/// Integral of f over [center - m*width, center + m*width], m = space_halfwidth_sigmas,
/// with panels sized to resolve a Gaussian of the given width. The integrand f carries
/// the Gaussian weight itself; `width` only fixes the window and panel scale.
/// `max_panel` caps the absolute panel size (0 = no cap) so that structure finer than
/// the window still gets resolved. A non-finite sample aborts with the offending
/// abscissa in the message. Optional truncation estimate = |outermost panel pair|.
double gaussian_space_integral(const std::function<double(double)>& f, double center,
                               double width, const QuadratureConfig& cfg,
                               double max_panel = 0.0,
                               double* truncation_estimate = nullptr);

/// Windowed variant: same panel policy but the window is additionally clipped to
/// [lo, hi] (used when the integrand vanishes outside a data support).
double gaussian_space_integral_clipped(const std::function<double(double)>& f,
                                       double center, double width, double lo, double hi,
                                       const QuadratureConfig& cfg, double max_panel = 0.0);

/// ∫_{t0}^{t1} (t1 - τ)^(-p) φ(τ) dτ for 0 <= p < 1 and smooth-ish φ, via the
/// substitution u = (t1 - τ)^(1-p) (exact for constant φ) and composite Gauss on u.
/// Rejects p >= singular_exponent_cap: the endpoint would not be integrable enough.
double singular_time_integral(const std::function<double(double)>& phi, double t0,
                              double t1, double p, const QuadratureConfig& cfg);

/// Same integral with the singular weight at the left endpoint t0 instead.
double singular_time_integral_left(const std::function<double(double)>& phi, double t0,
                                   double t1, double p, const QuadratureConfig& cfg);

/// Gaussian window of one time slice of a space-time layer: integrate over
/// [center - m*width, center + m*width]. width <= 0 marks a negligible slice.
struct SliceWindow {
    double center = 0.0;
    double width = 0.0;
};

/// Geometry hints for spacetime_volterra_layer. The integrand of the layer is
/// kernel(y,s) * density(y,s); after the space integral the time slice behaves like
/// (s-t0)^(-left_exponent) near t0 and (t1-s)^(-right_exponent) near t1, and both
/// singularities are removed by power substitutions before Gauss panels are applied.
struct LayerGeometry {
    std::function<SliceWindow(double s)> window;
    double left_exponent = 0.0;
    double right_exponent = 0.0;
    int time_panels = 4;        // panels per half, in the substituted variable
    double max_space_panel = 0.0;
};

/// Iterated integral ∫_{t0}^{t1} ∫_R kernel(y,s) density(y,s) dy ds, space first,
/// then the two-sided singular time integral. Refines the time panels once and
/// reports failure to meet rel_tol/abs_tol after the refinement cap.
double spacetime_volterra_layer(const std::function<double(double, double)>& kernel,
                                const std::function<double(double, double)>& density,
                                double t0, double t1, const LayerGeometry& geom,
                                const QuadratureConfig& cfg);

}  // namespace parmx
