#pragma once

#include <vector>

#include "parmx/duhamel.hpp"

namespace parmx {

/// Standard bump mollifier rho(z) = c exp(-1/(1-z^2)) on |z|<1, scaled to radius
/// epsilon and unit mass.
struct MollifierConfig {
    double epsilon = 0.1;
};

/// Unit-mass bump kernel rho_eps(z); vanishes for |z| >= epsilon.
double mollifier_kernel(double z, const MollifierConfig& cfg);

/// Mollification in x only; t rides along as a parameter:
///   f_eps(x,t) = ∫ rho_eps(x - z) f(z,t) dz.
SpaceTimeFn mollify_f(const SpaceTimeFn& f, const MollifierConfig& cfg);

/// G(x,t) = ∫_lower^x f(z,t)^2 dz on the truncated domain. Nondecreasing in x and
/// nonnegative; tends to the total squared mass once x passes the support of f.
double build_G(const SpaceTimeFn& f, double lower, double x, double t);

/// As build_G with f replaced by its mollification.
double build_G_eps(const SpaceTimeFn& f, const MollifierConfig& cfg, double lower,
                   double x, double t);

/// Wrap q(x,t) in a per-t sampled table over [lo, hi] (cubic interpolation,
/// clamped continuation outside). Thread-safe; bounded table cache. Lets rough or
/// nested-quadrature data enter the solver hot loops at O(1) cost.
SpaceTimeFn cached_in_x(SpaceTimeFn q, double lo, double hi, int points);

/// Cached version of x -> ∫_lower^x q(z,t)^2 dz, same table machinery. The value
/// continues as a constant above the table range (cumulative mass) and as zero
/// below it.
SpaceTimeFn cached_cumulative_square(SpaceTimeFn q, double lower, double hi, int points);

struct MollifyStudyRow {
    double epsilon = 0.0;
    double data_l2_gap = 0.0;      // || f_eps - f ||_L2 on the truncated domain
    double solution_sup_gap = 0.0; // sup gap to the previous epsilon's solution (0 for the first)
};

struct MollifyStudy {
    std::vector<MollifyStudyRow> rows;
    bool cauchy = false;  // successive solution gaps nonincreasing
};

/// Solve the problem with data (f_eps, G_eps) along a decreasing epsilon sequence
/// and report data distances and successive solution sup-gaps on the given grid.
MollifyStudy convergence_study(const FundamentalSolution& gamma_eval,
                               const ProblemSpec& spec,
                               const std::vector<double>& epsilons,
                               const std::vector<double>& xs,
                               const std::vector<double>& ts, int jobs = 0);

}  // namespace parmx
