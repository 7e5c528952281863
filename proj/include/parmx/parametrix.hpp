#pragma once

#include <memory>
#include <span>
#include <vector>

#include "parmx/coeffs.hpp"
#include "parmx/kernel.hpp"
#include "parmx/quadrature.hpp"

namespace parmx {

/// Knobs for the correction-density series and its memoized tables.
struct ParametrixConfig {
    int max_series_terms = 6;         // cost guard caps this at 12
    double term_tol = 1e-8;           // stop once a term's sampled sup norm drops below
    double min_time_separation = 1e-6;

    int force_phi_sign = 0;           // 0: resolve by residual probe; otherwise +-1

    // Resolution of the scaled correction-density tables.
    int table_space_points = 129;     // nodes across the similarity variable u
    double table_space_halfwidth = 6.0;
    int table_time_points = 33;       // nodes along the graded lag axis
    int source_lattice_points = 49;   // source positions across the spatial domain
    int source_time_points = 17;      // source times, for time-varying coefficients only

    void validate() const;
};

/// Sample point for Gaussian-envelope bound fitting: a kernel-like value observed at
/// space-time offset (dx, dt) from its source.
struct BoundSample {
    double dx = 0.0;
    double dt = 0.0;
    double value = 0.0;
};

struct GaussianBoundFit {
    double C = 0.0;
    double d = 0.0;
    int violations = 0;
};

/// Smallest C such that |value| <= C * dt^(-singular_power) * exp(-d dx^2 / (4 dt))
/// holds at every sample, with d chosen as the strongest decay rate in (0, d_max]
/// that does not inflate C (grid search). The returned violation count is checked
/// against the fitted envelope and must be zero.
GaussianBoundFit fit_gaussian_bound(std::span<const BoundSample> samples,
                                    double singular_power, double d_max);

/// Fundamental solution of  w_t - k(x,t) w_xx + gamma w = 0  built from the
/// frozen-coefficient parametrix: Gamma = H + ∫∫ H Phi, where the correction
/// density Phi solves a weakly singular Volterra equation and is expanded in a
/// truncated iterated-kernel series. Immutable after construction; evaluations at
/// distinct points are safe to run concurrently (internal tables build lazily,
/// once, behind per-entry latches).
class FundamentalSolution {
public:
    FundamentalSolution(CoefficientField field, double gamma, double horizon,
                        double domain_halfwidth, ParametrixConfig pcfg = {},
                        QuadratureConfig qcfg = {});
    ~FundamentalSolution();

    FundamentalSolution(const FundamentalSolution&) = delete;
    FundamentalSolution& operator=(const FundamentalSolution&) = delete;

    /// Residual of the frozen kernel under the true operator:
    ///   (k(xi,tau) - k(y,s)) * H_xx + gamma * H,
    /// the seed of the correction series (up to the resolved sign).
    double defect_kernel(double y, double s, double xi, double tau) const;

    /// Correction density Phi(y,s; xi,tau), from the memoized series tables.
    double correction_density(double y, double s, double xi, double tau) const;

    /// Same value without the separation floor. Data-applied densities integrate
    /// through the s -> tau endpoint (the floor governs pointwise Gamma use only).
    double density_for_assembly(double y, double s, double xi, double tau) const;

    /// Gamma and its x-derivative. Both carry x only through H and H_x.
    double value(double x, double t, double xi, double tau) const;
    double dx(double x, double t, double xi, double tau) const;

    /// The layer ∫∫ H Phi alone (value minus the bare kernel), and its x-derivative.
    /// `lean` trades accuracy for speed; Duhamel assembly uses it for the small
    /// correction part while keeping the closed-form part at full precision.
    double correction_value(double x, double t, double xi, double tau,
                            bool lean = false) const;
    double correction_dx(double x, double t, double xi, double tau,
                         bool lean = false) const;

    int phi_sign() const;
    bool series_is_zero() const;
    /// Sampled sup norm of the last series term over all tables built so far.
    double last_term_sup() const;

    const CoefficientField& field() const { return field_; }
    double gamma() const { return gamma_; }
    double horizon() const { return horizon_; }
    const ParametrixConfig& parametrix_config() const { return pcfg_; }
    const QuadratureConfig& quadrature_config() const { return qcfg_; }

private:
    struct Bank;
    CoefficientField field_;
    double gamma_;
    double horizon_;
    double domain_halfwidth_;
    ParametrixConfig pcfg_;
    QuadratureConfig qcfg_;
    std::unique_ptr<Bank> bank_;
};

}  // namespace parmx
