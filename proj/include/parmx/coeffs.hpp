#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace parmx {

using SpaceTimeFn = std::function<double(double x, double t)>;

/// Diffusivity field k(x,t) with positivity bounds, Hölder data and x-derivative.
/// Evaluation is pure; fields are immutable after construction and safe to share
/// across threads.
struct CoefficientField {
    SpaceTimeFn evaluate;
    SpaceTimeFn evaluate_dx;
    double k_lower = 1.0;
    double k_upper = 1.0;
    double holder_exponent = 0.5;   // in x; the exponent in t is half of it
    double holder_constant = 0.0;
    bool time_invariant = true;
    std::string name = "constant";

    double operator()(double x, double t) const { return evaluate(x, t); }
    bool is_constant() const { return k_lower == k_upper; }
};

/// k ≡ k0.
CoefficientField constant_field(double k0);

/// k(x) = k_min + (k_max - k_min) * s((x - x0)/width) with the C^1 smoothstep
/// s(z) = 3z^2 - 2z^3 clamped to [0,1]. Time-invariant.
CoefficientField smoothstep_field(double k_min, double k_max, double x0, double width);

/// Leslie viscosities and Frank elastic constants of the Poiseuille reduction.
/// gamma1 = alpha3 - alpha2 and gamma2 = alpha6 - alpha5 always; the two closed
/// forms of h agree exactly when the Parodi relation alpha2 + alpha3 = alpha6 - alpha5
/// holds, which physical parameter sets satisfy.
struct LeslieParameters {
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double alpha4 = 2.0, alpha5 = 0.0, alpha6 = 0.0;
    double K1 = 1.0, K3 = 1.0;

    double gamma1() const { return alpha3 - alpha2; }
    double gamma2() const { return alpha6 - alpha5; }
    bool satisfies_parodi(double tol = 1e-12) const;
};

/// g(theta): the effective viscosity that acts as a diffusion coefficient.
double eval_g(const LeslieParameters& p, double theta);
/// dg/dtheta, used for chain-rule derivatives of g∘theta fields.
double eval_g_dtheta(const LeslieParameters& p, double theta);
/// h(theta) = (gamma1 + gamma2 cos 2theta)/2; equals alpha3 cos^2 - alpha2 sin^2
/// under Parodi.
double eval_h(const LeslieParameters& p, double theta);
double eval_h_trig_form(const LeslieParameters& p, double theta);
/// c^2(theta) = K1 cos^2 + K3 sin^2. Rejects nonpositive Frank constants.
double eval_c2(const LeslieParameters& p, double theta);

/// Diffusivity field g(theta(x,t)) from a prescribed director angle. Bounds come
/// from dense sampling of g over a whole period; rejects parameter sets whose g
/// is not positively bounded below (the diffusion would degenerate).
CoefficientField field_from_theta(const LeslieParameters& p, const SpaceTimeFn& theta_field);

/// Sampled Hölder seminorm estimate over random same-time and same-place pairs;
/// used when no analytic constant is available.
double estimate_holder_constant(const SpaceTimeFn& k, double exponent, double x_halfwidth,
                                double t_max, int pairs, std::uint64_t seed);

/// sqrt of sup_t ∫ k_x(x,t)^2 dx over the truncated domain; part of the
/// admissibility gate on coefficient fields.
double kx_l2_bound(const CoefficientField& field, double x_halfwidth, double t_max);

}  // namespace parmx
