#pragma once

namespace parmx {

/// Heat kernel with the diffusivity frozen at a source point (xi, tau):
///   value(x,t) = (4 pi k (t-tau))^(-1/2) exp(-(x-xi)^2 / (4 k (t-tau))),
/// normalized to unit mass so that dt() == k_frozen * dxx() exactly.
struct FrozenKernel {
    double xi = 0.0;
    double tau = 0.0;
    double k_frozen = 1.0;

    double value(double x, double t) const;
    double dx(double x, double t) const;
    double dxx(double x, double t) const;
    double dt(double x, double t) const;

    /// |dx(x2,t) - dx(x1,t)| / |x2 - x1|^alpha, the sampled Hölder quotient of the
    /// space derivative. Rejects coincident points.
    double holder_quotient_dx(double x1, double x2, double t, double alpha) const;
};

/// exp with the underflow floor: arguments below -745 return exactly 0.
double safe_exp(double a);

}  // namespace parmx
