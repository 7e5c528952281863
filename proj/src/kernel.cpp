#include "parmx/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace parmx {

double safe_exp(double a) {
    if (a < -745.0) return 0.0;
    return std::exp(a);
}

namespace {

inline void require_future(double t, double tau) {
    if (!(t > tau))
        throw std::domain_error("frozen kernel: undefined at or before the source time");
}

}  // namespace

double FrozenKernel::value(double x, double t) const {
    require_future(t, tau);
    const double dt = t - tau;
    const double z = x - xi;
    const double denom = 4.0 * k_frozen * dt;
    return safe_exp(-z * z / denom) / std::sqrt(M_PI * denom);
}

double FrozenKernel::dx(double x, double t) const {
    const double z = x - xi;
    return -z / (2.0 * k_frozen * (t - tau)) * value(x, t);
}

double FrozenKernel::dxx(double x, double t) const {
    const double dt = t - tau;
    const double z = x - xi;
    const double kd = 2.0 * k_frozen * dt;
    return (z * z / kd - 1.0) / kd * value(x, t);
}

double FrozenKernel::dt(double x, double t) const { return k_frozen * dxx(x, t); }

double FrozenKernel::holder_quotient_dx(double x1, double x2, double t,
                                        double alpha) const {
    if (x1 == x2)
        throw std::invalid_argument("holder_quotient_dx: points must be distinct");
    return std::abs(dx(x2, t) - dx(x1, t)) / std::pow(std::abs(x2 - x1), alpha);
}

}  // namespace parmx
