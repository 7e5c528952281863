#pragma once

#include <cstdint>
#include <vector>

#include "parmx/duhamel.hpp"

namespace parmx {

/// Uniform finite-difference grid on [-L, L] x [0, T].
struct FDGrid {
    double L = 10.0;
    int nx = 256;  // intervals; nodes nx+1
    int nt = 256;  // steps
    double dx() const { return 2.0 * L / nx; }
};

/// Smooth compactly supported test function: a product of bumps in x and t with
/// analytic first derivatives. Vanishes with its derivatives outside
/// (cx-rx, cx+rx) x (ct-rt, ct+rt).
struct BumpTestFunction {
    double cx = 0.0, rx = 1.0;
    double ct = 0.5, rt = 0.25;
    double amplitude = 1.0;

    double value(double x, double t) const;
    double dt(double x, double t) const;
    double dx(double x, double t) const;
};

/// Reproducibly random test functions with support strictly inside
/// (-L, L) x (t_min, T).
std::vector<BumpTestFunction> seeded_test_functions(int count, double L, double t_min,
                                                    double T, std::uint64_t seed);

/// Crank-Nicolson oracle for  w_t = k(x,t) w_xx - gamma w + f + G  with
/// homogeneous Dirichlet walls at +-L (sized so the walls are quiet). k is frozen
/// per time-slab midpoint, keeping second order for time-varying coefficients.
/// Returns the field sampled on the full grid including t = 0.
SolutionField crank_nicolson_solve(const ProblemSpec& spec, const FDGrid& grid);

/// ∫∫ [ -phi_t w + (k phi)_x w_x + gamma phi w - (f+G) phi ] dx dt over the
/// field's grid (tensor Simpson). Near zero certifies the weak-solution identity.
double weak_residual(const SolutionField& field, const ProblemSpec& spec,
                     const BumpTestFunction& phi);

/// Same residual normalized by the sum of the absolute values of its four
/// contributions; scale-free for pass/fail thresholds.
double weak_residual_normalized(const SolutionField& field, const ProblemSpec& spec,
                                const BumpTestFunction& phi);

/// max over the x panel of |w(x,t) - w0(x)| for each requested time (times must
/// be descending toward 0; each is solved pointwise via the Duhamel assembler).
std::vector<double> initial_trace_check(const FundamentalSolution& gamma_eval,
                                        const ProblemSpec& spec,
                                        const std::vector<double>& times,
                                        const std::vector<double>& x_panel);

}  // namespace parmx
