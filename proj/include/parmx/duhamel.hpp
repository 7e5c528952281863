#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "parmx/parametrix.hpp"

namespace parmx {

/// Cauchy data on the truncated line: diffusivity, zeroth-order coefficient,
/// rough forcing f, cumulative forcing G, initial datum, horizon and truncation
/// halfwidth. Null forcing callbacks mean identically zero.
struct ProblemSpec {
    CoefficientField field;
    double gamma = 0.0;
    SpaceTimeFn f;
    SpaceTimeFn G;
    std::function<double(double)> w0;
    std::function<double(double)> w0_prime;
    double T = 1.0;
    double L = 10.0;
};

/// Checks the data admissibility proxies: square-integrable tails of w0, w0' and
/// f(.,t) on the truncated domain. Throws std::invalid_argument with the failing
/// item named.
void validate_problem(const ProblemSpec& spec);

/// One Duhamel term and its x-derivative.
struct TermValue {
    double value = 0.0;
    double dx = 0.0;
};

enum class ForcingKind { rough_f, cumulative_G };

/// Evaluates the Duhamel terms. The bare-kernel part of Gamma integrates against
/// the data directly; the correction part goes through tables of the data-applied
/// density Psi(y,s) = ∫∫ Phi(y,s;xi,tau) data(xi,tau), built lazily once per
/// assembler, so that each node costs one extra kernel layer instead of nested
/// space-time quadratures. Safe for concurrent node evaluation.
class DuhamelAssembler {
public:
    DuhamelAssembler(const FundamentalSolution& gamma_eval, const ProblemSpec& spec);
    ~DuhamelAssembler();

    TermValue initial(double x, double t) const;
    TermValue forcing(double x, double t, ForcingKind kind) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// W(x,t) = ∫ Gamma(x,t;xi,0) w0(xi) dxi, with the derivative through Gamma_x.
TermValue initial_term(const FundamentalSolution& gamma_eval, const ProblemSpec& spec,
                       double x, double t);

/// ∫_0^t ∫ Gamma(x,t;xi,tau) q(xi,tau) dxi dtau for q = f or G. The time endpoint
/// at tau -> t is handled with exponent 1/2 for the value and 3/4 for the
/// derivative.
TermValue forcing_term(const FundamentalSolution& gamma_eval, const ProblemSpec& spec,
                       double x, double t, ForcingKind kind);

/// Sampled solution with the per-node Duhamel decomposition retained.
/// Row-major layout: index = it * xs.size() + ix.
struct SolutionField {
    std::vector<double> xs, ts;
    std::vector<double> w, w_x;
    std::vector<double> initial, forcing_g, forcing_f;
    std::vector<double> initial_dx, forcing_g_dx, forcing_f_dx;

    size_t idx(size_t it, size_t ix) const { return it * xs.size() + ix; }
    double sup_abs_w() const;
};

/// Assemble all three terms and derivatives at every grid node. Nodes are
/// independent work items; rows are processed in time order so cached forcing
/// tables stay warm. jobs <= 0 means hardware concurrency.
SolutionField solve_on_grid(const FundamentalSolution& gamma_eval,
                            const ProblemSpec& spec, const std::vector<double>& xs,
                            const std::vector<double>& ts, int jobs = 0);

/// CSV with columns x,t,w,w_x,W,W_G,W_f,W_x,W_Gx,W_fx (LF endings, '.' decimal).
void write_solution_csv(const SolutionField& field, std::ostream& os);

std::vector<double> linspace(double a, double b, int n);

}  // namespace parmx
