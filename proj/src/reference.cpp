#include "parmx/reference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace parmx {

namespace {

double bump(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - z * z));
}

double bump_d(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    double d = 1.0 - z * z;
    return bump(z) * (-2.0 * z / (d * d));
}

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace

double BumpTestFunction::value(double x, double t) const {
    return amplitude * bump((x - cx) / rx) * bump((t - ct) / rt);
}

double BumpTestFunction::dt(double x, double t) const {
    return amplitude * bump((x - cx) / rx) * bump_d((t - ct) / rt) / rt;
}

double BumpTestFunction::dx(double x, double t) const {
    return amplitude * bump_d((x - cx) / rx) * bump((t - ct) / rt) / rx;
}

std::vector<BumpTestFunction> seeded_test_functions(int count, double L, double t_min,
                                                    double T, std::uint64_t seed) {
    if (count <= 0) throw std::invalid_argument("seeded_test_functions: empty panel");
    std::mt19937_64 rng(seed);
    std::vector<BumpTestFunction> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        BumpTestFunction phi;
        phi.rx = L * (0.15 + 0.2 * uniform01(rng));
        phi.cx = (L - phi.rx - 0.05 * L) * (2.0 * uniform01(rng) - 1.0);
        double span = T - t_min;
        phi.rt = span * (0.15 + 0.15 * uniform01(rng));
        double lo = t_min + phi.rt + 0.02 * span;
        double hi = T - phi.rt - 0.02 * span;
        phi.ct = lo + (hi - lo) * uniform01(rng);
        phi.amplitude = 0.5 + uniform01(rng);
        out.push_back(phi);
    }
    return out;
}

SolutionField crank_nicolson_solve(const ProblemSpec& spec, const FDGrid& grid) {
    if (grid.nx < 16 || grid.nt < 16)
        throw std::invalid_argument("crank_nicolson_solve: grid too coarse (min 16)");
    const int n = grid.nx + 1;
    const double dx = grid.dx();
    const double dt = spec.T / grid.nt;
    const double L = grid.L;

    std::vector<double> w(n, 0.0);
    if (spec.w0)
        for (int i = 0; i < n; ++i) w[i] = spec.w0(-L + i * dx);
    w.front() = 0.0;
    w.back() = 0.0;

    SolutionField out;
    out.xs.resize(n);
    for (int i = 0; i < n; ++i) out.xs[i] = -L + i * dx;
    out.ts.resize(grid.nt + 1);
    for (int m = 0; m <= grid.nt; ++m) out.ts[m] = spec.T * m / grid.nt;
    const size_t total = static_cast<size_t>(n) * (grid.nt + 1);
    out.w.assign(total, 0.0);
    out.w_x.assign(total, 0.0);

    auto source = [&](double x, double t) {
        double s = 0.0;
        if (spec.f) s += spec.f(x, t);
        if (spec.G) s += spec.G(x, t);
        return s;
    };

    auto store = [&](int m) {
        for (int i = 0; i < n; ++i) out.w[out.idx(m, i)] = w[i];
        for (int i = 1; i + 1 < n; ++i)
            out.w_x[out.idx(m, i)] = (w[i + 1] - w[i - 1]) / (2.0 * dx);
        out.w_x[out.idx(m, 0)] = (w[1] - w[0]) / dx;
        out.w_x[out.idx(m, n - 1)] = (w[n - 1] - w[n - 2]) / dx;
    };
    store(0);

    std::vector<double> a(n), b(n), c(n), rhs(n), cp(n), dp(n);
    for (int m = 0; m < grid.nt; ++m) {
        const double t_mid = (m + 0.5) * dt;
        const double t_new = (m + 1) * dt;
        // theta = 1/2, coefficients frozen on the slab midpoint
        for (int i = 1; i + 1 < n; ++i) {
            const double x = -L + i * dx;
            const double r = spec.field(x, t_mid) * dt / (2.0 * dx * dx);
            const double g = 0.5 * dt * spec.gamma;
            a[i] = -r;
            b[i] = 1.0 + 2.0 * r + g;
            c[i] = -r;
            rhs[i] = (1.0 - 2.0 * r - g) * w[i] + r * (w[i + 1] + w[i - 1]) +
                     dt * source(x, t_mid);
        }
        b[0] = 1.0;
        c[0] = 0.0;
        rhs[0] = 0.0;
        a[n - 1] = 0.0;
        b[n - 1] = 1.0;
        rhs[n - 1] = 0.0;

        // Thomas sweep; diagonal dominance holds for k > 0, dt > 0.
        cp[0] = c[0] / b[0];
        dp[0] = rhs[0] / b[0];
        for (int i = 1; i < n; ++i) {
            const double denom = b[i] - a[i] * cp[i - 1];
            cp[i] = (i + 1 < n ? c[i] : 0.0) / denom;
            dp[i] = (rhs[i] - a[i] * dp[i - 1]) / denom;
        }
        w[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) w[i] = dp[i] - cp[i] * w[i + 1];
        (void)t_new;
        store(m + 1);
    }
    return out;
}

namespace {

// Simpson weights when the node count is odd, trapezoid otherwise.
std::vector<double> quad_weights(const std::vector<double>& nodes) {
    const size_t n = nodes.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    const double h = nodes[1] - nodes[0];
    if (n % 2 == 1 && n >= 3) {
        for (size_t i = 0; i + 2 < n; i += 2) {
            w[i] += h / 3.0;
            w[i + 1] += 4.0 * h / 3.0;
            w[i + 2] += h / 3.0;
        }
    } else {
        w[0] = w[n - 1] = 0.5 * h;
        for (size_t i = 1; i + 1 < n; ++i) w[i] = h;
    }
    return w;
}

struct ResidualParts {
    double total = 0.0;
    double scale = 0.0;
};

ResidualParts weak_residual_parts(const SolutionField& field, const ProblemSpec& spec,
                                  const BumpTestFunction& phi) {
    if (field.xs.size() < 3 || field.ts.size() < 3)
        throw std::invalid_argument("weak_residual: field grid too small");
    if (phi.cx - phi.rx < field.xs.front() || phi.cx + phi.rx > field.xs.back() ||
        phi.ct - phi.rt < field.ts.front() || phi.ct + phi.rt > field.ts.back())
        throw std::invalid_argument("weak_residual: test function support escapes the grid");

    const auto wx_weights = quad_weights(field.xs);
    const auto wt_weights = quad_weights(field.ts);

    double term_t = 0.0, term_flux = 0.0, term_zero = 0.0, term_src = 0.0;
    for (size_t it = 0; it < field.ts.size(); ++it) {
        const double t = field.ts[it];
        if (std::abs(t - phi.ct) >= phi.rt) continue;
        for (size_t ix = 0; ix < field.xs.size(); ++ix) {
            const double x = field.xs[ix];
            if (std::abs(x - phi.cx) >= phi.rx) continue;
            const double wq = wx_weights[ix] * wt_weights[it];
            const size_t k = field.idx(it, ix);
            const double pv = phi.value(x, t);
            const double k_val = spec.field(x, t);
            const double k_x = spec.field.evaluate_dx(x, t);
            double src = 0.0;
            if (spec.f) src += spec.f(x, t);
            if (spec.G) src += spec.G(x, t);
            term_t += wq * (-phi.dt(x, t) * field.w[k]);
            term_flux += wq * (k_x * pv + k_val * phi.dx(x, t)) * field.w_x[k];
            term_zero += wq * spec.gamma * pv * field.w[k];
            term_src += wq * (-src * pv);
        }
    }
    ResidualParts parts;
    parts.total = term_t + term_flux + term_zero + term_src;
    parts.scale = std::abs(term_t) + std::abs(term_flux) + std::abs(term_zero) +
                  std::abs(term_src);
    return parts;
}

}  // namespace

double weak_residual(const SolutionField& field, const ProblemSpec& spec,
                     const BumpTestFunction& phi) {
    return weak_residual_parts(field, spec, phi).total;
}

double weak_residual_normalized(const SolutionField& field, const ProblemSpec& spec,
                                const BumpTestFunction& phi) {
    ResidualParts parts = weak_residual_parts(field, spec, phi);
    if (parts.scale == 0.0) return 0.0;
    return std::abs(parts.total) / parts.scale;
}

std::vector<double> initial_trace_check(const FundamentalSolution& gamma_eval,
                                        const ProblemSpec& spec,
                                        const std::vector<double>& times,
                                        const std::vector<double>& x_panel) {
    if (!spec.w0) throw std::invalid_argument("initial_trace_check: no initial datum");
    DuhamelAssembler assembler(gamma_eval, spec);
    std::vector<double> errs;
    errs.reserve(times.size());
    for (double t : times) {
        double worst = 0.0;
        for (double x : x_panel) {
            double w = assembler.initial(x, t).value +
                       assembler.forcing(x, t, ForcingKind::cumulative_G).value +
                       assembler.forcing(x, t, ForcingKind::rough_f).value;
            worst = std::max(worst, std::abs(w - spec.w0(x)));
        }
        errs.push_back(worst);
    }
    return errs;
}

}  // namespace parmx
