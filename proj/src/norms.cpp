#include "parmx/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace parmx {

SampledField SampledField::from_w(const SolutionField& f) {
    return {f.xs, f.ts, f.w};
}
SampledField SampledField::from_wx(const SolutionField& f) {
    return {f.xs, f.ts, f.w_x};
}

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace

namespace {

// Strided view of a field along one direction (subsample by `stride` in that
// direction only).
SampledField subsample(const SampledField& field, Direction dir, size_t stride) {
    if (stride <= 1) return field;
    SampledField out;
    if (dir == Direction::x) {
        for (size_t i = 0; i < field.xs.size(); i += stride) out.xs.push_back(field.xs[i]);
        out.ts = field.ts;
        out.values.reserve(out.xs.size() * out.ts.size());
        for (size_t it = 0; it < field.ts.size(); ++it)
            for (size_t i = 0; i < field.xs.size(); i += stride)
                out.values.push_back(field.values[field.idx(it, i)]);
    } else {
        out.xs = field.xs;
        for (size_t j = 0; j < field.ts.size(); j += stride) out.ts.push_back(field.ts[j]);
        out.values.reserve(out.xs.size() * out.ts.size());
        for (size_t j = 0; j < field.ts.size(); j += stride)
            for (size_t i = 0; i < field.xs.size(); ++i)
                out.values.push_back(field.values[field.idx(j, i)]);
    }
    return out;
}

}  // namespace

double holder_seminorm(const SampledField& field, double alpha, Direction dir,
                       int pair_budget, std::uint64_t seed) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0, 1]");
    const size_t nx = field.xs.size(), nt = field.ts.size();
    const size_t lines = (dir == Direction::x) ? nt : nx;
    const size_t len = (dir == Direction::x) ? nx : nt;
    if (len < 2 || lines < 1) throw std::invalid_argument("holder_seminorm: degenerate grid");

    const auto& coords = (dir == Direction::x) ? field.xs : field.ts;
    auto value = [&](size_t line, size_t j) {
        return (dir == Direction::x) ? field.values[field.idx(line, j)]
                                     : field.values[field.idx(j, line)];
    };

    int nbins = 0;
    for (size_t sep = 1; sep < len; sep *= 2) ++nbins;
    const int per_bin = std::max(8, pair_budget / std::max(1, nbins) /
                                        std::max<int>(1, static_cast<int>(lines)));

    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (size_t line = 0; line < lines; ++line) {
        for (size_t lo = 1; lo < len; lo *= 2) {
            const size_t hi = std::min(2 * lo - 1, len - 1);
            // Two separations per bin (the dyadic anchor plus one randomized), each
            // with a deterministic sweep of start points under the budget.
            for (int rep = 0; rep < 2; ++rep) {
                size_t sep = (rep == 0)
                                 ? lo
                                 : lo + static_cast<size_t>(uniform01(rng) * (hi - lo + 1));
                sep = std::min(sep, len - 1);
                const size_t nstarts = len - sep;
                const size_t step = std::max<size_t>(1, nstarts / per_bin);
                for (size_t start = 0; start < nstarts; start += step) {
                    const double dv = value(line, start + sep) - value(line, start);
                    const double dc = std::abs(coords[start + sep] - coords[start]);
                    if (dc > 0.0) best = std::max(best, std::abs(dv) / std::pow(dc, alpha));
                }
            }
        }
    }
    return best;
}

ExponentFit fit_holder_exponent(const SampledField& field, Direction dir,
                                std::span<const double> alpha_grid, int pair_budget) {
    if (alpha_grid.empty())
        throw std::invalid_argument("fit_holder_exponent: empty alpha grid");
    const size_t len = (dir == Direction::x) ? field.xs.size() : field.ts.size();

    std::vector<size_t> strides;
    for (size_t s = 16; s >= 1; s /= 2)
        if (len / s >= 9) strides.push_back(s);
    if (strides.size() < 2)
        throw std::invalid_argument("fit_holder_exponent: field too small for a ladder");

    ExponentFit fit;
    for (double alpha : alpha_grid) {
        double s_coarse = holder_seminorm(subsample(field, dir, strides.front()), alpha,
                                          dir, pair_budget);
        double s_fine = holder_seminorm(field, alpha, dir, pair_budget);
        double ref = std::max(s_coarse, 1e-300);
        if (std::abs(s_fine - s_coarse) / ref < 0.25) {
            if (!fit.stable_found || alpha > fit.alpha) {
                fit.alpha = alpha;
                fit.stable_found = true;
            }
        }
    }
    return fit;
}

double seminorm_growth(const SampledField& coarse, const SampledField& fine,
                       double alpha, Direction dir, int pair_budget) {
    double sc = holder_seminorm(coarse, alpha, dir, pair_budget);
    double sf = holder_seminorm(fine, alpha, dir, pair_budget);
    if (sc == 0.0) return sf == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return sf / sc;
}

namespace {

std::vector<double> simpson_weights(const std::vector<double>& nodes) {
    const size_t n = nodes.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    bool uniform = true;
    const double h = nodes[1] - nodes[0];
    for (size_t i = 1; i + 1 < n; ++i)
        if (std::abs((nodes[i + 1] - nodes[i]) - h) > 1e-12 * std::abs(h)) uniform = false;
    if (uniform && n % 2 == 1 && n >= 3) {
        for (size_t i = 0; i + 2 < n; i += 2) {
            w[i] += h / 3.0;
            w[i + 1] += 4.0 * h / 3.0;
            w[i + 2] += h / 3.0;
        }
        return w;
    }
    for (size_t i = 0; i + 1 < n; ++i) {
        const double hh = nodes[i + 1] - nodes[i];
        w[i] += 0.5 * hh;
        w[i + 1] += 0.5 * hh;
    }
    return w;
}

}  // namespace

double l2_on_slab(const SampledField& field, double delta) {
    std::vector<double> ts;
    std::vector<size_t> rows;
    for (size_t it = 0; it < field.ts.size(); ++it) {
        if (field.ts[it] <= delta * (1.0 + 1e-12)) {
            ts.push_back(field.ts[it]);
            rows.push_back(it);
        }
    }
    if (ts.size() < 2) return 0.0;
    const auto wt = simpson_weights(ts);
    const auto wx = simpson_weights(field.xs);
    double acc = 0.0;
    for (size_t r = 0; r < rows.size(); ++r) {
        double slab = 0.0;
        for (size_t ix = 0; ix < field.xs.size(); ++ix) {
            const double v = field.values[field.idx(rows[r], ix)];
            slab += wx[ix] * v * v;
        }
        acc += wt[r] * slab;
    }
    return std::sqrt(std::max(acc, 0.0));
}

L2DecayStudy l2_smallness_study(const FundamentalSolution& gamma_eval,
                                const ProblemSpec& spec,
                                const std::vector<double>& deltas, int jobs) {
    if (deltas.empty()) throw std::invalid_argument("l2_smallness_study: no deltas");
    for (size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw std::invalid_argument("l2_smallness_study: deltas must decrease");

    // One geometric time ladder from below the smallest delta up to the horizon
    // serves every slab; nested node sets make the norms monotone by construction.
    const double t_lo = 0.125 * deltas.back();
    const double t_hi = spec.T;
    const int n_ladder = 33;
    std::vector<double> ts(n_ladder);
    for (int j = 0; j < n_ladder; ++j)
        ts[j] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(j) / (n_ladder - 1));
    std::vector<double> xs = linspace(-spec.L, spec.L, 33);

    SolutionField sol = solve_on_grid(gamma_eval, spec, xs, ts, jobs);

    SampledField wf{sol.xs, sol.ts, sol.forcing_f};
    SampledField wfx{sol.xs, sol.ts, sol.forcing_f_dx};
    SampledField wgx{sol.xs, sol.ts, sol.forcing_g_dx};

    L2DecayStudy study;
    for (double d : deltas)
        study.rows.push_back(
            {d, l2_on_slab(wf, d), l2_on_slab(wfx, d), l2_on_slab(wgx, d)});
    study.omega_t = {spec.T, l2_on_slab(wf, spec.T), l2_on_slab(wfx, spec.T),
                     l2_on_slab(wgx, spec.T)};
    return study;
}

std::vector<LemmaSample> lemma_sample_set(int n_random, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<LemmaSample> out;
    out.reserve(n_random + 40);
    for (int i = 0; i < n_random; ++i) {
        double lambda = uniform01(rng);
        if (lambda == 0.0) lambda = 1.0;
        // Mix small, order-one and large arguments.
        double pick = uniform01(rng);
        double a;
        if (pick < 0.4)
            a = 50.0 * uniform01(rng);
        else if (pick < 0.8)
            a = std::pow(10.0, -8.0 + 8.0 * uniform01(rng));
        else
            a = std::pow(10.0, 2.0 + 3.0 * uniform01(rng));
        out.push_back({a, lambda});
    }
    for (int j = 1; j <= 19; ++j) {
        double lambda = j / 20.0;
        out.push_back({0.0, lambda});
        out.push_back({1.0 - lambda, lambda});  // the extremum of the bound's gap
    }
    out.push_back({0.0, 1.0});
    out.push_back({1.0, 1.0});
    return out;
}

int one_minus_exp_bound_violations(std::span<const LemmaSample> samples) {
    int violations = 0;
    for (const auto& s : samples) {
        if (!(s.a >= 0.0) || !(s.lambda > 0.0) || !(s.lambda <= 1.0)) {
            ++violations;
            continue;
        }
        const double lhs = -std::expm1(-s.a);
        const double rhs = std::pow(s.a, s.lambda) / s.lambda;
        if (lhs > rhs) ++violations;
    }
    return violations;
}

void NormReport::write_csv(std::ostream& os) const {
    os << "metric,value\n";
    os << "linf," << linf << "\n";
    os << "l2," << l2 << "\n";
    for (const auto& [alpha, v] : holder_seminorms)
        os << "holder_alpha_" << alpha << "," << v << "\n";
    os << "fitted_exponent_x," << fitted_exponent_x << "\n";
    os << "fitted_exponent_t," << fitted_exponent_t << "\n";
    os << "pairs_sampled," << pairs_sampled << "\n";
}

void NormReport::pretty_print(std::ostream& os) const {
    os << "L_inf = " << linf << ", L2 = " << l2 << "\n";
    for (const auto& [alpha, v] : holder_seminorms)
        os << "  [.]_{C^" << alpha << "} = " << v << "\n";
    os << "  fitted exponents: x " << fitted_exponent_x << ", t " << fitted_exponent_t
       << " (" << pairs_sampled << " pairs)\n";
}

NormReport measure_field(const SampledField& field, std::span<const double> alphas,
                         Direction dir, int pair_budget) {
    NormReport rep;
    for (double v : field.values) rep.linf = std::max(rep.linf, std::abs(v));
    rep.l2 = l2_on_slab(field, field.ts.empty() ? 0.0 : field.ts.back());
    for (double a : alphas)
        rep.holder_seminorms[a] = holder_seminorm(field, a, dir, pair_budget);
    rep.pairs_sampled = static_cast<long>(alphas.size()) * pair_budget;
    return rep;
}

}  // namespace parmx
