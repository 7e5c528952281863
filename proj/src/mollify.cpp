#include "parmx/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "parmx/quadrature.hpp"

namespace parmx {

namespace {

double bump_raw(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - z * z));
}

// 1 / ∫ bump_raw over [-1,1]; all derivatives vanish at the endpoints so plain
// Gauss panels converge fast.
double bump_norm() {
    static const double c = [] {
        double mass = gauss_panels([](double z) { return bump_raw(z); }, -1.0, 1.0, 64, 8);
        return 1.0 / mass;
    }();
    return c;
}

}  // namespace

double mollifier_kernel(double z, const MollifierConfig& cfg) {
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("mollifier: epsilon must be positive");
    return bump_norm() * bump_raw(z / cfg.epsilon) / cfg.epsilon;
}

SpaceTimeFn mollify_f(const SpaceTimeFn& f, const MollifierConfig& cfg) {
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("mollifier: epsilon must be positive");
    const double eps = cfg.epsilon;
    const double c = bump_norm();
    SpaceTimeFn base = f;
    return [base, eps, c](double x, double t) {
        auto integrand = [&](double v) { return c * bump_raw(v) * base(x - eps * v, t); };
        return gauss_panels(integrand, -1.0, 1.0, 16, 6);
    };
}

double build_G(const SpaceTimeFn& f, double lower, double x, double t) {
    if (x <= lower) return 0.0;
    auto sq = [&](double z) {
        double v = f(z, t);
        return v * v;
    };
    int panels = std::max(8, static_cast<int>(std::ceil((x - lower) / 0.25)));
    return gauss_panels(sq, lower, x, panels, 5);
}

double build_G_eps(const SpaceTimeFn& f, const MollifierConfig& cfg, double lower,
                   double x, double t) {
    return build_G(mollify_f(f, cfg), lower, x, t);
}

namespace {

// Per-t sampled table with cubic interpolation and clamped continuation. A small
// FIFO cache keeps memory bounded when many distinct quadrature times stream
// through (rows are processed in time order, so old slices never come back).
class SliceCache {
public:
    SliceCache(SpaceTimeFn q, double lo, double hi, int n, bool cumulative_square)
        : q_(std::move(q)), lo_(lo), hi_(hi), n_(n), cumsq_(cumulative_square) {}

    double value(double x, double t) const {
        std::shared_ptr<const std::vector<double>> table = fetch(t);
        const auto& v = *table;
        const double h = (hi_ - lo_) / (n_ - 1);
        double fx = (x - lo_) / h;
        if (fx <= 0.0) return v.front();
        if (fx >= n_ - 1) return v.back();
        int i0 = static_cast<int>(std::floor(fx));
        double f = fx - i0;
        auto tap = [&](int i) { return v[std::clamp(i, 0, n_ - 1)]; };
        double a = tap(i0 - 1), b = tap(i0), c = tap(i0 + 1), d = tap(i0 + 2);
        return b + 0.5 * f * (c - a + f * (2 * a - 5 * b + 4 * c - d + f * (3 * (b - c) + d - a)));
    }

private:
    std::shared_ptr<const std::vector<double>> fetch(double t) const {
        {
            std::shared_lock lock(mtx_);
            auto it = tables_.find(t);
            if (it != tables_.end()) return it->second;
        }
        auto table = std::make_shared<std::vector<double>>(build(t));
        std::unique_lock lock(mtx_);
        auto [it, inserted] = tables_.emplace(t, table);
        if (inserted) {
            order_.push_back(t);
            while (order_.size() > 256) {
                tables_.erase(order_.front());
                order_.pop_front();
            }
        }
        return it->second;
    }

    std::vector<double> build(double t) const {
        std::vector<double> v(n_);
        const double h = (hi_ - lo_) / (n_ - 1);
        if (!cumsq_) {
            for (int i = 0; i < n_; ++i) v[i] = q_(lo_ + i * h, t);
            return v;
        }
        // Prefix integral of q^2 with Simpson on node pairs (midpoint sampled).
        v[0] = 0.0;
        double prev = q_(lo_, t);
        double prev_sq = prev * prev;
        for (int i = 1; i < n_; ++i) {
            double xm = lo_ + (i - 0.5) * h;
            double xr = lo_ + i * h;
            double qm = q_(xm, t), qr = q_(xr, t);
            v[i] = v[i - 1] + h / 6.0 * (prev_sq + 4.0 * qm * qm + qr * qr);
            prev_sq = qr * qr;
        }
        return v;
    }

    SpaceTimeFn q_;
    double lo_, hi_;
    int n_;
    bool cumsq_;
    mutable std::shared_mutex mtx_;
    mutable std::map<double, std::shared_ptr<const std::vector<double>>> tables_;
    mutable std::deque<double> order_;
};

}  // namespace

SpaceTimeFn cached_in_x(SpaceTimeFn q, double lo, double hi, int points) {
    if (points < 9 || !(hi > lo))
        throw std::invalid_argument("cached_in_x: bad table geometry");
    auto cache = std::make_shared<SliceCache>(std::move(q), lo, hi, points, false);
    return [cache](double x, double t) { return cache->value(x, t); };
}

SpaceTimeFn cached_cumulative_square(SpaceTimeFn q, double lower, double hi, int points) {
    if (points < 9 || !(hi > lower))
        throw std::invalid_argument("cached_cumulative_square: bad table geometry");
    auto cache = std::make_shared<SliceCache>(std::move(q), lower, hi, points, true);
    return [cache](double x, double t) { return cache->value(x, t); };
}

MollifyStudy convergence_study(const FundamentalSolution& gamma_eval,
                               const ProblemSpec& spec,
                               const std::vector<double>& epsilons,
                               const std::vector<double>& xs,
                               const std::vector<double>& ts, int jobs) {
    if (epsilons.size() < 2)
        throw std::invalid_argument("convergence_study: need at least two epsilons");
    for (size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("convergence_study: epsilons must decrease strictly");
    if (!spec.f)
        throw std::invalid_argument("convergence_study: the problem has no forcing to mollify");

    const int table_n =
        std::max(2049, static_cast<int>(std::ceil(16.0 * 2.0 * spec.L / epsilons.back())));

    MollifyStudy study;
    SolutionField prev;
    bool have_prev = false;
    for (size_t i = 0; i < epsilons.size(); ++i) {
        MollifierConfig mc{epsilons[i]};
        ProblemSpec eps_spec = spec;
        SpaceTimeFn f_eps_raw = mollify_f(spec.f, mc);
        eps_spec.f = cached_in_x(f_eps_raw, -spec.L, spec.L, table_n);
        if (spec.G)
            eps_spec.G = cached_cumulative_square(eps_spec.f, -spec.L, spec.L, table_n);

        SolutionField sol = solve_on_grid(gamma_eval, eps_spec, xs, ts, jobs);

        MollifyStudyRow row;
        row.epsilon = epsilons[i];
        double gap2 = 0.0;
        for (double t : {0.25 * spec.T, 0.5 * spec.T, spec.T}) {
            auto diff2 = [&](double z) {
                double d = eps_spec.f(z, t) - spec.f(z, t);
                return d * d;
            };
            gap2 = std::max(gap2, gauss_panels(diff2, -spec.L, spec.L, 512, 4));
        }
        row.data_l2_gap = std::sqrt(gap2);
        if (have_prev) {
            double sup = 0.0;
            for (size_t k = 0; k < sol.w.size(); ++k)
                sup = std::max(sup, std::abs(sol.w[k] - prev.w[k]));
            row.solution_sup_gap = sup;
        }
        study.rows.push_back(row);
        prev = std::move(sol);
        have_prev = true;
    }

    study.cauchy = true;
    for (size_t i = 2; i < study.rows.size(); ++i)
        if (study.rows[i].solution_sup_gap > study.rows[i - 1].solution_sup_gap)
            study.cauchy = false;
    return study;
}

}  // namespace parmx
