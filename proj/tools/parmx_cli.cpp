// Command-line front end: solve | verify | study over JSON problem configs.
// Exit codes: 0 pass, 2 config error, 3 numerical failure, 4 assertion failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "parmx/mollify.hpp"
#include "parmx/norms.hpp"
#include "parmx/parallel.hpp"
#include "parmx/reference.hpp"
#include "parmx/runconfig.hpp"

using namespace parmx;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitAssert = 4;

struct CheckTable {
    std::ostringstream body;
    int failures = 0;

    void row(const std::string& name, bool pass, const std::string& detail) {
        body << (pass ? "PASS  " : "FAIL  ") << name << "  " << detail << "\n";
        if (!pass) ++failures;
    }
};

int cmd_solve(const RunConfig& cfg, const fs::path& out_dir) {
    ProblemSpec spec = cfg.problem();
    auto E = cfg.make_evaluator(spec);
    SolutionField sol =
        solve_on_grid(*E, spec, cfg.grid_xs(spec), cfg.grid_ts(spec), cfg.jobs());

    auto csv = cfg.open_output(out_dir, "solution.csv");
    write_solution_csv(sol, csv);

    auto plot = cfg.open_output(out_dir, "solution_plot.gp");
    write_solution_plot_script(plot, "solution.csv");

    auto alphas_x = cfg.holder_alphas(Direction::x);
    NormReport report = measure_field(SampledField::from_w(sol), alphas_x, Direction::x,
                                      cfg.holder_pair_budget());
    auto norms_csv = cfg.open_output(out_dir, "norms.csv");
    report.write_csv(norms_csv);
    report.pretty_print(std::cout);
    std::cout << "wrote " << (out_dir / "solution.csv").string() << "\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out_dir) {
    ProblemSpec spec = cfg.problem();
    auto E = cfg.make_evaluator(spec);
    CheckTable table;

    // Oracle agreement on the configured grid.
    {
        std::vector<double> xs = cfg.grid_xs(spec);
        std::vector<double> ts = cfg.grid_ts(spec);
        SolutionField duh = solve_on_grid(*E, spec, xs, ts, cfg.jobs());
        FDGrid fd{spec.L, cfg.cn_nx(), cfg.cn_nt()};
        SolutionField cn = crank_nicolson_solve(spec, fd);

        double sup_ref = 0.0, sup_err = 0.0;
        for (size_t it = 0; it < ts.size(); ++it) {
            for (size_t ix = 0; ix < xs.size(); ++ix) {
                // sample the CN field by bilinear interpolation
                double x = xs[ix], t = ts[it];
                double fx = (x + spec.L) / fd.dx();
                double ft = t / (spec.T / fd.nt);
                size_t i0 = std::min(static_cast<size_t>(fx), static_cast<size_t>(fd.nx - 1));
                size_t j0 = std::min(static_cast<size_t>(ft), static_cast<size_t>(fd.nt - 1));
                double ax = fx - i0, at = ft - j0;
                double v00 = cn.w[cn.idx(j0, i0)], v01 = cn.w[cn.idx(j0, i0 + 1)];
                double v10 = cn.w[cn.idx(j0 + 1, i0)], v11 = cn.w[cn.idx(j0 + 1, i0 + 1)];
                double ref = (1 - at) * ((1 - ax) * v00 + ax * v01) +
                             at * ((1 - ax) * v10 + ax * v11);
                sup_ref = std::max(sup_ref, std::abs(ref));
                sup_err = std::max(sup_err, std::abs(ref - duh.w[duh.idx(it, ix)]));
            }
        }
        double rel = sup_ref > 0.0 ? sup_err / sup_ref : sup_err;
        std::ostringstream d;
        d << "rel Linf " << rel << " (tol " << cfg.oracle_tolerance() << ")";
        table.row("oracle_agreement", rel <= cfg.oracle_tolerance(), d.str());

        // Weak residuals against the seeded panel.
        auto phis = seeded_test_functions(cfg.test_function_count(), spec.L,
                                          ts.front(), spec.T, cfg.test_function_seed());
        double worst = 0.0;
        for (const auto& phi : phis)
            worst = std::max(worst, weak_residual_normalized(duh, spec, phi));
        std::ostringstream dw;
        dw << "max normalized residual " << worst << " over " << phis.size() << " phis";
        table.row("weak_residual", worst <= 5e-3, dw.str());
    }

    // Gaussian bound conformance for Gamma, Gamma_x and the correction density.
    {
        std::mt19937_64 rng(cfg.seed());
        auto uni = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
        std::vector<BoundSample> sg, sgx, sphi;
        const double d_max = 1.0 / spec.field.k_upper;
        for (int i = 0; i < 500; ++i) {
            double dt = std::pow(10.0, -2.5 + 2.2 * uni()) * spec.T;
            dt = std::min(dt, 0.95 * spec.T);
            double tau = uni() * (spec.T - dt);
            double xi = 0.5 * spec.L * (2.0 * uni() - 1.0);
            double z = 8.0 * (uni() - 0.5);
            double dx = z * std::sqrt(spec.field.k_upper * dt);
            sg.push_back({dx, dt, E->value(xi + dx, tau + dt, xi, tau)});
            sgx.push_back({dx, dt, E->dx(xi + dx, tau + dt, xi, tau)});
            if (!E->series_is_zero())
                sphi.push_back({dx, dt, E->correction_density(xi + dx, tau + dt, xi, tau)});
        }
        auto fg = fit_gaussian_bound(sg, 0.5, d_max);
        auto fgx = fit_gaussian_bound(sgx, 1.0, d_max);
        std::ostringstream d1;
        d1 << "Gamma C=" << fg.C << " d=" << fg.d << " viol=" << fg.violations
           << "; Gamma_x C=" << fgx.C << " d=" << fgx.d << " viol=" << fgx.violations;
        bool ok = fg.violations == 0 && fgx.violations == 0 && std::isfinite(fg.C) &&
                  std::isfinite(fgx.C);
        if (!sphi.empty()) {
            auto fp = fit_gaussian_bound(sphi, 0.5 * (3.0 - spec.field.holder_exponent), d_max);
            d1 << "; Phi C=" << fp.C << " viol=" << fp.violations;
            ok = ok && fp.violations == 0 && std::isfinite(fp.C);
        }
        table.row("gaussian_bounds", ok, d1.str());
    }

    // Initial trace recovery.
    if (spec.w0) {
        std::vector<double> times{1e-1, 1e-2, 1e-3};
        std::vector<double> panel = linspace(-0.5 * spec.L, 0.5 * spec.L, 9);
        auto errs = initial_trace_check(*E, spec, times, panel);
        bool decreasing = errs[0] > errs[1] && errs[1] > errs[2];
        double sup_w0 = 0.0;
        for (double x : panel) sup_w0 = std::max(sup_w0, std::abs(spec.w0(x)));
        bool small = errs.back() <= 1e-2 * sup_w0;
        std::ostringstream d;
        d << "errors " << errs[0] << " > " << errs[1] << " > " << errs[2] << ", final vs "
          << 1e-2 * sup_w0;
        table.row("initial_trace", decreasing && small, d.str());
    }

    // Elementary exponential bound.
    {
        auto samples = lemma_sample_set(100000, cfg.seed());
        int viol = one_minus_exp_bound_violations(samples);
        std::ostringstream d;
        d << viol << " violations over " << samples.size() << " samples";
        table.row("exp_power_inequality", viol == 0, d.str());
    }

    auto out = cfg.open_output(out_dir, "verify.txt");
    out << table.body.str();
    std::cout << table.body.str();
    return table.failures == 0 ? kExitOk : kExitAssert;
}

int study_mollify(const RunConfig& cfg, const fs::path& out_dir) {
    ProblemSpec spec = cfg.problem();
    if (!spec.f) throw ConfigError("study mollify: the problem has no forcing");
    auto E = cfg.make_evaluator(spec);
    std::vector<double> xs = cfg.grid_xs(spec);
    std::vector<double> ts = cfg.grid_ts(spec);
    MollifyStudy study = convergence_study(*E, spec, cfg.epsilons(), xs, ts, cfg.jobs());

    auto csv = cfg.open_output(out_dir, "mollify_study.csv");
    csv << "epsilon,data_l2_gap,solution_sup_gap\n";
    for (const auto& r : study.rows)
        csv << r.epsilon << "," << r.data_l2_gap << "," << r.solution_sup_gap << "\n";
    auto plot = cfg.open_output(out_dir, "mollify_plot.gp");
    plot << "set datafile separator comma\nset logscale xy\n"
         << "plot 'mollify_study.csv' using 1:3 with linespoints title 'solution gap'\n";

    bool data_decreasing = true;
    for (size_t i = 1; i < study.rows.size(); ++i)
        if (study.rows[i].data_l2_gap > study.rows[i - 1].data_l2_gap)
            data_decreasing = false;
    std::cout << (study.cauchy ? "PASS" : "FAIL") << "  mollify cauchy increments\n";
    std::cout << (data_decreasing ? "PASS" : "FAIL") << "  data gaps decreasing\n";
    return (study.cauchy && data_decreasing) ? kExitOk : kExitAssert;
}

int study_l2decay(const RunConfig& cfg, const fs::path& out_dir) {
    ProblemSpec spec = cfg.problem();
    auto E = cfg.make_evaluator(spec);
    L2DecayStudy study = l2_smallness_study(*E, spec, cfg.deltas(), cfg.jobs());

    auto csv = cfg.open_output(out_dir, "l2decay_study.csv");
    csv << "delta,l2_Wf,l2_Wfx,l2_WGx\n";
    for (const auto& r : study.rows)
        csv << r.delta << "," << r.wf << "," << r.wfx << "," << r.wgx << "\n";
    csv << study.omega_t.delta << "," << study.omega_t.wf << "," << study.omega_t.wfx
        << "," << study.omega_t.wgx << "\n";
    auto plot = cfg.open_output(out_dir, "l2decay_plot.gp");
    plot << "set datafile separator comma\nset logscale xy\n"
         << "plot 'l2decay_study.csv' using 1:2 w lp t 'W_f', '' using 1:3 w lp t 'W_fx',"
            " '' using 1:4 w lp t 'W_Gx'\n";

    bool monotone = true;
    bool some_nonzero = false;
    for (size_t i = 1; i < study.rows.size(); ++i) {
        const auto& a = study.rows[i - 1];
        const auto& b = study.rows[i];
        if (b.wf > a.wf || b.wfx > a.wfx || b.wgx > a.wgx) monotone = false;
    }
    for (const auto& r : study.rows)
        if (r.wf > 0 || r.wfx > 0 || r.wgx > 0) some_nonzero = true;
    std::cout << (monotone ? "PASS" : "FAIL") << "  l2 norms nonincreasing along deltas"
              << (some_nonzero ? "" : " (all zero)") << "\n";
    return monotone ? kExitOk : kExitAssert;
}

int study_holder(const RunConfig& cfg, const fs::path& out_dir) {
    ProblemSpec spec = cfg.problem();
    auto E = cfg.make_evaluator(spec);
    std::vector<double> xs = cfg.grid_xs(spec);
    std::vector<double> ts = cfg.grid_ts(spec);
    SolutionField coarse = solve_on_grid(*E, spec, xs, ts, cfg.jobs());
    std::vector<double> xs2 = linspace(xs.front(), xs.back(), 2 * (int)xs.size() - 1);
    std::vector<double> ts2 = linspace(ts.front(), ts.back(), 2 * (int)ts.size() - 1);
    SolutionField fine = solve_on_grid(*E, spec, xs2, ts2, cfg.jobs());

    auto ax = cfg.holder_alphas(Direction::x);
    auto at = cfg.holder_alphas(Direction::t);
    SampledField wx_coarse = SampledField::from_wx(coarse);
    SampledField wx_fine = SampledField::from_wx(fine);
    auto fit_x = fit_holder_exponent(wx_fine, Direction::x, ax, cfg.holder_pair_budget());
    auto fit_t = fit_holder_exponent(wx_fine, Direction::t, at, cfg.holder_pair_budget());

    auto csv = cfg.open_output(out_dir, "holder_study.csv");
    csv << "direction,alpha,seminorm_coarse,seminorm_fine,growth\n";
    auto emit = [&](Direction dir, const char* name, const std::vector<double>& alphas) {
        for (double a : alphas)
            csv << name << "," << a << ","
                << holder_seminorm(wx_coarse, a, dir, cfg.holder_pair_budget()) << ","
                << holder_seminorm(wx_fine, a, dir, cfg.holder_pair_budget()) << ","
                << seminorm_growth(wx_coarse, wx_fine, a, dir, cfg.holder_pair_budget())
                << "\n";
    };
    emit(Direction::x, "x", ax);
    emit(Direction::t, "t", at);

    std::cout << "fitted exponent x: " << fit_x.alpha << (fit_x.stable_found ? "" : " (none stable)")
              << ", t: " << fit_t.alpha << (fit_t.stable_found ? "" : " (none stable)") << "\n";
    return (fit_x.stable_found && fit_t.stable_found) ? kExitOk : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frozen-coefficient parametrix solver and verification suite"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", kind = "mollify";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON problem config")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--jobs", jobs, "worker threads (0 = hardware)");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve and write CSV + plot script");
    add_common(solve);
    CLI::App* verify = app.add_subcommand("verify", "run the assertion suite");
    add_common(verify);
    CLI::App* study = app.add_subcommand("study", "parameter studies");
    add_common(study);
    study->add_option("--kind", kind, "mollify | l2decay | holder");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = RunConfig::load(config_path);
        if (seed_set) cfg.override_seed(seed);
        if (jobs > 0) cfg.override_jobs(jobs);

        if (app.got_subcommand(solve)) return cmd_solve(cfg, out_dir);
        if (app.got_subcommand(verify)) return cmd_verify(cfg, out_dir);
        if (app.got_subcommand(study)) {
            if (kind == "mollify") return study_mollify(cfg, out_dir);
            if (kind == "l2decay") return study_l2decay(cfg, out_dir);
            if (kind == "holder") return study_holder(cfg, out_dir);
            throw ConfigError("unknown study kind '" + kind + "'");
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
