#include "parmx/runconfig.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "parmx/mollify.hpp"

namespace parmx {

using nlohmann::json;

struct RunConfig::ProblemJson {
    json j;
};

namespace {

json parse_or_throw(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failed: ") + e.what());
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: key '" + key + "' has the wrong type");
    }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError("config: missing key '" + key + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: key '" + key + "' in " + where + " has the wrong type");
    }
}

CoefficientField coefficient_from_json(const json& jc) {
    const std::string type = require<std::string>(jc, "type", "problem.coefficient");
    if (type == "constant") return constant_field(get_or(jc, "k", 1.0));
    if (type == "smoothstep")
        return smoothstep_field(require<double>(jc, "k_min", "coefficient"),
                                require<double>(jc, "k_max", "coefficient"),
                                get_or(jc, "x0", -1.0), get_or(jc, "width", 2.0));
    if (type == "g_of_theta") {
        LeslieParameters p;
        if (jc.contains("alpha")) {
            auto a = jc.at("alpha").get<std::vector<double>>();
            if (a.size() != 6)
                throw ConfigError("config: coefficient.alpha must hold six viscosities");
            p.alpha1 = a[0];
            p.alpha2 = a[1];
            p.alpha3 = a[2];
            p.alpha4 = a[3];
            p.alpha5 = a[4];
            p.alpha6 = a[5];
        }
        p.K1 = get_or(jc, "K1", 1.0);
        p.K3 = get_or(jc, "K3", 1.0);
        const double amp = get_or(jc, "theta_amplitude", 0.8);
        const double wav = get_or(jc, "theta_wavenumber", 0.7);
        auto theta = [amp, wav](double x, double) { return amp * std::sin(wav * x); };
        return field_from_theta(p, theta);
    }
    throw ConfigError("config: unknown coefficient type '" + type + "'");
}

// |z|^delta edge rise, clamped: 0 for z<=0, 1 for z>=1.
double holder_edge(double z, double expnt) {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    return std::pow(z, expnt);
}

SpaceTimeFn forcing_from_json(const json& jf, double /*L*/) {
    const std::string type = require<std::string>(jf, "type", "problem.forcing");
    if (type == "zero") return nullptr;
    if (type == "gaussian") {
        const double A = get_or(jf, "amplitude", 1.0);
        const double c = get_or(jf, "center", 0.0);
        const double s = get_or(jf, "width", 1.0);
        const double f = get_or(jf, "time_frequency", 0.0);
        return [A, c, s, f](double x, double t) {
            double m = f > 0.0 ? 1.0 + 0.5 * std::sin(2.0 * M_PI * f * t) : 1.0;
            double z = (x - c) / s;
            return A * m * std::exp(-z * z);
        };
    }
    if (type == "pulse") {
        const double A = get_or(jf, "amplitude", 1.0);
        const double a = get_or(jf, "a", -1.0);
        const double b = get_or(jf, "b", 1.0);
        const double cw = get_or(jf, "corner_width", 0.5);
        const double ce = get_or(jf, "corner_exponent", 0.5);
        const double f = get_or(jf, "time_frequency", 0.0);
        if (!(b > a)) throw ConfigError("config: pulse needs b > a");
        if (!(cw > 0.0) || !(ce > 0.0) || ce > 1.0)
            throw ConfigError("config: pulse corner parameters out of range");
        return [=](double x, double t) {
            double m = f > 0.0 ? 1.0 + 0.5 * std::sin(2.0 * M_PI * f * t) : 1.0;
            return A * m * holder_edge((x - a) / cw, ce) * holder_edge((b - x) / cw, ce);
        };
    }
    throw ConfigError("config: unknown forcing type '" + type + "'");
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    RunConfig cfg;
    cfg.text_ = text;
    cfg.parse();
    return cfg;
}

void RunConfig::parse() {
    json j = parse_or_throw(text_);
    pj_ = std::make_shared<ProblemJson>();
    pj_->j = j;

    seed_ = get_or<std::uint64_t>(j, "seed", 42);
    jobs_ = get_or(j, "jobs", 0);

    if (!j.contains("problem")) throw ConfigError("config: missing 'problem' section");
    const json& jp = j.at("problem");
    if (!jp.contains("coefficient"))
        throw ConfigError("config: missing 'problem.coefficient'");
    coefficient_from_json(jp.at("coefficient"));  // validate early
    if (jp.contains("forcing")) forcing_from_json(jp.at("forcing"), 1.0);

    if (j.contains("grid")) {
        const json& jg = j.at("grid");
        nx_ = get_or(jg, "nx", nx_);
        nt_ = get_or(jg, "nt", nt_);
        t_min_ = get_or(jg, "t_min", t_min_);
        if (nx_ < 2 || nt_ < 2) throw ConfigError("config: grid.nx/nt must be >= 2");
    }
    if (j.contains("quadrature")) {
        const json& jq = j.at("quadrature");
        qcfg_.space_halfwidth_sigmas = get_or(jq, "space_halfwidth_sigmas", qcfg_.space_halfwidth_sigmas);
        qcfg_.space_points = get_or(jq, "space_points", qcfg_.space_points);
        qcfg_.time_points = get_or(jq, "time_points", qcfg_.time_points);
        qcfg_.singular_exponent_cap = get_or(jq, "singular_exponent_cap", qcfg_.singular_exponent_cap);
        qcfg_.abs_tol = get_or(jq, "abs_tol", qcfg_.abs_tol);
        qcfg_.rel_tol = get_or(jq, "rel_tol", qcfg_.rel_tol);
        try {
            qcfg_.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (j.contains("parametrix")) {
        const json& jq = j.at("parametrix");
        pcfg_.max_series_terms = get_or(jq, "max_series_terms", pcfg_.max_series_terms);
        pcfg_.term_tol = get_or(jq, "term_tol", pcfg_.term_tol);
        pcfg_.min_time_separation = get_or(jq, "min_time_separation", pcfg_.min_time_separation);
        pcfg_.force_phi_sign = get_or(jq, "force_phi_sign", pcfg_.force_phi_sign);
        pcfg_.table_space_points = get_or(jq, "table_space_points", pcfg_.table_space_points);
        pcfg_.table_time_points = get_or(jq, "table_time_points", pcfg_.table_time_points);
        pcfg_.source_lattice_points = get_or(jq, "source_lattice_points", pcfg_.source_lattice_points);
        pcfg_.source_time_points = get_or(jq, "source_time_points", pcfg_.source_time_points);
        try {
            pcfg_.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    epsilons_ = get_or(j, "epsilons", std::vector<double>{0.2, 0.1, 0.05, 0.025});
    deltas_ = get_or(j, "deltas", std::vector<double>{0.4, 0.1, 0.025});
    if (j.contains("test_functions")) {
        const json& jt = j.at("test_functions");
        tf_count_ = get_or(jt, "count", tf_count_);
        tf_seed_ = get_or<std::uint64_t>(jt, "seed", tf_seed_);
        if (tf_count_ <= 0)
            throw ConfigError("config: test_functions.count must be positive");
    }
    if (j.contains("holder")) {
        const json& jh = j.at("holder");
        alphas_x_ = get_or(jh, "alphas_x", std::vector<double>{});
        alphas_t_ = get_or(jh, "alphas_t", std::vector<double>{});
        holder_pair_budget_ = get_or(jh, "pair_budget", holder_pair_budget_);
    }
    if (j.contains("reference")) {
        const json& jr = j.at("reference");
        cn_nx_ = get_or(jr, "nx", cn_nx_);
        cn_nt_ = get_or(jr, "nt", cn_nt_);
        oracle_tol_ = get_or(jr, "oracle_tolerance", oracle_tol_);
    }
}

ProblemSpec RunConfig::problem() const {
    const json& jp = pj_->j.at("problem");
    ProblemSpec spec;
    spec.field = coefficient_from_json(jp.at("coefficient"));
    spec.gamma = get_or(jp, "gamma", 0.0);
    spec.T = get_or(jp, "T", 0.5);
    spec.L = get_or(jp, "L", 10.0);
    if (!(spec.T > 0.0) || !(spec.L > 0.0))
        throw ConfigError("config: problem.T and problem.L must be positive");

    if (jp.contains("forcing")) {
        spec.f = forcing_from_json(jp.at("forcing"), spec.L);
        if (spec.f && get_or(jp, "with_G", false)) {
            int gp = get_or(jp, "g_table_points", 4097);
            spec.G = cached_cumulative_square(spec.f, -spec.L, spec.L, gp);
        }
    }
    if (jp.contains("initial")) {
        const json& ji = jp.at("initial");
        const std::string type = require<std::string>(ji, "type", "problem.initial");
        if (type == "gaussian") {
            const double A = get_or(ji, "amplitude", 1.0);
            const double c = get_or(ji, "center", 0.0);
            const double s = get_or(ji, "sigma", 1.0);
            spec.w0 = [A, c, s](double x) {
                double z = (x - c) / s;
                return A * std::exp(-0.5 * z * z);
            };
            spec.w0_prime = [A, c, s](double x) {
                double z = (x - c) / s;
                return -A * z / s * std::exp(-0.5 * z * z);
            };
        } else if (type != "zero") {
            throw ConfigError("config: unknown initial type '" + type + "'");
        }
    }
    try {
        validate_problem(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return spec;
}

std::unique_ptr<FundamentalSolution> RunConfig::make_evaluator(
    const ProblemSpec& spec) const {
    return std::make_unique<FundamentalSolution>(spec.field, spec.gamma, spec.T, spec.L,
                                                 pcfg_, qcfg_);
}

std::vector<double> RunConfig::grid_xs(const ProblemSpec& spec) const {
    return linspace(-spec.L, spec.L, nx_);
}

std::vector<double> RunConfig::grid_ts(const ProblemSpec& spec) const {
    double t0 = t_min_ > 0.0 ? t_min_ : spec.T / nt_;
    return linspace(t0, spec.T, nt_);
}

void RunConfig::override_seed(std::uint64_t s) {
    seed_ = s;
    json j = parse_or_throw(text_);
    j["seed"] = s;
    text_ = j.dump();
}

std::vector<double> RunConfig::holder_alphas(Direction dir) const {
    if (dir == Direction::x && !alphas_x_.empty()) return alphas_x_;
    if (dir == Direction::t && !alphas_t_.empty()) return alphas_t_;
    if (dir == Direction::x) return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    return {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
}

std::string RunConfig::hash() const {
    // FNV-1a over the canonical dump.
    json j = parse_or_throw(text_);
    std::string canon = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex << h;
    return ss.str();
}

std::ofstream RunConfig::open_output(const std::filesystem::path& dir,
                                     const std::string& name) const {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);  // LF endings on every platform
    if (!os) throw std::runtime_error("cannot open output file " + (dir / name).string());
    os << "# config=" << hash() << " seed=" << seed_ << "\n";
    return os;
}

void write_solution_plot_script(std::ostream& os, const std::string& csv_name) {
    os << "set datafile separator comma\n"
       << "set datafile commentschars '#'\n"
       << "set pm3d map\n"
       << "set xlabel 'x'\n"
       << "set ylabel 't'\n"
       << "set term pngcairo size 900,700\n"
       << "set output 'w_heatmap.png'\n"
       << "set title 'w(x,t)'\n"
       << "splot '" << csv_name << "' using 1:2:3 with points palette pt 5 ps 0.6 notitle\n"
       << "set output 'wx_heatmap.png'\n"
       << "set title 'w_x(x,t)'\n"
       << "splot '" << csv_name << "' using 1:2:4 with points palette pt 5 ps 0.6 notitle\n";
}

}  // namespace parmx
