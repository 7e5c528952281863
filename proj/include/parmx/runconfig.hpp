#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "parmx/duhamel.hpp"
#include "parmx/norms.hpp"
#include "parmx/reference.hpp"

namespace parmx {

/// Invalid or inconsistent configuration input (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration: problem catalog selection, grids, tunables and
/// study parameter lists. The canonical serialization is hashed into every
/// output file header together with the seed.
class RunConfig {
public:
    static RunConfig load(const std::string& path);
    static RunConfig from_json_text(const std::string& text);

    ProblemSpec problem() const;
    std::unique_ptr<FundamentalSolution> make_evaluator(const ProblemSpec& spec) const;

    std::vector<double> grid_xs(const ProblemSpec& spec) const;
    std::vector<double> grid_ts(const ProblemSpec& spec) const;

    QuadratureConfig quadrature() const { return qcfg_; }
    ParametrixConfig parametrix() const { return pcfg_; }

    std::uint64_t seed() const { return seed_; }
    void override_seed(std::uint64_t s);
    int jobs() const { return jobs_; }
    void override_jobs(int j) { jobs_ = j; }

    std::vector<double> epsilons() const { return epsilons_; }
    std::vector<double> deltas() const { return deltas_; }
    int test_function_count() const { return tf_count_; }
    std::uint64_t test_function_seed() const { return tf_seed_; }
    std::vector<double> holder_alphas(Direction dir) const;
    int holder_pair_budget() const { return holder_pair_budget_; }

    int cn_nx() const { return cn_nx_; }
    int cn_nt() const { return cn_nt_; }
    double oracle_tolerance() const { return oracle_tol_; }

    /// FNV-1a of the effective canonical config text, hex-encoded.
    std::string hash() const;

    /// Opens dir/name and writes the "# config=<hash> seed=<seed>" header line.
    std::ofstream open_output(const std::filesystem::path& dir,
                              const std::string& name) const;

private:
    RunConfig() = default;
    void parse();

    std::string text_;
    // parsed state
    std::uint64_t seed_ = 0;
    int jobs_ = 0;
    int nx_ = 33, nt_ = 17;
    double t_min_ = -1.0;  // <0: derive from T/nt
    QuadratureConfig qcfg_;
    ParametrixConfig pcfg_;
    std::vector<double> epsilons_;
    std::vector<double> deltas_;
    int tf_count_ = 20;
    std::uint64_t tf_seed_ = 0x5eedf00dULL;
    std::vector<double> alphas_x_, alphas_t_;
    int holder_pair_budget_ = 4000;
    int cn_nx_ = 512, cn_nt_ = 512;
    double oracle_tol_ = 1e-2;

    struct ProblemJson;
    std::shared_ptr<ProblemJson> pj_;
};

/// Emits a gnuplot-style plain-text plot script for the solution heat maps.
void write_solution_plot_script(std::ostream& os, const std::string& csv_name);

}  // namespace parmx
