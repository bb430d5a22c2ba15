#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lld/attractor.hpp"
#include "lld/config_io.hpp"
#include "lld/equilibria.hpp"
#include "lld/ratefit.hpp"

namespace lld {

struct FitRecord {
    RateFit fit;
    double threshold = 0.0;
    bool pass = false;
    bool enforced = true;
};

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
    bool enforced = true;
    std::string detail;
};

struct ExperimentResult {
    std::vector<std::string> subcommands;
    std::vector<RateRow> rows;
    std::vector<FitRecord> fits;
    std::vector<Check> checks;

    bool pass() const;
    void merge(ExperimentResult other);
};

struct RunOptions {
    std::string out_dir = "out";
    std::optional<std::vector<double>> eps_list;
    std::optional<int> mesh_n;
    std::optional<std::uint64_t> seed;
    std::optional<bool> dump;
};

/// Per-eps dynamics data on the dynamics mesh, computed on first use.
struct DynamicsCell {
    double eps = 0.0;
    std::unique_ptr<OperatorPair> pair;
    std::vector<Equilibrium> E0;
    std::vector<Equilibrium> Eeps;
    double delta = 0.0;
    std::optional<AttractorSample> cloud0, cloud_eps;
};

/// Runs the rate experiments of one configuration. Sweep cells are
/// independent and scheduled on a small worker pool; output files are
/// written by the calling thread only.
class Experiments {
public:
    Experiments(RunConfig config, RunOptions options);

    ExperimentResult check();
    ExperimentResult spectrum();
    ExperimentResult elliptic_rate();
    ExperimentResult eigen_rate();
    ExperimentResult equilibria_rate();
    ExperimentResult semigroup_rate();
    ExperimentResult manifold_rate();
    ExperimentResult attractor_rate();
    ExperimentResult all();

    ExperimentResult run(const std::string& subcommand);

    const RunConfig& config() const { return rc_; }
    const std::vector<double>& eps_list() const { return eps_; }

private:
    DynamicsCell& cell(std::size_t k);
    void ensure_equilibria(std::size_t k);
    void ensure_clouds(std::size_t k);
    RateRow row(const OperatorPair& p, const std::string& quantity, double value, double dt = 0.0) const;
    FitRecord fit(const std::vector<RateRow>& rows, const std::string& quantity, RateModel model, bool enforced = true) const;
    std::string path(const std::string& name) const;
    FlowConfig flow() const;
    SampleSpec sample_spec() const;

    RunConfig rc_;
    RunOptions opt_;
    std::vector<double> eps_;
    int n_ell_, n_dyn_;
    std::vector<DynamicsCell> cells_;
};

/// The CLI entry: runs `subcommand`, writes CSV/JSON artifacts and
/// manifest.json into options.out_dir, and returns the exit code
/// (0 pass, 1 threshold failed, 2 config error, 3 numerical failure).
int run_command(const std::string& subcommand, const std::string& config_path, const RunOptions& options);

extern const std::vector<std::string> kSubcommands;

}  // namespace lld
