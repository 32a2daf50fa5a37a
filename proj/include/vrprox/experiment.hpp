#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrprox/metrics.hpp"
#include "vrprox/problems.hpp"
#include "vrprox/solvers.hpp"

namespace vrprox {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverId { proxgd, proxsgd, proxsvrg, proxsaga, pl_svrg, pl_saga };

std::string to_string(SolverId id);
/// Accepts "proxgd", "proxsgd", "proxsvrg", "proxsaga", "pl-svrg", "pl-saga".
SolverId parse_solver_id(const std::string& s);

struct ProblemSpec {
  enum class Kind { libsvm, synthetic_nnpca, pl_quadratic };
  Kind kind = Kind::synthetic_nnpca;
  std::filesystem::path path;            ///< libsvm
  std::optional<std::size_t> dim;        ///< libsvm dimension override
  bool normalize = true;                 ///< libsvm / synthetic NN-PCA
  std::size_t n = 512;                   ///< synthetic
  std::size_t d = 20;                    ///< synthetic
  double lambda = 0.01;                  ///< pl_quadratic l1 weight
  std::uint64_t data_seed = 1;           ///< synthetic generator seed
};

/// Parses "n=512,d=20[,seed=3][,lambda=0.01][,normalize=0]" into `spec`.
void parse_problem_params(const std::string& text, ProblemSpec& spec);

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<SolverId> solvers{SolverId::proxsvrg};
  /// thm1..thm4, general, manual, or empty for the solver default.
  std::string plan;
  std::optional<double> eta;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> epoch_len;
  std::optional<double> eta0;       ///< ProxSGD initial step
  double eta_decay = 0.0;           ///< ProxSGD t-inverse decay
  std::optional<double> warm_eta;   ///< step for the warm-start ProxSGD pass
  std::optional<double> mu;         ///< PL constant when the problem does not supply one
  std::vector<std::uint64_t> seeds{1};
  double passes = 20.0;
  double stride = 1.0;
  bool warm_start = false;
  std::size_t baseline_iters = 10000;
  std::size_t baseline_starts = 5;
  std::optional<std::filesystem::path> baseline_cache;
  std::size_t threads = 0;  ///< 0: hardware concurrency
};

/// Throws ConfigError describing the first problem found. Returns
/// non-fatal warnings (e.g. manual plans violating the step conditions).
std::vector<std::string> validate(const ExperimentConfig& cfg, std::size_t n);

/// Parses "1..10", "1,2,5" or a mix "1..3,7". Throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Flat key=value file; '#' comments and blank lines ignored. Throws IoError
/// or ConfigError.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct LoadedProblem {
  CompositeProblem problem;
  std::optional<double> mu;
  std::uint64_t fingerprint;
};

LoadedProblem build_problem(const ProblemSpec& spec);

/// Best objective from ProxGD runs (eta = 1/L) at `starts` seeded feasible
/// points; for d = 2 NN-PCA the exact grid optimum instead.
double estimate_f_hat(const CompositeProblem& p, std::size_t iters, std::size_t starts);

/// estimate_f_hat with a key=value cache file keyed by the problem
/// fingerprint and the baseline protocol.
double cached_f_hat(const LoadedProblem& lp, std::size_t iters, std::size_t starts,
                    const std::optional<std::filesystem::path>& cache);

/// Seeded feasible starting point shared by every solver for a given seed.
DenseVector initial_point(const CompositeProblem& p, std::uint64_t seed);

struct SummaryCurve {
  std::string solver;
  std::vector<double> passes;
  std::vector<double> subopt;  ///< median over seeds
  std::vector<double> F;       ///< median over seeds
};

struct ExperimentResult {
  std::vector<RunTrace> traces;  ///< solver-major, seed order as configured
  std::vector<SummaryCurve> summary;
  double f_hat = 0.0;
  std::vector<std::string> warnings;
};

/// Runs every (solver, seed) pair to the pass budget. Seeds run
/// concurrently, each on its own copy of the problem.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
/// Same, reusing an already built problem and baseline.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const LoadedProblem& lp, double f_hat);

/// Per-solver medians at each checkpoint index (truncated to the shortest
/// trace). Independent of seed order.
std::vector<SummaryCurve> summarize(const std::vector<RunTrace>& traces);

double median(std::vector<double> values);

/// Header `solver,seed,passes,ifo,po,F,subopt,gmap_sq`, 17 significant
/// digits, LF endings. Throws std::invalid_argument on an empty set (no file
/// is created) and IoError when the path cannot be written.
void emit_csv(const std::vector<RunTrace>& traces, const std::filesystem::path& path);
std::vector<RunTrace> read_csv(const std::filesystem::path& path);

/// Static line chart of log10 suboptimality against effective passes.
void emit_svg(const std::vector<SummaryCurve>& summary, const std::filesystem::path& path);

struct TuneResult {
  double eta = 0.0;    ///< eta (VR/GD) or eta0 (ProxSGD)
  double decay = 0.0;  ///< ProxSGD only
  double median_final_subopt = 0.0;
};

/// Grid search for the solver in cfg.solvers.front(): etas x decays for
/// ProxSGD, etas (manual plan) otherwise. Runs that diverge are skipped.
/// Throws ConfigError if every grid point diverges.
TuneResult tune_step_size(const ExperimentConfig& cfg, const LoadedProblem& lp, double f_hat,
                          std::span<const double> etas, std::span<const double> decays);

}  // namespace vrprox
