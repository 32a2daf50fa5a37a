#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrprox/core_math.hpp"
#include "vrprox/metrics.hpp"
#include "vrprox/problems.hpp"

namespace vrprox {

// ---------------------------------------------------------------------------
// Parameter planning
// ---------------------------------------------------------------------------

enum class PlanKind { thm1, thm2, thm3, thm4, thm7, general_svrg, general_saga, manual };

std::string to_string(PlanKind kind);

/// Step size eta = rho / L with epoch length m (SVRG only), minibatch b and
/// an optional iteration budget T (0 when the caller decides).
struct StepPlan {
  double eta = 0.0;
  double rho = 0.0;
  std::size_t m = 0;
  std::size_t b = 1;
  std::size_t T = 0;
  PlanKind kind = PlanKind::manual;

  std::string describe() const;
};

enum class SvrgMode { thm1, thm2, general };
enum class SagaMode { thm3, thm4, general };

/// Smallest integer b with b^3 >= n^2, i.e. ceil(n^(2/3)), computed exactly.
std::size_t ceil_pow_two_thirds(std::size_t n);
/// Largest integer m with m^3 <= n.
std::size_t floor_cbrt(std::size_t n);
std::size_t floor_sqrt(std::size_t n);

/// 4 rho^2 m^2 / b + rho - 1; the SVRG step condition holds when <= 0.
double svrg_condition_residual(double rho, std::size_t m, std::size_t b);
/// 16 n^2 rho^2 / b^3 + rho - 1; the SAGA step condition holds when <= 0.
double saga_condition_residual(double rho, std::size_t n, std::size_t b);

/// Cap on rho for general SVRG plans (rho must stay below 1/2).
inline constexpr double kGeneralSvrgRhoCap = 0.49;

/// thm1: b = 1, m = n, eta = 1/(3Ln).
/// thm2: b = ceil(n^(2/3)), m = floor(n^(1/3)), eta = 1/(3L).
/// general: m = floor(sqrt(b)), rho the largest root of the step condition,
/// capped at kGeneralSvrgRhoCap. b is ignored by thm1/thm2.
/// Throws std::invalid_argument unless 1 <= b <= n and L > 0.
StepPlan plan_svrg(std::size_t n, std::size_t b, double L, SvrgMode mode);

/// thm3: b = 1, eta = 1/(5Ln). thm4: b = ceil(n^(2/3)), eta = 1/(5L).
/// general: rho = min(1/5, b^(3/2) / (5n)).
StepPlan plan_saga(std::size_t n, std::size_t b, double L, SagaMode mode);

/// User-chosen plan; no constraint enforcement (see plan_warnings).
StepPlan manual_plan(double eta, std::size_t m, std::size_t b, double L);

/// Empty when the plan satisfies the step condition of its solver family.
std::vector<std::string> plan_warnings(const StepPlan& plan, std::size_t n, bool saga);

/// Restart schedule for mu-PL problems.
struct PlPlan {
  StepPlan inner;
  double mu = 0.0;
  std::size_t stage_length = 0;  ///< inner iterations T per restart stage
};

/// ceil(30 kappa), the per-stage length with eta = 1/(5L).
std::size_t pl_stage_length(double kappa);
/// ceil(6 L / (rho mu)) for a general rho <= 1/5.
std::size_t pl_stage_length_general(double L, double mu, double rho);

/// b = ceil(n^(2/3)), m = floor(n^(1/3)), eta = 1/(5L), T = ceil(30 L/mu).
/// Throws std::invalid_argument when mu <= 0.
PlPlan plan_pl(std::size_t n, double L, double mu);

// ---------------------------------------------------------------------------
// Running solvers
// ---------------------------------------------------------------------------

/// Thrown when ProxSGD's objective escapes F(x0) + kDivergenceMargin or the
/// iterate becomes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDivergenceMargin = 1e6;

/// Draws a minibatch of b indices from [0, n).
using BatchSampler = std::function<std::vector<std::size_t>(RngStream&, std::size_t, std::size_t)>;

BatchSampler with_replacement_sampler();
/// Test double: always returns every index 0..n-1 once, ignoring b and rng.
BatchSampler full_batch_sampler();

struct RunOptions {
  BatchSampler sampler = with_replacement_sampler();
  /// Record a trace checkpoint every this many effective passes; 0 disables.
  double checkpoint_stride = 0.0;
  std::optional<double> f_hat;
  /// Stop as soon as ifo / n reaches this many effective passes.
  double budget_passes = std::numeric_limits<double>::infinity();
  /// Keep hashes of every candidate iterate for the output-membership check.
  bool log_iterate_hashes = false;
  /// ProxSAGA: recompute the table mean from scratch every k steps and throw
  /// std::logic_error if the incremental value drifted by more than 1e-10.
  std::size_t verify_table_mean_every = 0;
  /// Called with each new iterate after its prox step.
  std::function<void(const DenseVector&)> on_iterate;
  std::string solver_label;
  std::uint64_t seed = 0;
};

struct SolverOutput {
  DenseVector x_a;     ///< uniformly drawn iterate (reservoir sampled)
  DenseVector x_last;
  RunTrace trace;
  OracleCounters counters;
  std::size_t iterations = 0;  ///< inner (prox) steps taken
  bool budget_exhausted = false;
  std::vector<std::uint64_t> iterate_hashes;
  /// Restart wrappers: x^0, x^1, ..., x^K.
  std::vector<DenseVector> stage_points;
};

/// t-inverse schedule eta_t = eta0 / (1 + decay * floor(t / n)).
struct StepSchedule {
  double eta0 = 0.0;
  double decay = 0.0;
  double at(std::size_t t, std::size_t n) const;
};

/// Gradient memory {grad f_i(alpha_i)} and its mean, used by ProxSAGA.
struct GradientTable {
  std::vector<DenseVector> entries;
  DenseVector mean;
};

/// ProxGD: T iterations of x <- prox(x - eta grad f(x)).
SolverOutput prox_gd(CompositeProblem& p, const DenseVector& x0, double eta, std::size_t T,
                     const RunOptions& options = {});

/// ProxSGD with minibatch b and the t-inverse schedule.
SolverOutput prox_sgd(CompositeProblem& p, const DenseVector& x0, const StepSchedule& schedule,
                      std::size_t b, std::size_t T, RngStream& rng, const RunOptions& options = {});

/// Nonconvex ProxSVRG for S epochs of plan.m inner steps.
SolverOutput prox_svrg(CompositeProblem& p, const DenseVector& x0, const StepPlan& plan,
                       std::size_t S, RngStream& rng, const RunOptions& options = {});

/// Nonconvex ProxSAGA for T iterations. With `warm_table` the initial table
/// is taken from it instead of n fresh gradient evaluations.
SolverOutput prox_saga(CompositeProblem& p, const DenseVector& x0, const StepPlan& plan,
                       std::size_t T, RngStream& rng, const RunOptions& options = {},
                       const GradientTable* warm_table = nullptr);

/// K restarts of ProxSVRG / ProxSAGA, each started at the previous output.
SolverOutput pl_svrg(CompositeProblem& p, const DenseVector& x0, const PlPlan& plan, std::size_t K,
                     RngStream& rng, const RunOptions& options = {});
SolverOutput pl_saga(CompositeProblem& p, const DenseVector& x0, const PlPlan& plan, std::size_t K,
                     RngStream& rng, const RunOptions& options = {});

/// Result of n ProxSGD iterations with b = 1, plus the gradients seen.
/// Indices never drawn keep a zero entry.
struct WarmStart {
  DenseVector x0;
  GradientTable table;
};

WarmStart warm_start(CompositeProblem& p, const DenseVector& x_init, const StepSchedule& schedule,
                     RngStream& rng);

// ---------------------------------------------------------------------------
// Variance-reduced directions (exposed for oracle tests)
// ---------------------------------------------------------------------------

/// (1/b) sum_{i in batch} (grad f_i(x) - grad f_i(snapshot)) + snapshot_grad.
/// 2 IFO per batch entry.
DenseVector svrg_direction(const CompositeProblem& p, const DenseVector& x,
                           const DenseVector& snapshot, const DenseVector& snapshot_grad,
                           std::span<const std::size_t> batch,
                           OracleMode mode = OracleMode::counted);

/// (1/b) sum_{i in batch} (grad f_i(x) - table_i) + table mean. 1 IFO per entry.
DenseVector saga_direction(const CompositeProblem& p, const DenseVector& x,
                           const GradientTable& table, std::span<const std::size_t> batch,
                           OracleMode mode = OracleMode::counted);

}  // namespace vrprox
