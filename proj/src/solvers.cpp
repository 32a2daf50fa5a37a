#include "vrprox/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace vrprox {

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

std::string to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::thm1: return "thm1";
    case PlanKind::thm2: return "thm2";
    case PlanKind::thm3: return "thm3";
    case PlanKind::thm4: return "thm4";
    case PlanKind::thm7: return "thm7";
    case PlanKind::general_svrg: return "general_svrg";
    case PlanKind::general_saga: return "general_saga";
    case PlanKind::manual: return "manual";
  }
  return "unknown";
}

std::string StepPlan::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s eta=%.17g rho=%.17g m=%zu b=%zu T=%zu", to_string(kind).c_str(),
                eta, rho, m, b, T);
  return buf;
}

std::size_t floor_cbrt(std::size_t n) {
  auto m = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
  const auto cube = [](std::size_t v) { return static_cast<unsigned __int128>(v) * v * v; };
  while (m > 0 && cube(m) > n) --m;
  while (cube(m + 1) <= n) ++m;
  return m;
}

std::size_t ceil_pow_two_thirds(std::size_t n) {
  const auto n_sq = static_cast<unsigned __int128>(n) * n;
  auto b = static_cast<std::size_t>(std::cbrt(static_cast<double>(n) * static_cast<double>(n)));
  const auto cube = [](std::size_t v) { return static_cast<unsigned __int128>(v) * v * v; };
  while (b > 0 && cube(b - 1) >= n_sq) --b;
  while (cube(b) < n_sq) ++b;
  return b;
}

std::size_t floor_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

double svrg_condition_residual(double rho, std::size_t m, std::size_t b) {
  const double md = static_cast<double>(m);
  return 4.0 * rho * rho * md * md / static_cast<double>(b) + rho - 1.0;
}

double saga_condition_residual(double rho, std::size_t n, std::size_t b) {
  const double nd = static_cast<double>(n);
  const double bd = static_cast<double>(b);
  return 16.0 * nd * nd * rho * rho / (bd * bd * bd) + rho - 1.0;
}

namespace {

void check_plan_inputs(std::size_t n, std::size_t b, double L) {
  if (n == 0) throw std::invalid_argument("plan: n must be positive");
  if (b == 0 || b > n) throw std::invalid_argument("plan: batch size must satisfy 1 <= b <= n");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("plan: L must be positive");
}

// Largest rho' <= rho with residual(rho') <= 0 and rho' < 1/2, by bisection.
template <class Residual>
double enforce_condition(double rho, Residual residual) {
  rho = std::min(rho, std::nextafter(0.5, 0.0));
  if (residual(rho) <= 0.0) return rho;
  double lo = 0.0;
  double hi = rho;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

StepPlan plan_svrg(std::size_t n, std::size_t b, double L, SvrgMode mode) {
  check_plan_inputs(n, b, L);
  StepPlan plan;
  switch (mode) {
    case SvrgMode::thm1:
      plan.kind = PlanKind::thm1;
      plan.b = 1;
      plan.m = n;
      plan.rho = 1.0 / (3.0 * static_cast<double>(n));
      break;
    case SvrgMode::thm2:
      plan.kind = PlanKind::thm2;
      plan.b = ceil_pow_two_thirds(n);
      plan.m = std::max<std::size_t>(floor_cbrt(n), 1);
      plan.rho = 1.0 / 3.0;
      break;
    case SvrgMode::general: {
      plan.kind = PlanKind::general_svrg;
      plan.b = b;
      plan.m = std::max<std::size_t>(floor_sqrt(b), 1);
      const double a = 4.0 * static_cast<double>(plan.m * plan.m) / static_cast<double>(b);
      const double root = (-1.0 + std::sqrt(1.0 + 4.0 * a)) / (2.0 * a);
      plan.rho = std::min(root, kGeneralSvrgRhoCap);
      break;
    }
  }
  plan.rho = enforce_condition(plan.rho, [&](double r) { return svrg_condition_residual(r, plan.m, plan.b); });
  plan.eta = plan.rho / L;
  return plan;
}

StepPlan plan_saga(std::size_t n, std::size_t b, double L, SagaMode mode) {
  check_plan_inputs(n, b, L);
  StepPlan plan;
  switch (mode) {
    case SagaMode::thm3:
      plan.kind = PlanKind::thm3;
      plan.b = 1;
      plan.rho = 1.0 / (5.0 * static_cast<double>(n));
      break;
    case SagaMode::thm4:
      plan.kind = PlanKind::thm4;
      plan.b = ceil_pow_two_thirds(n);
      plan.rho = 0.2;
      break;
    case SagaMode::general:
      plan.kind = PlanKind::general_saga;
      plan.b = b;
      plan.rho = std::min(0.2, std::pow(static_cast<double>(b), 1.5) / (5.0 * static_cast<double>(n)));
      break;
  }
  plan.rho = enforce_condition(plan.rho, [&](double r) { return saga_condition_residual(r, n, plan.b); });
  plan.eta = plan.rho / L;
  return plan;
}

StepPlan manual_plan(double eta, std::size_t m, std::size_t b, double L) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("manual plan: eta must be positive");
  if (b == 0) throw std::invalid_argument("manual plan: batch size must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("manual plan: L must be positive");
  StepPlan plan;
  plan.kind = PlanKind::manual;
  plan.eta = eta;
  plan.rho = eta * L;
  plan.m = m;
  plan.b = b;
  return plan;
}

std::vector<std::string> plan_warnings(const StepPlan& plan, std::size_t n, bool saga) {
  std::vector<std::string> out;
  if (plan.rho >= 0.5) out.emplace_back("rho = eta*L must be below 1/2");
  if (plan.b > n) out.emplace_back("batch size exceeds n");
  const double residual = saga ? saga_condition_residual(plan.rho, n, plan.b)
                               : svrg_condition_residual(plan.rho, plan.m, plan.b);
  if (residual > 0.0) {
    out.emplace_back(saga ? "16 n^2 rho^2 / b^3 + rho <= 1 is violated"
                          : "4 rho^2 m^2 / b + rho <= 1 is violated");
  }
  return out;
}

std::size_t pl_stage_length(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
  return static_cast<std::size_t>(std::ceil(30.0 * kappa));
}

std::size_t pl_stage_length_general(double L, double mu, double rho) {
  if (!(mu > 0.0) || !(L > 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("pl_stage_length_general: L, mu, rho must be positive");
  }
  return static_cast<std::size_t>(std::ceil(6.0 * L / (rho * mu)));
}

PlPlan plan_pl(std::size_t n, double L, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("PL plan: mu must be positive");
  if (n == 0 || !(L > 0.0)) throw std::invalid_argument("PL plan: need n >= 1 and L > 0");
  PlPlan plan;
  plan.mu = mu;
  plan.inner.kind = PlanKind::thm7;
  plan.inner.b = ceil_pow_two_thirds(n);
  plan.inner.m = std::max<std::size_t>(floor_cbrt(n), 1);
  plan.inner.rho = 0.2;
  plan.inner.eta = 0.2 / L;
  plan.stage_length = pl_stage_length(L / mu);
  plan.inner.T = plan.stage_length;
  return plan;
}

// ---------------------------------------------------------------------------
// Samplers, schedules, directions
// ---------------------------------------------------------------------------

BatchSampler with_replacement_sampler() {
  return [](RngStream& rng, std::size_t n, std::size_t b) { return sample_with_replacement(rng, n, b); };
}

BatchSampler full_batch_sampler() {
  return [](RngStream&, std::size_t n, std::size_t) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  };
}

double StepSchedule::at(std::size_t t, std::size_t n) const {
  return eta0 / (1.0 + decay * static_cast<double>(t / n));
}

DenseVector svrg_direction(const CompositeProblem& p, const DenseVector& x, const DenseVector& snapshot,
                           const DenseVector& snapshot_grad, std::span<const std::size_t> batch,
                           OracleMode mode) {
  DenseVector v(p.dim());
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i : batch) {
    p.accumulate_gradient(i, x, inv_b, v, mode);
    p.accumulate_gradient(i, snapshot, -inv_b, v, mode);
  }
  axpy(1.0, snapshot_grad, v);
  return v;
}

DenseVector saga_direction(const CompositeProblem& p, const DenseVector& x, const GradientTable& table,
                           std::span<const std::size_t> batch, OracleMode mode) {
  DenseVector v(p.dim());
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i : batch) {
    p.accumulate_gradient(i, x, inv_b, v, mode);
    axpy(-inv_b, table.entries[i], v);
  }
  axpy(1.0, table.mean, v);
  return v;
}

// ---------------------------------------------------------------------------
// Run bookkeeping
// ---------------------------------------------------------------------------

namespace {

// Uniform choice among all offered iterates with O(d) memory.
class Reservoir {
 public:
  Reservoir(RngStream rng, const DenseVector& fallback, bool log_hashes)
      : rng_(rng), chosen_(fallback), log_hashes_(log_hashes) {}

  void offer(const DenseVector& x) {
    ++seen_;
    if (seen_ == 1 || rng_.uniform_index(seen_) == 0) chosen_ = x;
    if (log_hashes_) hashes_.push_back(hash_bits(x));
  }

  const DenseVector& chosen() const { return chosen_; }
  std::vector<std::uint64_t> take_hashes() { return std::move(hashes_); }

 private:
  RngStream rng_;
  DenseVector chosen_;
  std::size_t seen_ = 0;
  bool log_hashes_;
  std::vector<std::uint64_t> hashes_;
};

class Monitor {
 public:
  Monitor(const CompositeProblem& p, const RunOptions& options, double eta, TraceMetadata meta)
      : p_(p), options_(options), eta_(eta), trace_(std::move(meta)) {}

  void begin(const DenseVector& x) {
    if (tracing()) {
      const TraceRecord r = measure_checkpoint(p_, x, eta_, options_.f_hat);
      trace_.record(r);
      next_mark_ = (std::floor(r.passes / options_.checkpoint_stride) + 1.0) * options_.checkpoint_stride;
    }
  }

  bool exhausted() const { return passes() >= options_.budget_passes; }

  // Called after every prox step; returns true once the budget is spent.
  bool step(const DenseVector& x) {
    if (options_.on_iterate) options_.on_iterate(x);
    const double now = passes();
    if (tracing() && now >= next_mark_) {
      trace_.record(measure_checkpoint(p_, x, eta_, options_.f_hat));
      next_mark_ = (std::floor(now / options_.checkpoint_stride) + 1.0) * options_.checkpoint_stride;
    }
    return now >= options_.budget_passes;
  }

  void finish(const DenseVector& x) {
    if (tracing() && (trace_.empty() || passes() > trace_.records().back().passes)) {
      trace_.record(measure_checkpoint(p_, x, eta_, options_.f_hat));
    }
  }

  RunTrace take_trace() { return std::move(trace_); }

 private:
  bool tracing() const { return options_.checkpoint_stride > 0.0; }
  double passes() const {
    return static_cast<double>(p_.counters().ifo) / static_cast<double>(p_.n());
  }

  const CompositeProblem& p_;
  const RunOptions& options_;
  double eta_;
  RunTrace trace_;
  double next_mark_ = 0.0;
};

TraceMetadata make_meta(const RunOptions& options, const char* default_label, std::string plan, double eta) {
  return {options.solver_label.empty() ? default_label : options.solver_label, options.seed,
          std::move(plan), eta};
}

void check_start(const CompositeProblem& p, const DenseVector& x0) {
  if (x0.size() != p.dim()) throw std::invalid_argument("initial point has wrong dimension");
  if (!x0.all_finite()) throw std::invalid_argument("initial point is not finite");
}

SolverOutput finish_output(const CompositeProblem& p, Monitor& monitor, Reservoir& reservoir,
                           DenseVector x_last, std::size_t iterations, bool exhausted) {
  monitor.finish(x_last);
  SolverOutput out;
  out.x_a = reservoir.chosen();
  out.x_last = std::move(x_last);
  out.trace = monitor.take_trace();
  out.counters = p.counters();
  out.iterations = iterations;
  out.budget_exhausted = exhausted;
  out.iterate_hashes = reservoir.take_hashes();
  return out;
}

// x - eta * v, then prox (one PO call).
DenseVector prox_step(const CompositeProblem& p, const DenseVector& x, const DenseVector& v, double eta) {
  DenseVector y = x;
  axpy(-eta, v, y);
  return p.prox(y, eta);
}

}  // namespace

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

SolverOutput prox_gd(CompositeProblem& p, const DenseVector& x0, double eta, std::size_t T,
                     const RunOptions& options) {
  check_start(p, x0);
  if (!(eta > 0.0)) throw std::invalid_argument("prox_gd: eta must be positive");
  char plan[64];
  std::snprintf(plan, sizeof plan, "eta=%.17g", eta);
  Monitor monitor(p, options, eta, make_meta(options, "proxgd", plan, eta));
  RngStream pick(options.seed);
  Reservoir reservoir(pick.split(), x0, options.log_iterate_hashes);
  monitor.begin(x0);

  DenseVector x = x0;
  std::size_t t = 0;
  bool exhausted = monitor.exhausted();
  for (; t < T && !exhausted; ++t) {
    reservoir.offer(x);
    x = prox_step(p, x, full_gradient(p, x), eta);
    exhausted = monitor.step(x);
  }
  return finish_output(p, monitor, reservoir, std::move(x), t, exhausted);
}

SolverOutput prox_sgd(CompositeProblem& p, const DenseVector& x0, const StepSchedule& schedule,
                      std::size_t b, std::size_t T, RngStream& rng, const RunOptions& options) {
  check_start(p, x0);
  if (!(schedule.eta0 > 0.0) || !(schedule.decay >= 0.0)) {
    throw std::invalid_argument("prox_sgd: need eta0 > 0 and decay >= 0");
  }
  if (b == 0) throw std::invalid_argument("prox_sgd: batch size must be positive");
  char plan[96];
  std::snprintf(plan, sizeof plan, "eta0=%.17g decay=%.17g b=%zu", schedule.eta0, schedule.decay, b);
  Monitor monitor(p, options, schedule.eta0, make_meta(options, "proxsgd", plan, schedule.eta0));
  Reservoir reservoir(rng.split(), x0, options.log_iterate_hashes);
  monitor.begin(x0);

  const std::size_t n = p.n();
  const double F0 = F_value(p, x0, OracleMode::measurement);
  DenseVector x = x0;
  std::size_t t = 0;
  bool exhausted = monitor.exhausted();
  for (; t < T && !exhausted; ++t) {
    reservoir.offer(x);
    const auto batch = options.sampler(rng, n, b);
    DenseVector g(p.dim());
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i : batch) p.accumulate_gradient(i, x, inv_b, g);
    const double eta_t = schedule.at(t, n);
    DenseVector y = x;
    axpy(-eta_t, g, y);
    if (!y.all_finite()) throw DivergenceError("ProxSGD iterate became non-finite at step " + std::to_string(t));
    x = p.prox(y, eta_t);
    if ((t + 1) % n == 0) {
      const double F = F_value(p, x, OracleMode::measurement);
      if (F > F0 + kDivergenceMargin) {
        throw DivergenceError("ProxSGD objective diverged at step " + std::to_string(t + 1));
      }
    }
    exhausted = monitor.step(x);
  }
  return finish_output(p, monitor, reservoir, std::move(x), t, exhausted);
}

SolverOutput prox_svrg(CompositeProblem& p, const DenseVector& x0, const StepPlan& plan, std::size_t S,
                       RngStream& rng, const RunOptions& options) {
  check_start(p, x0);
  if (!(plan.eta > 0.0) || plan.m == 0 || plan.b == 0) {
    throw std::invalid_argument("prox_svrg: plan needs eta > 0, m >= 1, b >= 1");
  }
  Monitor monitor(p, options, plan.eta, make_meta(options, "proxsvrg", plan.describe(), plan.eta));
  Reservoir reservoir(rng.split(), x0, options.log_iterate_hashes);
  monitor.begin(x0);

  const std::size_t n = p.n();
  DenseVector x = x0;
  std::size_t iterations = 0;
  bool exhausted = monitor.exhausted();
  for (std::size_t s = 0; s < S && !exhausted; ++s) {
    // x is both the snapshot and the first inner iterate of this epoch.
    const DenseVector snapshot = x;
    const DenseVector snapshot_grad = full_gradient(p, snapshot);
    for (std::size_t t = 0; t < plan.m && !exhausted; ++t) {
      reservoir.offer(x);
      const auto batch = options.sampler(rng, n, plan.b);
      const DenseVector v = svrg_direction(p, x, snapshot, snapshot_grad, batch);
      x = prox_step(p, x, v, plan.eta);
      ++iterations;
      exhausted = monitor.step(x);
    }
  }
  return finish_output(p, monitor, reservoir, std::move(x), iterations, exhausted);
}

SolverOutput prox_saga(CompositeProblem& p, const DenseVector& x0, const StepPlan& plan, std::size_t T,
                       RngStream& rng, const RunOptions& options, const GradientTable* warm_table) {
  check_start(p, x0);
  if (!(plan.eta > 0.0) || plan.b == 0) throw std::invalid_argument("prox_saga: plan needs eta > 0, b >= 1");
  const std::size_t n = p.n();
  const std::size_t d = p.dim();
  const double inv_n = 1.0 / static_cast<double>(n);

  GradientTable table;
  if (warm_table != nullptr) {
    if (warm_table->entries.size() != n || warm_table->mean.size() != d) {
      throw std::invalid_argument("prox_saga: warm table has wrong shape");
    }
    table = *warm_table;
  } else {
    table.entries.assign(n, DenseVector(d));
    table.mean = DenseVector(d);
    for (std::size_t i = 0; i < n; ++i) {
      p.accumulate_gradient(i, x0, 1.0, table.entries[i]);
      axpy(inv_n, table.entries[i], table.mean);
    }
  }
  const auto recompute_mean = [&] {
    DenseVector mean(d);
    for (const auto& e : table.entries) axpy(inv_n, e, mean);
    return mean;
  };

  Monitor monitor(p, options, plan.eta, make_meta(options, "proxsaga", plan.describe(), plan.eta));
  Reservoir reservoir(rng.split(), x0, options.log_iterate_hashes);
  monitor.begin(x0);

  // stamp[j] == t + 1 marks entries already replaced in step t.
  std::vector<std::size_t> stamp(n, 0);
  DenseVector x = x0;
  std::size_t t = 0;
  bool exhausted = monitor.exhausted();
  for (; t < T && !exhausted; ++t) {
    reservoir.offer(x);
    const auto batch_i = options.sampler(rng, n, plan.b);
    const auto batch_j = options.sampler(rng, n, plan.b);
    const DenseVector v = saga_direction(p, x, table, batch_i);
    DenseVector x_next = prox_step(p, x, v, plan.eta);

    // alpha_j <- x^t for j in J_t; a repeated j is assigned once.
    for (std::size_t j : batch_j) {
      DenseVector fresh(d);
      p.accumulate_gradient(j, x, 1.0, fresh);
      if (stamp[j] == t + 1) continue;
      stamp[j] = t + 1;
      axpy(inv_n, fresh, table.mean);
      axpy(-inv_n, table.entries[j], table.mean);
      table.entries[j] = std::move(fresh);
    }
    if (options.verify_table_mean_every > 0 && (t + 1) % options.verify_table_mean_every == 0) {
      const DenseVector scratch = recompute_mean();
      const double drift = std::sqrt(distance_sq(scratch, table.mean));
      if (drift > 1e-10) {
        throw std::logic_error("ProxSAGA table mean drifted by " + std::to_string(drift));
      }
    }
    if ((t + 1) % n == 0) table.mean = recompute_mean();

    x = std::move(x_next);
    exhausted = monitor.step(x);
  }
  return finish_output(p, monitor, reservoir, std::move(x), t, exhausted);
}

namespace {

template <class Stage>
SolverOutput run_restarts(CompositeProblem& p, const DenseVector& x0, const PlPlan& plan, std::size_t K,
                          const RunOptions& options, const char* label, Stage stage) {
  check_start(p, x0);
  if (!(plan.mu > 0.0)) throw std::invalid_argument("PL restarts need mu > 0");
  if (plan.stage_length == 0) throw std::invalid_argument("PL restarts need a positive stage length");

  RunOptions inner = options;
  if (inner.solver_label.empty()) inner.solver_label = label;

  SolverOutput out;
  out.x_a = x0;
  out.x_last = x0;
  out.trace = RunTrace(make_meta(inner, label, plan.inner.describe(), plan.inner.eta));
  out.stage_points.push_back(x0);
  if (options.checkpoint_stride > 0.0) {
    out.trace.record(measure_checkpoint(p, x0, plan.inner.eta, options.f_hat));
  }

  DenseVector x = x0;
  for (std::size_t k = 0; k < K; ++k) {
    if (static_cast<double>(p.counters().ifo) / static_cast<double>(p.n()) >= options.budget_passes) {
      out.budget_exhausted = true;
      break;
    }
    SolverOutput stage_out = stage(x);
    for (const auto& r : stage_out.trace.records()) {
      if (out.trace.empty() || r.passes > out.trace.records().back().passes) out.trace.record(r);
    }
    out.iterations += stage_out.iterations;
    out.iterate_hashes.insert(out.iterate_hashes.end(), stage_out.iterate_hashes.begin(),
                              stage_out.iterate_hashes.end());
    x = stage_out.x_a;
    out.stage_points.push_back(x);
    if (stage_out.budget_exhausted) {
      out.budget_exhausted = true;
      break;
    }
  }
  out.x_a = x;
  out.x_last = x;
  out.counters = p.counters();
  return out;
}

}  // namespace

SolverOutput pl_svrg(CompositeProblem& p, const DenseVector& x0, const PlPlan& plan, std::size_t K,
                     RngStream& rng, const RunOptions& options) {
  const std::size_t m = std::max<std::size_t>(plan.inner.m, 1);
  const std::size_t epochs = (plan.stage_length + m - 1) / m;
  return run_restarts(p, x0, plan, K, options, "pl-svrg", [&](const DenseVector& x) {
    RunOptions inner = options;
    if (inner.solver_label.empty()) inner.solver_label = "pl-svrg";
    return prox_svrg(p, x, plan.inner, epochs, rng, inner);
  });
}

SolverOutput pl_saga(CompositeProblem& p, const DenseVector& x0, const PlPlan& plan, std::size_t K,
                     RngStream& rng, const RunOptions& options) {
  return run_restarts(p, x0, plan, K, options, "pl-saga", [&](const DenseVector& x) {
    RunOptions inner = options;
    if (inner.solver_label.empty()) inner.solver_label = "pl-saga";
    return prox_saga(p, x, plan.inner, plan.stage_length, rng, inner);
  });
}

WarmStart warm_start(CompositeProblem& p, const DenseVector& x_init, const StepSchedule& schedule,
                     RngStream& rng) {
  check_start(p, x_init);
  const std::size_t n = p.n();
  const std::size_t d = p.dim();
  WarmStart ws;
  ws.table.entries.assign(n, DenseVector(d));
  ws.table.mean = DenseVector(d);
  DenseVector x = x_init;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t i = rng.uniform_index(n);
    DenseVector g(d);
    p.accumulate_gradient(i, x, 1.0, g);
    const double eta_t = schedule.at(t, n);
    DenseVector y = x;
    axpy(-eta_t, g, y);
    if (!y.all_finite()) throw DivergenceError("warm start iterate became non-finite");
    x = p.prox(y, eta_t);
    ws.table.entries[i] = std::move(g);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& e : ws.table.entries) axpy(inv_n, e, ws.table.mean);
  ws.x0 = std::move(x);
  return ws;
}

}  // namespace vrprox
