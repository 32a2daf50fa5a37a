// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [libsvm-file]   (defaults to the bundled digits sample)
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "vrprox/experiment.hpp"
#include "vrprox/libsvm.hpp"
#include "vrprox/metrics.hpp"
#include "vrprox/solvers.hpp"

using namespace vrprox;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double max_abs_diff(const DenseVector& a, const DenseVector& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  return m;
}

ProxOperator random_box(RngStream& rng, std::size_t d) {
  DenseVector lo(d);
  DenseVector hi(d);
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = oracle::uniform(rng, -1.5, 0.5);
    hi[j] = lo[j] + oracle::uniform(rng, 0.0, 2.0);
  }
  return ProxOperator::box(lo, hi);
}

std::vector<ProxOperator> operator_zoo(RngStream& rng, std::size_t d) {
  return {ProxOperator::l1(oracle::uniform(rng, 0.0, 2.0)), random_box(rng, d), ProxOperator::simplex(),
          ProxOperator::ball_nonneg(oracle::uniform(rng, 0.2, 2.0))};
}

DenseVector random_member(const ProxOperator& op, RngStream& rng, std::size_t d) {
  return prox(op, oracle::random_vector(rng, d, 2.0), 1.0);
}

CompositeProblem without_h(const CompositeProblem& p) {
  return CompositeProblem(std::shared_ptr<const SmoothFiniteSum>(&p.smooth(), [](const SmoothFiniteSum*) {}),
                          ProxOperator::zero(), p.lipschitz());
}

CompositeProblem nnpca(std::uint64_t seed, std::size_t n, std::size_t d) {
  RngStream rng(seed);
  return make_synthetic_nnpca(rng, n, d, true);
}

PlQuadraticProblem pl_testbed() {
  RngStream rng(2024);
  return make_synthetic_pl_quadratic(rng, 256, 10, 0.01);
}

Outcome a1_prox_oracle() {
  RngStream rng(101);
  double worst[4] = {0, 0, 0, 0};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const DenseVector x = oracle::random_vector(rng, d, 2.0);
    const double eta = oracle::uniform(rng, 0.05, 2.0);
    const double lambda = oracle::uniform(rng, 0.0, 2.0);
    worst[0] = std::max(worst[0], max_abs_diff(prox(ProxOperator::l1(lambda), x, eta),
                                                oracle::brute_prox_l1(lambda, x, eta)));
    const ProxOperator box = random_box(rng, d);
    const auto& bounds = std::get<regularizer::Box>(box.kind());
    worst[1] = std::max(worst[1], max_abs_diff(prox(box, x, eta), oracle::brute_prox_box(bounds.lo, bounds.hi, x, eta)));
    worst[2] = std::max(worst[2], max_abs_diff(prox(ProxOperator::simplex(), x, eta), oracle::brute_prox_simplex(x, eta)));
    const double r = oracle::uniform(rng, 0.2, 2.0);
    worst[3] = std::max(worst[3], max_abs_diff(prox(ProxOperator::ball_nonneg(r), x, eta),
                                                oracle::brute_prox_ball_nonneg(r, x, eta)));
  }
  const double m = *std::max_element(std::begin(worst), std::end(worst));
  return {m <= 1e-8, fmt("max deviation l1 %.2e box %.2e simplex %.2e ball %.2e", worst[0], worst[1], worst[2], worst[3])};
}

Outcome a2_lemmas() {
  RngStream rng(202);
  std::size_t violations = 0;
  double worst_gap = -kInfinity;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + trial % 4;
    for (const ProxOperator& op : operator_zoo(rng, d)) {
      const double eta = oracle::uniform(rng, 0.05, 2.0);
      if (!prox_three_point_check(op, oracle::random_vector(rng, d, 2.0), random_member(op, rng, d), eta, 1e-9)) {
        ++violations;
      }
      const DenseVector x = random_member(op, rng, d);
      const DenseVector dir = oracle::random_vector(rng, d, 3.0);
      const DenseVector z = random_member(op, rng, d);
      DenseVector step = x;
      axpy(-eta, dir, step);
      const DenseVector y = prox(op, step, eta);
      const double lhs = h_value(op, y) + dot(y - z, dir);
      const double rhs = h_value(op, z) + (distance_sq(z, x) - distance_sq(y, x) - distance_sq(y, z)) / (2.0 * eta);
      worst_gap = std::max(worst_gap, lhs - rhs);
      if (lhs > rhs + 1e-9) ++violations;
    }
  }

  // Variance bounds by exact enumeration of single-index and two-index batches.
  std::size_t variance_violations = 0;
  for (int family = 0; family < 2; ++family) {
    const std::size_t n = 12;
    const std::size_t d = 3;
    RngStream frng(300 + family);
    const CompositeProblem p =
        family == 0 ? nnpca(310, n, d) : make_synthetic_pl_quadratic(frng, n, d, 0.05).problem;
    const double L2 = p.lipschitz() * p.lipschitz();
    for (int state = 0; state < 100; ++state) {
      const DenseVector x = oracle::random_ball_nonneg(rng, d, 1.0);
      const DenseVector snap = oracle::random_ball_nonneg(rng, d, 1.0);
      const DenseVector g_snap = full_gradient(p, snap, OracleMode::measurement);
      const DenseVector g_x = full_gradient(p, x, OracleMode::measurement);
      std::vector<DenseVector> alphas;
      GradientTable table{{}, DenseVector(d)};
      double spread = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        alphas.push_back(oracle::random_ball_nonneg(rng, d, 1.0));
        spread += distance_sq(x, alphas.back());
        table.entries.push_back(p.ifo(i, alphas[i], OracleMode::measurement).gradient);
        axpy(1.0 / n, table.entries.back(), table.mean);
      }
      for (std::size_t b : {1u, 2u}) {
        double svrg_var = 0.0;
        double saga_var = 0.0;
        const std::size_t count = b == 1 ? n : n * n;
        for (std::size_t k = 0; k < count; ++k) {
          const std::vector<std::size_t> batch = b == 1 ? std::vector<std::size_t>{k}
                                                        : std::vector<std::size_t>{k / n, k % n};
          svrg_var += distance_sq(g_x, svrg_direction(p, x, snap, g_snap, batch, OracleMode::measurement));
          saga_var += distance_sq(g_x, saga_direction(p, x, table, batch, OracleMode::measurement));
        }
        svrg_var /= static_cast<double>(count);
        saga_var /= static_cast<double>(count);
        if (svrg_var > L2 / b * distance_sq(x, snap) * (1 + 1e-12) + 1e-15) ++variance_violations;
        if (saga_var > L2 / (n * b) * spread * (1 + 1e-12) + 1e-15) ++variance_violations;
      }
    }
  }
  return {violations == 0 && variance_violations == 0,
          fmt("prox inequality violations %zu (worst gap %.2e), variance bound violations %zu", violations,
              worst_gap, variance_violations)};
}

Outcome a3_nonconvex_bounds() {
  const CompositeProblem base = nnpca(303, 512, 2);
  const double L = base.lipschitz();
  const double f_star = grid_optimum_2d(base).F;
  const DenseVector x0 = initial_point(base, 7);
  const double gap0 = F_value(base, x0, OracleMode::measurement) - f_star;

  const StepPlan svrg_plan = plan_svrg(512, 1, L, SvrgMode::thm2);
  const std::size_t S = 25;
  const std::size_t T = S * svrg_plan.m;
  const StepPlan saga_plan = plan_saga(512, 1, L, SagaMode::thm4);

  double svrg_mean = 0.0;
  double saga_mean = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    CompositeProblem p = base.with_fresh_counters();
    RngStream rng(5000 + s);
    const SolverOutput a = prox_svrg(p, x0, svrg_plan, S, rng);
    svrg_mean += gradient_mapping_norm_sq(p, a.x_a, svrg_plan.eta) / seeds;
    CompositeProblem q = base.with_fresh_counters();
    const SolverOutput b = prox_saga(q, x0, saga_plan, T, rng);
    saga_mean += gradient_mapping_norm_sq(q, b.x_a, saga_plan.eta) / seeds;
  }
  const double svrg_bound = 18.0 * L * gap0 / static_cast<double>(T);
  const double saga_bound = 50.0 * L * gap0 / (3.0 * static_cast<double>(T));
  return {svrg_mean <= 1.1 * svrg_bound && saga_mean <= 1.1 * saga_bound,
          fmt("b=%zu m=%zu T=%zu; svrg %.3e vs bound %.3e, saga %.3e vs bound %.3e", svrg_plan.b, svrg_plan.m, T,
              svrg_mean, svrg_bound, saga_mean, saga_bound)};
}

Outcome a4_pl_linear() {
  const PlQuadraticProblem pl = pl_testbed();
  const double L = pl.problem.lipschitz();
  RngStream xr(404);
  const DenseVector x0 = oracle::random_vector(xr, 10, 1.0);
  CompositeProblem gd = pl.problem.with_fresh_counters();
  const double f_star = F_value(gd, prox_gd(gd, x0, 1.0 / L, 10000).x_last, OracleMode::measurement);
  const double gap0 = F_value(pl.problem, x0, OracleMode::measurement) - f_star;
  const PlPlan plan = plan_pl(256, L, pl.mu);
  constexpr std::size_t K = 4;
  constexpr int seeds = 20;

  bool pass = true;
  std::string detail = fmt("kappa %.1f, stage %zu;", pl.kappa(), plan.stage_length);
  for (int which = 0; which < 2; ++which) {
    std::vector<double> mean_gap(K + 1, 0.0);
    for (int s = 0; s < seeds; ++s) {
      CompositeProblem p = pl.problem.with_fresh_counters();
      RngStream rng(7000 + s);
      const SolverOutput out = which == 0 ? pl_svrg(p, x0, plan, K, rng) : pl_saga(p, x0, plan, K, rng);
      for (std::size_t k = 0; k <= K; ++k) {
        mean_gap[k] += (F_value(p, out.stage_points[k], OracleMode::measurement) - f_star) / seeds;
      }
    }
    detail += which == 0 ? " pl-svrg ratios" : " pl-saga ratios";
    for (std::size_t k = 1; k <= K; ++k) {
      const double bound = gap0 / std::ldexp(1.0, static_cast<int>(k)) * 1.25;
      pass = pass && mean_gap[k] <= bound;
      detail += fmt(" %.2e", mean_gap[k] / bound);
    }
  }
  return {pass, detail};
}

Outcome a5_counters() {
  RngStream rng(505);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(60);
    const CompositeProblem base = nnpca(600 + trial, n, 3);
    const std::size_t S = 1 + rng.uniform_index(5);
    const std::size_t m = 1 + rng.uniform_index(20);
    const std::size_t b = 1 + rng.uniform_index(n);
    RunOptions opts;
    opts.checkpoint_stride = 0.5;
    CompositeProblem p = base.with_fresh_counters();
    const SolverOutput svrg = prox_svrg(p, DenseVector(3, 0.3), manual_plan(0.1, m, b, 2.0), S, rng, opts);
    if (!(svrg.counters == OracleCounters{S * (n + 2 * m * b), S * m})) ++mismatches;
    const std::size_t T = rng.uniform_index(80);
    CompositeProblem q = base.with_fresh_counters();
    const SolverOutput saga = prox_saga(q, DenseVector(3, 0.3), manual_plan(0.1, 0, b, 2.0), T, rng, opts);
    if (!(saga.counters == OracleCounters{n + 2 * b * T, T})) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu mismatches over 100 runs", mismatches)};
}

std::vector<DenseVector> trajectory(const std::function<void(RunOptions&)>& run) {
  std::vector<DenseVector> xs;
  RunOptions opts;
  opts.on_iterate = [&](const DenseVector& x) { xs.push_back(x); };
  run(opts);
  return xs;
}

Outcome a6_degeneracy() {
  const PlQuadraticProblem pl = pl_testbed();
  const std::size_t n = pl.problem.n();
  const double eta = 1.0 / pl.problem.lipschitz();
  const DenseVector x0(10, 1.0);
  CompositeProblem a = pl.problem.with_fresh_counters();
  const auto gd = trajectory([&](RunOptions& o) { prox_gd(a, x0, eta, 100, o); });
  RngStream rng(606);
  CompositeProblem b = pl.problem.with_fresh_counters();
  const auto svrg = trajectory([&](RunOptions& o) {
    o.sampler = full_batch_sampler();
    prox_svrg(b, x0, manual_plan(eta, 10, n, pl.problem.lipschitz()), 10, rng, o);
  });
  CompositeProblem c = pl.problem.with_fresh_counters();
  const auto sgd = trajectory([&](RunOptions& o) {
    o.sampler = full_batch_sampler();
    prox_sgd(c, x0, {eta, 0.0}, n, 100, rng, o);
  });
  if (gd.size() != 100 || svrg.size() < 100 || sgd.size() != 100) return {false, "trajectory length mismatch"};
  double worst_svrg = 0.0;
  double worst_sgd = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    worst_svrg = std::max(worst_svrg, max_abs_diff(svrg[t], gd[t]));
    worst_sgd = std::max(worst_sgd, max_abs_diff(sgd[t], gd[t]));
  }
  return {worst_svrg <= 1e-12 && worst_sgd <= 1e-12,
          fmt("max deviation svrg %.2e sgd %.2e", worst_svrg, worst_sgd)};
}

Outcome a7_gradient_mapping() {
  const PlQuadraticProblem pl = pl_testbed();
  const CompositeProblem nn = nnpca(707, 200, 6);
  RngStream rng(708);
  double worst = 0.0;
  for (const CompositeProblem* p : {&pl.problem, &nn}) {
    const CompositeProblem smooth = without_h(*p);
    for (int k = 0; k < 100; ++k) {
      const DenseVector x = oracle::random_vector(rng, p->dim(), 2.0);
      const double eta = oracle::uniform(rng, 0.01, 1.0);
      worst = std::max(worst, std::sqrt(distance_sq(gradient_mapping(smooth, x, eta),
                                                    full_gradient(smooth, x, OracleMode::measurement))));
    }
  }
  CompositeProblem gd = pl.problem.with_fresh_counters();
  const double eta = 1.0 / gd.lipschitz();
  const DenseVector fixed = prox_gd(gd, DenseVector(10, 1.0), eta, 50000).x_last;
  const double g = std::sqrt(gradient_mapping_norm_sq(gd, fixed, eta));
  return {worst <= 1e-12 && g <= 1e-8, fmt("identity deviation %.2e, norm at fixed point %.2e", worst, g)};
}

Outcome a8_figure(const fs::path& libsvm) {
  const std::vector<double> decays{0.0, 0.1, 1.0, 10.0};
  bool pass = true;
  std::string detail;
  for (int which = 0; which < 2; ++which) {
    ExperimentConfig cfg;
    if (which == 0) {
      cfg.problem.kind = ProblemSpec::Kind::synthetic_nnpca;
      cfg.problem.n = 512;
      cfg.problem.d = 20;
    } else {
      cfg.problem.kind = ProblemSpec::Kind::libsvm;
      cfg.problem.path = libsvm;
    }
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.passes = 20.0;
    cfg.warm_start = true;
    cfg.batch = 1;
    const LoadedProblem lp = build_problem(cfg.problem);
    const double L = lp.problem.lipschitz();
    const double f_hat = estimate_f_hat(lp.problem, 10000, 5);
    std::vector<double> etas;
    for (double c : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0}) etas.push_back(c / L);

    auto tuned = [&](SolverId id) {
      ExperimentConfig c = cfg;
      c.solvers = {id};
      return tune_step_size(c, lp, f_hat, etas, decays);
    };
    const TuneResult sgd = tuned(SolverId::proxsgd);
    const TuneResult svrg = tuned(SolverId::proxsvrg);
    const TuneResult saga = tuned(SolverId::proxsaga);
    pass = pass && svrg.median_final_subopt <= sgd.median_final_subopt &&
           saga.median_final_subopt <= sgd.median_final_subopt;
    detail += fmt("%s%s: sgd %.3e (eta0 L=%.2g, decay %.2g), svrg %.3e, saga %.3e", which ? "; " : "",
                  which ? libsvm.filename().c_str() : "synthetic", sgd.median_final_subopt, sgd.eta * L, sgd.decay,
                  svrg.median_final_subopt, saga.median_final_subopt);
  }
  return {pass, detail};
}

Outcome a9_scaling() {
  const CompositeProblem base = nnpca(909, 512, 2);
  const StepPlan plan = plan_svrg(512, 1, base.lipschitz(), SvrgMode::thm2);
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  const int seeds = 10;
  std::vector<double> mean_iters(eps.size(), 0.0);
  for (int s = 0; s < seeds; ++s) {
    CompositeProblem p = base.with_fresh_counters();
    RngStream rng(9100 + s);
    std::vector<std::size_t> crossing(eps.size(), 0);
    double sum = 0.0;
    std::size_t t = 0;
    RunOptions opts;
    opts.on_iterate = [&](const DenseVector& x) {
      sum += gradient_mapping_norm_sq(p, x, plan.eta);
      ++t;
      for (std::size_t k = 0; k < eps.size(); ++k) {
        if (crossing[k] == 0 && sum / static_cast<double>(t) <= eps[k]) crossing[k] = t;
      }
    };
    // An interior start is far from stationary; the origin is a saddle and would be a poor choice.
    prox_svrg(p, DenseVector{0.5, 0.0}, plan, 20000, rng, opts);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      if (crossing[k] == 0) return {false, fmt("eps %.0e never crossed", eps[k])};
      mean_iters[k] += static_cast<double>(crossing[k]) / seeds;
    }
  }
  // Least-squares slope of log(iterations) against log(eps).
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    mx += std::log(eps[k]) / eps.size();
    my += std::log(mean_iters[k]) / eps.size();
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    sxy += (std::log(eps[k]) - mx) * (std::log(mean_iters[k]) - my);
    sxx += (std::log(eps[k]) - mx) * (std::log(eps[k]) - mx);
  }
  const double slope = sxy / sxx;
  return {slope >= -1.3 && slope <= -0.7, fmt("slope %.3f, mean crossings %.0f %.0f %.0f %.0f", slope, mean_iters[0],
                                              mean_iters[1], mean_iters[2], mean_iters[3])};
}

Outcome a10_io() {
  RngStream rng(1010);
  std::size_t libsvm_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(30);
    const std::size_t d = 1 + rng.uniform_index(40);
    Dataset ds;
    ds.dim = d;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<SparseVector::Entry> entries;
      for (std::size_t j = 0; j < d; ++j) {
        if (rng.uniform01() < 0.3 || (i + 1 == n && j + 1 == d)) {
          entries.push_back({j, rng.normal() * std::pow(10.0, rng.normal() * 3)});
        }
      }
      ds.rows.emplace_back(d, entries);
      ds.labels.push_back(static_cast<double>(rng.uniform_index(5)) - 2.0);
    }
    std::ostringstream out;
    write_libsvm(out, ds);
    std::istringstream in(out.str());
    if (!(parse_libsvm(in) == ds)) ++libsvm_failures;
  }

  const fs::path dir = fs::temp_directory_path() / ("vrprox_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  ExperimentConfig cfg;
  cfg.problem.n = 128;
  cfg.problem.d = 5;
  cfg.solvers = {SolverId::proxsgd, SolverId::proxsvrg, SolverId::proxsaga};
  cfg.seeds = {1, 2, 3};
  cfg.passes = 5.0;
  cfg.stride = 0.5;
  cfg.baseline_iters = 500;
  const ExperimentResult r = run_experiment(cfg);
  emit_csv(r.traces, dir / "traces.csv");
  const auto back = read_csv(dir / "traces.csv");
  double worst = 0.0;
  bool structure = back.size() == r.traces.size();
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); };
  for (std::size_t k = 0; structure && k < back.size(); ++k) {
    structure = back[k].metadata().solver == r.traces[k].metadata().solver && back[k].size() == r.traces[k].size();
    for (std::size_t i = 0; structure && i < back[k].size(); ++i) {
      const auto& x = back[k].records()[i];
      const auto& y = r.traces[k].records()[i];
      structure = x.ifo == y.ifo && x.po == y.po && x.subopt.has_value() == y.subopt.has_value();
      worst = std::max({worst, rel(x.passes, y.passes), rel(x.F, y.F), rel(x.gmap_sq, y.gmap_sq),
                        y.subopt ? rel(*x.subopt, *y.subopt) : 0.0});
    }
  }

  emit_svg(r.summary, dir / "plot.svg");
  std::size_t polylines = 0;
  bool svg_ok = true;
  try {
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml((dir / "plot.svg").string(), tree);
    for (const auto& child : tree.get_child("svg")) polylines += child.first == "polyline";
  } catch (const std::exception&) {
    svg_ok = false;
  }
  fs::remove_all(dir);
  svg_ok = svg_ok && polylines == r.summary.size();
  return {libsvm_failures == 0 && structure && worst <= 1e-15 && svg_ok,
          fmt("libsvm mismatches %zu, csv max rel error %.1e, svg %s with %zu series", libsvm_failures, worst,
              svg_ok ? "well-formed" : "malformed", polylines)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path libsvm = argc > 1 ? fs::path(argv[1]) : fs::path(VRPROX_TEST_DATA) / "digits.libsvm";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1 prox oracle", a1_prox_oracle},
      {"A2 prox and variance inequalities", a2_lemmas},
      {"A3 nonconvex stationarity bounds", a3_nonconvex_bounds},
      {"A4 PL linear convergence", a4_pl_linear},
      {"A5 oracle counters", a5_counters},
      {"A6 full-batch degeneracy", a6_degeneracy},
      {"A7 gradient mapping", a7_gradient_mapping},
      {"A8 variance reduction beats tuned SGD", [&] { return a8_figure(libsvm); }},
      {"A9 1/eps scaling", a9_scaling},
      {"A10 parsers and writers", a10_io},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s [%.1fs] %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
