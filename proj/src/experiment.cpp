#include "vrprox/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "vrprox/libsvm.hpp"

namespace vrprox {

namespace {

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("invalid ") + what + " '" + s + "'");
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("invalid ") + what + " '" + s + "'");
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t bits_of(double v) {
  std::uint64_t b;
  static_assert(sizeof b == sizeof v);
  std::memcpy(&b, &v, sizeof b);
  return b;
}

bool is_pl(SolverId id) { return id == SolverId::pl_svrg || id == SolverId::pl_saga; }

}  // namespace

std::string to_string(SolverId id) {
  switch (id) {
    case SolverId::proxgd: return "proxgd";
    case SolverId::proxsgd: return "proxsgd";
    case SolverId::proxsvrg: return "proxsvrg";
    case SolverId::proxsaga: return "proxsaga";
    case SolverId::pl_svrg: return "pl-svrg";
    case SolverId::pl_saga: return "pl-saga";
  }
  return "unknown";
}

SolverId parse_solver_id(const std::string& s) {
  for (SolverId id : {SolverId::proxgd, SolverId::proxsgd, SolverId::proxsvrg, SolverId::proxsaga,
                      SolverId::pl_svrg, SolverId::pl_saga}) {
    if (to_string(id) == s) return id;
  }
  throw ConfigError("unknown solver '" + s + "'");
}

void parse_problem_params(const std::string& text, ProblemSpec& spec) {
  for (const std::string& item : split(text, ',')) {
    const std::string kv = trim(item);
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in problem params, got '" + kv + "'");
    const std::string key = trim(kv.substr(0, eq));
    const std::string value = trim(kv.substr(eq + 1));
    if (key == "n") {
      spec.n = parse_u64(value, "n");
    } else if (key == "d") {
      spec.d = parse_u64(value, "d");
    } else if (key == "seed") {
      spec.data_seed = parse_u64(value, "data seed");
    } else if (key == "lambda") {
      spec.lambda = parse_double(value, "lambda");
    } else if (key == "normalize") {
      spec.normalize = parse_u64(value, "normalize") != 0;
    } else {
      throw ConfigError("unknown problem parameter '" + key + "'");
    }
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& raw : split(text, ',')) {
    const std::string part = trim(raw);
    if (part.empty()) throw ConfigError("empty entry in seed list '" + text + "'");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_u64(part, "seed"));
      continue;
    }
    const std::uint64_t lo = parse_u64(part.substr(0, dots), "seed range start");
    const std::uint64_t hi = parse_u64(part.substr(dots + 2), "seed range end");
    if (hi < lo) throw ConfigError("seed range '" + part + "' is decreasing");
    if (hi - lo > 1000000) throw ConfigError("seed range '" + part + "' is too large");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

// --- validation ---------------------------------------------------------------

namespace {

bool plan_allowed(SolverId id, const std::string& plan) {
  if (plan.empty()) return true;
  switch (id) {
    case SolverId::proxgd:
    case SolverId::proxsgd: return plan == "manual";
    case SolverId::proxsvrg: return plan == "thm1" || plan == "thm2" || plan == "general" || plan == "manual";
    case SolverId::proxsaga: return plan == "thm3" || plan == "thm4" || plan == "general" || plan == "manual";
    case SolverId::pl_svrg:
    case SolverId::pl_saga: return plan == "thm7";
  }
  return false;
}

StepPlan make_vr_plan(const ExperimentConfig& cfg, SolverId id, const CompositeProblem& p) {
  const std::size_t n = p.n();
  const double L = p.lipschitz();
  const std::string plan = cfg.plan;
  if (id == SolverId::proxsvrg) {
    if (plan.empty() || plan == "thm2") return plan_svrg(n, 1, L, SvrgMode::thm2);
    if (plan == "thm1") return plan_svrg(n, 1, L, SvrgMode::thm1);
    if (plan == "general") return plan_svrg(n, *cfg.batch, L, SvrgMode::general);
    return manual_plan(*cfg.eta, cfg.epoch_len.value_or(n), cfg.batch.value_or(1), L);
  }
  if (plan.empty() || plan == "thm4") return plan_saga(n, 1, L, SagaMode::thm4);
  if (plan == "thm3") return plan_saga(n, 1, L, SagaMode::thm3);
  if (plan == "general") return plan_saga(n, *cfg.batch, L, SagaMode::general);
  return manual_plan(*cfg.eta, 0, cfg.batch.value_or(1), L);
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& cfg, std::size_t n) {
  if (!(cfg.passes > 0.0) || !std::isfinite(cfg.passes)) throw ConfigError("passes budget must be positive");
  if (!(cfg.stride > 0.0) || !std::isfinite(cfg.stride)) throw ConfigError("checkpoint stride must be positive");
  if (cfg.seeds.empty()) throw ConfigError("seed list is empty");
  if (cfg.solvers.empty()) throw ConfigError("no solver selected");
  if (cfg.batch && (*cfg.batch == 0 || *cfg.batch > n)) {
    throw ConfigError("batch size must be in [1, n] (n = " + std::to_string(n) + ")");
  }
  if (cfg.eta && !(*cfg.eta > 0.0)) throw ConfigError("eta must be positive");
  if (cfg.eta0 && !(*cfg.eta0 > 0.0)) throw ConfigError("eta0 must be positive");
  if (!(cfg.eta_decay >= 0.0)) throw ConfigError("eta decay must be nonnegative");
  if (cfg.warm_eta && !(*cfg.warm_eta > 0.0)) throw ConfigError("warm-start step must be positive");
  if (cfg.epoch_len && *cfg.epoch_len == 0) throw ConfigError("epoch length must be positive");

  const bool any_svrg = std::any_of(cfg.solvers.begin(), cfg.solvers.end(),
                                    [](SolverId id) { return id == SolverId::proxsvrg; });
  if (cfg.epoch_len && !any_svrg) throw ConfigError("epoch length applies only to proxsvrg");
  for (SolverId id : cfg.solvers) {
    if (!plan_allowed(id, cfg.plan)) {
      throw ConfigError("plan '" + cfg.plan + "' does not apply to solver " + to_string(id));
    }
    if (cfg.plan == "manual" && (id == SolverId::proxsvrg || id == SolverId::proxsaga) && !cfg.eta) {
      throw ConfigError("manual plan for " + to_string(id) + " needs --eta");
    }
    if (cfg.plan == "general" && !cfg.batch) throw ConfigError("general plan needs --batch");
  }

  // Step-condition warnings need L and are added by run_experiment.
  return {};
}

namespace {

std::vector<std::string> plan_checks(const ExperimentConfig& cfg, const LoadedProblem& lp) {
  std::vector<std::string> warnings = validate(cfg, lp.problem.n());
  for (SolverId id : cfg.solvers) {
    if (is_pl(id) && !cfg.mu && !lp.mu) {
      throw ConfigError(to_string(id) + " needs a PL constant; pass --mu or use a PL problem");
    }
    if (cfg.plan == "manual" && (id == SolverId::proxsvrg || id == SolverId::proxsaga)) {
      const StepPlan plan = make_vr_plan(cfg, id, lp.problem);
      for (const std::string& w : plan_warnings(plan, lp.problem.n(), id == SolverId::proxsaga)) {
        warnings.push_back(to_string(id) + ": " + w);
      }
    }
  }
  return warnings;
}

}  // namespace

// --- problems and baselines -----------------------------------------------------

LoadedProblem build_problem(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemSpec::Kind::libsvm: {
      Dataset ds = load_libsvm(spec.path, spec.dim);
      if (spec.normalize) ds = normalize_rows(ds);
      std::uint64_t h = mix(0x11b5, ds.dim);
      for (const auto& row : ds.rows) {
        h = mix(h, row.nnz());
        for (const auto& e : row.entries()) h = mix(mix(h, e.index), bits_of(e.value));
      }
      return {make_nnpca(std::move(ds.rows)), std::nullopt, h};
    }
    case ProblemSpec::Kind::synthetic_nnpca: {
      RngStream rng(spec.data_seed);
      std::uint64_t h = mix(mix(mix(mix(0x5e7, spec.n), spec.d), spec.data_seed), spec.normalize ? 1 : 0);
      return {make_synthetic_nnpca(rng, spec.n, spec.d, spec.normalize), std::nullopt, h};
    }
    case ProblemSpec::Kind::pl_quadratic: {
      RngStream rng(spec.data_seed);
      PlQuadraticProblem pl = make_synthetic_pl_quadratic(rng, spec.n, spec.d, spec.lambda);
      std::uint64_t h = mix(mix(mix(mix(0x91, spec.n), spec.d), spec.data_seed), bits_of(spec.lambda));
      return {std::move(pl.problem), pl.mu, h};
    }
  }
  throw ConfigError("unknown problem kind");
}

DenseVector initial_point(const CompositeProblem& p, std::uint64_t seed) {
  RngStream rng(mix(seed, 0x1a2b3c4d));
  const std::size_t d = p.dim();
  DenseVector g(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) g[j] = std::abs(rng.normal()) * scale;
  return prox(p.regularizer(), g, 1.0);
}

double estimate_f_hat(const CompositeProblem& p, std::size_t iters, std::size_t starts) {
  if (p.dim() == 2 && std::holds_alternative<regularizer::BallNonneg>(p.regularizer().kind())) {
    return grid_optimum_2d(p).F;
  }
  double best = kInfinity;
  for (std::size_t s = 0; s < std::max<std::size_t>(starts, 1); ++s) {
    CompositeProblem copy = p.with_fresh_counters();
    const DenseVector x0 = initial_point(copy, 0xbA5E + s);
    const SolverOutput out = prox_gd(copy, x0, 1.0 / p.lipschitz(), iters);
    best = std::min({best, F_value(copy, out.x_last, OracleMode::measurement),
                     F_value(copy, x0, OracleMode::measurement)});
  }
  return best;
}

double cached_f_hat(const LoadedProblem& lp, std::size_t iters, std::size_t starts,
                    const std::optional<std::filesystem::path>& cache) {
  const std::string key = std::to_string(lp.fingerprint) + ":" + std::to_string(iters) + ":" +
                          std::to_string(starts);
  if (cache && std::filesystem::exists(*cache)) {
    try {
      const auto kv = read_config_file(*cache);
      if (kv.count("key") && kv.at("key") == key && kv.count("f_hat")) {
        return parse_double(kv.at("f_hat"), "cached f_hat");
      }
    } catch (const ConfigError&) {
      // Stale or corrupt cache: recompute below.
    }
  }
  const double f_hat = estimate_f_hat(lp.problem, iters, starts);
  if (cache) {
    std::ofstream out(*cache);
    if (!out) throw IoError("cannot write baseline cache " + cache->string());
    out << "key=" << key << "\nf_hat=" << fmt17(f_hat) << "\n";
  }
  return f_hat;
}

// --- running ---------------------------------------------------------------------

namespace {

RunTrace run_single(const ExperimentConfig& cfg, SolverId id, std::uint64_t seed, const LoadedProblem& lp,
                    double f_hat) {
  CompositeProblem p = lp.problem.with_fresh_counters();
  const double L = p.lipschitz();
  RngStream rng(seed);
  DenseVector x = initial_point(p, seed);

  RunOptions options;
  options.checkpoint_stride = cfg.stride;
  options.f_hat = f_hat;
  options.budget_passes = cfg.passes;
  options.seed = seed;
  options.solver_label = to_string(id);

  std::optional<WarmStart> warm;
  if (cfg.warm_start) {
    const double step = cfg.warm_eta.value_or(cfg.eta0.value_or(1.0 / L));
    warm = warm_start(p, x, StepSchedule{step, 0.0}, rng);
    x = warm->x0;
  }

  SolverOutput out;
  switch (id) {
    case SolverId::proxgd:
      out = prox_gd(p, x, cfg.eta.value_or(1.0 / L), kUnbounded, options);
      break;
    case SolverId::proxsgd:
      out = prox_sgd(p, x, StepSchedule{cfg.eta0.value_or(1.0 / L), cfg.eta_decay}, cfg.batch.value_or(1),
                     kUnbounded, rng, options);
      break;
    case SolverId::proxsvrg:
      out = prox_svrg(p, x, make_vr_plan(cfg, id, p), kUnbounded, rng, options);
      break;
    case SolverId::proxsaga:
      out = prox_saga(p, x, make_vr_plan(cfg, id, p), kUnbounded, rng, options,
                      warm ? &warm->table : nullptr);
      break;
    case SolverId::pl_svrg:
    case SolverId::pl_saga: {
      const PlPlan plan = plan_pl(p.n(), L, cfg.mu ? *cfg.mu : *lp.mu);
      out = id == SolverId::pl_svrg ? pl_svrg(p, x, plan, kUnbounded, rng, options)
                                    : pl_saga(p, x, plan, kUnbounded, rng, options);
      break;
    }
  }
  if (cfg.warm_start) out.trace.metadata().plan += " warm_start=1";
  return std::move(out.trace);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const LoadedProblem lp = build_problem(cfg.problem);
  validate(cfg, lp.problem.n());
  std::optional<std::filesystem::path> cache = cfg.baseline_cache;
  if (!cache && cfg.problem.kind == ProblemSpec::Kind::libsvm) {
    cache = std::filesystem::path(cfg.problem.path.string() + ".fhat");
  }
  const double f_hat = cached_f_hat(lp, cfg.baseline_iters, cfg.baseline_starts, cache);
  return run_experiment(cfg, lp, f_hat);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const LoadedProblem& lp, double f_hat) {
  ExperimentResult result;
  result.warnings = plan_checks(cfg, lp);
  result.f_hat = f_hat;

  struct Task {
    SolverId id;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (SolverId id : cfg.solvers) {
    for (std::uint64_t seed : cfg.seeds) tasks.push_back({id, seed});
  }
  std::vector<RunTrace> traces(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        traces[k] = run_single(cfg, tasks[k].id, tasks[k].seed, lp, f_hat);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.traces = std::move(traces);
  result.summary = summarize(result.traces);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 == 1 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

std::vector<SummaryCurve> summarize(const std::vector<RunTrace>& traces) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunTrace*>> groups;
  for (const auto& t : traces) {
    const std::string& name = t.metadata().solver;
    if (!groups.count(name)) order.push_back(name);
    groups[name].push_back(&t);
  }
  std::vector<SummaryCurve> out;
  for (const std::string& name : order) {
    const auto& group = groups[name];
    std::size_t len = kUnbounded;
    for (const RunTrace* t : group) len = std::min(len, t->size());
    SummaryCurve curve;
    curve.solver = name;
    for (std::size_t k = 0; k < len; ++k) {
      std::vector<double> passes;
      std::vector<double> subopt;
      std::vector<double> F;
      for (const RunTrace* t : group) {
        const TraceRecord& r = t->records()[k];
        passes.push_back(r.passes);
        F.push_back(r.F);
        subopt.push_back(r.subopt.value_or(std::numeric_limits<double>::quiet_NaN()));
      }
      curve.passes.push_back(median(passes));
      curve.F.push_back(median(F));
      const bool known = std::none_of(subopt.begin(), subopt.end(), [](double v) { return std::isnan(v); });
      curve.subopt.push_back(known ? median(subopt) : std::numeric_limits<double>::quiet_NaN());
    }
    out.push_back(std::move(curve));
  }
  return out;
}

// --- CSV ---------------------------------------------------------------------------

void emit_csv(const std::vector<RunTrace>& traces, const std::filesystem::path& path) {
  if (traces.empty()) throw std::invalid_argument("emit_csv: no traces to write");
  std::ostringstream body;
  body << "solver,seed,passes,ifo,po,F,subopt,gmap_sq\n";
  for (const auto& t : traces) {
    for (const auto& r : t.records()) {
      body << t.metadata().solver << ',' << t.metadata().seed << ',' << fmt17(r.passes) << ',' << r.ifo << ','
           << r.po << ',' << fmt17(r.F) << ',' << (r.subopt ? fmt17(*r.subopt) : std::string()) << ','
           << fmt17(r.gmap_sq) << '\n';
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV to " + path.string());
  out << body.str();
  if (!out) throw IoError("failed writing CSV to " + path.string());
}

std::vector<RunTrace> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "solver,seed,passes,ifo,po,F,subopt,gmap_sq") {
    throw ParseError(1, "unexpected CSV header");
  }
  std::vector<RunTrace> traces;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 8) throw ParseError(line_no, "expected 8 CSV fields");
    try {
      const std::uint64_t seed = parse_u64(fields[1], "seed");
      if (traces.empty() || traces.back().metadata().solver != fields[0] || traces.back().metadata().seed != seed) {
        TraceMetadata meta;
        meta.solver = fields[0];
        meta.seed = seed;
        traces.emplace_back(meta);
      }
      TraceRecord r;
      r.passes = parse_double(fields[2], "passes");
      r.ifo = parse_u64(fields[3], "ifo");
      r.po = parse_u64(fields[4], "po");
      r.F = parse_double(fields[5], "F");
      if (!fields[6].empty()) r.subopt = parse_double(fields[6], "subopt");
      r.gmap_sq = parse_double(fields[7], "gmap_sq");
      traces.back().record(r);
    } catch (const ConfigError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return traces;
}

// --- SVG ---------------------------------------------------------------------------

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr double kSubFloor = 1e-16;

}  // namespace

void emit_svg(const std::vector<SummaryCurve>& summary, const std::filesystem::path& path) {
  if (summary.empty()) throw std::invalid_argument("emit_svg: empty summary");
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 500.0;
  constexpr double kLeft = 80.0;
  constexpr double kRight = 180.0;
  constexpr double kTop = 30.0;
  constexpr double kBottom = 60.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = kInfinity;
  double x_max = -kInfinity;
  double y_min = kInfinity;
  double y_max = -kInfinity;
  for (const auto& c : summary) {
    for (std::size_t k = 0; k < c.passes.size(); ++k) {
      if (!std::isfinite(c.subopt[k])) continue;
      const double y = std::log10(std::max(c.subopt[k], kSubFloor));
      x_min = std::min(x_min, c.passes[k]);
      x_max = std::max(x_max, c.passes[k]);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0.0;
    x_max = 1.0;
    y_min = 0.0;
    y_max = 1.0;
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) {
    y_max += 0.5;
    y_min -= 0.5;
  }
  const auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto sy = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "  <rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 4.0;
    const double yv = y_min + (y_max - y_min) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    svg << "  <text x=\"" << sx(xv) << "\" y=\"" << kTop + plot_h + 18 << "\" font-size=\"12\" text-anchor=\"middle\">"
        << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    svg << "  <text x=\"" << kLeft - 6 << "\" y=\"" << sy(yv) + 4 << "\" font-size=\"12\" text-anchor=\"end\">" << buf
        << "</text>\n";
  }
  svg << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">effective passes</text>\n"
      << "  <text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">log10 suboptimality</text>\n";

  for (std::size_t c = 0; c < summary.size(); ++c) {
    const auto& curve = summary[c];
    const char* color = kColors[c % std::size(kColors)];
    svg << "  <polyline class=\"series\" data-solver=\"" << xml_escape(curve.solver) << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < curve.passes.size(); ++k) {
      if (!std::isfinite(curve.subopt[k])) continue;
      const double y = std::log10(std::max(curve.subopt[k], kSubFloor));
      std::snprintf(buf, sizeof buf, "%s%.4f,%.4f", first ? "" : " ", sx(curve.passes[k]), sy(y));
      svg << buf;
      first = false;
    }
    svg << "\"/>\n";
    const double ly = kTop + 20.0 + 22.0 * static_cast<double>(c);
    const double lx = kLeft + plot_w + 15.0;
    svg << "  <line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 25 << "\" y2=\"" << ly << "\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n"
        << "  <text x=\"" << lx + 32 << "\" y=\"" << ly + 4 << "\" font-size=\"13\">" << xml_escape(curve.solver)
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write SVG to " + path.string());
  out << svg.str();
  if (!out) throw IoError("failed writing SVG to " + path.string());
}

// --- tuning ------------------------------------------------------------------------

TuneResult tune_step_size(const ExperimentConfig& cfg, const LoadedProblem& lp, double f_hat,
                          std::span<const double> etas, std::span<const double> decays) {
  if (cfg.solvers.empty()) throw ConfigError("tuning needs a solver");
  if (etas.empty()) throw ConfigError("tuning grid is empty");
  const SolverId id = cfg.solvers.front();
  const std::vector<double> no_decay{0.0};
  const std::span<const double> decay_grid =
      id == SolverId::proxsgd && !decays.empty() ? decays : std::span<const double>(no_decay);

  std::optional<TuneResult> best;
  for (double eta : etas) {
    for (double decay : decay_grid) {
      ExperimentConfig c = cfg;
      c.solvers = {id};
      if (id == SolverId::proxsgd) {
        c.eta0 = eta;
        c.eta_decay = decay;
      } else {
        c.eta = eta;
        if (id == SolverId::proxsvrg || id == SolverId::proxsaga) c.plan = "manual";
      }
      ExperimentResult r;
      try {
        r = run_experiment(c, lp, f_hat);
      } catch (const DivergenceError&) {
        continue;
      }
      std::vector<double> finals;
      for (const auto& t : r.traces) finals.push_back(t.records().back().subopt.value_or(t.records().back().F));
      const double score = median(finals);
      if (!std::isfinite(score)) continue;
      if (!best || score < best->median_final_subopt) best = TuneResult{eta, decay, score};
    }
  }
  if (!best) throw ConfigError("every step size in the tuning grid diverged");
  return *best;
}

}  // namespace vrprox
