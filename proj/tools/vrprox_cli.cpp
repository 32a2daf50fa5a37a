// vrprox command-line experiment runner.
//
//   vrprox_cli run --solver proxsvrg,proxsaga,proxsgd --synthetic n=512,d=20 \
//       --plan manual --eta 0.05 --seeds 1..10 --passes 20 --trace out.csv --svg out.svg
//   vrprox_cli tune --solver proxsgd --data a9a.libsvm --etas 0.1,0.01 --decays 0,1
//
// Exit codes: 0 success, 2 config error, 3 I/O or parse error, 4 divergence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vrprox/experiment.hpp"
#include "vrprox/libsvm.hpp"

namespace fs = std::filesystem;
using namespace vrprox;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDivergence = 4;

struct Args {
  std::string solvers = "proxsvrg";
  std::string data;
  std::optional<std::size_t> dim;
  bool no_normalize = false;
  std::string synthetic;
  std::string pl;
  std::string plan;
  std::optional<double> eta;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> epoch_len;
  std::optional<double> eta0;
  double eta_decay = 0.0;
  std::optional<double> warm_eta;
  std::optional<double> mu;
  std::string seeds = "1";
  double passes = 20.0;
  double stride = 1.0;
  bool warm_start = false;
  std::string trace;
  std::string svg;
  std::size_t baseline_iters = 10000;
  std::size_t baseline_starts = 5;
  std::string baseline_cache;
  std::size_t threads = 0;
  std::string out_dir;
  std::string config;  // consumed before parsing; declared so --help lists it
  std::vector<double> etas;
  std::vector<double> decays{0.0};
};

void add_common(CLI::App& app, Args& a) {
  app.add_option("--config", a.config, "key=value file; later command-line flags override it");
  app.add_option("--solver", a.solvers, "proxgd|proxsgd|proxsvrg|proxsaga|pl-svrg|pl-saga, comma separated");
  app.add_option("--data", a.data, "LIBSVM file (NN-PCA on its rows)");
  app.add_option("--dim", a.dim, "dimension override for --data");
  app.add_flag("--no-normalize", a.no_normalize, "keep raw rows instead of unit-norm rows");
  app.add_option("--synthetic", a.synthetic, "synthetic NN-PCA: n=..,d=..[,seed=..]");
  app.add_option("--pl", a.pl, "PL least-squares testbed: n=..,d=..[,lambda=..][,seed=..]");
  app.add_option("--plan", a.plan, "thm1|thm2|thm3|thm4|general|manual|thm7");
  app.add_option("--eta", a.eta, "step size (manual plans, proxgd)");
  app.add_option("--batch", a.batch, "minibatch size");
  app.add_option("--epoch-len", a.epoch_len, "ProxSVRG inner iterations per epoch");
  app.add_option("--eta0", a.eta0, "ProxSGD initial step");
  app.add_option("--eta-decay", a.eta_decay, "ProxSGD decay: eta0 / (1 + decay * floor(t/n))");
  app.add_option("--warm-eta", a.warm_eta, "step for the warm-start ProxSGD pass");
  app.add_option("--mu", a.mu, "PL constant for pl-svrg / pl-saga");
  app.add_option("--seeds", a.seeds, "seed list, e.g. 1..10 or 1,4,9");
  app.add_option("--passes", a.passes, "effective-pass budget");
  app.add_option("--stride", a.stride, "checkpoint every this many passes");
  app.add_flag("--warm-start", a.warm_start, "start from one ProxSGD pass");
  app.add_option("--baseline-iters", a.baseline_iters, "ProxGD iterations for the F* estimate");
  app.add_option("--baseline-starts", a.baseline_starts, "ProxGD restarts for the F* estimate");
  app.add_option("--baseline-cache", a.baseline_cache, "F* cache file (default <data>.fhat)");
  app.add_option("--threads", a.threads, "worker threads (0 = all cores)");
  app.add_option("--out-dir", a.out_dir, "directory for relative output paths");
}

ExperimentConfig to_config(const Args& a) {
  ExperimentConfig cfg;
  const int sources = !a.data.empty() + !a.synthetic.empty() + !a.pl.empty();
  if (sources > 1) throw ConfigError("choose one of --data, --synthetic, --pl");
  if (!a.data.empty()) {
    cfg.problem.kind = ProblemSpec::Kind::libsvm;
    cfg.problem.path = a.data;
    cfg.problem.dim = a.dim;
    cfg.problem.normalize = !a.no_normalize;
  } else if (!a.pl.empty()) {
    cfg.problem.kind = ProblemSpec::Kind::pl_quadratic;
    parse_problem_params(a.pl, cfg.problem);
  } else {
    cfg.problem.kind = ProblemSpec::Kind::synthetic_nnpca;
    cfg.problem.normalize = !a.no_normalize;
    parse_problem_params(a.synthetic, cfg.problem);
  }
  cfg.solvers.clear();
  std::stringstream ss(a.solvers);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) cfg.solvers.push_back(parse_solver_id(item));
  }
  cfg.plan = a.plan;
  cfg.eta = a.eta;
  cfg.batch = a.batch;
  cfg.epoch_len = a.epoch_len;
  cfg.eta0 = a.eta0;
  cfg.eta_decay = a.eta_decay;
  cfg.warm_eta = a.warm_eta;
  cfg.mu = a.mu;
  cfg.seeds = parse_seed_list(a.seeds);
  cfg.passes = a.passes;
  cfg.stride = a.stride;
  cfg.warm_start = a.warm_start;
  cfg.baseline_iters = a.baseline_iters;
  cfg.baseline_starts = a.baseline_starts;
  if (!a.baseline_cache.empty()) cfg.baseline_cache = a.baseline_cache;
  cfg.threads = a.threads;
  return cfg;
}

fs::path output_path(const std::string& p, const Args& a) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  std::string dir = a.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("VRPROX_OUTPUT_DIR")) dir = env;
  }
  return dir.empty() ? path : fs::path(dir) / path;
}

LoadedProblem load(const ExperimentConfig& cfg, double& f_hat) {
  LoadedProblem lp = build_problem(cfg.problem);
  std::optional<fs::path> cache = cfg.baseline_cache;
  if (!cache && cfg.problem.kind == ProblemSpec::Kind::libsvm) cache = cfg.problem.path.string() + ".fhat";
  f_hat = cached_f_hat(lp, cfg.baseline_iters, cfg.baseline_starts, cache);
  return lp;
}

int cmd_run(const Args& a) {
  const ExperimentConfig cfg = to_config(a);
  double f_hat = 0.0;
  const LoadedProblem lp = load(cfg, f_hat);
  const ExperimentResult result = run_experiment(cfg, lp, f_hat);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  std::printf("n=%zu d=%zu L=%.6g f_hat=%.12g\n", lp.problem.n(), lp.problem.dim(), lp.problem.lipschitz(),
              f_hat);
  std::printf("%-10s %10s %16s %16s\n", "solver", "passes", "median_subopt", "median_F");
  for (const auto& c : result.summary) {
    if (c.passes.empty()) continue;
    std::printf("%-10s %10.3f %16.6e %16.10g\n", c.solver.c_str(), c.passes.back(), c.subopt.back(), c.F.back());
  }
  if (!result.traces.empty()) std::printf("plan: %s\n", result.traces.front().metadata().plan.c_str());

  if (!a.trace.empty()) emit_csv(result.traces, output_path(a.trace, a));
  if (!a.svg.empty()) emit_svg(result.summary, output_path(a.svg, a));
  return 0;
}

int cmd_tune(const Args& a) {
  ExperimentConfig cfg = to_config(a);
  if (cfg.solvers.size() != 1) throw ConfigError("tune takes exactly one --solver");
  if (a.etas.empty()) throw ConfigError("tune needs --etas");
  double f_hat = 0.0;
  const LoadedProblem lp = load(cfg, f_hat);
  const TuneResult best = tune_step_size(cfg, lp, f_hat, a.etas, a.decays);
  if (cfg.solvers.front() == SolverId::proxsgd) {
    std::printf("solver=%s eta0=%.17g eta_decay=%.17g median_final_subopt=%.6e\n",
                to_string(cfg.solvers.front()).c_str(), best.eta, best.decay, best.median_final_subopt);
  } else {
    std::printf("solver=%s eta=%.17g median_final_subopt=%.6e\n", to_string(cfg.solvers.front()).c_str(), best.eta,
                best.median_final_subopt);
  }
  return 0;
}

// Splices `--config FILE` contents in front of the remaining flags so that
// anything given on the command line wins (options keep their last value).
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t k = 1; k < args.size(); ++k) {
    std::string file;
    std::size_t consumed = 0;
    if (args[k] == "--config" && k + 1 < args.size()) {
      file = args[k + 1];
      consumed = 2;
    } else if (args[k].rfind("--config=", 0) == 0) {
      file = args[k].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config_file(file)) {
      injected.push_back("--" + key + "=" + value);
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + consumed));
    // Keep the subcommand name (args[1]) first.
    const std::size_t at = args.size() > 1 ? 2 : 1;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(at, args.size())), injected.begin(),
                injected.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args));

    CLI::App app{"Proximal variance-reduced solvers for nonconvex finite sums"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Args a;

    CLI::App* run = app.add_subcommand("run", "run solvers over seeds and write traces");
    run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(*run, a);
    run->add_option("--trace", a.trace, "CSV output path");
    run->add_option("--svg", a.svg, "SVG plot output path");

    CLI::App* tune = app.add_subcommand("tune", "grid-search a step size");
    tune->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(*tune, a);
    tune->add_option("--etas", a.etas, "step sizes to try")->delimiter(',')->multi_option_policy(
        CLI::MultiOptionPolicy::TakeAll);
    tune->add_option("--decays", a.decays, "ProxSGD decays to try")->delimiter(',')->multi_option_policy(
        CLI::MultiOptionPolicy::TakeAll);

    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
      app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitConfig;
    }
    return run->parsed() ? cmd_run(a) : cmd_tune(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
