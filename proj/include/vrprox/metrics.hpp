#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrprox/core_math.hpp"
#include "vrprox/problems.hpp"

namespace vrprox {

/// G_eta(x) = (x - prox_{eta h}(x - eta grad f(x))) / eta.
/// Costs n IFO + 1 PO when mode is counted; free in measurement mode.
DenseVector gradient_mapping(const CompositeProblem& p, const DenseVector& x, double eta,
                             OracleMode mode = OracleMode::measurement);

double gradient_mapping_norm_sq(const CompositeProblem& p, const DenseVector& x, double eta,
                                OracleMode mode = OracleMode::measurement);

/// gmap_sq_estimate is a mean of |G_eta(x_a)|^2 over independent runs.
bool is_eps_accurate(double gmap_sq_estimate, double eps);

/// D_h(x, mu) = -2 mu min_y [<grad f(x), y-x> + mu/2 |y-x|^2 + h(y) - h(x)].
/// The minimizer is prox_{h/mu}(x - grad f(x)/mu). Measurement mode.
/// Throws std::invalid_argument when mu <= 0 or x is outside dom(h).
double compute_Dh(const CompositeProblem& p, const DenseVector& x, double mu);

struct TraceRecord {
  double passes = 0.0;  ///< ifo / n
  std::uint64_t ifo = 0;
  std::uint64_t po = 0;
  double F = 0.0;
  std::optional<double> subopt;  ///< F - F_hat when a baseline is known
  double gmap_sq = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct TraceMetadata {
  std::string solver;
  std::uint64_t seed = 0;
  std::string plan;  ///< human-readable plan summary
  double eta = 0.0;  ///< step used for the reported gradient mapping

  bool operator==(const TraceMetadata&) const = default;
};

class RunTrace {
 public:
  RunTrace() = default;
  explicit RunTrace(TraceMetadata meta) : meta_(std::move(meta)) {}

  /// Appends a checkpoint. Throws std::logic_error if passes decrease or a
  /// field is non-finite, std::invalid_argument if gmap_sq < 0.
  void record(const TraceRecord& r);

  const std::vector<TraceRecord>& records() const { return records_; }
  const TraceMetadata& metadata() const { return meta_; }
  TraceMetadata& metadata() { return meta_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool operator==(const RunTrace&) const = default;

 private:
  TraceMetadata meta_;
  std::vector<TraceRecord> records_;
};

/// Builds a checkpoint record at x from the problem's current counters.
/// All evaluations run in measurement mode.
TraceRecord measure_checkpoint(const CompositeProblem& p, const DenseVector& x, double eta,
                               std::optional<double> f_hat);

}  // namespace vrprox
