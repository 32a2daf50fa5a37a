#include "vrprox/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrprox {

DenseVector gradient_mapping(const CompositeProblem& p, const DenseVector& x, double eta,
                             OracleMode mode) {
  if (!(eta > 0.0)) throw std::invalid_argument("gradient_mapping: eta must be positive");
  DenseVector step = x;
  axpy(-eta, full_gradient(p, x, mode), step);
  const DenseVector y = p.prox(step, eta, mode);
  DenseVector g = x - y;
  for (double& v : g.values()) v /= eta;
  return g;
}

double gradient_mapping_norm_sq(const CompositeProblem& p, const DenseVector& x, double eta,
                                OracleMode mode) {
  return norm2_sq(gradient_mapping(p, x, eta, mode));
}

bool is_eps_accurate(double gmap_sq_estimate, double eps) { return gmap_sq_estimate <= eps; }

double compute_Dh(const CompositeProblem& p, const DenseVector& x, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("compute_Dh: mu must be positive");
  const double hx = h_value(p.regularizer(), x);
  if (hx == kInfinity) throw std::invalid_argument("compute_Dh: x is outside dom(h)");
  const DenseVector grad = full_gradient(p, x, OracleMode::measurement);
  DenseVector step = x;
  axpy(-1.0 / mu, grad, step);
  const DenseVector y = prox(p.regularizer(), step, 1.0 / mu);
  const DenseVector dy = y - x;
  const double inner = dot(grad, dy) + 0.5 * mu * norm2_sq(dy) + h_value(p.regularizer(), y) - hx;
  // y = x is a candidate with value 0, so the minimum is never positive.
  return -2.0 * mu * std::min(inner, 0.0);
}

void RunTrace::record(const TraceRecord& r) {
  if (!std::isfinite(r.passes) || !std::isfinite(r.F) || !std::isfinite(r.gmap_sq) ||
      (r.subopt && !std::isfinite(*r.subopt))) {
    throw std::logic_error("trace record has non-finite fields");
  }
  if (r.gmap_sq < 0.0) throw std::invalid_argument("trace record has negative gmap_sq");
  if (!records_.empty() && r.passes < records_.back().passes) {
    throw std::logic_error("trace passes must be nondecreasing");
  }
  records_.push_back(r);
}

TraceRecord measure_checkpoint(const CompositeProblem& p, const DenseVector& x, double eta,
                               std::optional<double> f_hat) {
  TraceRecord r;
  r.ifo = p.counters().ifo;
  r.po = p.counters().po;
  r.passes = static_cast<double>(r.ifo) / static_cast<double>(p.n());
  r.F = F_value(p, x, OracleMode::measurement);
  if (f_hat) r.subopt = r.F - *f_hat;
  r.gmap_sq = gradient_mapping_norm_sq(p, x, eta, OracleMode::measurement);
  return r;
}

}  // namespace vrprox
