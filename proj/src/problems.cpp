#include "vrprox/problems.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vrprox {

CompositeProblem::CompositeProblem(std::shared_ptr<const SmoothFiniteSum> smooth, ProxOperator h,
                                   double lipschitz)
    : smooth_(std::move(smooth)), h_(std::move(h)), lipschitz_(lipschitz) {
  if (!smooth_) throw std::invalid_argument("CompositeProblem: null smooth part");
  if (smooth_->size() == 0) throw std::invalid_argument("CompositeProblem: n must be positive");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) {
    throw std::invalid_argument("CompositeProblem: L must be positive");
  }
}

void CompositeProblem::check_index(std::size_t i) const {
  if (i >= n()) throw std::out_of_range("component index " + std::to_string(i) + " out of range");
}

CompositeProblem::IfoResult CompositeProblem::ifo(std::size_t i, const DenseVector& x,
                                                  OracleMode mode) const {
  check_index(i);
  if (mode == OracleMode::counted) ++counters_.ifo;
  IfoResult r{smooth_->component_value(i, x), DenseVector(dim())};
  smooth_->add_component_gradient(i, x, 1.0, r.gradient);
  return r;
}

void CompositeProblem::accumulate_gradient(std::size_t i, const DenseVector& x, double scale,
                                           DenseVector& out, OracleMode mode) const {
  check_index(i);
  if (mode == OracleMode::counted) ++counters_.ifo;
  smooth_->add_component_gradient(i, x, scale, out);
}

DenseVector CompositeProblem::prox(const DenseVector& x, double eta, OracleMode mode) const {
  if (mode == OracleMode::counted) ++counters_.po;
  return vrprox::prox(h_, x, eta);
}

CompositeProblem CompositeProblem::with_fresh_counters() const {
  CompositeProblem copy(*this);
  copy.counters_ = {};
  return copy;
}

DenseVector full_gradient(const CompositeProblem& p, const DenseVector& x, OracleMode mode) {
  DenseVector g(p.dim());
  const double inv_n = 1.0 / static_cast<double>(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) p.accumulate_gradient(i, x, inv_n, g, mode);
  return g;
}

double f_value(const CompositeProblem& p, const DenseVector& x, OracleMode mode) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.n(); ++i) s += p.ifo(i, x, mode).value;
  return s / static_cast<double>(p.n());
}

double F_value(const CompositeProblem& p, const DenseVector& x, OracleMode mode) {
  const double h = h_value(p.regularizer(), x);
  if (h == kInfinity) return kInfinity;
  return f_value(p, x, mode) + h;
}

// --- NN-PCA ---------------------------------------------------------------

NnPcaComponents::NnPcaComponents(std::vector<SparseVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("NN-PCA needs at least one sample");
  dim_ = rows_.front().dim();
  for (const auto& r : rows_) {
    if (r.dim() != dim_) throw std::invalid_argument("NN-PCA samples must share one dimension");
  }
}

double NnPcaComponents::component_value(std::size_t i, const DenseVector& x) const {
  const double zx = dot(rows_[i], x);
  return -zx * zx;
}

void NnPcaComponents::add_component_gradient(std::size_t i, const DenseVector& x, double scale,
                                             DenseVector& out) const {
  const double zx = dot(rows_[i], x);
  axpy(-2.0 * zx * scale, rows_[i], out);
}

CompositeProblem make_nnpca(std::vector<SparseVector> rows) {
  double max_sq = 0.0;
  for (const auto& r : rows) {
    double s = 0.0;
    for (const auto& e : r.entries()) s += e.value * e.value;
    max_sq = std::max(max_sq, s);
  }
  if (max_sq == 0.0) throw std::invalid_argument("NN-PCA data is identically zero");
  auto smooth = std::make_shared<const NnPcaComponents>(std::move(rows));
  return CompositeProblem(std::move(smooth), ProxOperator::ball_nonneg(1.0), 2.0 * max_sq);
}

CompositeProblem make_synthetic_nnpca(RngStream& rng, std::size_t n, std::size_t d, bool normalize) {
  if (n == 0 || d == 0) throw std::invalid_argument("make_synthetic_nnpca: n and d must be positive");
  DenseVector mean(d);
  for (std::size_t j = 0; j < d; ++j) mean[j] = rng.uniform01();
  std::vector<SparseVector> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DenseVector z(d);
    double norm_sq = 0.0;
    do {
      for (std::size_t j = 0; j < d; ++j) z[j] = mean[j] + rng.normal();
      norm_sq = norm2_sq(z);
    } while (norm_sq == 0.0);
    if (normalize) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (double& v : z.values()) v *= inv;
    }
    rows.push_back(SparseVector::from_dense(z));
  }
  return make_nnpca(std::move(rows));
}

// --- l1-regularized least squares -------------------------------------------

LeastSquaresComponents::LeastSquaresComponents(std::vector<DenseVector> rows,
                                               std::vector<double> targets)
    : rows_(std::move(rows)), targets_(std::move(targets)) {
  if (rows_.empty()) throw std::invalid_argument("least squares needs at least one row");
  if (rows_.size() != targets_.size()) throw std::invalid_argument("rows/targets length mismatch");
  dim_ = rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != dim_) throw std::invalid_argument("rows must share one dimension");
  }
}

double LeastSquaresComponents::component_value(std::size_t i, const DenseVector& x) const {
  const double r = dot(rows_[i], x) - targets_[i];
  return 0.5 * r * r;
}

void LeastSquaresComponents::add_component_gradient(std::size_t i, const DenseVector& x,
                                                    double scale, DenseVector& out) const {
  const double r = dot(rows_[i], x) - targets_[i];
  axpy(r * scale, rows_[i], out);
}

double min_curvature(const std::vector<DenseVector>& rows) {
  if (rows.empty()) throw std::invalid_argument("min_curvature: no rows");
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (const auto& r : rows) {
    const Eigen::Map<const Eigen::VectorXd> a(r.raw().data(), d);
    gram.noalias() += a * a.transpose();
  }
  gram /= static_cast<double>(rows.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

PlQuadraticProblem make_pl_quadratic(std::vector<DenseVector> rows, std::vector<double> targets,
                                     double lambda) {
  const double mu = min_curvature(rows);
  if (!(mu > 0.0)) throw std::invalid_argument("design is rank deficient; problem is not PL");
  double max_sq = 0.0;
  for (const auto& r : rows) max_sq = std::max(max_sq, norm2_sq(r));
  auto smooth = std::make_shared<const LeastSquaresComponents>(std::move(rows), std::move(targets));
  return {CompositeProblem(std::move(smooth), ProxOperator::l1(lambda), max_sq), mu};
}

PlQuadraticProblem make_synthetic_pl_quadratic(RngStream& rng, std::size_t n, std::size_t d,
                                               double lambda) {
  if (n < d || d == 0) throw std::invalid_argument("make_synthetic_pl_quadratic: need n >= d >= 1");
  DenseVector truth(d);
  for (std::size_t j = 0; j < d; ++j) truth[j] = (j % 2 == 0) ? rng.normal() : 0.0;
  std::vector<DenseVector> rows;
  std::vector<double> targets;
  rows.reserve(n);
  targets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DenseVector a(d);
    for (std::size_t j = 0; j < d; ++j) a[j] = rng.normal();
    targets.push_back(dot(a, truth) + 0.1 * rng.normal());
    rows.push_back(std::move(a));
  }
  return make_pl_quadratic(std::move(rows), std::move(targets), lambda);
}

// --- d = 2 global optimum ---------------------------------------------------

Optimum grid_optimum_2d(const CompositeProblem& p) {
  const auto* ball = std::get_if<regularizer::BallNonneg>(&p.regularizer().kind());
  if (p.dim() != 2 || ball == nullptr) {
    throw std::domain_error("grid_optimum_2d supports only d = 2 NN-PCA style problems");
  }
  const double r = ball->radius;
  const auto F = [&](const DenseVector& x) { return F_value(p, x, OracleMode::measurement); };
  const auto arc = [&](double theta) { return DenseVector{r * std::cos(theta), r * std::sin(theta)}; };

  constexpr int kAngles = 20000;
  constexpr double kQuarter = std::numbers::pi / 2.0;
  Optimum best{DenseVector{0.0, 0.0}, F(DenseVector{0.0, 0.0})};
  int best_angle = -1;
  for (int k = 0; k <= kAngles; ++k) {
    const double theta = kQuarter * k / kAngles;
    DenseVector x = arc(theta);
    // Endpoints are exact so that axis-aligned optima are found exactly.
    if (k == 0) x = DenseVector{r, 0.0};
    if (k == kAngles) x = DenseVector{0.0, r};
    const double v = F(x);
    if (v < best.F) {
      best = {std::move(x), v};
      best_angle = k;
    }
  }
  constexpr int kGrid = 100;
  bool interior_best = false;
  for (int a = 0; a <= kGrid; ++a) {
    for (int b = 0; b <= kGrid; ++b) {
      DenseVector x{r * a / kGrid, r * b / kGrid};
      if (std::sqrt(norm2_sq(x)) > r) continue;
      const double v = F(x);
      if (v < best.F) {
        best = {std::move(x), v};
        interior_best = true;
      }
    }
  }
  if (interior_best || best_angle < 0) return best;

  // Golden-section refinement on the bracketing arc segment.
  double lo = kQuarter * std::max(best_angle - 1, 0) / kAngles;
  double hi = kQuarter * std::min(best_angle + 1, kAngles) / kAngles;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = F(arc(c));
  double fd = F(arc(d));
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = F(arc(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = F(arc(d));
    }
  }
  DenseVector refined = prox(p.regularizer(), arc(0.5 * (lo + hi)), 1.0);
  const double v = F(refined);
  if (v < best.F) best = {std::move(refined), v};
  return best;
}

double empirical_lipschitz(const CompositeProblem& p, RngStream& rng, std::size_t pairs) {
  double worst = 0.0;
  const std::size_t d = p.dim();
  for (std::size_t k = 0; k < pairs; ++k) {
    DenseVector x(d);
    DenseVector y(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.normal();
      y[j] = rng.normal();
    }
    x = prox(p.regularizer(), x, 1.0);
    y = prox(p.regularizer(), y, 1.0);
    const double dist = std::sqrt(distance_sq(x, y));
    if (dist == 0.0) continue;
    const std::size_t i = rng.uniform_index(p.n());
    const DenseVector gx = p.ifo(i, x, OracleMode::measurement).gradient;
    const DenseVector gy = p.ifo(i, y, OracleMode::measurement).gradient;
    worst = std::max(worst, std::sqrt(distance_sq(gx, gy)) / dist);
  }
  return worst;
}

}  // namespace vrprox
