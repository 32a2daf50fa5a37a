#include "vrprox/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace vrprox {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void require_dim(const DenseVector& bound, const DenseVector& x) {
  if (bound.size() != x.size()) throw std::invalid_argument("box bounds dimension mismatch");
}

// Sort-and-threshold projection onto {y >= 0, sum y = 1}.
DenseVector project_simplex(const DenseVector& x) {
  const std::size_t d = x.size();
  if (d == 0) throw std::invalid_argument("simplex projection of empty vector");
  std::vector<double> sorted(x.raw());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    cumsum += sorted[k];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  DenseVector y(d);
  for (std::size_t i = 0; i < d; ++i) y[i] = std::max(x[i] - theta, 0.0);
  return y;
}

DenseVector project_ball_nonneg(const DenseVector& x, double radius) {
  DenseVector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], 0.0);
  const double norm = std::sqrt(norm2_sq(y));
  if (norm > radius) {
    const double s = radius / norm;
    for (double& v : y.values()) v *= s;
    // Rounding in the rescale can leave the norm a few ulps above radius.
    while (std::sqrt(norm2_sq(y)) > radius) {
      for (double& v : y.values()) v = std::nextafter(v, 0.0);
    }
  }
  return y;
}

}  // namespace

ProxOperator ProxOperator::l1(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("l1 weight must be finite and nonnegative");
  }
  return ProxOperator(regularizer::L1{lambda});
}

ProxOperator ProxOperator::box(DenseVector lo, DenseVector hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bounds dimension mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("box requires lo <= hi");
  }
  return ProxOperator(regularizer::Box{std::move(lo), std::move(hi)});
}

ProxOperator ProxOperator::ball_nonneg(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball radius must be positive");
  }
  return ProxOperator(regularizer::BallNonneg{radius});
}

std::string ProxOperator::name() const {
  return std::visit(Overloaded{
                        [](const regularizer::Zero&) { return std::string("zero"); },
                        [](const regularizer::L1&) { return std::string("l1"); },
                        [](const regularizer::Box&) { return std::string("box"); },
                        [](const regularizer::Simplex&) { return std::string("simplex"); },
                        [](const regularizer::BallNonneg&) { return std::string("ball_nonneg"); },
                    },
                    kind_);
}

bool ProxOperator::is_indicator() const {
  return std::holds_alternative<regularizer::Box>(kind_) ||
         std::holds_alternative<regularizer::Simplex>(kind_) ||
         std::holds_alternative<regularizer::BallNonneg>(kind_);
}

DenseVector prox(const ProxOperator& op, const DenseVector& x, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("prox: eta must be positive");
  if (!x.all_finite()) throw std::invalid_argument("prox: non-finite input");
  return std::visit(
      Overloaded{
          [&](const regularizer::Zero&) { return x; },
          [&](const regularizer::L1& r) {
            DenseVector y(x.size());
            const double t = eta * r.lambda;
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = soft_threshold(x[i], t);
            return y;
          },
          [&](const regularizer::Box& r) {
            require_dim(r.lo, x);
            DenseVector y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i], r.lo[i], r.hi[i]);
            return y;
          },
          [&](const regularizer::Simplex&) { return project_simplex(x); },
          [&](const regularizer::BallNonneg& r) { return project_ball_nonneg(x, r.radius); },
      },
      op.kind());
}

double h_value(const ProxOperator& op, const DenseVector& x) {
  return std::visit(
      Overloaded{
          [&](const regularizer::Zero&) { return 0.0; },
          [&](const regularizer::L1& r) {
            double s = 0.0;
            for (double v : x.values()) s += std::abs(v);
            return r.lambda * s;
          },
          [&](const regularizer::Box& r) {
            require_dim(r.lo, x);
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (x[i] < r.lo[i] - kFeasibilityTol || x[i] > r.hi[i] + kFeasibilityTol) {
                return kInfinity;
              }
            }
            return 0.0;
          },
          [&](const regularizer::Simplex&) {
            double sum = 0.0;
            for (double v : x.values()) {
              if (v < -kFeasibilityTol) return kInfinity;
              sum += v;
            }
            return std::abs(sum - 1.0) <= kFeasibilityTol ? 0.0 : kInfinity;
          },
          [&](const regularizer::BallNonneg& r) {
            for (double v : x.values()) {
              if (v < -kFeasibilityTol) return kInfinity;
            }
            return std::sqrt(norm2_sq(x)) <= r.radius + kFeasibilityTol ? 0.0 : kInfinity;
          },
      },
      op.kind());
}

bool prox_three_point_check(const ProxOperator& op, const DenseVector& x, const DenseVector& z,
                            double eta, double tol) {
  const double hz = h_value(op, z);
  if (hz == kInfinity) return true;
  const DenseVector y = prox(op, x, eta);
  const double inv = 1.0 / (2.0 * eta);
  const double lhs = h_value(op, y) + inv * distance_sq(y, x);
  const double rhs = hz + inv * distance_sq(z, x) - inv * distance_sq(y, z);
  return lhs <= rhs + tol;
}

}  // namespace vrprox
