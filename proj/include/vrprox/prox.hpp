#pragma once

#include <limits>
#include <string>
#include <variant>

#include "vrprox/core_math.hpp"

namespace vrprox {

// Nonsmooth terms h with closed-form proximal maps.
namespace regularizer {
struct Zero {};
struct L1 {
  double lambda;
};
/// Indicator of {lo <= x <= hi} coordinate-wise.
struct Box {
  DenseVector lo;
  DenseVector hi;
};
/// Indicator of the probability simplex {x >= 0, sum x = 1}.
struct Simplex {};
/// Indicator of {x >= 0, ||x|| <= radius}.
struct BallNonneg {
  double radius;
};
}  // namespace regularizer

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Residual tolerance used when deciding indicator membership in h_value.
inline constexpr double kFeasibilityTol = 1e-9;

class ProxOperator {
 public:
  using Kind = std::variant<regularizer::Zero, regularizer::L1, regularizer::Box,
                            regularizer::Simplex, regularizer::BallNonneg>;

  ProxOperator() : kind_(regularizer::Zero{}) {}

  static ProxOperator zero() { return ProxOperator(regularizer::Zero{}); }
  static ProxOperator l1(double lambda);
  static ProxOperator box(DenseVector lo, DenseVector hi);
  static ProxOperator simplex() { return ProxOperator(regularizer::Simplex{}); }
  static ProxOperator ball_nonneg(double radius);

  const Kind& kind() const { return kind_; }
  std::string name() const;
  /// True for indicator functions (h takes only the values 0 and +inf).
  bool is_indicator() const;

 private:
  explicit ProxOperator(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// argmin_y h(y) + ||y - x||^2 / (2 eta). Throws std::invalid_argument for
/// eta <= 0 or non-finite x.
DenseVector prox(const ProxOperator& op, const DenseVector& x, double eta);

/// h(x), or kInfinity when x violates an indicator constraint by more than
/// kFeasibilityTol.
double h_value(const ProxOperator& op, const DenseVector& x);

/// Three-point property of the prox: with y = prox(x), checks
///   h(y) + |y-x|^2/(2eta) <= h(z) + |z-x|^2/(2eta) - |y-z|^2/(2eta) + tol.
/// Returns true for infeasible z (the right side is +inf).
bool prox_three_point_check(const ProxOperator& op, const DenseVector& x, const DenseVector& z,
                            double eta, double tol = 1e-9);

}  // namespace vrprox
