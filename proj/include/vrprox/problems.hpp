#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vrprox/core_math.hpp"
#include "vrprox/prox.hpp"

namespace vrprox {

/// Incremental first-order oracle (IFO) and proximal oracle (PO) tallies.
struct OracleCounters {
  std::uint64_t ifo = 0;
  std::uint64_t po = 0;

  bool operator==(const OracleCounters&) const = default;
};

/// Whether an oracle call is part of an algorithm's cost (counted) or a
/// diagnostic evaluation for reporting (measurement, not counted).
enum class OracleMode { counted, measurement };

/// Smooth part f = (1/n) sum_i f_i of the composite objective.
class SmoothFiniteSum {
 public:
  virtual ~SmoothFiniteSum() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double component_value(std::size_t i, const DenseVector& x) const = 0;
  /// out += scale * grad f_i(x)
  virtual void add_component_gradient(std::size_t i, const DenseVector& x, double scale,
                                      DenseVector& out) const = 0;
};

/// F(x) = (1/n) sum_i f_i(x) + h(x) with each f_i L-smooth.
///
/// Problem data is shared and immutable; the oracle counters belong to the
/// instance and are bumped through const methods. An instance must not be
/// used from two threads at once; copy it with with_fresh_counters() per run.
class CompositeProblem {
 public:
  struct IfoResult {
    double value;
    DenseVector gradient;
  };

  CompositeProblem(std::shared_ptr<const SmoothFiniteSum> smooth, ProxOperator h, double lipschitz);

  std::size_t n() const { return smooth_->size(); }
  std::size_t dim() const { return smooth_->dim(); }
  double lipschitz() const { return lipschitz_; }
  const ProxOperator& regularizer() const { return h_; }
  const SmoothFiniteSum& smooth() const { return *smooth_; }

  /// (f_i(x), grad f_i(x)); one IFO call.
  IfoResult ifo(std::size_t i, const DenseVector& x, OracleMode mode = OracleMode::counted) const;
  /// out += scale * grad f_i(x); one IFO call.
  void accumulate_gradient(std::size_t i, const DenseVector& x, double scale, DenseVector& out,
                           OracleMode mode = OracleMode::counted) const;
  /// prox_{eta h}(x); one PO call.
  DenseVector prox(const DenseVector& x, double eta, OracleMode mode = OracleMode::counted) const;

  const OracleCounters& counters() const { return counters_; }
  CompositeProblem with_fresh_counters() const;

 private:
  void check_index(std::size_t i) const;

  std::shared_ptr<const SmoothFiniteSum> smooth_;
  ProxOperator h_;
  double lipschitz_;
  mutable OracleCounters counters_;
};

/// (1/n) sum_i grad f_i(x); n IFO calls.
DenseVector full_gradient(const CompositeProblem& p, const DenseVector& x,
                          OracleMode mode = OracleMode::counted);
/// f(x) = (1/n) sum_i f_i(x); n IFO calls.
double f_value(const CompositeProblem& p, const DenseVector& x, OracleMode mode = OracleMode::counted);
/// F(x) = f(x) + h(x); +inf outside dom(h).
double F_value(const CompositeProblem& p, const DenseVector& x, OracleMode mode = OracleMode::counted);

/// f_i(x) = -(z_i . x)^2, used for non-negative PCA.
class NnPcaComponents final : public SmoothFiniteSum {
 public:
  explicit NnPcaComponents(std::vector<SparseVector> rows);
  std::size_t size() const override { return rows_.size(); }
  std::size_t dim() const override { return dim_; }
  double component_value(std::size_t i, const DenseVector& x) const override;
  void add_component_gradient(std::size_t i, const DenseVector& x, double scale,
                              DenseVector& out) const override;
  const std::vector<SparseVector>& rows() const { return rows_; }

 private:
  std::vector<SparseVector> rows_;
  std::size_t dim_;
};

/// f_i(x) = (a_i . x - b_i)^2 / 2.
class LeastSquaresComponents final : public SmoothFiniteSum {
 public:
  LeastSquaresComponents(std::vector<DenseVector> rows, std::vector<double> targets);
  std::size_t size() const override { return rows_.size(); }
  std::size_t dim() const override { return dim_; }
  double component_value(std::size_t i, const DenseVector& x) const override;
  void add_component_gradient(std::size_t i, const DenseVector& x, double scale,
                              DenseVector& out) const override;
  const std::vector<DenseVector>& rows() const { return rows_; }
  const std::vector<double>& targets() const { return targets_; }

 private:
  std::vector<DenseVector> rows_;
  std::vector<double> targets_;
  std::size_t dim_;
};

/// NN-PCA instance: h = indicator of {x >= 0, ||x|| <= 1},
/// L = 2 max_i ||z_i||^2.
CompositeProblem make_nnpca(std::vector<SparseVector> rows);

/// Gaussian rows with a nonnegative random mean; unit-normalized when asked.
CompositeProblem make_synthetic_nnpca(RngStream& rng, std::size_t n, std::size_t d, bool normalize);

/// l1-regularized least squares with full-column-rank design, a mu-PL
/// composite problem with mu = lambda_min((1/n) A^T A).
struct PlQuadraticProblem {
  CompositeProblem problem;
  double mu;
  double kappa() const { return problem.lipschitz() / mu; }
};

PlQuadraticProblem make_pl_quadratic(std::vector<DenseVector> rows, std::vector<double> targets,
                                     double lambda);
PlQuadraticProblem make_synthetic_pl_quadratic(RngStream& rng, std::size_t n, std::size_t d,
                                               double lambda);

/// Smallest eigenvalue of (1/n) sum_i a_i a_i^T.
double min_curvature(const std::vector<DenseVector>& rows);

struct Optimum {
  DenseVector x;
  double F;
};

/// Global minimum of a two-dimensional NN-PCA problem by an angle sweep of
/// the boundary arc and an interior grid, refined by golden-section search.
/// Throws std::domain_error unless d == 2 and h is ball_nonneg.
Optimum grid_optimum_2d(const CompositeProblem& p);

/// Largest ratio |grad f_i(x) - grad f_i(y)| / |x - y| over random feasible
/// pairs and random components. Measurement mode.
double empirical_lipschitz(const CompositeProblem& p, RngStream& rng, std::size_t pairs);

}  // namespace vrprox
