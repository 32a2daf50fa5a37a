#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace vrprox {

/// Dense real vector of fixed length. Thin value wrapper over std::vector so
/// iterates and gradients cannot be confused with index lists or raw buffers.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  DenseVector(std::initializer_list<double> values) : values_(values) {}
  explicit DenseVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  bool all_finite() const;
  void fill(double v);

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Sparse vector with strictly increasing indices and no stored zeros.
class SparseVector {
 public:
  struct Entry {
    std::size_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  SparseVector() = default;
  /// Validates the invariants; throws std::invalid_argument on violation.
  /// Zero values are dropped.
  SparseVector(std::size_t dim, std::vector<Entry> entries);

  static SparseVector from_dense(const DenseVector& v);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }

  DenseVector to_dense() const;
  SparseVector scaled(double factor) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

/// SplitMix64 generator. Integer-only state transitions, so a given seed
/// yields the same index stream on every platform. Reference sequence for
/// seed 1234567 begins 6457827717110365317, 3203168211198807973.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform integer in [0, n) by multiply-shift with rejection (unbiased).
  std::size_t uniform_index(std::size_t n);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Standard normal via Box-Muller.
  double normal();
  /// Independent child stream seeded from this stream's next output.
  RngStream split();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Draws b indices uniformly from [0, n) with replacement.
std::vector<std::size_t> sample_with_replacement(RngStream& rng, std::size_t n, std::size_t b);

double dot(const DenseVector& a, const DenseVector& b);
double dot(const SparseVector& a, const DenseVector& b);
double norm2_sq(const DenseVector& a);
double distance_sq(const DenseVector& a, const DenseVector& b);

/// y += alpha * x
void axpy(double alpha, const DenseVector& x, DenseVector& y);
void axpy(double alpha, const SparseVector& x, DenseVector& y);

DenseVector operator+(const DenseVector& a, const DenseVector& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);
DenseVector operator*(double s, const DenseVector& a);

/// FNV-1a over the IEEE bit patterns; used to log iterates by identity.
std::uint64_t hash_bits(const DenseVector& v);

}  // namespace vrprox
