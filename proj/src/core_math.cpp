#include "vrprox/core_math.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vrprox {

bool DenseVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void DenseVector::fill(double v) {
  for (double& e : values_) e = v;
}

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries) : dim_(dim) {
  entries_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    if (e.index >= dim) {
      throw std::invalid_argument("sparse index " + std::to_string(e.index) +
                                  " out of range for dim " + std::to_string(dim));
    }
    if (k > 0 && e.index <= entries[k - 1].index) {
      throw std::invalid_argument("sparse indices must be strictly increasing");
    }
    if (!std::isfinite(e.value)) throw std::invalid_argument("non-finite sparse value");
    if (e.value != 0.0) entries_.push_back(e);
  }
}

SparseVector SparseVector::from_dense(const DenseVector& v) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) entries.push_back({i, v[i]});
  }
  return SparseVector(v.size(), std::move(entries));
}

DenseVector SparseVector::to_dense() const {
  DenseVector out(dim_);
  for (const Entry& e : entries_) out[e.index] = e.value;
  return out;
}

SparseVector SparseVector::scaled(double factor) const {
  std::vector<Entry> entries(entries_);
  for (Entry& e : entries) e.value *= factor;
  return SparseVector(dim_, std::move(entries));
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  const std::uint64_t range = n;
  // Lemire's multiply-shift; reject the biased low slice.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

RngStream RngStream::split() { return RngStream(next_u64()); }

std::vector<std::size_t> sample_with_replacement(RngStream& rng, std::size_t n, std::size_t b) {
  if (n == 0 || b == 0) {
    throw std::invalid_argument("sample_with_replacement: n and b must be positive");
  }
  std::vector<std::size_t> out(b);
  for (std::size_t k = 0; k < b; ++k) out[k] = rng.uniform_index(n);
  return out;
}

namespace {
void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}
}  // namespace

double dot(const DenseVector& a, const DenseVector& b) {
  require_same_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const SparseVector& a, const DenseVector& b) {
  require_same_dim(a.dim(), b.size(), "dot");
  double s = 0.0;
  for (const auto& e : a.entries()) s += e.value * b[e.index];
  return s;
}

double norm2_sq(const DenseVector& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double distance_sq(const DenseVector& a, const DenseVector& b) {
  require_same_dim(a.size(), b.size(), "distance_sq");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy(double alpha, const DenseVector& x, DenseVector& y) {
  require_same_dim(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy(double alpha, const SparseVector& x, DenseVector& y) {
  require_same_dim(x.dim(), y.size(), "axpy");
  for (const auto& e : x.entries()) y[e.index] += alpha * e.value;
}

DenseVector operator+(const DenseVector& a, const DenseVector& b) {
  DenseVector out(a);
  axpy(1.0, b, out);
  return out;
}

DenseVector operator-(const DenseVector& a, const DenseVector& b) {
  DenseVector out(a);
  axpy(-1.0, b, out);
  return out;
}

DenseVector operator*(double s, const DenseVector& a) {
  DenseVector out(a);
  for (double& v : out.values()) v *= s;
  return out;
}

std::uint64_t hash_bits(const DenseVector& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : v.values()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace vrprox
