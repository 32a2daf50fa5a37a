#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "vrprox/core_math.hpp"

using namespace vrprox;

TEST_CASE("SplitMix64 reference sequence") {
  RngStream rng(1234567);
  CHECK(rng.next_u64() == 6457827717110365317ULL);
  CHECK(rng.next_u64() == 3203168211198807973ULL);
  CHECK(rng.next_u64() == 9817491932198370423ULL);
}

TEST_CASE("sample_with_replacement") {
  SUBCASE("single index") {
    RngStream rng(9);
    CHECK(sample_with_replacement(rng, 1, 3) == std::vector<std::size_t>{0, 0, 0});
  }
  SUBCASE("deterministic per seed") {
    RngStream a(77);
    RngStream b(77);
    CHECK(sample_with_replacement(a, 5, 2) == sample_with_replacement(b, 5, 2));
    const auto long_a = sample_with_replacement(a, 1000, 500);
    const auto long_b = sample_with_replacement(b, 1000, 500);
    CHECK(long_a == long_b);
    CHECK(a.state() == b.state());
  }
  SUBCASE("range and size") {
    RngStream rng(3);
    const auto s = sample_with_replacement(rng, 7, 1000);
    CHECK(s.size() == 1000);
    CHECK(*std::max_element(s.begin(), s.end()) < 7);
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 7);
  }
  SUBCASE("uniform frequencies") {
    RngStream rng(2024);
    std::array<std::size_t, 4> counts{};
    constexpr std::size_t draws = 1000000;
    for (std::size_t k = 0; k < draws; ++k) ++counts[sample_with_replacement(rng, 4, 1)[0]];
    for (std::size_t c : counts) CHECK(std::fabs(static_cast<double>(c) / draws - 0.25) < 0.0025);
  }
  SUBCASE("invalid arguments") {
    RngStream rng(1);
    CHECK_THROWS_AS(sample_with_replacement(rng, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_with_replacement(rng, 3, 0), std::invalid_argument);
  }
}

TEST_CASE("uniform01 and normal moments") {
  RngStream rng(5);
  double sum = 0.0;
  double sum_sq = 0.0;
  constexpr int draws = 200000;
  for (int k = 0; k < draws; ++k) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::fabs(sum / draws) < 0.01);
  CHECK(std::fabs(sum_sq / draws - 1.0) < 0.02);
}

TEST_CASE("split streams differ from the parent") {
  RngStream parent(10);
  RngStream child = parent.split();
  RngStream parent_copy(10);
  parent_copy.split();
  CHECK(parent.next_u64() == parent_copy.next_u64());
  CHECK(child.next_u64() != RngStream(10).next_u64());
}

TEST_CASE("dot products") {
  CHECK(dot(DenseVector{1, 0, 2}, DenseVector{3, 4, 5}) == 13.0);
  CHECK(dot(DenseVector(3), DenseVector{3, 4, 5}) == 0.0);
  CHECK(dot(SparseVector(3, {{1, 2.0}}), DenseVector{5, 7, 9}) == 14.0);
  CHECK_THROWS_AS(dot(DenseVector{1, 2}, DenseVector{1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(dot(SparseVector(2, {{0, 1.0}}), DenseVector{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("norm2_sq") {
  CHECK(norm2_sq(DenseVector{3, 4}) == 25.0);
  CHECK(norm2_sq(DenseVector(5)) == 0.0);
  RngStream rng(8);
  for (int k = 0; k < 100; ++k) {
    const DenseVector v = oracle::random_vector(rng, 1 + k % 17, 3.0);
    CHECK(norm2_sq(v) == doctest::Approx(dot(v, v)).epsilon(1e-12));
    CHECK(norm2_sq(v) >= 0.0);
  }
}

TEST_CASE("vector arithmetic") {
  DenseVector y{1, 1, 1};
  axpy(2.0, DenseVector{1, 2, 3}, y);
  CHECK(y == DenseVector{3, 5, 7});
  axpy(-1.0, SparseVector(3, {{2, 4.0}}), y);
  CHECK(y == DenseVector{3, 5, 3});
  CHECK(DenseVector{1, 2} + DenseVector{3, 4} == DenseVector{4, 6});
  CHECK(DenseVector{1, 2} - DenseVector{3, 4} == DenseVector{-2, -2});
  CHECK(2.0 * DenseVector{1, -2} == DenseVector{2, -4});
  CHECK(distance_sq(DenseVector{0, 0}, DenseVector{3, 4}) == 25.0);
  CHECK_THROWS_AS(axpy(1.0, DenseVector{1}, y), std::invalid_argument);
}

TEST_CASE("sparse vector invariants") {
  CHECK_THROWS_AS(SparseVector(3, {{2, 1.0}, {1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(3, {{1, 1.0}, {1, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(3, {{3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseVector(3, {{0, std::nan("")}}), std::invalid_argument);
  const SparseVector s(4, {{0, 0.0}, {2, 5.0}});
  CHECK(s.nnz() == 1);
  CHECK(s.to_dense() == DenseVector{0, 0, 5, 0});
  CHECK(SparseVector::from_dense(DenseVector{0, 1.5, 0}) == SparseVector(3, {{1, 1.5}}));
  CHECK(s.scaled(2.0).to_dense() == DenseVector{0, 0, 10, 0});
}

TEST_CASE("dense vector helpers") {
  DenseVector v{1, 2};
  CHECK(v.all_finite());
  v[1] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(v.all_finite());
  v.fill(0.5);
  CHECK(v == DenseVector{0.5, 0.5});
  CHECK(hash_bits(DenseVector{1, 2}) == hash_bits(DenseVector{1, 2}));
  CHECK(hash_bits(DenseVector{1, 2}) != hash_bits(DenseVector{2, 1}));
}

TEST_CASE("variance of a sum of independent mean-zero vectors") {
  // z_k = s_k * u_k with fixed u_k and random signs s_k.
  RngStream rng(31);
  constexpr std::size_t r = 6;
  constexpr std::size_t d = 4;
  std::vector<DenseVector> u;
  double expected = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    u.push_back(oracle::random_vector(rng, d));
    expected += norm2_sq(u.back());
  }
  double total = 0.0;
  constexpr int draws = 200000;
  for (int t = 0; t < draws; ++t) {
    DenseVector s(d);
    for (std::size_t k = 0; k < r; ++k) axpy(rng.uniform_index(2) == 0 ? 1.0 : -1.0, u[k], s);
    total += norm2_sq(s);
  }
  CHECK(total / draws == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("norm of a sum is at most r times the sum of norms") {
  RngStream rng(37);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + trial % 9;
    const std::size_t d = 1 + trial % 5;
    DenseVector s(d);
    double sum_norms = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const DenseVector z = oracle::random_vector(rng, d, 2.0);
      axpy(1.0, z, s);
      sum_norms += norm2_sq(z);
    }
    CHECK(norm2_sq(s) <= static_cast<double>(r) * sum_norms * (1 + 1e-12));
  }
}
