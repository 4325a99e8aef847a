#include <doctest.h>

#include <random>

#include "selfcover/normal_forms.hpp"
#include "test_helpers.hpp"

using namespace selfcover;
using selfcover::testing::det_cofactor;
using selfcover::testing::random_matrix;
using selfcover::testing::random_nonsingular;

TEST_CASE("hnf on the worked examples") {
  auto h1 = hnf(IntMatrix::identity(2));
  CHECK(h1.H == IntMatrix::identity(2));
  CHECK(h1.U == IntMatrix::identity(2));

  IntMatrix m{{Int(2), Int(4)}, {Int(4), Int(2)}};
  auto h2 = hnf(m);
  CHECK(h2.H == IntMatrix{{Int(2), Int(4)}, {Int(0), Int(6)}});
  CHECK(h2.U * m == h2.H);
  CHECK(abs_int(det(h2.U)) == 1);

  auto h3 = hnf(IntMatrix(2, 2));
  CHECK(h3.H == IntMatrix(2, 2));
  CHECK(h3.U == IntMatrix::identity(2));
}

TEST_CASE("hnf transformation identities and canonicity on random input") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 5);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t rows = dim(rng), cols = dim(rng);
    IntMatrix m(rows, cols);
    std::uniform_int_distribution<int> entry(-9, 9);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = entry(rng);
    auto h = hnf(m);
    CHECK(h.U * m == h.H);
    CHECK(abs_int(det(h.U)) == 1);
    // canonical: rerunning is the identity
    auto h2 = hnf(h.H);
    CHECK(h2.H == h.H);
    // pivots positive, entries above reduced into [0, pivot)
    for (std::size_t i = 0; i < h.pivot_cols.size(); ++i) {
      std::size_t c = h.pivot_cols[i];
      CHECK(h.H.at(i, c) > 0);
      for (std::size_t k = 0; k < i; ++k) {
        CHECK(h.H.at(k, c) >= 0);
        CHECK(h.H.at(k, c) < h.H.at(i, c));
      }
    }
  }
}

TEST_CASE("snf on the worked examples") {
  auto s1 = snf(IntMatrix{{Int(6), Int(0)}, {Int(0), Int(4)}});
  CHECK(s1.diagonal() == std::vector<Int>{Int(2), Int(12)});
  auto s2 = snf(IntMatrix{{Int(1), Int(1)}, {Int(0), Int(2)}});
  CHECK(s2.diagonal() == std::vector<Int>{Int(1), Int(2)});
  auto s3 = snf(IntMatrix(3, 2));
  CHECK(s3.S == IntMatrix(3, 2));
}

TEST_CASE("snf transformation witnesses and divisibility chain") {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_int_distribution<int> entry(-9, 9);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t rows = dim(rng), cols = dim(rng);
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = entry(rng);
    auto s = snf(m);
    CHECK(s.U * m * s.V == s.S);
    CHECK(abs_int(det(s.U)) == 1);
    CHECK(abs_int(det(s.V)) == 1);
    auto d = s.diagonal();
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      CHECK(d[i] >= 0);
      if (d[i] != 0) CHECK(d[i + 1] % d[i] == 0);
      if (d[i] == 0) CHECK(d[i + 1] == 0);
    }
    for (std::size_t i = 0; i < s.S.rows(); ++i)
      for (std::size_t j = 0; j < s.S.cols(); ++j)
        if (i != j) CHECK(s.S.at(i, j) == 0);
  }
}

TEST_CASE("snf invariant factor product equals |det| for square nonsingular input") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 30; ++trial) {
    IntMatrix m = random_nonsingular(rng, 1 + trial % 4, -6, 6);
    Int prod = 1;
    for (const auto& d : snf(m).diagonal()) prod *= d;
    CHECK(prod == abs_int(det(m)));
  }
}

TEST_CASE("determinant examples and errors") {
  CHECK(det(IntMatrix::identity(4)) == 1);
  CHECK(det(IntMatrix{{Int(2), Int(1)}, {Int(1), Int(1)}}) == 1);
  CHECK(det(IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}}) == 6);
  CHECK_THROWS_AS((void)det(IntMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("determinant agrees with cofactor expansion and is multiplicative") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 1 + trial % 4;
    IntMatrix a = random_matrix(rng, n, -9, 9);
    IntMatrix b = random_matrix(rng, n, -9, 9);
    CHECK(det(a) == det_cofactor(a));
    CHECK(det(a * b) == det(a) * det(b));
  }
}

TEST_CASE("charpoly examples") {
  CHECK(charpoly(IntMatrix::identity(2)) == IntPoly{Int(1), Int(-2), Int(1)});
  CHECK(charpoly(IntMatrix{{Int(1), Int(1)}, {Int(0), Int(2)}}) ==
        IntPoly{Int(2), Int(-3), Int(1)});
  CHECK(charpoly(IntMatrix{{Int(0), Int(-1)}, {Int(1), Int(0)}}) ==
        IntPoly{Int(1), Int(0), Int(1)});
  CHECK_THROWS_AS((void)charpoly(IntMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("Cayley-Hamilton vanishing on random matrices") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + trial % 5;
    IntMatrix a = random_matrix(rng, n, -7, 7);
    CHECK(charpoly(a).eval_matrix(a).is_zero());
  }
}

TEST_CASE("charpoly constant term is (-1)^n det") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + trial % 5;
    IntMatrix a = random_matrix(rng, n, -5, 5);
    Int expected = (n % 2 == 0) ? det(a) : Int(-det(a));
    CHECK(charpoly(a)[0] == expected);
  }
}

TEST_CASE("kernels annihilate and are saturated") {
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> dim(1, 4), entry(-4, 4);
    std::size_t rows = dim(rng), cols = dim(rng);
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = entry(rng);
    IntMatrix k = left_kernel(m);
    if (k.rows() > 0) CHECK((k * m).is_zero());
    IntMatrix rk = right_kernel(m);
    if (rk.rows() > 0) CHECK((m * rk.transpose()).is_zero());
  }
}

TEST_CASE("solve_integer finds witnesses exactly") {
  IntMatrix a{{Int(2), Int(0)}, {Int(0), Int(3)}};
  auto sol = solve_integer(a, {Int(4), Int(9)});
  REQUIRE(sol.has_value());
  CHECK(a * *sol == std::vector<Int>{Int(4), Int(9)});
  CHECK_FALSE(solve_integer(a, {Int(1), Int(0)}).has_value());

  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + trial % 4;
    IntMatrix m = random_matrix(rng, n, -5, 5);
    std::vector<Int> x(n);
    std::uniform_int_distribution<int> entry(-5, 5);
    for (auto& v : x) v = entry(rng);
    auto back = solve_integer(m, m * x);
    REQUIRE(back.has_value());
    CHECK(m * *back == m * x);
  }
}

TEST_CASE("inverse_unimodular round trip") {
  IntMatrix u{{Int(1), Int(3)}, {Int(0), Int(-1)}};
  CHECK(u * inverse_unimodular(u) == IntMatrix::identity(2));
  CHECK_THROWS_AS((void)inverse_unimodular(IntMatrix{{Int(2)}}), std::invalid_argument);
}
