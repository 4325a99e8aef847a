#include <doctest.h>

#include <random>

#include "selfcover/lattice.hpp"
#include "test_helpers.hpp"

using namespace selfcover;
using selfcover::testing::random_nonsingular;
using VV = std::vector<std::vector<Int>>;

TEST_CASE("from_generators canonicalizes") {
  auto l1 = Sublattice::from_generators(2, VV{{Int(2), Int(0)}, {Int(0), Int(3)}});
  CHECK(l1.basis() == IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}});
  auto l2 = Sublattice::from_generators(2, VV{{Int(1), Int(1)}, {Int(1), Int(-1)}, {Int(2), Int(0)}});
  CHECK(l2.basis() == IntMatrix{{Int(1), Int(1)}, {Int(0), Int(2)}});
  auto l3 = Sublattice::from_generators(2, VV{});
  CHECK(l3.rank() == 0);
  CHECK_THROWS_AS((void)Sublattice::from_generators(2, VV{{Int(1)}}), std::invalid_argument);
}

TEST_CASE("membership by back-substitution") {
  auto l = Sublattice::from_generators(2, VV{{Int(2), Int(0)}, {Int(0), Int(3)}});
  CHECK(l.contains({Int(2), Int(3)}));
  CHECK_FALSE(l.contains({Int(1), Int(0)}));
  auto span = Sublattice::from_generators(2, VV{{Int(1), Int(1)}, {Int(0), Int(2)}});
  CHECK(span.contains({Int(3), Int(1)}));  // 3(1,1) - (0,2)
}

TEST_CASE("intersect and sum worked examples") {
  auto a = Sublattice::from_generators(2, VV{{Int(2), Int(0)}, {Int(0), Int(1)}});
  auto b = Sublattice::from_generators(2, VV{{Int(1), Int(0)}, {Int(0), Int(3)}});
  CHECK(intersect(a, b).basis() == IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}});
  auto s1 = Sublattice::from_generators(2, VV{{Int(2), Int(0)}});
  auto s2 = Sublattice::from_generators(2, VV{{Int(0), Int(3)}});
  CHECK(sum(s1, s2).basis() == IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}});
  auto line1 = Sublattice::from_generators(2, VV{{Int(1), Int(1)}});
  auto line2 = Sublattice::from_generators(2, VV{{Int(1), Int(-1)}});
  CHECK(intersect(line1, line2).is_zero());
}

TEST_CASE("saturation") {
  CHECK(saturate(Sublattice::from_generators(2, VV{{Int(2), Int(0)}})).basis() ==
        IntMatrix{{Int(1), Int(0)}});
  CHECK(saturate(Sublattice::from_generators(2, VV{{Int(2), Int(2)}})).basis() ==
        IntMatrix{{Int(1), Int(1)}});
  auto full = Sublattice::from_generators(2, VV{{Int(1), Int(0)}, {Int(0), Int(1)}});
  CHECK(saturate(full) == full);
}

TEST_CASE("index worked examples") {
  IntMatrix a{{Int(1), Int(1)}, {Int(0), Int(2)}};
  auto az = apply_matrix(a, Sublattice::full(2));
  CHECK(*lattice_index(Sublattice::full(2), az) == 2);
  CHECK(*lattice_index(Sublattice::full(2), Sublattice::full(2)) == 1);
  CHECK_FALSE(lattice_index(Sublattice::full(2),
                            Sublattice::from_generators(2, VV{{Int(1), Int(0)}}))
                  .has_value());
  CHECK_THROWS_AS((void)lattice_index(az, Sublattice::full(2)), std::domain_error);
}

TEST_CASE("quotient worked examples") {
  IntMatrix a{{Int(1), Int(1)}, {Int(0), Int(2)}};
  auto q1 = quotient(Sublattice::full(2), apply_matrix(a, Sublattice::full(2)));
  CHECK(q1.invariant_factors == std::vector<Int>{Int(2)});
  auto q2 = quotient(Sublattice::full(2),
                     apply_matrix(IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}}, Sublattice::full(2)));
  CHECK(q2.invariant_factors == std::vector<Int>{Int(6)});
  auto q3 = quotient(Sublattice::full(2), Sublattice::full(2));
  CHECK(q3.is_trivial());
  CHECK_THROWS_AS((void)quotient(Sublattice::full(2),
                                 Sublattice::from_generators(2, VV{{Int(1), Int(0)}})),
                  std::domain_error);
}

TEST_CASE("index identity for intersect and sum") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 2 + trial % 2;
    IntMatrix m1 = random_nonsingular(rng, n, -4, 4);
    IntMatrix m2 = random_nonsingular(rng, n, -4, 4);
    auto l1 = apply_matrix(m1, Sublattice::full(n));
    auto l2 = apply_matrix(m2, Sublattice::full(n));
    auto full = Sublattice::full(n);
    Int lhs = *lattice_index(full, intersect(l1, l2)) * *lattice_index(full, sum(l1, l2));
    Int rhs = *lattice_index(full, l1) * *lattice_index(full, l2);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("quotient order equals |det| on random nonsingular matrices") {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + trial % 5;
    IntMatrix a = random_nonsingular(rng, n, -5, 5);
    auto q = quotient(Sublattice::full(n), apply_matrix(a, Sublattice::full(n)));
    CHECK(q.order() == abs_int(det(a)));
  }
}

TEST_CASE("stable sublattice worked examples") {
  auto s1 = stable_sublattice(IntMatrix{{Int(1), Int(1)}, {Int(0), Int(2)}});
  CHECK(s1.basis() == IntMatrix{{Int(1), Int(0)}});
  auto s2 = stable_sublattice(IntMatrix{{Int(2), Int(0)}, {Int(0), Int(2)}});
  CHECK(s2.is_zero());
  auto s3 = stable_sublattice(IntMatrix::identity(3));
  CHECK(s3 == Sublattice::full(3));
  CHECK_THROWS_AS((void)stable_sublattice(IntMatrix(2, 2)), std::domain_error);
}

TEST_CASE("stable sublattice is A-stable and certified by the divisibility oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 1 + trial % 3;
    IntMatrix a = random_nonsingular(rng, n, -3, 3);
    Sublattice stable = stable_sublattice(a);
    CHECK(apply_matrix(a, stable) == stable);
    // every stable basis vector is A^k-divisible for all k
    for (std::size_t i = 0; i < stable.rank(); ++i) {
      for (int k = 1; k <= 12; ++k)
        CHECK(solve_integer(a.pow(k), stable.basis_vector(i)).has_value());
    }
  }
}

TEST_CASE("stable sublattice equals the stabilized iterated intersection when it stabilizes") {
  // the chain A^k Z^n stabilizes exactly when A is unimodular
  for (const IntMatrix& a :
       {IntMatrix{{Int(1), Int(1)}, {Int(0), Int(1)}}, IntMatrix{{Int(2), Int(1)}, {Int(1), Int(1)}},
        IntMatrix{{Int(0), Int(-1)}, {Int(1), Int(0)}}}) {
    Sublattice chain = Sublattice::full(2);
    bool stabilized = false;
    for (int k = 1; k <= 30; ++k) {
      Sublattice next = intersect(chain, apply_matrix(a.pow(k), Sublattice::full(2)));
      if (next == chain) {
        stabilized = true;
        break;
      }
      chain = next;
    }
    REQUIRE(stabilized);
    CHECK(stable_sublattice(a) == chain);
  }
}

TEST_CASE("prufer ranks worked examples") {
  auto p1 = prufer_ranks(IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}});
  CHECK(p1.size() == 2);
  CHECK(p1.at(2) == 1);
  CHECK(p1.at(3) == 1);
  auto p2 = prufer_ranks(IntMatrix{{Int(2), Int(0)}, {Int(0), Int(2)}});
  CHECK(p2.size() == 1);
  CHECK(p2.at(2) == 2);
  auto p3 = prufer_ranks(IntMatrix{{Int(1), Int(1)}, {Int(0), Int(2)}});
  CHECK(p3.size() == 1);
  CHECK(p3.at(2) == 1);
  CHECK_THROWS_AS((void)prufer_ranks(IntMatrix{{Int(1)}}), std::domain_error);
  CHECK_THROWS_AS((void)prufer_ranks(IntMatrix(2, 2)), std::domain_error);
}

TEST_CASE("prufer ranks match the p-rank of stabilized finite quotients") {
  std::mt19937_64 rng(88);
  int tested = 0;
  while (tested < 20) {
    std::size_t n = 1 + tested % 3;
    IntMatrix a = random_nonsingular(rng, n, -4, 4);
    if (abs_int(det(a)) == 1) continue;
    ++tested;
    auto ranks = prufer_ranks(a);
    std::size_t total = 0;
    for (const auto& [p, r] : ranks) {
      total += r;
      for (std::size_t k = n; k <= n + 3; ++k) {
        auto q = quotient(Sublattice::full(n), apply_matrix(a.pow(k), Sublattice::full(n)));
        CHECK(q.p_rank(p) == r);
      }
    }
    CHECK(total <= n);
  }
}
