#include <doctest.h>

#include <random>

#include "selfcover/factorization.hpp"
#include "selfcover/poly.hpp"

using namespace selfcover;

namespace {

// Independent irreducibility filter for degree <= 3: no rational root.
bool has_rational_root(const IntPoly& p) {
  Int a0 = abs_int(p.constant_term());
  Int an = abs_int(p.leading());
  if (a0 == 0) return true;
  for (Int num = 1; num <= a0; ++num) {
    if (a0 % num != 0) continue;
    for (Int den = 1; den <= an; ++den) {
      if (an % den != 0) continue;
      // candidate roots +-num/den: p(num/den) = 0 iff sum a_i num^i den^(d-i) = 0
      for (int sgn : {1, -1}) {
        Int acc = 0;
        Int num_s = sgn * num;
        for (int i = p.degree(); i >= 0; --i) acc = acc * num_s + p[i] * pow_int(den, p.degree() - i);
        if (acc == 0) return true;
      }
    }
  }
  return false;
}

IntPoly random_irreducible(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> degree(1, max_degree);
  std::uniform_int_distribution<int> coef(-5, 5);
  while (true) {
    int d = degree(rng);
    std::vector<Int> c(d + 1);
    for (auto& v : c) v = coef(rng);
    if (c[d] == 0) continue;
    IntPoly p(std::move(c));
    p = p.primitive_part();
    if (p.degree() != d) continue;
    if (d == 1) return p;
    if (!has_rational_root(p)) return p;  // complete test for degree 2 and 3
  }
}

}  // namespace

TEST_CASE("polynomial arithmetic basics") {
  IntPoly p{Int(1), Int(2), Int(1)};  // (x+1)^2
  IntPoly q{Int(1), Int(1)};
  CHECK(p.divide_exact(q) == q);
  CHECK(q * q == p);
  CHECK(p.eval(2) == 9);
  CHECK((p - p).is_zero());
  CHECK(p.derivative() == IntPoly{Int(2), Int(2)});
  CHECK(IntPoly{Int(3), Int(0), Int(-6)}.content() == 3);
  CHECK(IntPoly{Int(2), Int(0), Int(-4)}.reversed() == IntPoly{Int(-4), Int(0), Int(2)});
  IntPoly xp1{Int(1), Int(1)};
  CHECK_THROWS_AS((void)xp1.divide_exact(IntPoly{Int(2)}), std::domain_error);
}

TEST_CASE("poly_gcd worked examples") {
  CHECK(poly_gcd(IntPoly{Int(-1), Int(0), Int(1)}, IntPoly{Int(-1), Int(1)}) ==
        IntPoly{Int(-1), Int(1)});
  CHECK(poly_gcd(IntPoly{Int(-1), Int(-2), Int(1)}, IntPoly{Int(-1), Int(2), Int(1)}) ==
        IntPoly::constant(1));
  CHECK(poly_gcd(IntPoly{Int(-2), Int(0), Int(4)}, IntPoly()) == IntPoly{Int(-1), Int(0), Int(2)});
  CHECK_THROWS_AS((void)poly_gcd(IntPoly(), IntPoly()), std::domain_error);
}

TEST_CASE("poly_gcd divides both arguments") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    IntPoly a = random_irreducible(rng, 3);
    IntPoly b = random_irreducible(rng, 3);
    IntPoly c = random_irreducible(rng, 2);
    IntPoly g = poly_gcd(a * c, b * c);
    CHECK(g.divides(a * c));
    CHECK(g.divides(b * c));
    CHECK(c.primitive_part().divides(g));
    CHECK(g.leading() > 0);
  }
}

TEST_CASE("squarefree decomposition reassembles the input") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    IntPoly p = IntPoly::constant(1);
    std::uniform_int_distribution<int> mult(1, 3), count(1, 3);
    int parts = count(rng);
    for (int i = 0; i < parts; ++i) {
      IntPoly f = random_irreducible(rng, 2);
      int m = mult(rng);
      for (int k = 0; k < m; ++k) p = p * f;
    }
    auto sq = squarefree_decomposition(p);
    CHECK(sq.expand() == p);
    for (const auto& part : sq.parts)
      CHECK(poly_gcd(part.poly, part.poly.derivative()).degree() == 0);
  }
}

TEST_CASE("factor worked examples with unit flags") {
  // x^4 - 1 = (x-1)(x+1)(x^2+1), all unit factors
  auto f1 = factor(IntPoly{Int(-1), Int(0), Int(0), Int(0), Int(1)});
  CHECK(f1.unit == 1);
  REQUIRE(f1.entries.size() == 3);
  for (const auto& e : f1.entries) {
    CHECK(e.multiplicity == 1);
    CHECK(e.is_unit_factor);
  }
  CHECK(f1.expand() == IntPoly{Int(-1), Int(0), Int(0), Int(0), Int(1)});

  // x^2 - 3x + 2 = (x-1)[unit] (x-2)[non-unit]
  auto f2 = factor(IntPoly{Int(2), Int(-3), Int(1)});
  REQUIRE(f2.entries.size() == 2);
  for (const auto& e : f2.entries) {
    if (e.factor == IntPoly{Int(-1), Int(1)}) CHECK(e.is_unit_factor);
    if (e.factor == IntPoly{Int(-2), Int(1)}) CHECK_FALSE(e.is_unit_factor);
  }

  // x^2 - 2x - 1 irreducible, unit factor
  auto f3 = factor(IntPoly{Int(-1), Int(-2), Int(1)});
  REQUIRE(f3.entries.size() == 1);
  CHECK(f3.entries[0].is_unit_factor);
  CHECK(f3.entries[0].factor == IntPoly{Int(-1), Int(-2), Int(1)});

  CHECK_THROWS_AS((void)factor(IntPoly()), std::domain_error);
}

TEST_CASE("factor round trip on random products of irreducibles") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    IntPoly p = IntPoly::constant(1);
    std::uniform_int_distribution<int> count(1, 4), mult(1, 2);
    int parts = count(rng);
    for (int i = 0; i < parts; ++i) {
      IntPoly f = random_irreducible(rng, 3);
      int m = mult(rng);
      for (int k = 0; k < m; ++k) p = p * f;
    }
    FactorList fl = factor(p);
    CHECK(fl.expand() == p);
    for (const auto& e : fl.entries) {
      if (e.factor.degree() >= 2) CHECK_FALSE(has_rational_root(e.factor));
      CHECK(e.is_unit_factor ==
            (e.factor.is_monic() && abs_int(e.factor.constant_term()) == 1));
      CHECK(e.factor.primitive_part() == e.factor);
    }
  }
}

TEST_CASE("factor handles content and sign") {
  IntPoly p = Int(-6) * (IntPoly{Int(-1), Int(1)} * IntPoly{Int(1), Int(1)});
  FactorList fl = factor(p);
  CHECK(fl.unit == -6);
  CHECK(fl.expand() == p);
}
