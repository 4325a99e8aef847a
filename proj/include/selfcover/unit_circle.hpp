#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "selfcover/integers.hpp"
#include "selfcover/poly.hpp"

namespace selfcover {

// Exact location of the complex roots of an integer polynomial relative to
// the unit circle. A root at 0 counts as inside. No floating point anywhere.
struct CircleCounts {
  int inside = 0;
  int on = 0;
  int outside = 0;
};

namespace detail {

// Divide out the content but keep the sign (primitive_part would flip it,
// which breaks Sturm sign sequences).
inline IntPoly scale_down_keep_sign(const IntPoly& p) {
  if (p.is_zero()) return p;
  Int c = p.content();
  std::vector<Int> v(p.coeffs());
  for (auto& x : v) x /= c;
  return IntPoly(std::move(v));
}

// Generalized Sturm chain of (f0, f1): negative pseudo-remainders with
// positive multipliers. Computes Cauchy indices of f1/f0.
inline std::vector<IntPoly> sturm_chain(IntPoly f0, IntPoly f1) {
  std::vector<IntPoly> chain;
  chain.push_back(std::move(f0));
  if (!f1.is_zero()) chain.push_back(std::move(f1));
  while (chain.size() >= 2 && !chain.back().is_zero() && chain.back().degree() > 0) {
    const IntPoly& a = chain[chain.size() - 2];
    const IntPoly& b = chain.back();
    IntPoly r = -pseudo_rem_positive(a, b);
    if (r.is_zero()) break;
    chain.push_back(scale_down_keep_sign(r));
  }
  return chain;
}

inline int sign_at(const IntPoly& p, const Int& x0) { return sign_of(p.eval(x0)); }

inline int sign_at_plus_inf(const IntPoly& p) { return sign_of(p.leading()); }

inline int sign_at_minus_inf(const IntPoly& p) {
  int s = sign_of(p.leading());
  return (p.degree() % 2 != 0) ? -s : s;
}

inline int count_variations(const std::vector<int>& signs) {
  int v = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

// Distinct real roots of f in the open interval (a, b); f(a), f(b) != 0.
inline int sturm_count_open(const IntPoly& f, const Int& a, const Int& b) {
  if (f.is_zero()) throw std::domain_error("sturm_count_open: zero polynomial");
  if (f.degree() == 0) return 0;
  auto chain = sturm_chain(f, f.derivative());
  std::vector<int> sa, sb;
  sa.reserve(chain.size());
  sb.reserve(chain.size());
  for (const auto& g : chain) {
    sa.push_back(sign_at(g, a));
    sb.push_back(sign_at(g, b));
  }
  return count_variations(sa) - count_variations(sb);
}

// Cauchy index of f1/f0 over the whole real line.
inline int cauchy_index_line(const IntPoly& f0, const IntPoly& f1) {
  auto chain = sturm_chain(f0, f1);
  std::vector<int> sm, sp;
  for (const auto& g : chain) {
    sm.push_back(sign_at_minus_inf(g));
    sp.push_back(sign_at_plus_inf(g));
  }
  return count_variations(sm) - count_variations(sp);
}

// Number of roots of w strictly inside the unit circle, assuming w has no
// roots on the circle. Winds w around the circle through the rational
// parameterization z = (1 + it)/(1 - it) and measures the argument change
// with exact Cauchy indices.
inline int count_inside_no_circle_roots(const IntPoly& w) {
  const int n = w.degree();
  if (n <= 0) return 0;
  // N(t) = sum a_k (1+it)^k (1-it)^(n-k) = U(t) + i V(t)
  std::vector<std::pair<IntPoly, IntPoly>> plus(n + 1), minus(n + 1);
  plus[0] = {IntPoly::constant(1), IntPoly()};
  minus[0] = {IntPoly::constant(1), IntPoly()};
  const IntPoly t = IntPoly::x();
  for (int k = 1; k <= n; ++k) {
    // multiply by (1 + it) resp. (1 - it)
    plus[k] = {plus[k - 1].first - t * plus[k - 1].second,
               plus[k - 1].second + t * plus[k - 1].first};
    minus[k] = {minus[k - 1].first + t * minus[k - 1].second,
                minus[k - 1].second - t * minus[k - 1].first};
  }
  IntPoly U, V;
  for (int k = 0; k <= n; ++k) {
    if (w[k] == 0) continue;
    const auto& [pr, pi] = plus[k];
    const auto& [mr, mi] = minus[n - k];
    U = U + w[k] * (pr * mr - pi * mi);
    V = V + w[k] * (pr * mi + pi * mr);
  }
  int halfpi_ends = 0;  // arctan(V/U) endpoint difference, in units of pi/2
  int index = 0;
  if (!U.is_zero() && !V.is_zero()) {
    if (V.degree() > U.degree()) {
      // g -> +-inf at both ends; arctan limits are +-pi/2
      int ratio_sign = sign_of(V.leading()) * sign_of(U.leading());
      int at_plus = ratio_sign;
      int diff_deg = V.degree() - U.degree();
      int at_minus = (diff_deg % 2 != 0) ? -ratio_sign : ratio_sign;
      halfpi_ends = at_plus - at_minus;
    }
    index = cauchy_index_line(U, V);
  }
  // total argument change of w over the circle, in units of pi/2:
  // (arctan ends) - 2*index, plus 2n from the (1-it)^n denominator
  int total = halfpi_ends - 2 * index + 2 * n;
  if (total % 4 != 0)
    throw std::logic_error("count_inside_no_circle_roots: winding not an integer");
  return total / 4;
}

// For a squarefree q with q(0), q(1), q(-1) != 0, classify the roots of its
// self-reciprocal part g = gcd(q, rev q) and return the cofactor w = q / g.
// g is palindromic of even degree 2m; its roots are either unit-circle pairs
// (t = x + 1/x real in (-2,2)) or reciprocal pairs splitting evenly across
// the circle.
struct ReciprocalPartCounts {
  int on = 0, inside = 0, outside = 0;
  IntPoly cofactor;
};

inline ReciprocalPartCounts classify_reciprocal_part(const IntPoly& q) {
  ReciprocalPartCounts out;
  IntPoly g = poly_gcd(q, q.reversed());
  if (g.degree() <= 0) {
    out.cofactor = q;
    return out;
  }
  const int deg = g.degree();
  if (deg % 2 != 0) throw std::logic_error("reciprocal part must have even degree");
  const int m = deg / 2;
  for (int i = 0; i <= deg; ++i)
    if (g[i] != g[deg - i]) throw std::logic_error("reciprocal part must be palindromic");
  // g(x) = x^m h(x + 1/x) with h built from x^j + x^-j = C_j(t)
  IntPoly h = IntPoly::constant(g[m]);
  IntPoly c_prev = IntPoly::constant(2), c_cur = IntPoly::x();
  for (int j = 1; j <= m; ++j) {
    h = h + g[m + j] * c_cur;
    IntPoly c_next = IntPoly::x() * c_cur - c_prev;
    c_prev = std::move(c_cur);
    c_cur = std::move(c_next);
  }
  int pairs_on = sturm_count_open(h, Int(-2), Int(2));
  out.on = 2 * pairs_on;
  out.inside = m - pairs_on;
  out.outside = m - pairs_on;
  out.cofactor = q.divide_exact(g);
  return out;
}

}  // namespace detail

// Exact counts of roots with modulus < 1, = 1, > 1 (with multiplicity).
inline CircleCounts roots_vs_unit_circle(const IntPoly& p) {
  if (p.is_zero()) throw std::domain_error("roots_vs_unit_circle: zero polynomial");
  CircleCounts counts;
  SquarefreeDecomposition sq = squarefree_decomposition(p);
  for (const auto& part : sq.parts) {
    IntPoly q = part.poly;
    const int e = part.multiplicity;
    if (q.constant_term() == 0) {
      q = q.divide_exact(IntPoly::x());
      counts.inside += e;
    }
    if (q.eval(1) == 0) {
      q = q.divide_exact(IntPoly{Int(-1), Int(1)});
      counts.on += e;
    }
    if (q.eval(-1) == 0) {
      q = q.divide_exact(IntPoly{Int(1), Int(1)});
      counts.on += e;
    }
    if (q.degree() <= 0) continue;
    auto rec = detail::classify_reciprocal_part(q);
    counts.on += e * rec.on;
    counts.inside += e * rec.inside;
    counts.outside += e * rec.outside;
    const IntPoly& w = rec.cofactor;
    if (w.degree() > 0) {
      int ins = detail::count_inside_no_circle_roots(w);
      counts.inside += e * ins;
      counts.outside += e * (w.degree() - ins);
    }
  }
  if (counts.inside + counts.on + counts.outside != p.degree())
    throw std::logic_error("roots_vs_unit_circle: counts do not sum to the degree");
  return counts;
}

}  // namespace selfcover
