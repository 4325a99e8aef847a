#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "selfcover/integers.hpp"
#include "selfcover/poly.hpp"

namespace selfcover {

// Complete factorization over Q, stored with primitive integer factors.
// unit carries sign and integer content, so expand() reproduces the input
// bit-exactly; it is +-1 whenever the input is primitive.
struct FactorList {
  struct Entry {
    IntPoly factor;
    int multiplicity;
    bool is_unit_factor;  // monic with constant term +-1 (algebraic-unit roots)
  };

  Int unit;
  std::vector<Entry> entries;

  IntPoly expand() const {
    IntPoly r = IntPoly::constant(unit);
    for (const auto& e : entries)
      for (int i = 0; i < e.multiplicity; ++i) r = r * e.factor;
    return r;
  }

  // Product, with multiplicity, of the unit factors (empty product = 1).
  IntPoly unit_part() const {
    IntPoly r = IntPoly::constant(1);
    for (const auto& e : entries)
      if (e.is_unit_factor)
        for (int i = 0; i < e.multiplicity; ++i) r = r * e.factor;
    return r;
  }
};

namespace detail {

// ---- arithmetic in F_p[x]; coefficients normalized into [0, p) ----

using ModPoly = std::vector<Int>;

inline void mp_trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline ModPoly mp_from(const IntPoly& f, const Int& p) {
  ModPoly a(f.coeffs().size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = floor_mod(f[i], p);
  mp_trim(a);
  return a;
}

inline Int mp_inv(const Int& a, const Int& p) {
  auto r = xgcd(floor_mod(a, p), p);
  return floor_mod(r.x, p);
}

inline ModPoly mp_scale(const ModPoly& a, const Int& s, const Int& p) {
  ModPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s % p;
  mp_trim(r);
  return r;
}

inline ModPoly mp_monic(const ModPoly& a, const Int& p) {
  if (a.empty()) return a;
  return mp_scale(a, mp_inv(a.back(), p), p);
}

inline ModPoly mp_sub(const ModPoly& a, const ModPoly& b, const Int& p) {
  ModPoly r(std::max(a.size(), b.size()), Int(0));
  for (std::size_t i = 0; i < r.size(); ++i) {
    Int x = (i < a.size() ? a[i] : Int(0)) - (i < b.size() ? b[i] : Int(0));
    r[i] = floor_mod(x, p);
  }
  mp_trim(r);
  return r;
}

inline ModPoly mp_add(const ModPoly& a, const ModPoly& b, const Int& p) {
  ModPoly r(std::max(a.size(), b.size()), Int(0));
  for (std::size_t i = 0; i < r.size(); ++i) {
    Int x = (i < a.size() ? a[i] : Int(0)) + (i < b.size() ? b[i] : Int(0));
    r[i] = floor_mod(x, p);
  }
  mp_trim(r);
  return r;
}

inline ModPoly mp_mul(const ModPoly& a, const ModPoly& b, const Int& p) {
  if (a.empty() || b.empty()) return {};
  ModPoly r(a.size() + b.size() - 1, Int(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  mp_trim(r);
  return r;
}

inline ModPoly mp_rem(ModPoly a, const ModPoly& b, const Int& p) {
  Int inv = mp_inv(b.back(), p);
  while (a.size() >= b.size() && !a.empty()) {
    Int f = a.back() * inv % p;
    if (f != 0) {
      std::size_t off = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i)
        a[off + i] = floor_mod(a[off + i] - f * b[i], p);
    }
    a.pop_back();
    mp_trim(a);
    if (a.size() < b.size()) break;
  }
  mp_trim(a);
  return a;
}

inline ModPoly mp_gcd(ModPoly a, ModPoly b, const Int& p) {
  while (!b.empty()) {
    ModPoly r = mp_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : mp_monic(a, p);
}

inline ModPoly mp_powmod(ModPoly base, Int e, const ModPoly& f, const Int& p) {
  ModPoly r{Int(1)};
  base = mp_rem(std::move(base), f, p);
  while (e > 0) {
    if ((e & 1) != 0) r = mp_rem(mp_mul(r, base, p), f, p);
    base = mp_rem(mp_mul(base, base, p), f, p);
    e >>= 1;
  }
  return r;
}

inline ModPoly mp_derivative(const ModPoly& a, const Int& p) {
  if (a.size() <= 1) return {};
  ModPoly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = Int(i) * a[i] % p;
  mp_trim(r);
  return r;
}

// extended euclid: s*a + t*b = 1 in F_p[x], a and b coprime
inline void mp_bezout(const ModPoly& a, const ModPoly& b, const Int& p, ModPoly& s, ModPoly& t) {
  ModPoly r0 = a, r1 = b;
  ModPoly s0{Int(1)}, s1{}, t0{}, t1{Int(1)};
  while (!r1.empty()) {
    // long division quotient
    ModPoly q;
    {
      ModPoly rem = r0;
      Int inv = mp_inv(r1.back(), p);
      if (rem.size() >= r1.size()) q.assign(rem.size() - r1.size() + 1, Int(0));
      while (rem.size() >= r1.size() && !rem.empty()) {
        Int f = rem.back() * inv % p;
        std::size_t off = rem.size() - r1.size();
        q[off] = f;
        for (std::size_t i = 0; i < r1.size(); ++i)
          rem[off + i] = floor_mod(rem[off + i] - f * r1[i], p);
        mp_trim(rem);
      }
      mp_trim(q);
      r0 = std::move(rem);
    }
    std::swap(r0, r1);
    ModPoly s2 = mp_sub(s0, mp_mul(q, s1, p), p);
    ModPoly t2 = mp_sub(t0, mp_mul(q, t1, p), p);
    s0 = std::move(s1);
    t0 = std::move(t1);
    s1 = std::move(s2);
    t1 = std::move(t2);
  }
  // r0 = gcd (constant for coprime inputs); normalize to 1
  Int inv = mp_inv(r0.back(), p);
  s = mp_scale(s0, inv, p);
  t = mp_scale(t0, inv, p);
}

// Berlekamp factorization of a monic squarefree polynomial over F_p.
inline std::vector<ModPoly> berlekamp(const ModPoly& f, const Int& p) {
  const std::size_t n = f.size() - 1;
  if (n == 1) return {f};
  // rows of Q: coefficients of x^{ip} mod f
  std::vector<ModPoly> rows(n);
  ModPoly xp = mp_powmod(ModPoly{Int(0), Int(1)}, p, f, p);
  rows[0] = ModPoly{Int(1)};
  for (std::size_t i = 1; i < n; ++i) rows[i] = mp_rem(mp_mul(rows[i - 1], xp, p), f, p);
  // B = (Q - I)^T; right nullspace of B = left nullspace of Q - I
  std::vector<std::vector<Int>> b(n, std::vector<Int>(n, Int(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) b[j][i] = rows[i][j];
    b[i][i] = floor_mod(b[i][i] - 1, p);
  }
  // Gaussian elimination over F_p, collecting a nullspace basis
  std::vector<std::size_t> pivot_of_col(n, SIZE_MAX);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < n; ++c) {
    std::size_t piv = rank;
    while (piv < n && b[piv][c] == 0) ++piv;
    if (piv == n) continue;
    std::swap(b[rank], b[piv]);
    Int inv = mp_inv(b[rank][c], p);
    for (std::size_t j = 0; j < n; ++j) b[rank][j] = b[rank][j] * inv % p;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == rank || b[i][c] == 0) continue;
      Int f2 = b[i][c];
      for (std::size_t j = 0; j < n; ++j) b[i][j] = floor_mod(b[i][j] - f2 * b[rank][j], p);
    }
    pivot_of_col[c] = rank;
    ++rank;
  }
  std::vector<ModPoly> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (pivot_of_col[c] != SIZE_MAX) continue;
    ModPoly v(n, Int(0));
    v[c] = 1;
    for (std::size_t c2 = 0; c2 < n; ++c2)
      if (pivot_of_col[c2] != SIZE_MAX) v[c2] = floor_mod(-b[pivot_of_col[c2]][c], p);
    mp_trim(v);
    basis.push_back(std::move(v));
  }
  const std::size_t r = basis.size();
  std::vector<ModPoly> factors{f};
  if (r == 1) return factors;

  std::mt19937_64 rng(0x5e1fc04e);
  auto try_split = [&](const ModPoly& w) {
    std::vector<ModPoly> next;
    for (const auto& u : factors) {
      if (u.size() - 1 <= 1) {
        next.push_back(u);
        continue;
      }
      ModPoly g = mp_gcd(u, w, p);
      if (!g.empty() && g.size() > 1 && g.size() < u.size()) {
        next.push_back(g);
        ModPoly rest = u;
        // u / g by repeated remainder-free division
        {
          ModPoly q;
          ModPoly rem = u;
          Int inv = mp_inv(g.back(), p);
          q.assign(rem.size() - g.size() + 1, Int(0));
          while (rem.size() >= g.size() && !rem.empty()) {
            Int fq = rem.back() * inv % p;
            std::size_t off = rem.size() - g.size();
            q[off] = fq;
            for (std::size_t i = 0; i < g.size(); ++i)
              rem[off + i] = floor_mod(rem[off + i] - fq * g[i], p);
            mp_trim(rem);
          }
          mp_trim(q);
          rest = mp_monic(q, p);
        }
        next.push_back(rest);
      } else {
        next.push_back(u);
      }
    }
    factors = std::move(next);
  };

  if (p <= 43) {
    for (const auto& v : basis) {
      if (v.size() <= 1) continue;  // constants split nothing
      for (Int s = 0; s < p && factors.size() < r; ++s) {
        ModPoly vs = v;
        if (vs.empty()) vs.push_back(Int(0));
        vs[0] = floor_mod(vs[0] - s, p);
        mp_trim(vs);
        if (vs.empty()) continue;
        try_split(vs);
      }
      if (factors.size() == r) break;
    }
  } else {
    std::uniform_int_distribution<std::uint64_t> dist(0, 1u << 30);
    while (factors.size() < r) {
      ModPoly w;
      for (const auto& v : basis) {
        Int c = Int(dist(rng)) % p;
        w = mp_sub(w, mp_scale(v, floor_mod(-c, p), p), p);
      }
      if (w.size() <= 1) continue;
      // w^((p-1)/2) - 1 separates roots of the Frobenius algebra
      for (const auto& u : factors) {
        if (u.size() - 1 <= 1) continue;
        ModPoly e = mp_powmod(w, (p - 1) / 2, u, p);
        if (e.empty())
          e = ModPoly{floor_mod(Int(-1), p)};
        else
          e[0] = floor_mod(e[0] - 1, p);
        mp_trim(e);
        if (!e.empty()) try_split(e);
        if (factors.size() == r) break;
      }
    }
  }
  for (auto& g : factors) g = mp_monic(g, p);
  return factors;
}

// balanced representative in (-m/2, m/2]
inline Int balanced(const Int& a, const Int& m) {
  Int r = floor_mod(a, m);
  if (2 * r > m) r -= m;
  return r;
}

inline IntPoly mp_to_poly_balanced(const ModPoly& a, const Int& m) {
  std::vector<Int> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = balanced(a[i], m);
  return IntPoly(std::move(c));
}

// One quadratic Hensel step: from precision m to m^2. All of f, g, h monic,
// deg f = deg g + deg h, s g + t h = 1 (mod m), deg s < deg h, deg t < deg g.
struct HenselPair {
  ModPoly g, h, s, t;
};

inline void hensel_step(const IntPoly& f, HenselPair& pr, const Int& m) {
  const Int m2 = m * m;
  auto red = [&](const IntPoly& q) { return mp_from(q, m2); };
  ModPoly fg = red(f);
  ModPoly e = mp_sub(fg, mp_mul(pr.g, pr.h, m2), m2);
  // (q, r) = divmod(s*e, h) over Z/m^2 (h monic)
  ModPoly se = mp_mul(pr.s, e, m2);
  ModPoly q, r;
  {
    ModPoly rem = se;
    if (rem.size() >= pr.h.size()) q.assign(rem.size() - pr.h.size() + 1, Int(0));
    while (rem.size() >= pr.h.size() && !rem.empty()) {
      Int fq = rem.back();  // h monic
      std::size_t off = rem.size() - pr.h.size();
      q[off] = fq;
      for (std::size_t i = 0; i < pr.h.size(); ++i)
        rem[off + i] = floor_mod(rem[off + i] - fq * pr.h[i], m2);
      mp_trim(rem);
    }
    mp_trim(q);
    r = std::move(rem);
  }
  ModPoly gstar = mp_add(mp_add(pr.g, mp_mul(pr.t, e, m2), m2), mp_mul(q, pr.g, m2), m2);
  ModPoly hstar = mp_add(pr.h, r, m2);
  // lift the Bezout pair
  ModPoly b =
      mp_sub(mp_add(mp_mul(pr.s, gstar, m2), mp_mul(pr.t, hstar, m2), m2), ModPoly{Int(1)}, m2);
  ModPoly sb = mp_mul(pr.s, b, m2);
  ModPoly c, d;
  {
    ModPoly rem = sb;
    if (rem.size() >= hstar.size()) c.assign(rem.size() - hstar.size() + 1, Int(0));
    while (rem.size() >= hstar.size() && !rem.empty()) {
      Int fq = rem.back();
      std::size_t off = rem.size() - hstar.size();
      c[off] = fq;
      for (std::size_t i = 0; i < hstar.size(); ++i)
        rem[off + i] = floor_mod(rem[off + i] - fq * hstar[i], m2);
      mp_trim(rem);
    }
    mp_trim(c);
    d = std::move(rem);
  }
  ModPoly sstar = mp_sub(pr.s, d, m2);
  ModPoly tstar = mp_sub(pr.t, mp_add(mp_mul(pr.t, b, m2), mp_mul(c, gstar, m2), m2), m2);
  pr = {gstar, hstar, sstar, tstar};
}

// Lift the full modular factor list of a monic squarefree f from mod p to
// mod p^(2^j) >= target, recursively pairing halves of the list.
inline std::vector<ModPoly> hensel_lift_tree(const IntPoly& f, std::vector<ModPoly> factors,
                                             const Int& p, const Int& target) {
  if (factors.size() == 1) return {mp_from(f, target)};
  const std::size_t half = factors.size() / 2;
  ModPoly g0{Int(1)}, h0{Int(1)};
  for (std::size_t i = 0; i < half; ++i) g0 = mp_mul(g0, factors[i], p);
  for (std::size_t i = half; i < factors.size(); ++i) h0 = mp_mul(h0, factors[i], p);
  HenselPair pr;
  pr.g = g0;
  pr.h = h0;
  mp_bezout(g0, h0, p, pr.s, pr.t);
  Int m = p;
  while (m < target) {
    hensel_step(f, pr, m);
    m = m * m;
  }
  IntPoly g_lift = mp_to_poly_balanced(pr.g, m);
  IntPoly h_lift = mp_to_poly_balanced(pr.h, m);
  std::vector<ModPoly> left(factors.begin(), factors.begin() + half);
  std::vector<ModPoly> right(factors.begin() + half, factors.end());
  auto lg = hensel_lift_tree(g_lift, std::move(left), p, target);
  auto lh = hensel_lift_tree(h_lift, std::move(right), p, target);
  lg.insert(lg.end(), lh.begin(), lh.end());
  return lg;
}

inline bool is_prime_small(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Zassenhaus factorization of a monic squarefree integer polynomial.
inline std::vector<IntPoly> zassenhaus_monic(const IntPoly& f) {
  const int n = f.degree();
  if (n <= 1) return {f};
  // pick a prime keeping f squarefree mod p
  Int p = 0;
  for (std::uint64_t cand = 2;; ++cand) {
    if (!is_prime_small(cand)) continue;
    Int pc(cand);
    ModPoly fp = mp_from(f, pc);
    if (static_cast<int>(fp.size()) - 1 != n) continue;  // cannot happen for monic f
    ModPoly d = mp_derivative(fp, pc);
    if (d.empty()) continue;
    ModPoly g = mp_gcd(fp, d, pc);
    if (g.size() == 1) {
      p = pc;
      break;
    }
  }
  std::vector<ModPoly> modular = berlekamp(mp_monic(mp_from(f, p), p), p);
  if (modular.size() == 1) return {f};

  // Mignotte-style bound on factor coefficients, then lift past 2*bound
  Int norm2 = 0;
  for (const auto& c : f.coeffs()) norm2 += c * c;
  Int bound = 2 * pow_int(2, static_cast<std::uint64_t>(n)) * (boost::multiprecision::sqrt(norm2) + 1);
  Int target = p;
  while (target <= bound) target = target * target;

  std::vector<ModPoly> lifted = hensel_lift_tree(f, std::move(modular), p, target);
  // recombine subsets of lifted factors into true integer factors
  std::vector<IntPoly> out;
  IntPoly rest = f;
  std::vector<int> live(lifted.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = static_cast<int>(i);
  std::size_t subset_size = 1;
  while (2 * subset_size <= live.size()) {
    std::vector<std::size_t> idx(subset_size);
    for (std::size_t i = 0; i < subset_size; ++i) idx[i] = i;
    bool advanced = true;
    while (advanced) {
      ModPoly prod{Int(1)};
      for (std::size_t i : idx) prod = mp_mul(prod, lifted[live[i]], target);
      IntPoly cand = mp_to_poly_balanced(prod, target);
      if (cand.divides(rest)) {
        out.push_back(cand);
        rest = rest.divide_exact(cand);
        std::vector<int> keep;
        for (std::size_t i = 0; i < live.size(); ++i)
          if (std::find(idx.begin(), idx.end(), i) == idx.end()) keep.push_back(live[i]);
        live = std::move(keep);
        for (std::size_t i = 0; i < subset_size; ++i) idx[i] = i;
        if (2 * subset_size > live.size()) break;
        continue;
      }
      // next combination
      advanced = false;
      for (std::size_t i = subset_size; i-- > 0;) {
        if (idx[i] + (subset_size - i) < live.size()) {
          ++idx[i];
          for (std::size_t j = i + 1; j < subset_size; ++j) idx[j] = idx[j - 1] + 1;
          advanced = true;
          break;
        }
      }
    }
    ++subset_size;
  }
  if (rest.degree() >= 1) out.push_back(rest);
  return out;
}

// Factor a squarefree primitive polynomial with positive leading coefficient.
inline std::vector<IntPoly> factor_squarefree(const IntPoly& q) {
  if (q.degree() == 1) return {q};
  const Int lc = q.leading();
  if (lc == 1) return zassenhaus_monic(q);
  // monicize: F(y) = lc^(d-1) q(y / lc), factor, map back
  const int d = q.degree();
  std::vector<Int> fc(d + 1);
  fc[d] = 1;
  for (int i = 0; i < d; ++i) fc[i] = q[i] * pow_int(lc, static_cast<std::uint64_t>(d - 1 - i));
  IntPoly F(std::move(fc));
  std::vector<IntPoly> monic_factors = zassenhaus_monic(F);
  std::vector<IntPoly> out;
  for (const auto& g : monic_factors) {
    // H(x) = primitive part of g(lc * x)
    std::vector<Int> hc(g.degree() + 1);
    for (int i = 0; i <= g.degree(); ++i) hc[i] = g[i] * pow_int(lc, static_cast<std::uint64_t>(i));
    out.push_back(IntPoly(std::move(hc)).primitive_part());
  }
  return out;
}

}  // namespace detail

// Complete factorization into irreducibles over the rationals.
inline FactorList factor(const IntPoly& p) {
  if (p.is_zero()) throw std::domain_error("factor: zero polynomial");
  SquarefreeDecomposition sq = squarefree_decomposition(p);
  FactorList out;
  out.unit = sq.unit;
  for (const auto& part : sq.parts) {
    for (const auto& irr : detail::factor_squarefree(part.poly)) {
      bool unit_factor = irr.is_monic() && abs_int(irr.constant_term()) == 1;
      out.entries.push_back({irr, part.multiplicity, unit_factor});
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const FactorList::Entry& a, const FactorList::Entry& b) {
              return a.factor < b.factor;
            });
  return out;
}

}  // namespace selfcover
