#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "selfcover/integers.hpp"
#include "selfcover/matrix.hpp"
#include "selfcover/poly.hpp"

namespace selfcover {

// Row Hermite normal form: U * M = H with U unimodular, H in canonical row
// echelon shape (pivots positive, entries above a pivot reduced into
// [0, pivot), zero rows last).
struct HnfResult {
  IntMatrix H;
  IntMatrix U;
  std::vector<std::size_t> pivot_cols;  // one per nonzero row of H
};

inline HnfResult hnf(const IntMatrix& m) {
  HnfResult out{m, IntMatrix::identity(m.rows()), {}};
  IntMatrix& h = out.H;
  IntMatrix& u = out.U;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && h.at(piv, c) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r) {
      h.swap_rows(r, piv);
      u.swap_rows(r, piv);
    }
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (h.at(i, c) == 0) continue;
      const Int a = h.at(r, c), b = h.at(i, c);
      auto [g, x, y] = xgcd(a, b);
      const Int ag = a / g, bg = b / g;
      // rows (r, i) <- ((x, y), (-b/g, a/g)) * rows (r, i); det = +1
      for (std::size_t k = 0; k < m.cols(); ++k) {
        Int hr = h.at(r, k), hi = h.at(i, k);
        h.at(r, k) = x * hr + y * hi;
        h.at(i, k) = -bg * hr + ag * hi;
      }
      for (std::size_t k = 0; k < m.rows(); ++k) {
        Int ur = u.at(r, k), ui = u.at(i, k);
        u.at(r, k) = x * ur + y * ui;
        u.at(i, k) = -bg * ur + ag * ui;
      }
    }
    if (h.at(r, c) < 0) {
      h.negate_row(r);
      u.negate_row(r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor_div(h.at(i, c), h.at(r, c));
      if (q != 0) {
        h.add_row_multiple(i, r, -q);
        u.add_row_multiple(i, r, -q);
      }
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  return out;
}

// Smith normal form: U * M * V = S diagonal with d1 | d2 | ... >= 0,
// zero diagonal entries last, U and V unimodular.
struct SnfResult {
  IntMatrix S;
  IntMatrix U;
  IntMatrix V;

  std::vector<Int> diagonal() const {
    std::vector<Int> d;
    for (std::size_t i = 0; i < S.rows() && i < S.cols(); ++i) d.push_back(S.at(i, i));
    return d;
  }
};

inline SnfResult snf(const IntMatrix& m) {
  SnfResult out{m, IntMatrix::identity(m.rows()), IntMatrix::identity(m.cols())};
  IntMatrix& s = out.S;
  IntMatrix& u = out.U;
  IntMatrix& v = out.V;
  const std::size_t nr = m.rows(), nc = m.cols();

  auto col_swap = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < nr; ++k) std::swap(s.at(k, i), s.at(k, j));
    for (std::size_t k = 0; k < nc; ++k) std::swap(v.at(k, i), v.at(k, j));
  };
  auto col_combine = [&](std::size_t i, std::size_t j, const Int& a, const Int& b, const Int& c,
                         const Int& d) {
    // cols (i, j) <- (a*ci + b*cj, c*ci + d*cj), ad - bc = +-1
    for (std::size_t k = 0; k < nr; ++k) {
      Int si = s.at(k, i), sj = s.at(k, j);
      s.at(k, i) = a * si + b * sj;
      s.at(k, j) = c * si + d * sj;
    }
    for (std::size_t k = 0; k < nc; ++k) {
      Int vi = v.at(k, i), vj = v.at(k, j);
      v.at(k, i) = a * vi + b * vj;
      v.at(k, j) = c * vi + d * vj;
    }
  };
  auto row_combine = [&](std::size_t i, std::size_t j, const Int& a, const Int& b, const Int& c,
                         const Int& d) {
    for (std::size_t k = 0; k < nc; ++k) {
      Int si = s.at(i, k), sj = s.at(j, k);
      s.at(i, k) = a * si + b * sj;
      s.at(j, k) = c * si + d * sj;
    }
    for (std::size_t k = 0; k < nr; ++k) {
      Int ui = u.at(i, k), uj = u.at(j, k);
      u.at(i, k) = a * ui + b * uj;
      u.at(j, k) = c * ui + d * uj;
    }
  };

  const std::size_t steps = nr < nc ? nr : nc;
  for (std::size_t t = 0; t < steps; ++t) {
    // locate a pivot in the trailing submatrix
    bool found = false;
    std::size_t pi = t, pj = t;
    for (std::size_t i = t; i < nr; ++i)
      for (std::size_t j = t; j < nc; ++j)
        if (s.at(i, j) != 0 &&
            (!found || abs_int(s.at(i, j)) < abs_int(s.at(pi, pj)))) {
          pi = i;
          pj = j;
          found = true;
        }
    if (!found) break;
    if (pi != t) {
      s.swap_rows(t, pi);
      u.swap_rows(t, pi);
    }
    if (pj != t) col_swap(t, pj);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < nr; ++i) {
        if (s.at(i, t) == 0) continue;
        auto [g, x, y] = xgcd(s.at(t, t), s.at(i, t));
        Int ag = s.at(t, t) / g, bg = s.at(i, t) / g;
        row_combine(t, i, x, y, -bg, ag);
      }
      for (std::size_t j = t + 1; j < nc; ++j) {
        if (s.at(t, j) == 0) continue;
        auto [g, x, y] = xgcd(s.at(t, t), s.at(t, j));
        Int ag = s.at(t, t) / g, bg = s.at(t, j) / g;
        col_combine(t, j, x, y, -bg, ag);
      }
      for (std::size_t i = t + 1; i < nr && clean; ++i)
        if (s.at(i, t) != 0) clean = false;
    }
    // divisibility: pivot must divide the whole trailing block
    bool restart = true;
    while (restart) {
      restart = false;
      for (std::size_t i = t + 1; i < nr && !restart; ++i)
        for (std::size_t j = t + 1; j < nc && !restart; ++j)
          if (s.at(i, j) % s.at(t, t) != 0) {
            // fold row i into row t and re-eliminate
            row_combine(t, i, Int(1), Int(1), Int(0), Int(1));
            bool c2 = false;
            while (!c2) {
              c2 = true;
              for (std::size_t jj = t + 1; jj < nc; ++jj) {
                if (s.at(t, jj) == 0) continue;
                auto [g, x, y] = xgcd(s.at(t, t), s.at(t, jj));
                Int ag = s.at(t, t) / g, bg = s.at(t, jj) / g;
                col_combine(t, jj, x, y, -bg, ag);
              }
              for (std::size_t ii = t + 1; ii < nr; ++ii) {
                if (s.at(ii, t) == 0) continue;
                auto [g, x, y] = xgcd(s.at(t, t), s.at(ii, t));
                Int ag = s.at(t, t) / g, bg = s.at(ii, t) / g;
                row_combine(t, ii, x, y, -bg, ag);
                c2 = false;
              }
            }
            restart = true;
          }
    }
    if (s.at(t, t) < 0) {
      s.negate_row(t);
      u.negate_row(t);
    }
  }
  return out;
}

// Exact determinant via Bareiss fraction-free elimination.
inline Int det(const IntMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("det: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a.at(k, k) == 0) {
      std::size_t piv = k + 1;
      while (piv < n && a.at(piv, k) == 0) ++piv;
      if (piv == n) return 0;
      a.swap_rows(k, piv);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a.at(i, j) = (a.at(k, k) * a.at(i, j) - a.at(i, k) * a.at(k, j)) / prev;
    prev = a.at(k, k);
  }
  return sign > 0 ? a.at(n - 1, n - 1) : Int(-a.at(n - 1, n - 1));
}

// Characteristic polynomial det(xI - M), computed by Bareiss elimination over
// Z[x]. Pivots are characteristic polynomials of leading submatrices and never
// vanish, so no pivot search is needed; divisions are exact.
inline IntPoly charpoly(const IntMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("charpoly: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0) return IntPoly::constant(1);
  std::vector<std::vector<IntPoly>> a(n, std::vector<IntPoly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = i == j ? IntPoly{-m.at(i, j), Int(1)} : IntPoly::constant(-m.at(i, j));
  IntPoly prev = IntPoly::constant(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]).divide_exact(prev);
    prev = a[k][k];
  }
  return a[n - 1][n - 1];
}

// Basis (as matrix rows) of the left kernel {z : z * M = 0}, a saturated
// lattice: rows of U matching zero rows of the HNF.
inline IntMatrix left_kernel(const IntMatrix& m) {
  HnfResult h = hnf(m);
  const std::size_t rank = h.pivot_cols.size();
  IntMatrix k(m.rows() - rank, m.rows());
  for (std::size_t i = rank; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) k.at(i - rank, j) = h.U.at(i, j);
  return k;
}

// Basis (as matrix rows) of the right kernel {x : M x = 0}.
inline IntMatrix right_kernel(const IntMatrix& m) { return left_kernel(m.transpose()); }

// Solve M x = v over the integers (column convention); nullopt when no
// integer solution exists.
inline std::optional<std::vector<Int>> solve_integer(const IntMatrix& m,
                                                     const std::vector<Int>& v) {
  if (v.size() != m.rows()) throw std::invalid_argument("solve_integer: length mismatch");
  HnfResult h = hnf(m.transpose());
  // v must be an integer combination of the HNF rows; back-substitute.
  std::vector<Int> rem = v;
  std::vector<Int> coef(h.pivot_cols.size(), Int(0));
  for (std::size_t i = 0; i < h.pivot_cols.size(); ++i) {
    std::size_t c = h.pivot_cols[i];
    if (rem[c] % h.H.at(i, c) != 0) return std::nullopt;
    Int t = rem[c] / h.H.at(i, c);
    coef[i] = t;
    if (t != 0)
      for (std::size_t j = 0; j < rem.size(); ++j) rem[j] -= t * h.H.at(i, j);
  }
  for (const auto& r : rem)
    if (r != 0) return std::nullopt;
  // v = coef * H = (coef * U) * M^T, so x = coef * U.
  std::vector<Int> x(m.cols(), Int(0));
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (coef[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) x[j] += coef[i] * h.U.at(i, j);
  }
  return x;
}

// Inverse of a unimodular matrix (|det| = 1), exact.
inline IntMatrix inverse_unimodular(const IntMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("inverse_unimodular: matrix not square");
  HnfResult h = hnf(m);
  // For unimodular M the HNF is the identity, so U is the inverse.
  if (!(h.H == IntMatrix::identity(m.rows())))
    throw std::invalid_argument("inverse_unimodular: matrix is not unimodular");
  return h.U;
}

}  // namespace selfcover
