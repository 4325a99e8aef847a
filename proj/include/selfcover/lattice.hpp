#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "selfcover/factorization.hpp"
#include "selfcover/integers.hpp"
#include "selfcover/matrix.hpp"
#include "selfcover/normal_forms.hpp"

namespace selfcover {

// Finite-rank subgroup of Z^n in canonical form: the basis rows are the row
// Hermite normal form with zero rows dropped, so equality of sublattices is
// equality of the stored data.
class Sublattice {
 public:
  Sublattice() : ambient_(0), basis_(0, 0) {}

  static Sublattice zero(std::size_t ambient_rank) {
    Sublattice l;
    l.ambient_ = ambient_rank;
    l.basis_ = IntMatrix(0, ambient_rank);
    return l;
  }

  static Sublattice full(std::size_t ambient_rank) {
    Sublattice l;
    l.ambient_ = ambient_rank;
    l.basis_ = IntMatrix::identity(ambient_rank);
    l.pivots_.resize(ambient_rank);
    for (std::size_t i = 0; i < ambient_rank; ++i) l.pivots_[i] = i;
    return l;
  }

  // Canonical sublattice spanned by the rows of `gens`.
  static Sublattice from_rows(std::size_t ambient_rank, const IntMatrix& gens) {
    if (gens.cols() != ambient_rank && gens.rows() > 0)
      throw std::invalid_argument("Sublattice: generator length mismatch");
    HnfResult h = hnf(gens);
    Sublattice l;
    l.ambient_ = ambient_rank;
    l.pivots_ = h.pivot_cols;
    const std::size_t r = h.pivot_cols.size();
    l.basis_ = IntMatrix(r, ambient_rank);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < ambient_rank; ++j) l.basis_.at(i, j) = h.H.at(i, j);
    return l;
  }

  static Sublattice from_generators(std::size_t ambient_rank,
                                    const std::vector<std::vector<Int>>& vectors) {
    for (const auto& v : vectors)
      if (v.size() != ambient_rank)
        throw std::invalid_argument("Sublattice: generator length mismatch");
    IntMatrix g(vectors.size(), ambient_rank);
    for (std::size_t i = 0; i < vectors.size(); ++i)
      for (std::size_t j = 0; j < ambient_rank; ++j) g.at(i, j) = vectors[i][j];
    return from_rows(ambient_rank, g);
  }

  std::size_t ambient_rank() const { return ambient_; }
  std::size_t rank() const { return basis_.rows(); }
  const IntMatrix& basis() const { return basis_; }
  const std::vector<std::size_t>& pivot_cols() const { return pivots_; }
  bool is_zero() const { return rank() == 0; }
  bool is_full() const { return rank() == ambient_; }

  std::vector<Int> basis_vector(std::size_t i) const { return basis_.row(i); }

  // Coefficients of v in the stored basis, when v lies in the lattice.
  std::optional<std::vector<Int>> coordinates(const std::vector<Int>& v) const {
    if (v.size() != ambient_) throw std::invalid_argument("Sublattice: vector length mismatch");
    std::vector<Int> rem = v;
    std::vector<Int> coef(rank(), Int(0));
    for (std::size_t i = 0; i < rank(); ++i) {
      const std::size_t c = pivots_[i];
      if (rem[c] % basis_.at(i, c) != 0) return std::nullopt;
      Int t = rem[c] / basis_.at(i, c);
      coef[i] = t;
      if (t != 0)
        for (std::size_t j = 0; j < ambient_; ++j) rem[j] -= t * basis_.at(i, j);
    }
    for (const auto& x : rem)
      if (x != 0) return std::nullopt;
    return coef;
  }

  bool contains(const std::vector<Int>& v) const { return coordinates(v).has_value(); }

  bool contains(const Sublattice& other) const {
    if (other.ambient_ != ambient_) throw std::invalid_argument("Sublattice: ambient mismatch");
    for (std::size_t i = 0; i < other.rank(); ++i)
      if (!contains(other.basis_vector(i))) return false;
    return true;
  }

  // Canonical residue of v modulo the lattice: pivot coordinates reduced
  // into [0, pivot).
  std::vector<Int> reduce(std::vector<Int> v) const {
    if (v.size() != ambient_) throw std::invalid_argument("Sublattice: vector length mismatch");
    for (std::size_t i = 0; i < rank(); ++i) {
      const std::size_t c = pivots_[i];
      Int q = floor_div(v[c], basis_.at(i, c));
      if (q != 0)
        for (std::size_t j = 0; j < ambient_; ++j) v[j] -= q * basis_.at(i, j);
    }
    return v;
  }

  friend bool operator==(const Sublattice& a, const Sublattice& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }
  friend bool operator!=(const Sublattice& a, const Sublattice& b) { return !(a == b); }

 private:
  std::size_t ambient_;
  IntMatrix basis_;
  std::vector<std::size_t> pivots_;
};

// Finite abelian group as an invariant-factor list d1 | d2 | ..., each >= 2.
struct FiniteAbelianGroup {
  std::vector<Int> invariant_factors;

  bool is_trivial() const { return invariant_factors.empty(); }

  Int order() const {
    Int o = 1;
    for (const auto& d : invariant_factors) o *= d;
    return o;
  }

  std::size_t p_rank(const Int& p) const {
    std::size_t r = 0;
    for (const auto& d : invariant_factors)
      if (d % p == 0) ++r;
    return r;
  }

  friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
    return a.invariant_factors == b.invariant_factors;
  }
};

inline Sublattice intersect(const Sublattice& l1, const Sublattice& l2) {
  if (l1.ambient_rank() != l2.ambient_rank())
    throw std::invalid_argument("intersect: ambient mismatch");
  if (l1.is_zero() || l2.is_zero()) return Sublattice::zero(l1.ambient_rank());
  // stack both bases; the left kernel pairs (x, -y) with x B1 = y B2
  const std::size_t r1 = l1.rank(), r2 = l2.rank(), n = l1.ambient_rank();
  IntMatrix stacked(r1 + r2, n);
  for (std::size_t i = 0; i < r1; ++i)
    for (std::size_t j = 0; j < n; ++j) stacked.at(i, j) = l1.basis().at(i, j);
  for (std::size_t i = 0; i < r2; ++i)
    for (std::size_t j = 0; j < n; ++j) stacked.at(r1 + i, j) = l2.basis().at(i, j);
  IntMatrix ker = left_kernel(stacked);
  IntMatrix gens(ker.rows(), n);
  for (std::size_t i = 0; i < ker.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Int s = 0;
      for (std::size_t k = 0; k < r1; ++k) s += ker.at(i, k) * l1.basis().at(k, j);
      gens.at(i, j) = s;
    }
  return Sublattice::from_rows(n, gens);
}

inline Sublattice sum(const Sublattice& l1, const Sublattice& l2) {
  if (l1.ambient_rank() != l2.ambient_rank()) throw std::invalid_argument("sum: ambient mismatch");
  const std::size_t n = l1.ambient_rank();
  IntMatrix stacked(l1.rank() + l2.rank(), n);
  for (std::size_t i = 0; i < l1.rank(); ++i)
    for (std::size_t j = 0; j < n; ++j) stacked.at(i, j) = l1.basis().at(i, j);
  for (std::size_t i = 0; i < l2.rank(); ++i)
    for (std::size_t j = 0; j < n; ++j) stacked.at(l1.rank() + i, j) = l2.basis().at(i, j);
  return Sublattice::from_rows(n, stacked);
}

// Smallest sublattice of the same rank containing L with torsion-free
// quotient: the rational row span intersected with Z^n, computed through a
// double kernel.
inline Sublattice saturate(const Sublattice& l) {
  if (l.is_zero()) return l;
  IntMatrix rk = right_kernel(l.basis());  // rows span {x : B x = 0}
  if (rk.rows() == 0) return Sublattice::full(l.ambient_rank());
  return Sublattice::from_rows(l.ambient_rank(), right_kernel(rk));
}

// [L_big : L_small]; nullopt means infinite (rank drop). Containment checked.
inline std::optional<Int> lattice_index(const Sublattice& big, const Sublattice& small) {
  if (big.ambient_rank() != small.ambient_rank())
    throw std::invalid_argument("lattice_index: ambient mismatch");
  if (!big.contains(small)) throw std::domain_error("lattice_index: not a sublattice");
  if (small.rank() < big.rank()) return std::nullopt;
  if (big.rank() == 0) return Int(1);
  IntMatrix coords(small.rank(), big.rank());
  for (std::size_t i = 0; i < small.rank(); ++i) {
    auto c = big.coordinates(small.basis_vector(i));
    for (std::size_t j = 0; j < big.rank(); ++j) coords.at(i, j) = (*c)[j];
  }
  return abs_int(det(coords));
}

// Invariant factors of L_big / L_small (equal ranks required).
inline FiniteAbelianGroup quotient(const Sublattice& big, const Sublattice& small) {
  if (big.ambient_rank() != small.ambient_rank())
    throw std::invalid_argument("quotient: ambient mismatch");
  if (!big.contains(small)) throw std::domain_error("quotient: not a sublattice");
  if (small.rank() < big.rank())
    throw std::domain_error("quotient: infinite quotient (rank mismatch)");
  FiniteAbelianGroup g;
  if (big.rank() == 0) return g;
  IntMatrix coords(small.rank(), big.rank());
  for (std::size_t i = 0; i < small.rank(); ++i) {
    auto c = big.coordinates(small.basis_vector(i));
    for (std::size_t j = 0; j < big.rank(); ++j) coords.at(i, j) = (*c)[j];
  }
  SnfResult s = snf(coords);
  for (const auto& d : s.diagonal())
    if (d >= 2) g.invariant_factors.push_back(d);
  return g;
}

// Image lattice A * L (column-vector convention: generators map v -> A v).
inline Sublattice apply_matrix(const IntMatrix& a, const Sublattice& l) {
  if (a.cols() != l.ambient_rank()) throw std::invalid_argument("apply_matrix: shape mismatch");
  IntMatrix gens = l.basis() * a.transpose();
  return Sublattice::from_rows(a.rows(), gens);
}

// Largest sublattice L with A L = L: the saturated integer kernel of g(A),
// where g is the product (with multiplicity) of the algebraic-unit
// irreducible factors of the characteristic polynomial. The A-stability of
// the result is verified before returning.
inline Sublattice stable_sublattice(const IntMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("stable_sublattice: matrix not square");
  if (det(a) == 0) throw std::domain_error("stable_sublattice: singular matrix");
  const std::size_t n = a.rows();
  IntPoly g = factor(charpoly(a)).unit_part();
  if (g.degree() == 0) return Sublattice::zero(n);
  IntMatrix ga = g.eval_matrix(a);
  Sublattice kernel = Sublattice::from_rows(n, right_kernel(ga));
  Sublattice image = apply_matrix(a, kernel);
  if (!(image == kernel))
    throw std::logic_error("stable_sublattice: kernel of the unit part is not A-stable");
  return kernel;
}

// Rank of a matrix over F_p.
inline std::size_t rank_mod_p(const IntMatrix& m, const Int& p) {
  std::vector<std::vector<Int>> a(m.rows(), std::vector<Int>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = floor_mod(m.at(i, j), p);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t piv = rank;
    while (piv < m.rows() && a[piv][c] == 0) ++piv;
    if (piv == m.rows()) continue;
    std::swap(a[rank], a[piv]);
    Int inv = detail::mp_inv(a[rank][c], p);
    for (std::size_t j = 0; j < m.cols(); ++j) a[rank][j] = a[rank][j] * inv % p;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == rank || a[i][c] == 0) continue;
      Int f = a[i][c];
      for (std::size_t j = 0; j < m.cols(); ++j)
        a[i][j] = floor_mod(a[i][j] - f * a[rank][j], p);
    }
    ++rank;
  }
  return rank;
}

// Prufer ranks of the direct limit of Z^n / A^k Z^n: for each prime p
// dividing |det A|, r_p = n - rank of A^n over F_p (the Fitting-stable rank).
inline std::map<Int, std::size_t> prufer_ranks(const IntMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("prufer_ranks: matrix not square");
  Int d = det(a);
  if (d == 0) throw std::domain_error("prufer_ranks: singular matrix");
  if (abs_int(d) == 1)
    throw std::domain_error("prufer_ranks: |det| = 1 gives no tower");
  std::map<Int, std::size_t> out;
  IntMatrix an = a.pow(a.rows());
  for (const auto& [p, mult] : factor_integer(d)) {
    std::size_t r = a.rows() - rank_mod_p(an, p);
    if (r > 0) out[p] = r;
  }
  return out;
}

}  // namespace selfcover
