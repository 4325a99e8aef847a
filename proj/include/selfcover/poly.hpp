#pragma once

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "selfcover/integers.hpp"
#include "selfcover/matrix.hpp"

namespace selfcover {

// Univariate integer polynomial, coefficients stored in ascending degree.
// The zero polynomial has an empty coefficient vector and degree() == -1.
class IntPoly {
 public:
  IntPoly() = default;

  IntPoly(std::initializer_list<Int> ascending) : c_(ascending) { normalize(); }

  explicit IntPoly(std::vector<Int> ascending) : c_(std::move(ascending)) { normalize(); }

  static IntPoly zero() { return IntPoly(); }
  static IntPoly constant(const Int& v) { return IntPoly({v}); }
  static IntPoly x() { return IntPoly({Int(0), Int(1)}); }

  static IntPoly monomial(std::size_t deg, const Int& coef) {
    std::vector<Int> c(deg + 1, Int(0));
    c[deg] = coef;
    return IntPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  // Coefficient of x^i; zero beyond the stored range.
  const Int& operator[](std::size_t i) const {
    static const Int kZero(0);
    return i < c_.size() ? c_[i] : kZero;
  }

  const std::vector<Int>& coeffs() const { return c_; }

  const Int& leading() const {
    if (c_.empty()) throw std::domain_error("IntPoly::leading: zero polynomial");
    return c_.back();
  }

  const Int& constant_term() const {
    static const Int kZero(0);
    return c_.empty() ? kZero : c_[0];
  }

  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  friend IntPoly operator+(const IntPoly& p, const IntPoly& q) {
    std::vector<Int> c(std::max(p.c_.size(), q.c_.size()), Int(0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = p[i] + q[i];
    return IntPoly(std::move(c));
  }

  friend IntPoly operator-(const IntPoly& p, const IntPoly& q) {
    std::vector<Int> c(std::max(p.c_.size(), q.c_.size()), Int(0));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = p[i] - q[i];
    return IntPoly(std::move(c));
  }

  IntPoly operator-() const {
    std::vector<Int> c = c_;
    for (auto& v : c) v = -v;
    return IntPoly(std::move(c));
  }

  friend IntPoly operator*(const IntPoly& p, const IntPoly& q) {
    if (p.is_zero() || q.is_zero()) return IntPoly();
    std::vector<Int> c(p.c_.size() + q.c_.size() - 1, Int(0));
    for (std::size_t i = 0; i < p.c_.size(); ++i) {
      if (p.c_[i] == 0) continue;
      for (std::size_t j = 0; j < q.c_.size(); ++j) c[i + j] += p.c_[i] * q.c_[j];
    }
    return IntPoly(std::move(c));
  }

  friend IntPoly operator*(const Int& s, const IntPoly& p) {
    std::vector<Int> c = p.c_;
    for (auto& v : c) v *= s;
    return IntPoly(std::move(c));
  }

  friend bool operator==(const IntPoly& p, const IntPoly& q) { return p.c_ == q.c_; }
  friend bool operator!=(const IntPoly& p, const IntPoly& q) { return !(p == q); }
  friend bool operator<(const IntPoly& p, const IntPoly& q) {
    if (p.c_.size() != q.c_.size()) return p.c_.size() < q.c_.size();
    for (std::size_t i = p.c_.size(); i-- > 0;)
      if (p.c_[i] != q.c_[i]) return p.c_[i] < q.c_[i];
    return false;
  }

  Int eval(const Int& x0) const {
    Int r = 0;
    for (std::size_t i = c_.size(); i-- > 0;) r = r * x0 + c_[i];
    return r;
  }

  IntMatrix eval_matrix(const IntMatrix& m) const {
    if (!m.is_square()) throw std::invalid_argument("IntPoly::eval_matrix: matrix not square");
    IntMatrix r(m.rows(), m.rows());
    for (std::size_t i = c_.size(); i-- > 0;) {
      r = r * m;
      for (std::size_t d = 0; d < m.rows(); ++d) r.at(d, d) += c_[i];
    }
    return r;
  }

  IntPoly derivative() const {
    if (c_.size() <= 1) return IntPoly();
    std::vector<Int> c(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = Int(i) * c_[i];
    return IntPoly(std::move(c));
  }

  // gcd of coefficients, >= 0 (0 only for the zero polynomial).
  Int content() const {
    Int g = 0;
    for (const auto& v : c_) g = gcd_int(g, v);
    return g;
  }

  // Content divided out, sign normalized to positive leading coefficient.
  IntPoly primitive_part() const {
    if (is_zero()) return IntPoly();
    Int g = content();
    if (c_.back() < 0) g = -g;
    std::vector<Int> c = c_;
    for (auto& v : c) v /= g;
    return IntPoly(std::move(c));
  }

  // x^deg * p(1/x). For p(0) != 0 this is an involution.
  IntPoly reversed() const {
    std::vector<Int> c(c_.rbegin(), c_.rend());
    return IntPoly(std::move(c));
  }

  // Quotient of an exact division; throws if the division leaves a remainder.
  IntPoly divide_exact(const IntPoly& d) const {
    if (d.is_zero()) throw std::domain_error("IntPoly::divide_exact: division by zero");
    if (is_zero()) return IntPoly();
    std::vector<Int> rem = c_;
    int dr = degree(), dd = d.degree();
    if (dr < dd) throw std::domain_error("IntPoly::divide_exact: not divisible");
    std::vector<Int> q(dr - dd + 1, Int(0));
    for (int i = dr; i >= dd; --i) {
      if (rem[i] == 0) continue;
      if (rem[i] % d.leading() != 0) throw std::domain_error("IntPoly::divide_exact: not divisible");
      Int f = rem[i] / d.leading();
      q[i - dd] = f;
      for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= f * d.c_[j];
    }
    for (const auto& v : rem)
      if (v != 0) throw std::domain_error("IntPoly::divide_exact: not divisible");
    return IntPoly(std::move(q));
  }

  bool divides(const IntPoly& p) const {
    if (is_zero()) return p.is_zero();
    if (p.is_zero()) return true;
    if (p.degree() < degree()) return false;
    try {
      (void)p.divide_exact(*this);
      return true;
    } catch (const std::domain_error&) {
      return false;
    }
  }

  friend std::ostream& operator<<(std::ostream& os, const IntPoly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (std::size_t i = p.c_.size(); i-- > 0;) {
      const Int& v = p.c_[i];
      if (v == 0) continue;
      if (!first) os << (v > 0 ? " + " : " - ");
      else if (v < 0) os << "-";
      Int a = abs_int(v);
      if (a != 1 || i == 0) os << a;
      if (i >= 1) {
        if (a != 1) os << "*";
        os << "x";
        if (i >= 2) os << "^" << i;
      }
      first = false;
    }
    return os;
  }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<Int> c_;
};

namespace detail {

// Pseudo-remainder with a positive multiplier: returns r with
// lc(d)^(2k) * p = q*d + r for some k large enough. The even power keeps
// every sign pattern usable in Sturm chains.
inline IntPoly pseudo_rem_positive(const IntPoly& p, const IntPoly& d) {
  if (d.is_zero()) throw std::domain_error("pseudo_rem: division by zero");
  IntPoly r = p;
  Int lc2 = d.leading() * d.leading();
  while (!r.is_zero() && r.degree() >= d.degree()) {
    // multiply through so the leading term cancels exactly
    IntPoly scaled = lc2 * r;
    Int f = scaled.leading() / d.leading();
    scaled = scaled - IntPoly::monomial(r.degree() - d.degree(), f) * d;
    // scaled now has strictly smaller degree than r
    r = scaled;
  }
  return r;
}

}  // namespace detail

// Primitive gcd over Q, normalized to positive leading coefficient.
inline IntPoly poly_gcd(IntPoly p, IntPoly q) {
  if (p.is_zero() && q.is_zero())
    throw std::domain_error("poly_gcd: both arguments zero");
  if (p.is_zero()) return q.primitive_part();
  if (q.is_zero()) return p.primitive_part();
  p = p.primitive_part();
  q = q.primitive_part();
  if (p.degree() < q.degree()) std::swap(p, q);
  while (!q.is_zero()) {
    IntPoly r = detail::pseudo_rem_positive(p, q).primitive_part();
    p = q;
    q = r;
  }
  return p.primitive_part();
}

// Yun's squarefree decomposition of a nonzero polynomial:
// p = unit * prod_i part_i^(mult_i) with distinct squarefree primitive parts.
// `unit` carries the sign and integer content.
struct SquarefreeDecomposition {
  struct Part {
    IntPoly poly;
    int multiplicity;
  };
  Int unit;
  std::vector<Part> parts;

  IntPoly expand() const {
    IntPoly r = IntPoly::constant(unit);
    for (const auto& pt : parts)
      for (int i = 0; i < pt.multiplicity; ++i) r = r * pt.poly;
    return r;
  }
};

inline SquarefreeDecomposition squarefree_decomposition(const IntPoly& p) {
  if (p.is_zero()) throw std::domain_error("squarefree_decomposition: zero polynomial");
  SquarefreeDecomposition out;
  Int content = p.content();
  out.unit = p.leading() < 0 ? -content : content;
  IntPoly f = p.primitive_part();
  if (f.degree() == 0) return out;
  IntPoly fp = f.derivative();
  IntPoly a = poly_gcd(f, fp);
  IntPoly b = f.divide_exact(a);
  IntPoly c = fp.divide_exact(a);
  IntPoly d = c - b.derivative();
  int mult = 1;
  while (true) {
    if (b.degree() == 0) break;
    IntPoly g = d.is_zero() ? b : poly_gcd(b, d);
    if (g.degree() > 0) out.parts.push_back({g, mult});
    IntPoly b2 = b.divide_exact(g);
    IntPoly c2 = d.is_zero() ? IntPoly() : d.divide_exact(g);
    b = b2;
    d = c2 - b.derivative();
    ++mult;
  }
  return out;
}

}  // namespace selfcover
