#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "selfcover/integers.hpp"
#include "selfcover/lattice.hpp"
#include "selfcover/matrix.hpp"
#include "selfcover/normal_forms.hpp"

namespace selfcover {

// ---------------------------------------------------------------------------
// Group families. Elements are integer coordinate vectors in the family's
// normal form:
//   abelian     Z^m / R           coords: m entries, reduced mod R
//   class2      central extension coords: (u_1..u_a, z_1..z_c)
//   semidirect  Z^k x| Z          coords: (v_1..v_k, t)
// ---------------------------------------------------------------------------

struct AbelianSpec {
  std::size_t rank = 0;
  Sublattice relations;  // canonical, ambient rank = rank
};

struct Class2Spec {
  std::size_t ab_rank = 0;
  std::size_t center_rank = 0;
  std::vector<IntMatrix> omega;  // c alternating a x a matrices
  std::vector<IntMatrix> beta;   // c matrices with omega = beta - beta^T
};

struct SemidirectSpec {
  std::size_t fiber_rank = 0;
  IntMatrix monodromy;          // unimodular k x k
  IntMatrix monodromy_inverse;  // cached
};

using GroupSpec = std::variant<AbelianSpec, Class2Spec, SemidirectSpec>;

struct Element {
  std::vector<Int> coords;

  friend bool operator==(const Element& a, const Element& b) { return a.coords == b.coords; }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }
};

inline AbelianSpec make_abelian(std::size_t rank, const std::vector<std::vector<Int>>& relations) {
  AbelianSpec s;
  s.rank = rank;
  s.relations = Sublattice::from_generators(rank, relations);
  return s;
}

inline Class2Spec make_class2(std::size_t a, std::size_t c, std::vector<IntMatrix> omega,
                              std::vector<IntMatrix> beta = {}) {
  if (omega.size() != c) throw std::invalid_argument("class2: need one omega matrix per center rank");
  for (const auto& w : omega) {
    if (w.rows() != a || w.cols() != a)
      throw std::invalid_argument("class2: omega matrices must be a x a");
    for (std::size_t i = 0; i < a; ++i) {
      if (w.at(i, i) != 0) throw std::invalid_argument("class2: omega must have zero diagonal");
      for (std::size_t j = 0; j < a; ++j)
        if (w.at(i, j) != -w.at(j, i))
          throw std::invalid_argument("class2: omega must be alternating");
    }
  }
  if (beta.empty()) {
    // default cocycle: strict upper-triangular part of omega
    for (const auto& w : omega) {
      IntMatrix b(a, a);
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = i + 1; j < a; ++j) b.at(i, j) = w.at(i, j);
      beta.push_back(std::move(b));
    }
  }
  if (beta.size() != c) throw std::invalid_argument("class2: need one beta matrix per center rank");
  for (std::size_t l = 0; l < c; ++l) {
    if (beta[l].rows() != a || beta[l].cols() != a)
      throw std::invalid_argument("class2: beta matrices must be a x a");
    if (!(beta[l] - beta[l].transpose() == omega[l]))
      throw std::invalid_argument("class2: omega must equal beta - beta^T");
  }
  Class2Spec s;
  s.ab_rank = a;
  s.center_rank = c;
  s.omega = std::move(omega);
  s.beta = std::move(beta);
  return s;
}

inline SemidirectSpec make_semidirect(std::size_t k, const IntMatrix& monodromy) {
  if (monodromy.rows() != k || monodromy.cols() != k)
    throw std::invalid_argument("semidirect: monodromy must be k x k");
  Int d = det(monodromy);
  if (d != 1 && d != -1) throw std::invalid_argument("semidirect: monodromy must be unimodular");
  SemidirectSpec s;
  s.fiber_rank = k;
  s.monodromy = monodromy;
  s.monodromy_inverse = inverse_unimodular(monodromy);
  return s;
}

// ---------------------------------------------------------------------------
// element arithmetic
// ---------------------------------------------------------------------------

inline std::size_t coord_count(const GroupSpec& g) {
  if (const auto* a = std::get_if<AbelianSpec>(&g)) return a->rank;
  if (const auto* c = std::get_if<Class2Spec>(&g)) return c->ab_rank + c->center_rank;
  return std::get<SemidirectSpec>(g).fiber_rank + 1;
}

inline Element identity(const GroupSpec& g) {
  return Element{std::vector<Int>(coord_count(g), Int(0))};
}

inline bool is_identity(const GroupSpec& g, const Element& e) { return e == identity(g); }

namespace detail {

inline void check_element(const GroupSpec& g, const Element& e) {
  if (e.coords.size() != coord_count(g))
    throw std::invalid_argument("element does not belong to this family");
}

inline std::vector<Int> beta_form(const Class2Spec& s, const std::vector<Int>& u1,
                                  const std::vector<Int>& u2) {
  std::vector<Int> z(s.center_rank, Int(0));
  for (std::size_t l = 0; l < s.center_rank; ++l) {
    Int v = 0;
    for (std::size_t i = 0; i < s.ab_rank; ++i) {
      if (u1[i] == 0) continue;
      for (std::size_t j = 0; j < s.ab_rank; ++j) v += u1[i] * s.beta[l].at(i, j) * u2[j];
    }
    z[l] = v;
  }
  return z;
}

inline std::vector<Int> omega_form(const Class2Spec& s, const std::vector<Int>& u1,
                                   const std::vector<Int>& u2) {
  std::vector<Int> z(s.center_rank, Int(0));
  for (std::size_t l = 0; l < s.center_rank; ++l) {
    Int v = 0;
    for (std::size_t i = 0; i < s.ab_rank; ++i) {
      if (u1[i] == 0) continue;
      for (std::size_t j = 0; j < s.ab_rank; ++j) v += u1[i] * s.omega[l].at(i, j) * u2[j];
    }
    z[l] = v;
  }
  return z;
}

inline IntMatrix monodromy_power(const SemidirectSpec& s, const Int& t) {
  if (t >= 0) return s.monodromy.pow(static_cast<std::uint64_t>(t));
  return s.monodromy_inverse.pow(static_cast<std::uint64_t>(-t));
}

}  // namespace detail

inline Element multiply(const GroupSpec& g, const Element& x, const Element& y) {
  detail::check_element(g, x);
  detail::check_element(g, y);
  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    std::vector<Int> v(a->rank);
    for (std::size_t i = 0; i < a->rank; ++i) v[i] = x.coords[i] + y.coords[i];
    return Element{a->relations.reduce(std::move(v))};
  }
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    const std::size_t a2 = s->ab_rank, c = s->center_rank;
    std::vector<Int> u1(x.coords.begin(), x.coords.begin() + a2);
    std::vector<Int> u2(y.coords.begin(), y.coords.begin() + a2);
    std::vector<Int> cor = detail::beta_form(*s, u1, u2);
    std::vector<Int> out(a2 + c);
    for (std::size_t i = 0; i < a2; ++i) out[i] = u1[i] + u2[i];
    for (std::size_t l = 0; l < c; ++l) out[a2 + l] = x.coords[a2 + l] + y.coords[a2 + l] + cor[l];
    return Element{std::move(out)};
  }
  const auto& s = std::get<SemidirectSpec>(g);
  const std::size_t k = s.fiber_rank;
  std::vector<Int> v2(y.coords.begin(), y.coords.begin() + k);
  std::vector<Int> moved = detail::monodromy_power(s, x.coords[k]) * v2;
  std::vector<Int> out(k + 1);
  for (std::size_t i = 0; i < k; ++i) out[i] = x.coords[i] + moved[i];
  out[k] = x.coords[k] + y.coords[k];
  return Element{std::move(out)};
}

inline Element inverse(const GroupSpec& g, const Element& x) {
  detail::check_element(g, x);
  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    std::vector<Int> v(a->rank);
    for (std::size_t i = 0; i < a->rank; ++i) v[i] = -x.coords[i];
    return Element{a->relations.reduce(std::move(v))};
  }
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    const std::size_t a2 = s->ab_rank, c = s->center_rank;
    std::vector<Int> u(x.coords.begin(), x.coords.begin() + a2);
    std::vector<Int> cor = detail::beta_form(*s, u, u);
    std::vector<Int> out(a2 + c);
    for (std::size_t i = 0; i < a2; ++i) out[i] = -x.coords[i];
    for (std::size_t l = 0; l < c; ++l) out[a2 + l] = -x.coords[a2 + l] + cor[l];
    return Element{std::move(out)};
  }
  const auto& s = std::get<SemidirectSpec>(g);
  const std::size_t k = s.fiber_rank;
  std::vector<Int> v(x.coords.begin(), x.coords.begin() + k);
  std::vector<Int> moved = detail::monodromy_power(s, -x.coords[k]) * v;
  std::vector<Int> out(k + 1);
  for (std::size_t i = 0; i < k; ++i) out[i] = -moved[i];
  out[k] = -x.coords[k];
  return Element{std::move(out)};
}

inline Element power(const GroupSpec& g, Element x, Int e) {
  if (e < 0) {
    x = inverse(g, x);
    e = -e;
  }
  Element r = identity(g);
  while (e > 0) {
    if ((e & 1) != 0) r = multiply(g, r, x);
    x = multiply(g, x, x);
    e >>= 1;
  }
  return r;
}

inline Element conjugate(const GroupSpec& g, const Element& by, const Element& x) {
  return multiply(g, multiply(g, by, x), inverse(g, by));
}

inline Element commutator(const GroupSpec& g, const Element& x, const Element& y) {
  return multiply(g, multiply(g, x, y), multiply(g, inverse(g, x), inverse(g, y)));
}

// ---------------------------------------------------------------------------
// generators and words
// ---------------------------------------------------------------------------

inline std::vector<std::string> generator_names(const GroupSpec& g) {
  std::vector<std::string> names;
  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    for (std::size_t i = 1; i <= a->rank; ++i) names.push_back("e" + std::to_string(i));
    return names;
  }
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    if (s->ab_rank == 2) {
      names = {"x", "y"};
    } else {
      for (std::size_t i = 1; i <= s->ab_rank; ++i) names.push_back("x" + std::to_string(i));
    }
    if (s->center_rank == 1) {
      names.push_back("z");
    } else {
      for (std::size_t l = 1; l <= s->center_rank; ++l) names.push_back("z" + std::to_string(l));
    }
    return names;
  }
  const auto& s = std::get<SemidirectSpec>(g);
  if (s.fiber_rank == 1) {
    names = {"a"};
  } else {
    for (std::size_t i = 1; i <= s.fiber_rank; ++i) names.push_back("a" + std::to_string(i));
  }
  names.push_back("b");
  return names;
}

inline std::size_t generator_count(const GroupSpec& g) { return coord_count(g); }

inline Element generator_element(const GroupSpec& g, std::size_t i) {
  Element e = identity(g);
  e.coords[i] = 1;
  return e;
}

// Exponents of the canonical generator word of an element: the unique
// (w_1..w_n) with g = gen_1^(w_1) * ... * gen_n^(w_n) in that order.
inline std::vector<Int> word_exponents(const GroupSpec& g, const Element& e) {
  detail::check_element(g, e);
  if (std::holds_alternative<AbelianSpec>(g) || std::holds_alternative<SemidirectSpec>(g))
    return e.coords;
  const auto& s = std::get<Class2Spec>(g);
  const std::size_t a = s.ab_rank, c = s.center_rank;
  // g = x^u z^w requires w = z - (z-part of x^u)
  Element xu = identity(g);
  for (std::size_t i = 0; i < a; ++i)
    if (e.coords[i] != 0) xu = multiply(g, xu, power(g, generator_element(g, i), e.coords[i]));
  std::vector<Int> w(a + c);
  for (std::size_t i = 0; i < a; ++i) w[i] = e.coords[i];
  for (std::size_t l = 0; l < c; ++l) w[a + l] = e.coords[a + l] - xu.coords[a + l];
  return w;
}

inline std::string render_element(const GroupSpec& g, const Element& e) {
  std::vector<Int> w = word_exponents(g, e);
  std::vector<std::string> names = generator_names(g);
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    if (any) os << " ";
    os << names[i];
    if (w[i] != 1) os << "^" << w[i];
    any = true;
  }
  return any ? os.str() : "1";
}

// ---------------------------------------------------------------------------
// endomorphisms
// ---------------------------------------------------------------------------

// An endomorphism given by one image per standard generator.
struct Endo {
  std::vector<Element> images;
};

inline Element apply(const GroupSpec& g, const Endo& phi, const Element& e) {
  std::vector<Int> w = word_exponents(g, e);
  Element out = identity(g);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0) out = multiply(g, out, power(g, phi.images[i], w[i]));
  return out;
}

inline Endo identity_endo(const GroupSpec& g) {
  Endo e;
  for (std::size_t i = 0; i < generator_count(g); ++i) e.images.push_back(generator_element(g, i));
  return e;
}

inline Endo endo_power(const GroupSpec& g, const Endo& phi, std::size_t n) {
  if (n < 1) throw std::invalid_argument("endo_power: exponent must be >= 1");
  Endo acc = phi;
  for (std::size_t step = 1; step < n; ++step) {
    Endo next;
    next.images.reserve(acc.images.size());
    for (const auto& img : acc.images) next.images.push_back(apply(g, phi, img));
    acc = std::move(next);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// subgroups: closures of finite generating sets
// ---------------------------------------------------------------------------

struct AbelianClosure {
  Sublattice lattice;  // contains the relation lattice

  friend bool operator==(const AbelianClosure& a, const AbelianClosure& b) {
    return a.lattice == b.lattice;
  }
};

struct Class2Closure {
  std::vector<Element> proj_gens;  // u-parts form the HNF basis of proj
  Sublattice proj;                 // image in Z^a
  Sublattice central;              // intersection with the z-block

  friend bool operator==(const Class2Closure& a, const Class2Closure& b) {
    return a.proj == b.proj && a.central == b.central && a.proj_gens == b.proj_gens;
  }
};

struct SemidirectClosure {
  Sublattice fiber;        // intersection with Z^k
  Int stride = 0;          // gcd of translation parts; 0 when none
  std::vector<Int> shift;  // fiber part of the stride element, reduced mod fiber

  friend bool operator==(const SemidirectClosure& a, const SemidirectClosure& b) {
    return a.fiber == b.fiber && a.stride == b.stride && a.shift == b.shift;
  }
};

using SubgroupClosure = std::variant<AbelianClosure, Class2Closure, SemidirectClosure>;

namespace detail {

inline std::vector<Int> u_part(const Class2Spec& s, const Element& e) {
  return std::vector<Int>(e.coords.begin(), e.coords.begin() + s.ab_rank);
}

inline std::vector<Int> z_part(const Class2Spec& s, const Element& e) {
  return std::vector<Int>(e.coords.begin() + s.ab_rank, e.coords.end());
}

// Bring the u-parts of a list of group elements to row HNF using group
// operations, so central corrections accumulate in the z-parts. Elements
// whose u-part becomes zero are moved to `central_out`.
inline std::vector<Element> element_hnf_class2(const GroupSpec& g, const Class2Spec& s,
                                               std::vector<Element> items,
                                               std::vector<std::vector<Int>>& central_out) {
  const std::size_t a = s.ab_rank;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a && r < items.size(); ++c) {
    std::size_t piv = r;
    while (piv < items.size() && items[piv].coords[c] == 0) ++piv;
    if (piv == items.size()) continue;
    std::swap(items[r], items[piv]);
    for (std::size_t i = r + 1; i < items.size(); ++i) {
      while (items[i].coords[c] != 0) {
        // gcd step on the pair of u-column entries
        Int ac = items[r].coords[c], bc = items[i].coords[c];
        Int q = floor_div(bc, ac);
        items[i] = multiply(g, items[i], power(g, items[r], -q));
        if (items[i].coords[c] != 0) std::swap(items[r], items[i]);
      }
    }
    if (items[r].coords[c] < 0) items[r] = inverse(g, items[r]);
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor_div(items[i].coords[c], items[r].coords[c]);
      if (q != 0) items[i] = multiply(g, items[i], power(g, items[r], -q));
    }
    ++r;
  }
  // whatever follows the pivot rows has zero u-part
  std::vector<Element> out(items.begin(), items.begin() + r);
  for (std::size_t i = r; i < items.size(); ++i) central_out.push_back(z_part(s, items[i]));
  return out;
}

}  // namespace detail

inline SubgroupClosure closure(const GroupSpec& g, const std::vector<Element>& generators) {
  for (const auto& e : generators) detail::check_element(g, e);
  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    std::vector<std::vector<Int>> rows;
    for (const auto& e : generators) rows.push_back(e.coords);
    for (std::size_t i = 0; i < a->relations.rank(); ++i)
      rows.push_back(a->relations.basis_vector(i));
    return AbelianClosure{Sublattice::from_generators(a->rank, rows)};
  }
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    std::vector<std::vector<Int>> central_vecs;
    std::vector<Element> work;
    for (const auto& e : generators) {
      bool u_zero = true;
      for (std::size_t i = 0; i < s->ab_rank; ++i)
        if (e.coords[i] != 0) u_zero = false;
      if (u_zero)
        central_vecs.push_back(detail::z_part(*s, e));
      else
        work.push_back(e);
    }
    std::vector<Element> proj_gens = detail::element_hnf_class2(g, *s, std::move(work), central_vecs);
    // commutators between the reduced generators land in the center
    for (std::size_t i = 0; i < proj_gens.size(); ++i)
      for (std::size_t j = i + 1; j < proj_gens.size(); ++j)
        central_vecs.push_back(detail::omega_form(*s, detail::u_part(*s, proj_gens[i]),
                                                  detail::u_part(*s, proj_gens[j])));
    Sublattice central = Sublattice::from_generators(s->center_rank, central_vecs);
    // canonical z-parts: reduce modulo the central lattice
    for (auto& e : proj_gens) {
      std::vector<Int> z = central.reduce(detail::z_part(*s, e));
      for (std::size_t l = 0; l < s->center_rank; ++l) e.coords[s->ab_rank + l] = z[l];
    }
    std::vector<std::vector<Int>> proj_rows;
    for (const auto& e : proj_gens) proj_rows.push_back(detail::u_part(*s, e));
    Sublattice proj = Sublattice::from_generators(s->ab_rank, proj_rows);
    return Class2Closure{std::move(proj_gens), std::move(proj), std::move(central)};
  }
  const auto& s = std::get<SemidirectSpec>(g);
  const std::size_t k = s.fiber_rank;
  std::vector<std::vector<Int>> fiber_vecs;
  std::vector<Element> mixed;
  for (const auto& e : generators) {
    if (e.coords[k] == 0) {
      if (!is_identity(g, e))
        fiber_vecs.push_back(std::vector<Int>(e.coords.begin(), e.coords.begin() + k));
    } else {
      mixed.push_back(e);
    }
  }
  Int stride = 0;
  std::vector<Int> shift(k, Int(0));
  if (!mixed.empty()) {
    while (mixed.size() > 1) {
      Element g1 = mixed[mixed.size() - 2];
      Element g2 = mixed.back();
      mixed.pop_back();
      mixed.pop_back();
      Int t1 = g1.coords[k], t2 = g2.coords[k];
      auto [gg, xx, yy] = xgcd(t1, t2);
      Element piv = multiply(g, power(g, g1, xx), power(g, g2, yy));
      for (Element* e : {&g1, &g2}) {
        Element res = multiply(g, *e, power(g, piv, -(e->coords[k] / gg)));
        if (!is_identity(g, res))
          fiber_vecs.push_back(std::vector<Int>(res.coords.begin(), res.coords.begin() + k));
      }
      mixed.push_back(std::move(piv));
    }
    Element piv = mixed[0];
    if (piv.coords[k] < 0) piv = inverse(g, piv);
    stride = piv.coords[k];
    shift.assign(piv.coords.begin(), piv.coords.begin() + k);
  }
  Sublattice fiber = Sublattice::from_generators(k, fiber_vecs);
  if (stride > 0) {
    IntMatrix ms = detail::monodromy_power(s, stride);
    IntMatrix msi = detail::monodromy_power(s, -stride);
    while (true) {
      Sublattice next = sum(fiber, sum(apply_matrix(ms, fiber), apply_matrix(msi, fiber)));
      if (next == fiber) break;
      fiber = next;
    }
    shift = fiber.reduce(std::move(shift));
  }
  return SemidirectClosure{std::move(fiber), std::move(stride), std::move(shift)};
}

inline bool member(const GroupSpec& g, const SubgroupClosure& h, const Element& e) {
  detail::check_element(g, e);
  if (const auto* ac = std::get_if<AbelianClosure>(&h)) {
    return ac->lattice.contains(std::get<AbelianSpec>(g).relations.reduce(e.coords));
  }
  if (const auto* cc = std::get_if<Class2Closure>(&h)) {
    const auto& s = std::get<Class2Spec>(g);
    auto coords = cc->proj.coordinates(detail::u_part(s, e));
    if (!coords) return false;
    Element lift = identity(g);
    for (std::size_t i = 0; i < cc->proj_gens.size(); ++i)
      if ((*coords)[i] != 0)
        lift = multiply(g, lift, power(g, cc->proj_gens[i], (*coords)[i]));
    Element residue = multiply(g, inverse(g, lift), e);
    return cc->central.contains(detail::z_part(s, residue));
  }
  const auto& sc = std::get<SemidirectClosure>(h);
  const auto& s = std::get<SemidirectSpec>(g);
  const std::size_t k = s.fiber_rank;
  const Int& t = e.coords[k];
  if (sc.stride == 0) {
    if (t != 0) return false;
    return sc.fiber.contains(std::vector<Int>(e.coords.begin(), e.coords.begin() + k));
  }
  if (t % sc.stride != 0) return false;
  Element piv;
  piv.coords = sc.shift;
  piv.coords.push_back(sc.stride);
  Element residue = multiply(g, e, power(g, piv, -(t / sc.stride)));
  return sc.fiber.contains(std::vector<Int>(residue.coords.begin(), residue.coords.begin() + k));
}

// [Gamma : H]; nullopt means infinite. Multiplicative along the family's
// canonical normal series.
inline std::optional<Int> subgroup_index(const GroupSpec& g, const SubgroupClosure& h) {
  if (const auto* ac = std::get_if<AbelianClosure>(&h)) {
    const auto& a = std::get<AbelianSpec>(g);
    return lattice_index(Sublattice::full(a.rank), ac->lattice);
  }
  if (const auto* cc = std::get_if<Class2Closure>(&h)) {
    const auto& s = std::get<Class2Spec>(g);
    auto i1 = lattice_index(Sublattice::full(s.ab_rank), cc->proj);
    auto i2 = lattice_index(Sublattice::full(s.center_rank), cc->central);
    if (!i1 || !i2) return std::nullopt;
    return *i1 * *i2;
  }
  const auto& sc = std::get<SemidirectClosure>(h);
  const auto& s = std::get<SemidirectSpec>(g);
  if (sc.stride == 0) return std::nullopt;
  auto i1 = lattice_index(Sublattice::full(s.fiber_rank), sc.fiber);
  if (!i1) return std::nullopt;
  return sc.stride * *i1;
}

// Reconstruct a generating set of the closure as group elements.
inline std::vector<Element> closure_generators(const GroupSpec& g, const SubgroupClosure& h) {
  std::vector<Element> out;
  if (const auto* ac = std::get_if<AbelianClosure>(&h)) {
    const auto& a = std::get<AbelianSpec>(g);
    for (std::size_t i = 0; i < ac->lattice.rank(); ++i) {
      Element e{a.relations.reduce(ac->lattice.basis_vector(i))};
      if (!is_identity(g, e)) out.push_back(std::move(e));
    }
    return out;
  }
  if (const auto* cc = std::get_if<Class2Closure>(&h)) {
    const auto& s = std::get<Class2Spec>(g);
    out = cc->proj_gens;
    for (std::size_t i = 0; i < cc->central.rank(); ++i) {
      Element e = identity(g);
      std::vector<Int> z = cc->central.basis_vector(i);
      for (std::size_t l = 0; l < s.center_rank; ++l) e.coords[s.ab_rank + l] = z[l];
      out.push_back(std::move(e));
    }
    return out;
  }
  const auto& sc = std::get<SemidirectClosure>(h);
  const auto& s = std::get<SemidirectSpec>(g);
  for (std::size_t i = 0; i < sc.fiber.rank(); ++i) {
    Element e = identity(g);
    std::vector<Int> v = sc.fiber.basis_vector(i);
    for (std::size_t j = 0; j < s.fiber_rank; ++j) e.coords[j] = v[j];
    out.push_back(std::move(e));
  }
  if (sc.stride > 0) {
    Element e;
    e.coords = sc.shift;
    e.coords.push_back(sc.stride);
    out.push_back(std::move(e));
  }
  return out;
}

inline bool subgroup_equal(const GroupSpec& g, const SubgroupClosure& h1,
                           const SubgroupClosure& h2) {
  (void)g;
  return h1 == h2;
}

// True iff conjugates of the closure generators by the group generators (and
// their inverses) stay inside. Requires finite index.
inline bool is_normal(const GroupSpec& g, const SubgroupClosure& h) {
  if (!subgroup_index(g, h).has_value())
    throw std::domain_error("is_normal: infinite-index subgroup rejected");
  std::vector<Element> gens = closure_generators(g, h);
  for (std::size_t i = 0; i < generator_count(g); ++i) {
    Element conj_by = generator_element(g, i);
    Element conj_by_inv = inverse(g, conj_by);
    for (const auto& e : gens) {
      if (!member(g, h, conjugate(g, conj_by, e))) return false;
      if (!member(g, h, conjugate(g, conj_by_inv, e))) return false;
    }
  }
  return true;
}

// First witness of non-normality: (conjugator, element of H, conjugate not
// in H), scanning generators in canonical order.
struct NormalityWitness {
  Element conjugator;
  Element element;
  Element conjugate_out;
};

inline std::optional<NormalityWitness> normality_witness(const GroupSpec& g,
                                                         const SubgroupClosure& h) {
  std::vector<Element> gens = closure_generators(g, h);
  for (std::size_t i = 0; i < generator_count(g); ++i) {
    for (const Element& by :
         {generator_element(g, i), inverse(g, generator_element(g, i))}) {
      for (const auto& e : gens) {
        Element c = conjugate(g, by, e);
        if (!member(g, h, c)) return NormalityWitness{by, e, std::move(c)};
      }
    }
  }
  return std::nullopt;
}

inline SubgroupClosure commutator_subgroup(const GroupSpec& g) {
  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    return AbelianClosure{Sublattice::from_rows(a->rank, a->relations.basis())};
  }
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    std::vector<std::vector<Int>> vecs;
    for (std::size_t i = 0; i < s->ab_rank; ++i)
      for (std::size_t j = i + 1; j < s->ab_rank; ++j) {
        std::vector<Int> w(s->center_rank);
        for (std::size_t l = 0; l < s->center_rank; ++l) w[l] = s->omega[l].at(i, j);
        vecs.push_back(std::move(w));
      }
    return Class2Closure{{}, Sublattice::zero(s->ab_rank),
                         Sublattice::from_generators(s->center_rank, vecs)};
  }
  const auto& s = std::get<SemidirectSpec>(g);
  IntMatrix mi = s.monodromy - IntMatrix::identity(s.fiber_rank);
  return SemidirectClosure{apply_matrix(mi, Sublattice::full(s.fiber_rank)), Int(0),
                           std::vector<Int>(s.fiber_rank, Int(0))};
}

// ---------------------------------------------------------------------------
// abelianization
// ---------------------------------------------------------------------------

// Coordinates of an element in Gamma^ab = Z^m / R_ab: the exponent vector of
// its canonical generator word.
inline std::vector<Int> ab_coords(const GroupSpec& g, const Element& e) {
  return word_exponents(g, e);
}

struct Abelianization {
  AbelianSpec quotient;  // Gamma / [Gamma, Gamma]
  IntMatrix matrix;      // induced endomorphism (columns = images of basis vectors)
};

inline Sublattice ab_relation_lattice(const GroupSpec& g) {
  if (const auto* a = std::get_if<AbelianSpec>(&g))
    return Sublattice::from_rows(a->rank, a->relations.basis());
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    const std::size_t m = s->ab_rank + s->center_rank;
    std::vector<std::vector<Int>> rows;
    for (std::size_t i = 0; i < s->ab_rank; ++i)
      for (std::size_t j = i + 1; j < s->ab_rank; ++j) {
        std::vector<Int> w(m, Int(0));
        for (std::size_t l = 0; l < s->center_rank; ++l) w[s->ab_rank + l] = s->omega[l].at(i, j);
        rows.push_back(std::move(w));
      }
    return Sublattice::from_generators(m, rows);
  }
  const auto& s = std::get<SemidirectSpec>(g);
  const std::size_t m = s.fiber_rank + 1;
  IntMatrix mi = s.monodromy - IntMatrix::identity(s.fiber_rank);
  std::vector<std::vector<Int>> rows;
  for (std::size_t j = 0; j < s.fiber_rank; ++j) {
    std::vector<Int> w(m, Int(0));
    for (std::size_t i = 0; i < s.fiber_rank; ++i) w[i] = mi.at(i, j);
    rows.push_back(std::move(w));
  }
  return Sublattice::from_generators(m, rows);
}

inline Abelianization abelianize(const GroupSpec& g, const Endo& phi) {
  const std::size_t m = coord_count(g);
  Abelianization out;
  out.quotient.rank = m;
  out.quotient.relations = ab_relation_lattice(g);
  out.matrix = IntMatrix(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Int> col = ab_coords(g, phi.images[j]);
    for (std::size_t i = 0; i < m; ++i) out.matrix.at(i, j) = col[i];
  }
  // the induced matrix must commute with the abelianization map
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Int> lhs =
        out.quotient.relations.reduce(ab_coords(g, apply(g, phi, generator_element(g, j))));
    std::vector<Int> rhs = out.quotient.relations.reduce(out.matrix.col(j));
    if (lhs != rhs)
      throw std::logic_error("abelianize: induced matrix does not commute with the quotient map");
  }
  return out;
}

// Generators of the kernel of Gamma -> (free part of Gamma^ab): lifts of the
// saturation of the abelianized relation lattice.
inline std::vector<Element> free_kernel_generators(const GroupSpec& g) {
  Sublattice sat = saturate(ab_relation_lattice(g));
  std::vector<Element> out;
  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    for (std::size_t i = 0; i < sat.rank(); ++i) {
      Element e{a->relations.reduce(sat.basis_vector(i))};
      if (!is_identity(g, e)) out.push_back(std::move(e));
    }
    return out;
  }
  for (std::size_t i = 0; i < sat.rank(); ++i) {
    Element e{sat.basis_vector(i)};
    if (!is_identity(g, e)) out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// endomorphism validation
// ---------------------------------------------------------------------------

struct EndoCheck {
  bool valid = false;
  std::string diagnostic;        // names the failed relation or constraint
  std::optional<Int> degree;     // [Gamma : image], set when finite
  std::optional<Endo> endo;
};

inline EndoCheck check_endo(const GroupSpec& g, const std::vector<Element>& images) {
  EndoCheck out;
  if (images.size() != generator_count(g)) {
    out.diagnostic = "expected one image per generator";
    return out;
  }
  for (const auto& e : images)
    if (e.coords.size() != coord_count(g)) {
      out.diagnostic = "image does not belong to the family";
      return out;
    }
  Endo phi{images};

  if (const auto* a = std::get_if<AbelianSpec>(&g)) {
    // relation preservation: the matrix maps R into R
    IntMatrix mat(a->rank, a->rank);
    for (std::size_t j = 0; j < a->rank; ++j)
      for (std::size_t i = 0; i < a->rank; ++i) mat.at(i, j) = images[j].coords[i];
    for (std::size_t i = 0; i < a->relations.rank(); ++i) {
      std::vector<Int> img = mat * a->relations.basis_vector(i);
      if (!a->relations.contains(img)) {
        out.diagnostic = "relation not preserved: image of a relation vector leaves the relation lattice";
        return out;
      }
    }
    // injectivity: preimage of R equals R
    const std::size_t r = a->relations.rank();
    IntMatrix stacked(a->rank, a->rank + r);
    for (std::size_t i = 0; i < a->rank; ++i)
      for (std::size_t j = 0; j < a->rank; ++j) stacked.at(i, j) = mat.at(i, j);
    for (std::size_t i = 0; i < a->rank; ++i)
      for (std::size_t j = 0; j < r; ++j) stacked.at(i, a->rank + j) = -a->relations.basis().at(j, i);
    IntMatrix ker = right_kernel(stacked);
    std::vector<std::vector<Int>> pre_rows;
    for (std::size_t i = 0; i < ker.rows(); ++i) {
      std::vector<Int> v(a->rank);
      for (std::size_t j = 0; j < a->rank; ++j) v[j] = ker.at(i, j);
      pre_rows.push_back(std::move(v));
    }
    for (std::size_t i = 0; i < a->relations.rank(); ++i)
      pre_rows.push_back(a->relations.basis_vector(i));
    Sublattice preimage = Sublattice::from_generators(a->rank, pre_rows);
    if (!(preimage == a->relations)) {
      out.diagnostic = "not injective: some nontrivial element maps into the relation lattice";
      return out;
    }
  } else if (const auto* s = std::get_if<Class2Spec>(&g)) {
    const std::size_t a2 = s->ab_rank, c = s->center_rank;
    auto names = generator_names(g);
    for (std::size_t i = 0; i < a2; ++i)
      for (std::size_t j = i + 1; j < a2; ++j) {
        Element lhs = commutator(g, images[i], images[j]);
        Element rhs = identity(g);
        for (std::size_t l = 0; l < c; ++l)
          if (s->omega[l].at(i, j) != 0)
            rhs = multiply(g, rhs, power(g, images[a2 + l], s->omega[l].at(i, j)));
        if (!(lhs == rhs)) {
          out.diagnostic = "relation not preserved: [" + names[i] + "," + names[j] +
                           "] must map to the matching central word";
          return out;
        }
      }
    for (std::size_t l = 0; l < c; ++l)
      for (std::size_t i = 0; i < a2 + c; ++i) {
        if (i == a2 + l) continue;
        if (!is_identity(g, commutator(g, images[a2 + l], images[i]))) {
          out.diagnostic = "relation not preserved: image of central generator " + names[a2 + l] +
                           " is not central";
          return out;
        }
      }
  } else {
    const auto& sd = std::get<SemidirectSpec>(g);
    const std::size_t k = sd.fiber_rank;
    auto names = generator_names(g);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (!is_identity(g, commutator(g, images[i], images[j]))) {
          out.diagnostic = "relation not preserved: fiber generator images must commute";
          return out;
        }
    for (std::size_t i = 0; i < k; ++i) {
      Element lhs = conjugate(g, images[k], images[i]);
      Element rhs = identity(g);
      for (std::size_t j = 0; j < k; ++j)
        if (sd.monodromy.at(j, i) != 0)
          rhs = multiply(g, rhs, power(g, images[j], sd.monodromy.at(j, i)));
      if (!(lhs == rhs)) {
        out.diagnostic = "relation not preserved: b " + names[i] + " b^-1 must map to the monodromy word";
        return out;
      }
    }
  }

  // injectivity with finite index: for the torsion-free families equivalent
  // to the image having finite index; the abelian case was settled above.
  SubgroupClosure image = closure(g, images);
  auto idx = subgroup_index(g, image);
  if (!idx) {
    out.diagnostic = "image subgroup has infinite index";
    return out;
  }
  out.valid = true;
  out.degree = idx;
  out.endo = std::move(phi);
  return out;
}

inline SubgroupClosure image_subgroup(const GroupSpec& g, const Endo& phi, std::size_t n = 1) {
  Endo p = n == 1 ? phi : endo_power(g, phi, n);
  return closure(g, p.images);
}

}  // namespace selfcover
