#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "selfcover/groups.hpp"
#include "selfcover/integers.hpp"
#include "selfcover/lattice.hpp"
#include "selfcover/matrix.hpp"
#include "selfcover/normal_forms.hpp"
#include "selfcover/unit_circle.hpp"

namespace selfcover {

// ---------------------------------------------------------------------------
// tower of self-covers attached to an injective finite-index endomorphism
// ---------------------------------------------------------------------------

struct TowerSpec {
  GroupSpec group;
  Endo endo;
  Int degree;  // [Gamma : phi(Gamma)], cached; always > 1
};

inline TowerSpec make_tower_spec(GroupSpec group, const std::vector<Element>& images) {
  EndoCheck chk = check_endo(group, images);
  if (!chk.valid) throw std::invalid_argument("tower: invalid endomorphism: " + chk.diagnostic);
  if (*chk.degree <= 1)
    throw std::invalid_argument("tower: degree must exceed 1 (self-cover must be nontrivial)");
  return TowerSpec{std::move(group), std::move(*chk.endo), *chk.degree};
}

inline Int degree(const TowerSpec& ts) { return ts.degree; }

// ---------------------------------------------------------------------------
// strong regularity
// ---------------------------------------------------------------------------

enum class RegularityVerdict { ExactlyRegular, RegularToDepth, FailsAt };

struct RegularityCertificate {
  RegularityVerdict verdict;
  std::size_t level = 0;  // checked depth (RegularToDepth) or failing level (FailsAt)
  std::optional<NormalityWitness> witness;

  bool certified() const { return verdict == RegularityVerdict::ExactlyRegular; }
};

struct RegularityError : std::runtime_error {
  RegularityError(std::size_t level_, NormalityWitness witness_)
      : std::runtime_error("image subgroup at level " + std::to_string(level_) +
                           " is not normal"),
        level(level_),
        witness(std::move(witness_)) {}
  std::size_t level;
  NormalityWitness witness;
};

namespace detail {

// Closed-form certificate for the nonabelian families: the commutator
// subgroup sits inside the stable part of the center/fiber restriction of
// phi, so it lies in every iterated image and every image is normal. Only a
// sufficient condition; returns false when the restriction does not exist.
inline bool commutator_in_stable_part(const GroupSpec& g, const Endo& phi) {
  if (const auto* s = std::get_if<Class2Spec>(&g)) {
    const std::size_t a = s->ab_rank, c = s->center_rank;
    IntMatrix az(c, c);
    for (std::size_t l = 0; l < c; ++l) {
      const Element& img = phi.images[a + l];
      for (std::size_t i = 0; i < a; ++i)
        if (img.coords[i] != 0) return false;  // central image not purely central
      for (std::size_t j = 0; j < c; ++j) az.at(j, l) = img.coords[a + j];
    }
    if (det(az) == 0) return false;
    Sublattice commutator = std::get<Class2Closure>(commutator_subgroup(g)).central;
    return stable_sublattice(az).contains(commutator);
  }
  if (const auto* s = std::get_if<SemidirectSpec>(&g)) {
    const std::size_t k = s->fiber_rank;
    IntMatrix af(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      const Element& img = phi.images[i];
      if (img.coords[k] != 0) return false;  // fiber not preserved
      for (std::size_t j = 0; j < k; ++j) af.at(j, i) = img.coords[j];
    }
    if (det(af) == 0) return false;
    Sublattice commutator = std::get<SemidirectClosure>(commutator_subgroup(g)).fiber;
    return stable_sublattice(af).contains(commutator);
  }
  return false;
}

}  // namespace detail

inline RegularityCertificate certify_strong_regularity(const TowerSpec& ts, std::size_t depth) {
  if (depth < 1) throw std::invalid_argument("certify_strong_regularity: depth must be >= 1");
  if (std::holds_alternative<AbelianSpec>(ts.group))
    return {RegularityVerdict::ExactlyRegular, 0, std::nullopt};
  if (detail::commutator_in_stable_part(ts.group, ts.endo))
    return {RegularityVerdict::ExactlyRegular, 0, std::nullopt};
  for (std::size_t n = 1; n <= depth; ++n) {
    SubgroupClosure h = image_subgroup(ts.group, ts.endo, n);
    if (auto w = normality_witness(ts.group, h))
      return {RegularityVerdict::FailsAt, n, std::move(w)};
  }
  return {RegularityVerdict::RegularToDepth, depth, std::nullopt};
}

// ---------------------------------------------------------------------------
// the induced linear data: q : Gamma -> Lambda = Z^n and Abar
// ---------------------------------------------------------------------------

namespace detail {

// For a saturated sublattice S of Z^N, a surjection Q : Z^N -> Z^(N-r) with
// kernel exactly S, plus a section (Q * section = I).
struct QuotientMap {
  IntMatrix q;        // (N-r) x N
  IntMatrix section;  // N x (N-r)
};

inline QuotientMap quotient_by_saturated(const Sublattice& s) {
  const std::size_t big = s.ambient_rank();
  const std::size_t r = s.rank();
  if (r == 0) {
    return {IntMatrix::identity(big), IntMatrix::identity(big)};
  }
  SnfResult sn = snf(s.basis());
  for (const auto& d : sn.diagonal())
    if (d != 1) throw std::logic_error("quotient_by_saturated: lattice is not saturated");
  IntMatrix vinv = inverse_unimodular(sn.V);
  const std::size_t small = big - r;
  IntMatrix q(small, big), section(big, small);
  for (std::size_t i = 0; i < small; ++i)
    for (std::size_t j = 0; j < big; ++j) {
      q.at(i, j) = sn.V.at(j, r + i);        // columns r.. of V, transposed
      section.at(j, i) = vinv.at(r + i, j);  // rows r.. of V^-1, transposed
    }
  return {std::move(q), std::move(section)};
}

}  // namespace detail

// Everything that hangs off the torsion-free quotient Lambda: the surjection
// q, the free-part endomorphism, and its stable sublattice.
struct LambdaData {
  Abelianization ab;        // Gamma^ab and the induced matrix A_ab
  IntMatrix q_free;         // Z^m -> Z^n0, kernel = saturation of the relations
  IntMatrix section_free;   // section of q_free
  IntMatrix a_free;         // induced endomorphism of Z^n0
  Sublattice stable_free;   // largest a_free-stable sublattice of Z^n0
  IntMatrix q2;             // Z^n0 -> Lambda = Z^n_lambda, kernel = stable_free
  IntMatrix section2;
  IntMatrix q_matrix;       // q2 * q_free : Gamma^ab coordinates -> Lambda
  IntMatrix abar;           // induced endomorphism of Lambda
  std::size_t lambda_rank = 0;
};

inline LambdaData lambda_data(const TowerSpec& ts) {
  LambdaData out;
  out.ab = abelianize(ts.group, ts.endo);
  const std::size_t m = out.ab.quotient.rank;
  Sublattice sat = saturate(Sublattice::from_rows(m, out.ab.quotient.relations.basis()));
  auto qm = detail::quotient_by_saturated(sat);
  out.q_free = std::move(qm.q);
  out.section_free = std::move(qm.section);
  out.a_free = out.q_free * out.ab.matrix * out.section_free;
  if (!(out.q_free * out.ab.matrix == out.a_free * out.q_free))
    throw std::logic_error("lambda_data: free quotient does not intertwine the endomorphism");
  if (det(out.a_free) == 0)
    throw std::logic_error("lambda_data: free-part endomorphism is singular");
  out.stable_free = stable_sublattice(out.a_free);
  auto qm2 = detail::quotient_by_saturated(out.stable_free);
  out.q2 = std::move(qm2.q);
  out.section2 = std::move(qm2.section);
  out.q_matrix = out.q2 * out.q_free;
  out.abar = out.q2 * out.a_free * out.section2;
  if (!(out.q2 * out.a_free == out.abar * out.q2))
    throw std::logic_error("lambda_data: Lambda quotient does not intertwine the endomorphism");
  out.lambda_rank = out.q2.rows();
  return out;
}

// ---------------------------------------------------------------------------
// stable image and Theorem-style verification
// ---------------------------------------------------------------------------

struct StableImageReport {
  std::vector<Element> stable_generators;  // generate the stable image
  std::size_t lambda_rank = 0;
  IntMatrix q_matrix;  // Gamma^ab coordinates -> Z^lambda_rank
  IntMatrix induced;   // Abar
  Int degree;
  bool det_check = false;  // |det Abar| == degree
};

namespace detail {

inline Element element_from_word(const GroupSpec& g, const std::vector<Int>& exponents) {
  Element e = identity(g);
  for (std::size_t i = 0; i < exponents.size(); ++i)
    if (exponents[i] != 0) e = multiply(g, e, power(g, generator_element(g, i), exponents[i]));
  return e;
}

inline std::vector<Int> q_of_element(const GroupSpec& g, const LambdaData& ld, const Element& e) {
  return ld.q_matrix * ab_coords(g, e);
}

// Generators of the stable image: lifts of the stable sublattice plus the
// kernel of Gamma -> free abelianization (commutators and torsion).
inline std::vector<Element> stable_image_generators(const GroupSpec& g, const LambdaData& ld) {
  std::vector<Element> gens;
  for (std::size_t i = 0; i < ld.stable_free.rank(); ++i) {
    std::vector<Int> lift = ld.section_free * ld.stable_free.basis_vector(i);
    Element e = element_from_word(g, lift);
    if (!is_identity(g, e)) gens.push_back(std::move(e));
  }
  for (auto& e : free_kernel_generators(g)) gens.push_back(std::move(e));
  return gens;
}

}  // namespace detail

inline StableImageReport stable_image(const TowerSpec& ts, const LambdaData& ld) {
  StableImageReport out;
  out.lambda_rank = ld.lambda_rank;
  out.q_matrix = ld.q_matrix;
  out.induced = ld.abar;
  out.degree = ts.degree;
  out.stable_generators = detail::stable_image_generators(ts.group, ld);

  // |det Abar| = d
  out.det_check = abs_int(det(ld.abar)) == ts.degree;
  if (!out.det_check)
    throw std::logic_error("stable_image: |det Abar| != degree; internal inconsistency");
  // q surjective: all invariant factors of q_matrix equal 1
  for (const auto& d : snf(ld.q_matrix).diagonal())
    if (d != 1) throw std::logic_error("stable_image: q is not surjective");
  // q . phi = Abar . q on generators
  for (std::size_t j = 0; j < generator_count(ts.group); ++j) {
    Element gen = generator_element(ts.group, j);
    std::vector<Int> lhs = detail::q_of_element(ts.group, ld, apply(ts.group, ts.endo, gen));
    std::vector<Int> rhs = ld.abar * detail::q_of_element(ts.group, ld, gen);
    if (lhs != rhs) throw std::logic_error("stable_image: q does not intertwine phi and Abar");
  }
  // Lambda torsion-free: the stable part is saturated by construction
  if (!(saturate(ld.stable_free) == ld.stable_free))
    throw std::logic_error("stable_image: Lambda has torsion");
  // phi restricts to an automorphism of ker q: image closure equals closure
  SubgroupClosure kernel = closure(ts.group, out.stable_generators);
  std::vector<Element> mapped;
  for (const auto& e : out.stable_generators) mapped.push_back(apply(ts.group, ts.endo, e));
  SubgroupClosure image = closure(ts.group, mapped);
  if (!subgroup_equal(ts.group, kernel, image))
    throw std::logic_error("stable_image: phi is not an automorphism of the stable image");
  return out;
}

// ---------------------------------------------------------------------------
// deck groups
// ---------------------------------------------------------------------------

struct DeckGroupReport {
  bool abelian = true;
  Int order;
  FiniteAbelianGroup group;           // invariant factors (abelian case)
  FiniteAbelianGroup abelianization;  // reported for nonabelian quotients
};

// F_n = Gamma / phi^n(Gamma). For certified towers this is Lambda / Abar^n
// Lambda; otherwise the image is checked for normality at this level and the
// quotient is classified directly.
inline DeckGroupReport deck_group(const TowerSpec& ts, const LambdaData& ld,
                                  const RegularityCertificate& cert, std::size_t n) {
  if (n < 1) throw std::invalid_argument("deck_group: level must be >= 1");
  DeckGroupReport out;
  Int dn = pow_int(ts.degree, n);
  if (cert.certified()) {
    Sublattice lambda_full = Sublattice::full(ld.lambda_rank);
    Sublattice image = apply_matrix(ld.abar.pow(n), lambda_full);
    out.group = quotient(lambda_full, image);
    out.order = out.group.order();
    out.abelianization = out.group;
    if (out.order != dn)
      throw std::logic_error("deck_group: order of Lambda/Abar^n Lambda is not d^n");
    return out;
  }
  SubgroupClosure h = image_subgroup(ts.group, ts.endo, n);
  if (auto w = normality_witness(ts.group, h)) throw RegularityError(n, std::move(*w));
  auto idx = subgroup_index(ts.group, h);
  out.order = *idx;
  bool commutator_inside = true;
  for (const auto& e : closure_generators(ts.group, commutator_subgroup(ts.group)))
    if (!member(ts.group, h, e)) {
      commutator_inside = false;
      break;
    }
  // abelianization of the quotient: Gamma^ab / (A_ab^n Z^m + R_ab)
  const std::size_t m = ld.ab.quotient.rank;
  Sublattice image_ab =
      sum(apply_matrix(ld.ab.matrix.pow(n), Sublattice::full(m)),
          Sublattice::from_rows(m, ld.ab.quotient.relations.basis()));
  out.abelianization = quotient(Sublattice::full(m), image_ab);
  out.abelian = commutator_inside;
  if (out.abelian) {
    out.group = out.abelianization;
    if (out.group.order() != out.order)
      throw std::logic_error("deck_group: abelian quotient order mismatch");
  }
  return out;
}

// ---------------------------------------------------------------------------
// asymptotic deck group F = colim F_n and its elements
// ---------------------------------------------------------------------------

inline std::map<Int, std::size_t> asymptotic_deck_group(const TowerSpec& ts,
                                                        const LambdaData& ld,
                                                        const RegularityCertificate& cert) {
  if (!cert.certified())
    throw std::domain_error("asymptotic_deck_group: strong regularity not certified");
  (void)ts;
  return prufer_ranks(ld.abar);
}

// Element of F at a level n, stored in the invariant-factor coordinates of
// Lambda / Abar^n Lambda.
struct AsymptoticElement {
  std::size_t level = 0;
  std::vector<Int> value;  // length lambda_rank, reduced mod the invariant factors
};

class AsymptoticContext {
 public:
  explicit AsymptoticContext(IntMatrix abar) : abar_(std::move(abar)) {
    if (!abar_.is_square() || det(abar_) == 0)
      throw std::invalid_argument("AsymptoticContext: Abar must be square and nonsingular");
  }

  const IntMatrix& abar() const { return abar_; }
  std::size_t rank() const { return abar_.rows(); }

  // invariant factors (full diagonal, ones included) of Lambda / Abar^n Lambda
  struct Level {
    IntMatrix u;       // unimodular: coords = u * lambda-vector mod diag
    IntMatrix u_inv;
    std::vector<Int> diag;
  };

  const Level& level(std::size_t n) const {
    while (levels_.size() <= n) {
      std::size_t k = levels_.size();
      SnfResult s = snf(abar_.pow(k));
      Level lv{s.U, inverse_unimodular(s.U), s.diagonal()};
      for (auto& d : lv.diag) d = abs_int(d);
      levels_.push_back(std::move(lv));
    }
    return levels_[n];
  }

  AsymptoticElement make(std::size_t n, const std::vector<Int>& lambda_coords) const {
    const Level& lv = level(n);
    std::vector<Int> y = lv.u * lambda_coords;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = floor_mod(y[i], lv.diag[i]);
    return canonicalize({n, std::move(y)});
  }

  AsymptoticElement identity_element() const {
    return AsymptoticElement{0, std::vector<Int>(rank(), Int(0))};
  }

  bool is_identity(const AsymptoticElement& e) const {
    for (const auto& v : e.value)
      if (v != 0) return false;
    return e.level == 0;
  }

  std::vector<Int> lambda_coords(const AsymptoticElement& e) const {
    return level(e.level).u_inv * e.value;
  }

  // minimal-level representative; the identity lives at level 0
  AsymptoticElement canonicalize(AsymptoticElement e) const {
    while (e.level > 0) {
      std::vector<Int> w = lambda_coords(e);
      auto pre = solve_integer(abar_, w);
      if (!pre) break;
      const Level& lv = level(e.level - 1);
      std::vector<Int> y = lv.u * *pre;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = floor_mod(y[i], lv.diag[i]);
      e = AsymptoticElement{e.level - 1, std::move(y)};
    }
    if (e.level == 0) e.value.assign(rank(), Int(0));
    return e;
  }

  // the embedding F_n -> F_(n+levels) given by multiplication with Abar
  AsymptoticElement embed(const AsymptoticElement& e, std::size_t levels) const {
    std::vector<Int> w = lambda_coords(e);
    w = abar_.pow(levels) * w;
    const std::size_t n = e.level + levels;
    const Level& lv = level(n);
    std::vector<Int> y = lv.u * w;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = floor_mod(y[i], lv.diag[i]);
    return AsymptoticElement{n, std::move(y)};
  }

  AsymptoticElement add(const AsymptoticElement& a, const AsymptoticElement& b) const {
    const std::size_t n = a.level > b.level ? a.level : b.level;
    AsymptoticElement ea = a.level < n ? embed(a, n - a.level) : a;
    AsymptoticElement eb = b.level < n ? embed(b, n - b.level) : b;
    const Level& lv = level(n);
    std::vector<Int> y(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      y[i] = floor_mod(ea.value[i] + eb.value[i], lv.diag[i]);
    return canonicalize({n, std::move(y)});
  }

  AsymptoticElement negate(const AsymptoticElement& e) const {
    const Level& lv = level(e.level);
    std::vector<Int> y(rank());
    for (std::size_t i = 0; i < rank(); ++i) y[i] = floor_mod(-e.value[i], lv.diag[i]);
    return canonicalize({e.level, std::move(y)});
  }

  bool equal(const AsymptoticElement& a, const AsymptoticElement& b) const {
    AsymptoticElement ca = canonicalize(a), cb = canonicalize(b);
    return ca.level == cb.level && ca.value == cb.value;
  }

  Int order(const AsymptoticElement& e) const {
    const Level& lv = level(e.level);
    Int o = 1;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (lv.diag[i] == 1) continue;
      Int g = gcd_int(e.value[i], lv.diag[i]);
      o = lcm_int(o, lv.diag[i] / g);
    }
    return o;
  }

  // the surjection alpha : F -> F induced by the quotient maps F_n -> F_(n-1)
  AsymptoticElement alpha(const AsymptoticElement& e) const {
    if (e.level <= 1) return identity_element();
    std::vector<Int> w = lambda_coords(e);
    const Level& lv = level(e.level - 1);
    std::vector<Int> y = lv.u * w;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = floor_mod(y[i], lv.diag[i]);
    return canonicalize({e.level - 1, std::move(y)});
  }

 private:
  IntMatrix abar_;
  mutable std::vector<Level> levels_;
};

// ---------------------------------------------------------------------------
// residuality and the expanding classifier
// ---------------------------------------------------------------------------

struct ResidualReport {
  bool residual = false;
  std::optional<Element> witness;           // nontrivial element of the stable image
  std::optional<bool> abelian_conclusion;   // q : Gamma ~ Z^n when residual
};

inline ResidualReport residual(const TowerSpec& ts, const StableImageReport& si) {
  ResidualReport out;
  out.residual = si.stable_generators.empty();
  if (!out.residual) {
    out.witness = si.stable_generators.front();
    out.abelian_conclusion = std::nullopt;
    return out;
  }
  // ker q is trivial and q is a verified surjection, so q is an isomorphism
  (void)ts;
  out.abelian_conclusion = true;
  return out;
}

struct ExpandingReport {
  bool expanding = false;
  bool circle_roots = false;
  CircleCounts counts;
};

inline ExpandingReport expanding_linear(const IntMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("expanding_linear: matrix not square");
  if (a.rows() == 0) return {true, false, {}};
  if (det(a) == 0) throw std::domain_error("expanding_linear: singular matrix");
  CircleCounts c = roots_vs_unit_circle(charpoly(a));
  return {c.inside == 0 && c.on == 0, c.on > 0, c};
}

// ---------------------------------------------------------------------------
// the aggregate report
// ---------------------------------------------------------------------------

struct TowerReport {
  Int degree;
  RegularityCertificate certificate;
  std::vector<DeckGroupReport> deck_groups;          // levels 1..depth when available
  std::optional<std::map<Int, std::size_t>> prufer;  // asymptotic deck group ranks
  std::optional<StableImageReport> stable;
  std::optional<ResidualReport> residual_report;
  std::optional<ExpandingReport> expanding;          // verdict on Abar
  std::optional<bool> b1_positive;
};

inline TowerReport analyze(const TowerSpec& ts, std::size_t depth = 6) {
  TowerReport out;
  out.degree = ts.degree;
  out.certificate = certify_strong_regularity(ts, depth);
  LambdaData ld = lambda_data(ts);
  if (out.certificate.verdict == RegularityVerdict::FailsAt) return out;
  for (std::size_t n = 1; n <= depth; ++n)
    out.deck_groups.push_back(deck_group(ts, ld, out.certificate, n));
  if (!out.certificate.certified()) return out;
  out.prufer = asymptotic_deck_group(ts, ld, out.certificate);
  out.stable = stable_image(ts, ld);
  out.residual_report = residual(ts, *out.stable);
  out.expanding = expanding_linear(ld.abar);
  out.b1_positive = ld.lambda_rank >= 1;
  if (!*out.b1_positive)
    throw std::logic_error("analyze: lambda rank is zero for a nontrivial tower");
  return out;
}

}  // namespace selfcover
