#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfcover/groups.hpp"
#include "selfcover/integers.hpp"
#include "selfcover/tower.hpp"
#include "selfcover/words.hpp"

namespace selfcover {

// A parsed and validated tower specification document.
struct SpecDocument {
  GroupSpec group;
  std::vector<Element> images;
  std::size_t depth = 6;
};

// Schema or validation failure; `field` names the offending entry.
struct SpecError : std::runtime_error {
  SpecError(std::string field_, const std::string& message)
      : std::runtime_error(field_ + ": " + message), field(std::move(field_)) {}
  std::string field;
};

namespace detail {

using json = nlohmann::json;

// Integers arrive as JSON numbers or, beyond 53-bit magnitude, as decimal
// strings.
inline Int int_from_json(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Int(v.get<std::int64_t>());
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s.empty()) throw SpecError(field, "empty integer string");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw SpecError(field, "malformed integer string");
    for (std::size_t i = start; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw SpecError(field, "malformed integer string '" + s + "'");
    return Int(s);
  }
  throw SpecError(field, "expected an integer (number or decimal string)");
}

inline IntMatrix matrix_from_json(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw SpecError(field, "expected a non-empty integer matrix");
  std::vector<std::vector<Int>> rows;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array()) throw SpecError(field, "matrix rows must be arrays");
    if (i == 0) cols = row.size();
    if (row.size() != cols) throw SpecError(field, "matrix rows must have equal length");
    std::vector<Int> r;
    for (const auto& entry : row) r.push_back(int_from_json(entry, field));
    rows.push_back(std::move(r));
  }
  if (cols == 0) throw SpecError(field, "matrix rows must be non-empty");
  return IntMatrix::from_rows(rows);
}

inline std::size_t count_from_json(const json& v, const std::string& field, std::size_t min) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min))
    throw SpecError(field, "expected an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(v.get<std::int64_t>());
}

}  // namespace detail

inline SpecDocument parse_spec(const std::string& text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw SpecError("document", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("document", "top level must be a JSON object");
  if (!doc.contains("family")) throw SpecError("family", "missing");
  if (!doc["family"].is_string()) throw SpecError("family", "must be a string");
  const std::string family = doc["family"].get<std::string>();

  SpecDocument out;
  if (family == "abelian") {
    if (!doc.contains("rank")) throw SpecError("rank", "missing for abelian family");
    std::size_t rank = detail::count_from_json(doc["rank"], "rank", 1);
    std::vector<std::vector<Int>> relations;
    if (doc.contains("relations")) {
      if (!doc["relations"].is_array()) throw SpecError("relations", "must be an array of vectors");
      for (const auto& row : doc["relations"]) {
        if (!row.is_array() || row.size() != rank)
          throw SpecError("relations", "each relation must be a vector of length rank");
        std::vector<Int> r;
        for (const auto& e : row) r.push_back(detail::int_from_json(e, "relations"));
        relations.push_back(std::move(r));
      }
    }
    out.group = make_abelian(rank, relations);
  } else if (family == "class2") {
    if (!doc.contains("a")) throw SpecError("a", "missing for class2 family");
    if (!doc.contains("c")) throw SpecError("c", "missing for class2 family");
    std::size_t a = detail::count_from_json(doc["a"], "a", 1);
    std::size_t c = detail::count_from_json(doc["c"], "c", 1);
    if (!doc.contains("omega") || !doc["omega"].is_array() || doc["omega"].size() != c)
      throw SpecError("omega", "expected a list of c alternating a x a matrices");
    std::vector<IntMatrix> omega, beta;
    for (const auto& m : doc["omega"]) omega.push_back(detail::matrix_from_json(m, "omega"));
    if (doc.contains("beta")) {
      if (!doc["beta"].is_array() || doc["beta"].size() != c)
        throw SpecError("beta", "expected a list of c a x a matrices");
      for (const auto& m : doc["beta"]) beta.push_back(detail::matrix_from_json(m, "beta"));
    }
    try {
      out.group = make_class2(a, c, std::move(omega), std::move(beta));
    } catch (const std::invalid_argument& e) {
      throw SpecError("omega", e.what());
    }
  } else if (family == "semidirect") {
    if (!doc.contains("k")) throw SpecError("k", "missing for semidirect family");
    std::size_t k = detail::count_from_json(doc["k"], "k", 1);
    if (!doc.contains("monodromy")) throw SpecError("monodromy", "missing");
    IntMatrix m = detail::matrix_from_json(doc["monodromy"], "monodromy");
    if (m.rows() != k || m.cols() != k) throw SpecError("monodromy", "must be a k x k matrix");
    Int d = det(m);
    if (d != 1 && d != -1) throw SpecError("monodromy", "monodromy must be unimodular");
    out.group = make_semidirect(k, m);
  } else {
    throw SpecError("family", "unknown family '" + family + "'");
  }

  if (!doc.contains("endo_images") || !doc["endo_images"].is_object())
    throw SpecError("endo_images", "expected an object mapping generator names to words");
  const auto names = generator_names(out.group);
  std::map<std::string, std::string> words;
  for (const auto& [key, value] : doc["endo_images"].items()) {
    if (!value.is_string()) throw SpecError("endo_images", "image of '" + key + "' must be a word string");
    words[key] = value.get<std::string>();
  }
  for (const auto& name : names)
    if (!words.count(name))
      throw SpecError("endo_images", "missing image for generator '" + name + "'");
  if (words.size() != names.size())
    throw SpecError("endo_images", "unknown generator name among the images");
  for (const auto& name : names) {
    try {
      out.images.push_back(parse_word(out.group, words.at(name)));
    } catch (const WordError& e) {
      throw SpecError("endo_images", std::string("image of '" + name + "': ") + e.what());
    }
  }

  if (doc.contains("options")) {
    if (!doc["options"].is_object()) throw SpecError("options", "must be an object");
    if (doc["options"].contains("depth"))
      out.depth = detail::count_from_json(doc["options"]["depth"], "options.depth", 1);
  }
  return out;
}

// Validated tower from a parsed document; endomorphism diagnostics surface
// as SpecError.
inline TowerSpec tower_from_document(const SpecDocument& doc) {
  EndoCheck chk = check_endo(doc.group, doc.images);
  if (!chk.valid) throw SpecError("endo_images", chk.diagnostic);
  if (*chk.degree <= 1)
    throw SpecError("endo_images", "endomorphism degree must exceed 1 (got " + chk.degree->str() + ")");
  return TowerSpec{doc.group, std::move(*chk.endo), *chk.degree};
}

// ---------------------------------------------------------------------------
// bundled example corpus
// ---------------------------------------------------------------------------

struct BundledExample {
  std::string name;
  std::string description;
  std::string document;  // JSON text
};

inline const std::vector<BundledExample>& bundled_examples() {
  static const std::vector<BundledExample> corpus = {
      {"torus-diag23", "torus endomorphism diag(2,3), degree 6, residual",
       R"({
  "family": "abelian",
  "rank": 2,
  "relations": [],
  "endo_images": {"e1": "e1^2", "e2": "e2^3"}
})"},
      {"torus-shear12", "torus endomorphism [[1,1],[0,2]], stable line, degree 2",
       R"({
  "family": "abelian",
  "rank": 2,
  "relations": [],
  "endo_images": {"e1": "e1", "e2": "e1 e2^2"}
})"},
      {"torus-2I", "torus doubling map 2*I, degree 4, residual",
       R"({
  "family": "abelian",
  "rank": 2,
  "relations": [],
  "endo_images": {"e1": "e1^2", "e2": "e2^2"}
})"},
      {"klein-b3", "Klein bottle group, a -> a, b -> b^3, degree 3",
       R"({
  "family": "semidirect",
  "k": 1,
  "monodromy": [[-1]],
  "endo_images": {"a": "a", "b": "b^3"}
})"},
      {"heisenberg-224", "integer Heisenberg group, x -> x^2, y -> y^2, z -> z^4, degree 16",
       R"({
  "family": "class2",
  "a": 2,
  "c": 1,
  "omega": [[[0, 1], [-1, 0]]],
  "endo_images": {"x": "x^2", "y": "y^2", "z": "z^4"}
})"},
      {"heisenberg-graded-p2q3", "graded Heisenberg endomorphism with p=2, q=3, degree 36",
       R"({
  "family": "class2",
  "a": 2,
  "c": 1,
  "omega": [[[0, 1], [-1, 0]]],
  "endo_images": {"x": "x^2", "y": "y^3", "z": "z^6"}
})"},
      {"heisenberg-times-z", "Heisenberg x Z with doubling on the free central factor, degree 2",
       R"({
  "family": "class2",
  "a": 2,
  "c": 2,
  "omega": [[[0, 1], [-1, 0]], [[0, 0], [0, 0]]],
  "endo_images": {"x": "x", "y": "y", "z1": "z1", "z2": "z2^2"}
})"}};
  return corpus;
}

inline const BundledExample* find_bundled_example(const std::string& name) {
  for (const auto& e : bundled_examples())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace selfcover
