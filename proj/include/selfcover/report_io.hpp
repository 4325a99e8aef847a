#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selfcover/integers.hpp"
#include "selfcover/spec_io.hpp"
#include "selfcover/tower.hpp"

namespace selfcover {

// Serializable mirror of TowerReport. Elements are rendered as generator
// words; integers beyond 53-bit magnitude are serialized as decimal strings.
struct ReportDocument {
  struct Witness {
    std::string conjugator, element, conjugate;
    friend bool operator==(const Witness&, const Witness&) = default;
  };
  struct Deck {
    bool abelian = true;
    Int order;
    std::vector<Int> invariant_factors;  // abelian case
    std::vector<Int> abelianization;     // nonabelian case
    friend bool operator==(const Deck&, const Deck&) = default;
  };
  struct Stable {
    std::vector<std::string> generators;
    std::size_t lambda_rank = 0;
    std::vector<std::vector<Int>> q_matrix;
    std::vector<std::vector<Int>> induced_matrix;
    bool det_check = false;
    friend bool operator==(const Stable&, const Stable&) = default;
  };
  struct Residual {
    bool residual = false;
    std::optional<std::string> witness;
    std::optional<bool> abelian_conclusion;
    friend bool operator==(const Residual&, const Residual&) = default;
  };
  struct Expanding {
    bool expanding = false;
    bool circle_roots = false;
    int inside = 0, on = 0, outside = 0;
    friend bool operator==(const Expanding&, const Expanding&) = default;
  };

  Int degree;
  std::string verdict;                 // ExactlyRegular | RegularToDepth | FailsAt
  std::optional<std::size_t> level;    // RegularToDepth: depth; FailsAt: failing level
  std::optional<Witness> witness;
  std::optional<std::vector<Deck>> deck_groups;
  std::optional<std::map<Int, std::size_t>> prufer_ranks;
  std::optional<Stable> stable_image;
  std::optional<Residual> residual;
  std::optional<Expanding> expanding;
  std::optional<bool> b1_positive;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

namespace detail {

inline nlohmann::ordered_json int_to_ojson(const Int& v) {
  static const Int kMax = (Int(1) << 53) - 1;
  if (abs_int(v) <= kMax) return nlohmann::ordered_json(static_cast<std::int64_t>(v));
  return nlohmann::ordered_json(v.str());
}

inline nlohmann::ordered_json matrix_to_ojson(const std::vector<std::vector<Int>>& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : m) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const auto& v : r) row.push_back(int_to_ojson(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<Int>> matrix_rows(const IntMatrix& m) {
  std::vector<std::vector<Int>> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  return rows;
}

}  // namespace detail

inline ReportDocument report_to_document(const GroupSpec& g, const TowerReport& r) {
  ReportDocument out;
  out.degree = r.degree;
  switch (r.certificate.verdict) {
    case RegularityVerdict::ExactlyRegular:
      out.verdict = "ExactlyRegular";
      break;
    case RegularityVerdict::RegularToDepth:
      out.verdict = "RegularToDepth";
      out.level = r.certificate.level;
      break;
    case RegularityVerdict::FailsAt:
      out.verdict = "FailsAt";
      out.level = r.certificate.level;
      break;
  }
  if (r.certificate.witness) {
    const auto& w = *r.certificate.witness;
    out.witness = ReportDocument::Witness{render_element(g, w.conjugator),
                                          render_element(g, w.element),
                                          render_element(g, w.conjugate_out)};
  }
  if (!r.deck_groups.empty()) {
    std::vector<ReportDocument::Deck> decks;
    for (const auto& d : r.deck_groups) {
      ReportDocument::Deck deck;
      deck.abelian = d.abelian;
      deck.order = d.order;
      deck.invariant_factors = d.group.invariant_factors;
      deck.abelianization = d.abelianization.invariant_factors;
      decks.push_back(std::move(deck));
    }
    out.deck_groups = std::move(decks);
  }
  if (r.prufer) out.prufer_ranks = *r.prufer;
  if (r.stable) {
    ReportDocument::Stable s;
    for (const auto& e : r.stable->stable_generators) s.generators.push_back(render_element(g, e));
    s.lambda_rank = r.stable->lambda_rank;
    s.q_matrix = detail::matrix_rows(r.stable->q_matrix);
    s.induced_matrix = detail::matrix_rows(r.stable->induced);
    s.det_check = r.stable->det_check;
    out.stable_image = std::move(s);
  }
  if (r.residual_report) {
    ReportDocument::Residual res;
    res.residual = r.residual_report->residual;
    if (r.residual_report->witness) res.witness = render_element(g, *r.residual_report->witness);
    res.abelian_conclusion = r.residual_report->abelian_conclusion;
    out.residual = std::move(res);
  }
  if (r.expanding) {
    out.expanding = ReportDocument::Expanding{r.expanding->expanding, r.expanding->circle_roots,
                                              r.expanding->counts.inside, r.expanding->counts.on,
                                              r.expanding->counts.outside};
  }
  out.b1_positive = r.b1_positive;
  return out;
}

inline nlohmann::ordered_json document_to_json(const ReportDocument& d) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["degree"] = detail::int_to_ojson(d.degree);
  ojson cert;
  cert["verdict"] = d.verdict;
  if (d.verdict == "RegularToDepth") cert["depth"] = *d.level;
  if (d.verdict == "FailsAt") {
    cert["level"] = *d.level;
    if (d.witness) {
      ojson w;
      w["conjugator"] = d.witness->conjugator;
      w["element"] = d.witness->element;
      w["conjugate"] = d.witness->conjugate;
      cert["witness"] = std::move(w);
    }
  }
  j["certificate"] = std::move(cert);
  if (d.deck_groups) {
    ojson decks = ojson::array();
    for (const auto& deck : *d.deck_groups) {
      if (deck.abelian) {
        ojson fs = ojson::array();
        for (const auto& f : deck.invariant_factors) fs.push_back(detail::int_to_ojson(f));
        decks.push_back(std::move(fs));
      } else {
        ojson o;
        o["order"] = detail::int_to_ojson(deck.order);
        ojson ab = ojson::array();
        for (const auto& f : deck.abelianization) ab.push_back(detail::int_to_ojson(f));
        o["abelianization"] = std::move(ab);
        decks.push_back(std::move(o));
      }
    }
    j["deck_groups"] = std::move(decks);
  } else {
    j["deck_groups"] = nullptr;
  }
  if (d.prufer_ranks) {
    ojson pr = ojson::object();
    for (const auto& [p, rk] : *d.prufer_ranks) pr[p.str()] = rk;
    j["prufer_ranks"] = std::move(pr);
  } else {
    j["prufer_ranks"] = nullptr;
  }
  if (d.stable_image) {
    ojson s;
    s["generators"] = d.stable_image->generators;
    s["lambda_rank"] = d.stable_image->lambda_rank;
    s["q_matrix"] = detail::matrix_to_ojson(d.stable_image->q_matrix);
    s["induced_matrix"] = detail::matrix_to_ojson(d.stable_image->induced_matrix);
    s["det_check"] = d.stable_image->det_check;
    j["stable_image"] = std::move(s);
  } else {
    j["stable_image"] = nullptr;
  }
  if (d.residual) {
    ojson res;
    res["residual"] = d.residual->residual;
    res["witness"] = d.residual->witness ? ojson(*d.residual->witness) : ojson(nullptr);
    res["abelian_conclusion"] =
        d.residual->abelian_conclusion ? ojson(*d.residual->abelian_conclusion) : ojson(nullptr);
    j["residual"] = std::move(res);
  } else {
    j["residual"] = nullptr;
  }
  if (d.expanding) {
    ojson e;
    e["expanding"] = d.expanding->expanding;
    e["circle_roots"] = d.expanding->circle_roots;
    e["inside"] = d.expanding->inside;
    e["on"] = d.expanding->on;
    e["outside"] = d.expanding->outside;
    j["expanding"] = std::move(e);
  } else {
    j["expanding"] = nullptr;
  }
  j["b1_positive"] = d.b1_positive ? nlohmann::ordered_json(*d.b1_positive)
                                   : nlohmann::ordered_json(nullptr);
  return j;
}

inline std::string serialize_report(const ReportDocument& d) {
  return document_to_json(d).dump(2) + "\n";
}

namespace detail {

inline Int int_from_ojson(const nlohmann::ordered_json& v, const std::string& field) {
  if (v.is_number_integer()) return Int(v.get<std::int64_t>());
  if (v.is_string()) return Int(v.get<std::string>());
  throw SpecError(field, "expected an integer");
}

inline std::vector<std::vector<Int>> matrix_from_ojson(const nlohmann::ordered_json& v,
                                                       const std::string& field) {
  std::vector<std::vector<Int>> rows;
  for (const auto& r : v) {
    std::vector<Int> row;
    for (const auto& e : r) row.push_back(int_from_ojson(e, field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline ReportDocument parse_report(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw SpecError("report", std::string("malformed JSON: ") + e.what());
  }
  ReportDocument d;
  d.degree = detail::int_from_ojson(j.at("degree"), "degree");
  const auto& cert = j.at("certificate");
  d.verdict = cert.at("verdict").get<std::string>();
  if (cert.contains("depth")) d.level = cert.at("depth").get<std::size_t>();
  if (cert.contains("level")) d.level = cert.at("level").get<std::size_t>();
  if (cert.contains("witness")) {
    const auto& w = cert.at("witness");
    d.witness = ReportDocument::Witness{w.at("conjugator").get<std::string>(),
                                        w.at("element").get<std::string>(),
                                        w.at("conjugate").get<std::string>()};
  }
  if (!j.at("deck_groups").is_null()) {
    std::vector<ReportDocument::Deck> decks;
    for (const auto& entry : j.at("deck_groups")) {
      ReportDocument::Deck deck;
      if (entry.is_array()) {
        deck.abelian = true;
        for (const auto& f : entry)
          deck.invariant_factors.push_back(detail::int_from_ojson(f, "deck_groups"));
        deck.order = 1;
        for (const auto& f : deck.invariant_factors) deck.order *= f;
        deck.abelianization = deck.invariant_factors;
      } else {
        deck.abelian = false;
        deck.order = detail::int_from_ojson(entry.at("order"), "deck_groups.order");
        for (const auto& f : entry.at("abelianization"))
          deck.abelianization.push_back(detail::int_from_ojson(f, "deck_groups.abelianization"));
      }
      decks.push_back(std::move(deck));
    }
    d.deck_groups = std::move(decks);
  }
  if (!j.at("prufer_ranks").is_null()) {
    std::map<Int, std::size_t> pr;
    for (const auto& [key, value] : j.at("prufer_ranks").items())
      pr[Int(key)] = value.get<std::size_t>();
    d.prufer_ranks = std::move(pr);
  }
  if (!j.at("stable_image").is_null()) {
    const auto& s = j.at("stable_image");
    ReportDocument::Stable st;
    for (const auto& g : s.at("generators")) st.generators.push_back(g.get<std::string>());
    st.lambda_rank = s.at("lambda_rank").get<std::size_t>();
    st.q_matrix = detail::matrix_from_ojson(s.at("q_matrix"), "stable_image.q_matrix");
    st.induced_matrix =
        detail::matrix_from_ojson(s.at("induced_matrix"), "stable_image.induced_matrix");
    st.det_check = s.at("det_check").get<bool>();
    d.stable_image = std::move(st);
  }
  if (!j.at("residual").is_null()) {
    const auto& rj = j.at("residual");
    ReportDocument::Residual res;
    res.residual = rj.at("residual").get<bool>();
    if (!rj.at("witness").is_null()) res.witness = rj.at("witness").get<std::string>();
    if (!rj.at("abelian_conclusion").is_null())
      res.abelian_conclusion = rj.at("abelian_conclusion").get<bool>();
    d.residual = std::move(res);
  }
  if (!j.at("expanding").is_null()) {
    const auto& e = j.at("expanding");
    d.expanding = ReportDocument::Expanding{e.at("expanding").get<bool>(),
                                            e.at("circle_roots").get<bool>(),
                                            e.at("inside").get<int>(), e.at("on").get<int>(),
                                            e.at("outside").get<int>()};
  }
  if (!j.at("b1_positive").is_null()) d.b1_positive = j.at("b1_positive").get<bool>();
  return d;
}

// Human-readable rendering.
inline std::string render_report_text(const ReportDocument& d) {
  std::ostringstream os;
  os << "degree: " << d.degree << "\n";
  os << "strong regularity: " << d.verdict;
  if (d.verdict == "RegularToDepth") os << " (checked to depth " << *d.level << ")";
  if (d.verdict == "FailsAt") os << " (level " << *d.level << ")";
  os << "\n";
  if (d.witness)
    os << "  witness: conjugating " << d.witness->element << " by " << d.witness->conjugator
       << " gives " << d.witness->conjugate << ", outside the image\n";
  if (d.deck_groups) {
    os << "deck groups:\n";
    std::size_t n = 1;
    for (const auto& deck : *d.deck_groups) {
      os << "  F_" << n++ << " = ";
      if (deck.abelian) {
        if (deck.invariant_factors.empty()) {
          os << "trivial";
        } else {
          bool first = true;
          for (const auto& f : deck.invariant_factors) {
            os << (first ? "" : " + ") << "Z/" << f;
            first = false;
          }
        }
      } else {
        os << "nonabelian of order " << deck.order << " (abelianization:";
        for (const auto& f : deck.abelianization) os << " Z/" << f;
        os << ")";
      }
      os << "\n";
    }
  } else {
    os << "deck groups: unavailable\n";
  }
  if (d.prufer_ranks) {
    os << "asymptotic deck group: ";
    if (d.prufer_ranks->empty()) {
      os << "trivial";
    } else {
      bool first = true;
      for (const auto& [p, r] : *d.prufer_ranks) {
        os << (first ? "" : " + ") << "Z(" << p << "^inf)";
        if (r > 1) os << "^" << r;
        first = false;
      }
    }
    os << "\n";
  } else {
    os << "asymptotic deck group: unavailable\n";
  }
  if (d.stable_image) {
    os << "stable image: ";
    if (d.stable_image->generators.empty())
      os << "trivial";
    else {
      os << "generated by";
      for (const auto& g : d.stable_image->generators) os << " " << g;
    }
    os << "\n";
    os << "lambda: Z^" << d.stable_image->lambda_rank << ", induced matrix ";
    os << "[";
    for (std::size_t i = 0; i < d.stable_image->induced_matrix.size(); ++i) {
      os << (i ? ", [" : "[");
      const auto& row = d.stable_image->induced_matrix[i];
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
      os << "]";
    }
    os << "], |det| = degree: " << (d.stable_image->det_check ? "verified" : "FAILED") << "\n";
  } else {
    os << "stable image: unavailable\n";
  }
  if (d.residual) {
    os << "residual: " << (d.residual->residual ? "yes" : "no");
    if (d.residual->witness) os << " (witness " << *d.residual->witness << " survives in every image)";
    if (d.residual->abelian_conclusion && *d.residual->abelian_conclusion)
      os << "; q identifies the group with Z^n";
    os << "\n";
  } else {
    os << "residual: unavailable\n";
  }
  if (d.expanding) {
    os << "induced matrix expanding: " << (d.expanding->expanding ? "yes" : "no");
    os << " (roots inside/on/outside unit circle: " << d.expanding->inside << "/"
       << d.expanding->on << "/" << d.expanding->outside << ")\n";
  } else {
    os << "induced matrix expanding: unavailable\n";
  }
  if (d.b1_positive)
    os << "first Betti number positive: " << (*d.b1_positive ? "yes" : "no") << "\n";
  return os.str();
}

}  // namespace selfcover
