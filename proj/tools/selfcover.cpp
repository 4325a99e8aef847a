// Batch front-end: parse tower specifications from JSON, run the analyses,
// and emit human-readable or machine-readable reports.
//
// Exit codes: 0 success, 2 spec rejection, 3 regularity failure (witness on
// stderr), 1 internal error.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selfcover/report_io.hpp"
#include "selfcover/spec_io.hpp"
#include "selfcover/tower.hpp"

namespace {

using namespace selfcover;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitSpecRejected = 2;
constexpr int kExitRegularityFailure = 3;

struct SpecInput {
  std::string label;
  SpecDocument doc;
};

SpecInput load_spec(const std::string& ref) {
  std::string text;
  if (std::filesystem::exists(ref)) {
    std::ifstream in(ref);
    if (!in) throw SpecError("document", "cannot read '" + ref + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else if (const BundledExample* ex = find_bundled_example(ref)) {
    text = ex->document;
  } else {
    throw SpecError("document", "no such file or bundled example: '" + ref + "'");
  }
  return {ref, parse_spec(text)};
}

std::string witness_message(const GroupSpec& g, std::size_t level, const NormalityWitness& w) {
  std::ostringstream os;
  os << "image subgroup at level " << level << " is not normal: conjugating "
     << render_element(g, w.element) << " by " << render_element(g, w.conjugator) << " gives "
     << render_element(g, w.conjugate_out) << ", which lies outside the image";
  return os.str();
}

int run_analyze(const std::vector<std::string>& refs, bool as_json, std::size_t depth_flag,
                bool depth_set, bool parallel) {
  struct Job {
    std::string label;
    GroupSpec group;
    TowerSpec ts;
    std::size_t depth;
  };
  std::vector<Job> jobs;
  for (const auto& ref : refs) {
    SpecInput in = load_spec(ref);
    std::size_t depth = depth_set ? depth_flag : in.doc.depth;
    TowerSpec ts = tower_from_document(in.doc);
    jobs.push_back({in.label, in.doc.group, std::move(ts), depth});
  }
  auto run_one = [](const Job& job) { return analyze(job.ts, job.depth); };
  std::vector<TowerReport> reports;
  if (parallel && jobs.size() > 1) {
    std::vector<std::future<TowerReport>> futs;
    for (const auto& job : jobs)
      futs.push_back(std::async(std::launch::async, run_one, std::cref(job)));
    for (auto& f : futs) reports.push_back(f.get());
  } else {
    for (const auto& job : jobs) reports.push_back(run_one(job));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    ReportDocument doc = report_to_document(jobs[i].group, reports[i]);
    if (refs.size() > 1 && !as_json) std::cout << "== " << jobs[i].label << "\n";
    if (as_json)
      std::cout << serialize_report(doc);
    else
      std::cout << render_report_text(doc);
  }
  return kExitOk;
}

int run_deck(const std::string& ref, std::size_t n, bool as_json) {
  SpecInput in = load_spec(ref);
  TowerSpec ts = tower_from_document(in.doc);
  RegularityCertificate cert = certify_strong_regularity(ts, n);
  LambdaData ld = lambda_data(ts);
  DeckGroupReport deck;
  try {
    deck = deck_group(ts, ld, cert, n);
  } catch (const RegularityError& e) {
    std::cerr << witness_message(in.doc.group, e.level, e.witness) << "\n";
    return kExitRegularityFailure;
  }
  if (as_json) {
    nlohmann::ordered_json j;
    j["level"] = n;
    j["order"] = detail::int_to_ojson(deck.order);
    j["abelian"] = deck.abelian;
    nlohmann::ordered_json fs = nlohmann::ordered_json::array();
    for (const auto& f : (deck.abelian ? deck.group : deck.abelianization).invariant_factors)
      fs.push_back(detail::int_to_ojson(f));
    j[deck.abelian ? "invariant_factors" : "abelianization"] = std::move(fs);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "F_" << n << ": order " << deck.order;
    if (deck.abelian) {
      std::cout << ", invariant factors";
      if (deck.group.invariant_factors.empty()) std::cout << " (trivial)";
      for (const auto& f : deck.group.invariant_factors) std::cout << " " << f;
    } else {
      std::cout << ", nonabelian; abelianization";
      for (const auto& f : deck.abelianization.invariant_factors) std::cout << " Z/" << f;
    }
    std::cout << "\n";
  }
  return kExitOk;
}

int run_stable(const std::string& ref, bool as_json) {
  SpecInput in = load_spec(ref);
  TowerSpec ts = tower_from_document(in.doc);
  RegularityCertificate cert = certify_strong_regularity(ts, 6);
  if (!cert.certified()) {
    if (cert.witness) {
      std::cerr << witness_message(in.doc.group, cert.level, *cert.witness) << "\n";
      return kExitRegularityFailure;
    }
    std::cerr << "strong regularity could not be certified (bounded verdict only)\n";
    return kExitRegularityFailure;
  }
  LambdaData ld = lambda_data(ts);
  StableImageReport si = stable_image(ts, ld);
  TowerReport partial;
  partial.degree = ts.degree;
  partial.certificate = cert;
  partial.stable = si;
  ReportDocument doc = report_to_document(in.doc.group, partial);
  if (as_json) {
    std::cout << document_to_json(doc)["stable_image"].dump(2) << "\n";
  } else {
    std::cout << "stable image: ";
    if (doc.stable_image->generators.empty())
      std::cout << "trivial";
    else {
      std::cout << "generated by";
      for (const auto& g : doc.stable_image->generators) std::cout << " " << g;
    }
    std::cout << "\nlambda rank: " << si.lambda_rank << "\ninduced matrix: " << si.induced
              << "\n|det| = degree " << ts.degree << ": "
              << (si.det_check ? "verified" : "FAILED") << "\n";
  }
  return kExitOk;
}

int run_residual(const std::string& ref, bool as_json) {
  SpecInput in = load_spec(ref);
  TowerSpec ts = tower_from_document(in.doc);
  RegularityCertificate cert = certify_strong_regularity(ts, 6);
  if (!cert.certified()) {
    if (cert.witness) {
      std::cerr << witness_message(in.doc.group, cert.level, *cert.witness) << "\n";
      return kExitRegularityFailure;
    }
    std::cerr << "strong regularity could not be certified (bounded verdict only)\n";
    return kExitRegularityFailure;
  }
  LambdaData ld = lambda_data(ts);
  StableImageReport si = stable_image(ts, ld);
  ResidualReport res = residual(ts, si);
  if (as_json) {
    TowerReport partial;
    partial.degree = ts.degree;
    partial.certificate = cert;
    partial.stable = si;
    partial.residual_report = res;
    ReportDocument doc = report_to_document(in.doc.group, partial);
    std::cout << document_to_json(doc)["residual"].dump(2) << "\n";
  } else {
    std::cout << "residual: " << (res.residual ? "yes" : "no") << "\n";
    if (res.witness)
      std::cout << "witness: " << render_element(in.doc.group, *res.witness)
                << " lies in every iterated image\n";
    if (res.abelian_conclusion && *res.abelian_conclusion)
      std::cout << "q is an isomorphism onto Z^" << si.lambda_rank
                << "; the group is free abelian\n";
  }
  return kExitOk;
}

int run_expanding(const std::string& matrix_text, bool as_json) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(matrix_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError("matrix", std::string("malformed JSON: ") + e.what());
  }
  IntMatrix a = detail::matrix_from_json(parsed, "matrix");
  if (!a.is_square()) throw SpecError("matrix", "must be square");
  if (det(a) == 0) throw SpecError("matrix", "must be nonsingular");
  ExpandingReport rep = expanding_linear(a);
  if (as_json) {
    nlohmann::ordered_json j;
    j["expanding"] = rep.expanding;
    j["circle_roots"] = rep.circle_roots;
    j["inside"] = rep.counts.inside;
    j["on"] = rep.counts.on;
    j["outside"] = rep.counts.outside;
    std::cout << j.dump(2) << "\n";
  } else {
    if (rep.expanding) {
      std::cout << "expanding: all eigenvalues lie outside the unit circle\n";
    } else {
      std::cout << "not expanding:";
      if (rep.counts.inside > 0)
        std::cout << " " << rep.counts.inside << " eigenvalue(s) inside the unit disc";
      if (rep.counts.on > 0)
        std::cout << (rep.counts.inside ? "," : "") << " " << rep.counts.on
                  << " eigenvalue(s) on the unit circle";
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int run_examples(const std::string& dump_name, const std::string& dir) {
  if (!dump_name.empty()) {
    const BundledExample* ex = find_bundled_example(dump_name);
    if (!ex) throw SpecError("examples", "no bundled example named '" + dump_name + "'");
    std::cout << ex->document << "\n";
    return kExitOk;
  }
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    for (const auto& ex : bundled_examples()) {
      std::ofstream out(std::filesystem::path(dir) / (ex.name + ".json"));
      out << ex.document << "\n";
    }
    std::cout << "wrote " << bundled_examples().size() << " example documents to " << dir << "\n";
    return kExitOk;
  }
  for (const auto& ex : bundled_examples())
    std::cout << ex.name << "  -  " << ex.description << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selfcover: exact analysis of self-cover towers of groups"};
  app.require_subcommand(1);

  std::vector<std::string> analyze_refs;
  std::size_t depth = 6;
  bool as_json = false, parallel = false;
  auto* cmd_analyze = app.add_subcommand("analyze", "full tower report for one or more specs");
  cmd_analyze->add_option("spec", analyze_refs, "spec file(s) or bundled example name(s)")
      ->required();
  auto* depth_opt = cmd_analyze->add_option("--depth", depth, "deck-group depth (default 6)");
  cmd_analyze->add_flag("--json", as_json, "machine-readable report");
  cmd_analyze->add_flag("--parallel", parallel, "analyze independent inputs concurrently");

  std::string deck_ref;
  std::size_t deck_n = 1;
  bool deck_json = false;
  auto* cmd_deck = app.add_subcommand("deck", "deck group of the n-th iterate");
  cmd_deck->add_option("spec", deck_ref, "spec file or bundled example name")->required();
  cmd_deck->add_option("--n", deck_n, "iterate level")->required();
  cmd_deck->add_flag("--json", deck_json, "machine-readable output");

  std::string stable_ref;
  bool stable_json = false;
  auto* cmd_stable = app.add_subcommand("stable", "stable image and induced matrix");
  cmd_stable->add_option("spec", stable_ref, "spec file or bundled example name")->required();
  cmd_stable->add_flag("--json", stable_json, "machine-readable output");

  std::string residual_ref;
  bool residual_json = false;
  auto* cmd_residual = app.add_subcommand("residual", "residuality of the tower");
  cmd_residual->add_option("spec", residual_ref, "spec file or bundled example name")->required();
  cmd_residual->add_flag("--json", residual_json, "machine-readable output");

  std::string matrix_text;
  bool expanding_json = false;
  auto* cmd_expanding = app.add_subcommand("expanding", "expanding-map classifier for a matrix");
  cmd_expanding->add_option("--matrix", matrix_text, "inline JSON matrix, e.g. [[2,1],[1,1]]")
      ->required();
  cmd_expanding->add_flag("--json", expanding_json, "machine-readable output");

  std::string dump_name, dir_name;
  auto* cmd_examples = app.add_subcommand("examples", "list or export the bundled examples");
  cmd_examples->add_option("--dump", dump_name, "print one bundled document");
  cmd_examples->add_option("--dir", dir_name, "write all bundled documents to a directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_analyze)
      return run_analyze(analyze_refs, as_json, depth, depth_opt->count() > 0, parallel);
    if (*cmd_deck) return run_deck(deck_ref, deck_n, deck_json);
    if (*cmd_stable) return run_stable(stable_ref, stable_json);
    if (*cmd_residual) return run_residual(residual_ref, residual_json);
    if (*cmd_expanding) return run_expanding(matrix_text, expanding_json);
    if (*cmd_examples) return run_examples(dump_name, dir_name);
  } catch (const SpecError& e) {
    std::cerr << "spec rejected: " << e.what() << "\n";
    return kExitSpecRejected;
  } catch (const selfcover::RegularityError& e) {
    std::cerr << e.what() << "\n";
    return kExitRegularityFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
