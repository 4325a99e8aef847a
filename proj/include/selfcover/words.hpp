#pragma once

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfcover/groups.hpp"
#include "selfcover/integers.hpp"

namespace selfcover {

// Generator words: identifiers, `^` integer exponents, juxtaposition for
// products, parentheses for grouping. Examples: "b^3", "x y^-2 (x z)^4".

struct WordError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

class WordParser {
 public:
  WordParser(const GroupSpec& g, const std::string& text) : g_(g), text_(text) {
    auto names = generator_names(g);
    for (std::size_t i = 0; i < names.size(); ++i) gens_[names[i]] = generator_element(g, i);
  }

  Element parse() {
    Element e = parse_word();
    skip_ws();
    if (pos_ != text_.size())
      throw WordError("unexpected character '" + std::string(1, text_[pos_]) + "' in word");
    return e;
  }

 private:
  Element parse_word() {
    Element acc = identity(g_);
    bool any = false;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] == ')') break;
      acc = multiply(g_, acc, parse_term());
      any = true;
    }
    if (!any && text_.empty()) throw WordError("empty word");
    return acc;
  }

  Element parse_term() {
    Element base = parse_atom();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      skip_ws();
      base = power(g_, base, parse_int());
    }
    return base;
  }

  Element parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw WordError("word ended where a generator was expected");
    if (text_[pos_] == '(') {
      ++pos_;
      Element inner = parse_word();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') throw WordError("missing ')'");
      ++pos_;
      return inner;
    }
    if (!std::isalpha(static_cast<unsigned char>(text_[pos_])))
      throw WordError("expected a generator name at '" + text_.substr(pos_) + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    auto it = gens_.find(name);
    if (it == gens_.end()) throw WordError("unknown generator '" + name + "'");
    return it->second;
  }

  Int parse_int() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    std::size_t digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits_start) throw WordError("expected an integer exponent after '^'");
    return Int(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  const GroupSpec& g_;
  const std::string& text_;
  std::size_t pos_ = 0;
  std::map<std::string, Element> gens_;
};

}  // namespace detail

inline Element parse_word(const GroupSpec& g, const std::string& text) {
  return detail::WordParser(g, text).parse();
}

}  // namespace selfcover
