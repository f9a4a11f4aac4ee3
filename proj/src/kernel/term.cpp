// Copyright 2026 The LoKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lokit/term.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace lokit {

namespace detail {

struct TermNode {
  TermKind kind = TermKind::compound;
  std::string text;
  std::int64_t value = 0;
  std::vector<Term> args;
  bool ground = true;
};

}  // namespace detail

namespace {

using detail::TermNode;

const std::shared_ptr<const TermNode>& nil_node() {
  static const auto node = std::make_shared<const TermNode>(TermNode{TermKind::compound, "nil", 0, {}, true});
  return node;
}

bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// A symbol prints bare only if it would lex back as the same symbol.
bool needs_quotes(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s.front()))) return true;
  return !std::all_of(s.begin(), s.end(), is_symbol_char);
}

void write_quoted(std::ostringstream& out, const std::string& s, char quote) {
  out << quote;
  for (char c : s) {
    if (c == quote || c == '\\') out << '\\';
    out << c;
  }
  out << quote;
}

void write_term(std::ostringstream& out, const Term& t) {
  switch (t.kind()) {
    case TermKind::integer:
      out << t.as_integer();
      return;
    case TermKind::string:
      write_quoted(out, t.text(), '"');
      return;
    case TermKind::variable:
      out << t.text();
      return;
    case TermKind::compound:
      if (needs_quotes(t.text())) {
        write_quoted(out, t.text(), '\'');
      } else {
        out << t.text();
      }
      if (t.arity() > 0) {
        out << '(';
        for (std::size_t i = 0; i < t.arity(); ++i) {
          if (i > 0) out << ',';
          write_term(out, t.arg(i));
        }
        out << ')';
      }
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse_one() {
    Term t = term();
    skip_ws();
    return t;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << what << " at offset " << pos_ << " in '" << text_ << "'";
    throw TermParseError(msg.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_symbol_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted(char quote) {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      if (text_[pos_] == '\\') {
        ++pos_;
        if (pos_ >= text_.size()) fail("dangling escape");
      }
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail("unterminated quote");
    ++pos_;
    return out;
  }

  Term term() {
    skip_ws();
    char c = peek();
    if (c == '\0') fail("expected term");
    if (c == '"') return Term::string(quoted('"'));
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      std::size_t start = pos_;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::int64_t v = 0;
      auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
      if (res.ec != std::errc()) fail("integer out of range");
      if (pos_ < text_.size() && is_symbol_char(text_[pos_])) fail("malformed integer");
      return Term::integer(v);
    }
    if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
      std::string name = identifier();
      if (name == "_") name = "_#" + std::to_string(anon_++);
      return Term::variable(name);
    }
    std::string functor;
    if (c == '\'') {
      functor = quoted('\'');
    } else if (std::islower(static_cast<unsigned char>(c))) {
      functor = identifier();
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    skip_ws();
    std::vector<Term> args;
    if (peek() == '(') {
      ++pos_;
      skip_ws();
      if (peek() == ')') {
        ++pos_;
      } else {
        while (true) {
          args.push_back(term());
          skip_ws();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          if (peek() == ')') {
            ++pos_;
            break;
          }
          fail("expected ',' or ')'");
        }
      }
    }
    return Term::compound(functor, std::move(args));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int anon_ = 0;
};

int kind_rank(TermKind k) { return static_cast<int>(k); }

}  // namespace

Term::Term() : node_(nil_node()) {}

Term Term::atom(std::string_view name) { return compound(name, {}); }

Term Term::integer(std::int64_t value) {
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::integer, {}, value, {}, true}));
}

Term Term::string(std::string_view value) {
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::string, std::string(value), 0, {}, true}));
}

Term Term::variable(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("variable name must not be empty");
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::variable, std::string(name), 0, {}, false}));
}

Term Term::compound(std::string_view functor, std::vector<Term> args) {
  if (functor.empty()) throw std::invalid_argument("functor must not be empty");
  bool ground = std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
  return Term(std::make_shared<const TermNode>(
      TermNode{TermKind::compound, std::string(functor), 0, std::move(args), ground}));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::text() const { return node_->text; }

std::int64_t Term::as_integer() const {
  if (node_->kind != TermKind::integer) throw std::logic_error("not an integer: " + to_string());
  return node_->value;
}

std::span<const Term> Term::args() const { return node_->args; }

const Term& Term::arg(std::size_t i) const {
  if (i >= node_->args.size()) throw std::out_of_range("argument index out of range in " + to_string());
  return node_->args[i];
}

bool Term::is_ground() const { return node_->ground; }

std::string Term::to_string() const {
  std::ostringstream out;
  write_term(out, *this);
  return out.str();
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = kind_rank(x.kind) <=> kind_rank(y.kind); c != 0) return c;
  switch (x.kind) {
    case TermKind::integer:
      return x.value <=> y.value;
    case TermKind::string:
    case TermKind::variable:
      return x.text.compare(y.text) <=> 0;
    case TermKind::compound: {
      if (auto c = x.text.compare(y.text) <=> 0; c != 0) return c;
      if (auto c = x.args.size() <=> y.args.size(); c != 0) return c;
      for (std::size_t i = 0; i < x.args.size(); ++i) {
        if (auto c = x.args[i] <=> y.args[i]; c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

Signature signature_of(const Term& t) {
  if (t.is_compound()) return {t.kind(), t.text(), t.arity()};
  return {t.kind(), {}, 0};
}

std::strong_ordering compare_signature(const Term& t, const Signature& s) {
  if (auto c = kind_rank(t.kind()) <=> kind_rank(s.kind); c != 0) return c;
  if (!t.is_compound()) return std::strong_ordering::equal;
  if (auto c = std::string_view(t.text()).compare(s.functor) <=> 0; c != 0) return c;
  return t.arity() <=> s.arity;
}

Term parse_term(std::string_view text) {
  Parser p(text);
  Term t = p.parse_one();
  if (!p.at_end()) throw TermParseError("trailing input after term in '" + std::string(text) + "'");
  return t;
}

std::vector<Term> parse_terms(std::string_view text) {
  Parser p(text);
  std::vector<Term> out;
  while (!p.at_end()) out.push_back(p.parse_one());
  return out;
}

std::string join_terms(std::span<const Term> terms, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out.append(sep);
    out += terms[i].to_string();
  }
  return out;
}

}  // namespace lokit
