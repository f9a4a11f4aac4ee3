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

#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lokit {

enum class TermKind : std::uint8_t { integer = 0, string = 1, variable = 2, compound = 3 };

namespace detail {
struct TermNode;
}

/// An immutable LO resource or rule pattern.
///
/// Compound terms carry a functor symbol and ordered arguments; a compound
/// with no arguments is an atom. Variables may only occur in rule patterns.
/// Copies share structure, so passing Terms by value is cheap.
///
/// Terms are totally ordered: integers < strings < variables < compounds;
/// compounds compare by functor, then arity, then argument-wise. This order
/// is the tie-breaker used everywhere determinism matters.
class Term {
 public:
  /// The atom `nil`.
  Term();

  static Term atom(std::string_view name);
  static Term integer(std::int64_t value);
  static Term string(std::string_view value);
  static Term variable(std::string_view name);
  static Term compound(std::string_view functor, std::vector<Term> args);

  TermKind kind() const;
  bool is_compound() const { return kind() == TermKind::compound; }
  bool is_atom() const { return is_compound() && arity() == 0; }
  bool is_integer() const { return kind() == TermKind::integer; }
  bool is_string() const { return kind() == TermKind::string; }
  bool is_variable() const { return kind() == TermKind::variable; }

  /// Functor of a compound, name of a variable, or contents of a string.
  const std::string& text() const;
  std::int64_t as_integer() const;
  std::span<const Term> args() const;
  std::size_t arity() const { return args().size(); }
  const Term& arg(std::size_t i) const;

  bool is_ground() const;

  /// Canonical prefix form, e.g. `msg-reply(srv1,7,42)`. Parses back with parse_term.
  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const detail::TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::TermNode> node_;
};

/// Ordering key shared by every term with the same kind/functor/arity.
/// Pools use it to find the candidate range for a pattern.
struct Signature {
  TermKind kind;
  std::string_view functor;
  std::size_t arity;
};

Signature signature_of(const Term& t);
std::strong_ordering compare_signature(const Term& t, const Signature& s);

struct TermLess {
  using is_transparent = void;
  bool operator()(const Term& a, const Term& b) const { return a < b; }
  bool operator()(const Term& a, const Signature& s) const { return compare_signature(a, s) < 0; }
  bool operator()(const Signature& s, const Term& b) const { return compare_signature(b, s) > 0; }
};

class TermParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses canonical prefix syntax. Identifiers starting with a lower-case
/// letter are symbols; identifiers starting with an upper-case letter or `_`
/// are variables (each bare `_` is a distinct anonymous variable).
/// `f()` is the atom `f`.
Term parse_term(std::string_view text);

/// Parses a whitespace-separated sequence of terms.
std::vector<Term> parse_terms(std::string_view text);

inline Term operator""_t(const char* text, std::size_t len) {
  return parse_term(std::string_view(text, len));
}

std::string join_terms(std::span<const Term> terms, std::string_view sep = " ");

}  // namespace lokit
