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

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lokit/term.hpp"

namespace lokit {

class World;
struct AgentState;

/// Variable assignment produced by matching. Small and flat: rules bind a
/// handful of variables, so a vector beats a map here.
class Binding {
 public:
  const Term* find(std::string_view name) const;
  /// Throws std::out_of_range if unbound.
  const Term& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  /// Binds `name`, or checks structural equality if already bound.
  bool bind(std::string_view name, const Term& value);

  std::size_t size() const { return entries_.size(); }
  void truncate(std::size_t n) { entries_.resize(n); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const Binding& a, const Binding& b);

 private:
  std::vector<std::pair<std::string, Term>> entries_;
};

/// One-way matching of `pattern` against ground `value`, extending `binding`.
/// On failure `binding` may hold partial bindings; callers roll back with truncate().
bool match_term(const Term& pattern, const Term& value, Binding& binding);

/// Substitutes bound variables. Unbound variables are left in place.
Term instantiate(const Term& pattern, const Binding& binding);

/// Ground multiset of resources, iterated in canonical term order.
class Pool {
 public:
  using Storage = std::multiset<Term, TermLess>;
  using const_iterator = Storage::const_iterator;

  Pool() = default;
  Pool(std::initializer_list<Term> terms);
  explicit Pool(std::span<const Term> terms);

  /// Throws std::invalid_argument for non-ground terms.
  void insert(const Term& t);
  /// Removes one copy; returns false if absent.
  bool erase_one(const Term& t);
  std::size_t count(const Term& t) const { return terms_.count(t); }
  bool contains(const Term& t) const { return terms_.find(t) != terms_.end(); }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  void clear() { terms_.clear(); }

  /// Every element sharing the signature of `pattern`; the whole pool for a
  /// bare variable pattern.
  std::pair<const_iterator, const_iterator> candidates(const Term& pattern) const;

  const_iterator begin() const { return terms_.begin(); }
  const_iterator end() const { return terms_.end(); }
  std::vector<Term> to_vector() const { return {terms_.begin(), terms_.end()}; }

  friend bool operator==(const Pool& a, const Pool& b) { return a.terms_ == b.terms_; }

 private:
  Storage terms_;
};

/// Context handed to guard hooks.
struct GuardContext {
  World* world = nullptr;
  const AgentState* agent = nullptr;
};

/// A small-capital resource of the generic rules (GET-UNIQUE-RPC-ID, PRODUCE,
/// CONSUME, WAIT, SOME-POLICY, ...). It never touches pools; it either fails
/// or returns the binding, possibly extended.
///
/// Effectful guards call into the host (id counters, application hooks) and
/// are only evaluated once a complete candidate assignment has passed every
/// pure guard. They must therefore come after all pure guards in a rule.
struct GuardHook {
  using Evaluator = std::function<std::optional<Binding>(const Binding&, GuardContext&)>;

  std::string id;
  Evaluator evaluate;
  bool effectful = false;
  /// Variables this guard may introduce; used by Rule validation.
  std::vector<std::string> binds;
};

class RuleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A rewrite rule: consume every lhs pattern all-or-nothing (par), run the
/// guards, broadcast `emits` (^), and continue as one agent per rhs group
/// (with). No rhs groups means terminate.
struct Rule {
  std::string name;
  std::vector<Term> lhs;
  std::vector<GuardHook> guards;
  std::vector<std::vector<Term>> rhs_groups;
  std::vector<Term> emits;

  bool terminates() const { return rhs_groups.empty(); }

  /// Checks variable safety and guard ordering. Throws RuleError.
  void validate() const;
};

class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  /// Validates the rule; throws RuleError on a duplicate name.
  RuleSet& add(Rule rule);
  RuleSet& append(const RuleSet& other);

  const std::vector<Rule>& rules() const { return rules_; }
  const Rule* find(std::string_view name) const;
  std::vector<std::string> rule_names() const;
  std::size_t size() const { return rules_.size(); }

 private:
  std::string name_;
  std::vector<Rule> rules_;
};

/// Builds a rule from prefix-syntax strings; handy for rule factories and tests.
Rule make_rule(std::string name, std::string_view lhs, std::vector<GuardHook> guards,
               std::vector<std::string_view> rhs_groups, std::string_view emits = {});

}  // namespace lokit
