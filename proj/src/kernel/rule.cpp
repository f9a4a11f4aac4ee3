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

#include "lokit/rule.hpp"

#include <algorithm>

namespace lokit {

const Term* Binding::find(std::string_view name) const {
  for (const auto& [k, v] : entries_) {
    if (k == name) return &v;
  }
  return nullptr;
}

const Term& Binding::at(std::string_view name) const {
  if (const Term* t = find(name)) return *t;
  throw std::out_of_range("unbound variable " + std::string(name));
}

bool Binding::bind(std::string_view name, const Term& value) {
  if (const Term* t = find(name)) return *t == value;
  entries_.emplace_back(std::string(name), value);
  return true;
}

bool operator==(const Binding& a, const Binding& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const auto& kv) {
    const Term* other = b.find(kv.first);
    return other != nullptr && *other == kv.second;
  });
}

bool match_term(const Term& pattern, const Term& value, Binding& binding) {
  switch (pattern.kind()) {
    case TermKind::variable:
      return binding.bind(pattern.text(), value);
    case TermKind::integer:
    case TermKind::string:
      return pattern == value;
    case TermKind::compound: {
      if (pattern.is_ground()) return pattern == value;
      if (!value.is_compound() || pattern.text() != value.text() || pattern.arity() != value.arity()) {
        return false;
      }
      for (std::size_t i = 0; i < pattern.arity(); ++i) {
        if (!match_term(pattern.arg(i), value.arg(i), binding)) return false;
      }
      return true;
    }
  }
  return false;
}

Term instantiate(const Term& pattern, const Binding& binding) {
  if (pattern.is_ground()) return pattern;
  if (pattern.is_variable()) {
    const Term* t = binding.find(pattern.text());
    return t ? *t : pattern;
  }
  std::vector<Term> args;
  args.reserve(pattern.arity());
  for (const Term& a : pattern.args()) args.push_back(instantiate(a, binding));
  return Term::compound(pattern.text(), std::move(args));
}

Pool::Pool(std::initializer_list<Term> terms) {
  for (const Term& t : terms) insert(t);
}

Pool::Pool(std::span<const Term> terms) {
  for (const Term& t : terms) insert(t);
}

void Pool::insert(const Term& t) {
  if (!t.is_ground()) throw std::invalid_argument("pool resources must be ground: " + t.to_string());
  terms_.insert(t);
}

bool Pool::erase_one(const Term& t) {
  auto it = terms_.find(t);
  if (it == terms_.end()) return false;
  terms_.erase(it);
  return true;
}

std::pair<Pool::const_iterator, Pool::const_iterator> Pool::candidates(const Term& pattern) const {
  if (pattern.is_variable()) return {terms_.begin(), terms_.end()};
  return terms_.equal_range(signature_of(pattern));
}

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_variable()) {
    out.insert(t.text());
    return;
  }
  for (const Term& a : t.args()) collect_vars(a, out);
}

}  // namespace

void Rule::validate() const {
  if (name.empty()) throw RuleError("rule without a name");
  std::set<std::string> bound;
  for (const Term& t : lhs) collect_vars(t, bound);
  bool seen_effectful = false;
  for (const GuardHook& g : guards) {
    if (!g.evaluate) throw RuleError(name + ": guard " + g.id + " has no evaluator");
    if (g.effectful) {
      seen_effectful = true;
    } else if (seen_effectful) {
      throw RuleError(name + ": pure guard " + g.id + " follows an effectful guard");
    }
    bound.insert(g.binds.begin(), g.binds.end());
  }
  std::set<std::string> used;
  for (const auto& group : rhs_groups) {
    for (const Term& t : group) collect_vars(t, used);
  }
  for (const Term& t : emits) collect_vars(t, used);
  for (const std::string& v : used) {
    if (!bound.count(v)) throw RuleError(name + ": variable " + v + " is not bound by lhs or a guard");
  }
}

RuleSet& RuleSet::add(Rule rule) {
  rule.validate();
  if (find(rule.name)) throw RuleError("duplicate rule name " + rule.name + " in rule set " + name_);
  rules_.push_back(std::move(rule));
  return *this;
}

RuleSet& RuleSet::append(const RuleSet& other) {
  for (const Rule& r : other.rules()) add(r);
  return *this;
}

const Rule* RuleSet::find(std::string_view name) const {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const Rule& r) { return r.name == name; });
  return it == rules_.end() ? nullptr : &*it;
}

std::vector<std::string> RuleSet::rule_names() const {
  std::vector<std::string> out;
  out.reserve(rules_.size());
  for (const Rule& r : rules_) out.push_back(r.name);
  return out;
}

Rule make_rule(std::string name, std::string_view lhs, std::vector<GuardHook> guards,
               std::vector<std::string_view> rhs_groups, std::string_view emits) {
  Rule r;
  r.name = std::move(name);
  r.lhs = parse_terms(lhs);
  r.guards = std::move(guards);
  for (std::string_view g : rhs_groups) r.rhs_groups.push_back(parse_terms(g));
  r.emits = parse_terms(emits);
  return r;
}

}  // namespace lokit
