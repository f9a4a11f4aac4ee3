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

#include "lokit/scenario.hpp"

namespace lokit::cli {

namespace {

using banking::Account;
using banking::EntryKind;
using banking::Ledger;
using banking::Outcome;

class Oracle {
 public:
  explicit Oracle(const std::vector<banking::BankSpec>& banks) {
    for (const auto& b : banks) {
      order_.push_back(b.name);
      Ledger& l = result_.ledgers[b.name];
      l.replica_of = b.name;
      for (const auto& [id, balance] : b.accounts) {
        Account a;
        a.bank = b.name;
        a.id = id;
        a.balance = balance;
        l.accounts[id] = a;
      }
    }
  }

  void run(const Term& t) {
    std::vector<Term> read;
    Outcome o = apply(t, read);
    result_.outcomes.push_back(o);
    result_.reads.push_back(std::move(read));
  }

  OracleResult take() { return std::move(result_); }

 private:
  Account* find(const Term& bank, const Term& account) {
    auto l = result_.ledgers.find(bank.text());
    if (l == result_.ledgers.end()) return nullptr;
    auto a = l->second.accounts.find(account.text());
    return a == l->second.accounts.end() ? nullptr : &a->second;
  }

  bool known(const Term& bank) const { return result_.ledgers.count(bank.text()) > 0; }

  static void post(Account& a, EntryKind kind, std::int64_t amount) {
    a.balance += (kind == EntryKind::deposit || kind == EntryKind::transfer_in) ? amount : -amount;
    a.version += 1;
    a.statements.push_back({kind, amount, {}, a.balance});
  }

  Outcome apply(const Term& t, std::vector<Term>& read) {
    const std::string& f = t.text();
    if (f == "look-up") {
      for (const std::string& name : order_) {
        if (t.arity() >= 1 && t.arg(0).text() != name) continue;
        for (const auto& [id, a] : result_.ledgers[name].accounts) {
          if (t.arity() == 2 && t.arg(1).text() != id) continue;
          read.push_back(banking::statement_term(a));
        }
      }
      return Outcome::read;
    }
    if (f == "suspend" || f == "resume") return Outcome::rejected;
    if (!known(t.arg(0))) return Outcome::aborted;

    if (f == "create") {
      if (find(t.arg(0), t.arg(1)) != nullptr) return Outcome::aborted;
      Account a;
      a.bank = t.arg(0).text();
      a.id = t.arg(1).text();
      a.version = 1;
      a.statements.push_back({EntryKind::create, 0, {}, 0});
      result_.ledgers[a.bank].accounts[a.id] = a;
      return Outcome::committed;
    }
    Account* a = find(t.arg(0), t.arg(1));
    if (f == "delete") {
      if (a == nullptr || a->balance != 0) return Outcome::aborted;
      result_.ledgers[t.arg(0).text()].accounts.erase(t.arg(1).text());
      return Outcome::committed;
    }
    std::int64_t amount = t.arg(2).as_integer();
    if (f == "deposit") {
      if (a == nullptr) return Outcome::aborted;
      post(*a, EntryKind::deposit, amount);
      return Outcome::committed;
    }
    if (f == "withdraw" || f == "transfer") {
      bool transfer = f == "transfer";
      if (transfer && !known(t.arg(3))) return Outcome::aborted;
      if (a == nullptr) return Outcome::aborted;
      if (a->balance < amount) {
        a->statements.push_back({EntryKind::overdraft_attempt, amount, {}, a->balance});
        return Outcome::aborted_overdraft;
      }
      if (!transfer) {
        post(*a, EntryKind::withdraw, amount);
        return Outcome::committed;
      }
      Account before = *a;
      post(*a, EntryKind::transfer_out, amount);
      Account* target = find(t.arg(3), t.arg(4));
      if (target == nullptr) {
        *a = before;
        return Outcome::aborted;
      }
      post(*target, EntryKind::transfer_in, amount);
      return Outcome::committed;
    }
    return Outcome::rejected;
  }

  std::vector<std::string> order_;
  OracleResult result_;
};

}  // namespace

OracleResult replay_oracle(const std::vector<banking::BankSpec>& banks, const std::vector<Term>& schedule) {
  Oracle oracle(banks);
  for (const Term& t : schedule) oracle.run(t);
  return oracle.take();
}

}  // namespace lokit::cli
