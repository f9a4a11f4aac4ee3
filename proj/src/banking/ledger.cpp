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

#include <algorithm>

#include "lokit/banking.hpp"

namespace lokit::banking {

namespace {

bool is_symbol(const Term& t) { return t.is_atom(); }

bool is_amount(const Term& t) { return t.is_integer() && t.as_integer() > 0; }

Term ok(const Account& a) { return Term::compound("ok", {Term::integer(a.balance), Term::integer(a.version)}); }

Term err(std::string_view reason) { return Term::compound("err", {Term::atom(reason)}); }

bool credits(OpKind k) { return k == OpKind::deposit || k == OpKind::transfer_in; }

bool debits(OpKind k) { return k == OpKind::withdraw || k == OpKind::transfer_out; }

EntryKind entry_kind(OpKind k) {
  switch (k) {
    case OpKind::deposit:
      return EntryKind::deposit;
    case OpKind::withdraw:
      return EntryKind::withdraw;
    case OpKind::transfer_in:
      return EntryKind::transfer_in;
    case OpKind::transfer_out:
      return EntryKind::transfer_out;
    case OpKind::create:
      return EntryKind::create;
    case OpKind::remove:
      return EntryKind::remove;
    case OpKind::undo:
      break;
  }
  throw BankError("undo has no statement kind");
}

// Kind recorded when a credit/debit is compensated by its inverse.
EntryKind inverse_kind(OpKind k) {
  switch (k) {
    case OpKind::deposit:
      return EntryKind::withdraw;
    case OpKind::withdraw:
      return EntryKind::deposit;
    case OpKind::transfer_in:
      return EntryKind::transfer_out;
    case OpKind::transfer_out:
      return EntryKind::transfer_in;
    default:
      throw BankError("no inverse entry");
  }
}

struct NamedOp {
  const char* name;
  OpKind kind;
};

constexpr NamedOp kOps[] = {{"deposit", OpKind::deposit},           {"withdraw", OpKind::withdraw},
                            {"transfer-in", OpKind::transfer_in},   {"transfer-out", OpKind::transfer_out},
                            {"create", OpKind::create},             {"delete", OpKind::remove},
                            {"undo", OpKind::undo}};

}  // namespace

const char* to_string(EntryKind k) {
  switch (k) {
    case EntryKind::deposit:
      return "deposit";
    case EntryKind::withdraw:
      return "withdraw";
    case EntryKind::transfer_in:
      return "transfer-in";
    case EntryKind::transfer_out:
      return "transfer-out";
    case EntryKind::overdraft_attempt:
      return "overdraft-attempt";
    case EntryKind::create:
      return "create";
    case EntryKind::remove:
      return "delete";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pending:
      return "pending";
    case Outcome::committed:
      return "committed";
    case Outcome::aborted:
      return "aborted";
    case Outcome::aborted_overdraft:
      return "aborted-overdraft";
    case Outcome::read:
      return "read";
    case Outcome::rejected:
      return "rejected";
  }
  return "?";
}

bool same_content(const Ledger& a, const Ledger& b) {
  if (a.accounts.size() != b.accounts.size()) return false;
  for (auto ia = a.accounts.begin(), ib = b.accounts.begin(); ia != a.accounts.end(); ++ia, ++ib) {
    const Account& x = ia->second;
    const Account& y = ib->second;
    if (ia->first != ib->first || x.balance != y.balance || x.version != y.version) return false;
    if (x.statements.size() != y.statements.size()) return false;
    for (std::size_t i = 0; i < x.statements.size(); ++i) {
      const StatementEntry& s = x.statements[i];
      const StatementEntry& t = y.statements[i];
      if (s.kind != t.kind || s.amount != t.amount || s.resulting_balance != t.resulting_balance) return false;
    }
  }
  return true;
}

Term Operation::to_term() const {
  const char* name = nullptr;
  for (const auto& op : kOps) {
    if (op.kind == kind) name = op.name;
  }
  if (kind == OpKind::undo) return Term::compound(name, {Term::atom(bank), parse_term(target)});
  if (kind == OpKind::create || kind == OpKind::remove) {
    return Term::compound(name, {Term::atom(bank), Term::atom(account)});
  }
  return Term::compound(name, {Term::atom(bank), Term::atom(account), Term::integer(amount)});
}

Operation Operation::from_term(const Term& t) {
  if (!t.is_compound() || t.arity() < 2 || !is_symbol(t.arg(0))) {
    throw BankError("not a bank write: " + t.to_string());
  }
  const NamedOp* found = nullptr;
  for (const auto& op : kOps) {
    if (t.text() == op.name) found = &op;
  }
  if (found == nullptr) throw BankError("not a bank write: " + t.to_string());
  Operation op;
  op.kind = found->kind;
  op.bank = t.arg(0).text();
  if (op.kind == OpKind::undo) {
    if (t.arity() != 2 || !t.arg(1).is_ground()) throw BankError("malformed undo: " + t.to_string());
    op.target = t.arg(1).to_string();
    return op;
  }
  if (!is_symbol(t.arg(1))) throw BankError("malformed account in " + t.to_string());
  op.account = t.arg(1).text();
  if (op.kind == OpKind::create || op.kind == OpKind::remove) {
    if (t.arity() != 2) throw BankError("malformed " + t.to_string());
    return op;
  }
  if (t.arity() != 3 || !is_amount(t.arg(2))) throw BankError("malformed " + t.to_string());
  op.amount = t.arg(2).as_integer();
  return op;
}

void validate_trigger(const Term& t) {
  auto fail = [&t]() { throw BankError("not a banking trigger: " + t.to_string()); };
  if (!t.is_compound()) fail();
  const std::string& f = t.text();
  std::size_t n = t.arity();
  auto symbols = [&t](std::initializer_list<std::size_t> idx) {
    return std::all_of(idx.begin(), idx.end(), [&t](std::size_t i) { return t.arg(i).is_atom(); });
  };
  if (f == "look-up") {
    if (n > 2 || (n >= 1 && !symbols({0})) || (n == 2 && !symbols({1}))) fail();
  } else if (f == "deposit" || f == "withdraw") {
    if (n != 3 || !symbols({0, 1}) || !is_amount(t.arg(2))) fail();
  } else if (f == "transfer") {
    if (n != 5 || !symbols({0, 1, 3, 4}) || !is_amount(t.arg(2))) fail();
  } else if (f == "create" || f == "delete") {
    if (n != 2 || !symbols({0, 1})) fail();
  } else if (f == "suspend" || f == "resume") {
    if (n != 1 || !symbols({0})) fail();
  } else {
    fail();
  }
}

Replica::Replica(std::string name, std::string bank) : name_(std::move(name)) {
  ledger_.replica_of = std::move(bank);
}

void Replica::seed_account(const std::string& account, std::int64_t balance) {
  if (balance < 0) throw BankError("negative opening balance for " + account);
  Account a;
  a.bank = ledger_.replica_of;
  a.id = account;
  a.balance = balance;
  ledger_.accounts[account] = std::move(a);
}

Term Replica::apply(const Term& params, const std::string& correlation) {
  Operation op;
  try {
    op = Operation::from_term(params);
  } catch (const BankError&) {
    return err("unknown-request");
  }
  return apply(op, correlation);
}

Term Replica::apply(const Operation& op, const std::string& correlation) {
  if (op.bank != bank()) return err("wrong-bank");
  if (op.kind == OpKind::undo) return undo(op.target, correlation);
  if (tombstones_.count(correlation)) return err("cancelled");
  if (applied_.count(correlation)) return err("conflict");
  return apply_write(op, correlation);
}

Term Replica::apply_write(const Operation& op, const std::string& correlation) {
  auto it = ledger_.accounts.find(op.account);
  if (op.kind == OpKind::create) {
    if (it != ledger_.accounts.end()) return err("exists");
    Account a;
    a.bank = bank();
    a.id = op.account;
    a.version = 1;
    a.statements.push_back({EntryKind::create, 0, correlation, 0});
    applied_[correlation] = {op, op.account, std::nullopt, 1, 1};
    return ok(ledger_.accounts[op.account] = std::move(a));
  }
  if (it == ledger_.accounts.end()) return err("no-account");
  Account& a = it->second;
  if (op.kind == OpKind::remove) {
    if (a.balance != 0) return err("nonzero-balance");
    Term reply = Term::compound("ok", {Term::integer(0), Term::integer(a.version + 1)});
    applied_[correlation] = {op, op.account, a, 0, 0};
    ledger_.accounts.erase(it);
    return reply;
  }
  if (debits(op.kind) && a.balance < op.amount) {
    a.statements.push_back({EntryKind::overdraft_attempt, op.amount, correlation, a.balance});
    return err("overdraft");
  }
  Applied rec{op, op.account, a, 0, 0};
  a.balance += credits(op.kind) ? op.amount : -op.amount;
  a.version += 1;
  a.statements.push_back({entry_kind(op.kind), op.amount, correlation, a.balance});
  rec.version_after = a.version;
  rec.entries_after = a.statements.size();
  applied_[correlation] = std::move(rec);
  return ok(a);
}

Term Replica::undo(const std::string& target, const std::string& correlation) {
  auto it = applied_.find(target);
  if (it == applied_.end()) {
    // Not applied (yet): make sure a late copy of the request is refused.
    tombstones_.insert(target);
    return Term::atom("noop");
  }
  Applied rec = std::move(it->second);
  applied_.erase(it);
  tombstones_.insert(target);

  auto acc = ledger_.accounts.find(rec.account);
  bool untouched = rec.op.kind == OpKind::remove
                       ? acc == ledger_.accounts.end()
                       : acc != ledger_.accounts.end() && acc->second.version == rec.version_after &&
                             acc->second.statements.size() == rec.entries_after;
  if (!untouched) return inverse(rec, correlation);
  if (rec.before) {
    ledger_.accounts[rec.account] = *rec.before;
    return ok(*rec.before);
  }
  ledger_.accounts.erase(acc);
  return Term::atom("noop");
}

Term Replica::inverse(const Applied& rec, const std::string& correlation) {
  auto acc = ledger_.accounts.find(rec.account);
  switch (rec.op.kind) {
    case OpKind::create:
      if (acc == ledger_.accounts.end() || acc->second.balance != 0) return err("conflict");
      ledger_.accounts.erase(acc);
      return Term::atom("noop");
    case OpKind::remove:
      if (acc != ledger_.accounts.end() || !rec.before) return err("conflict");
      ledger_.accounts[rec.account] = *rec.before;
      return ok(*rec.before);
    default:
      break;
  }
  if (acc == ledger_.accounts.end()) return err("conflict");
  Account& a = acc->second;
  if (credits(rec.op.kind) && a.balance < rec.op.amount) return err("conflict");
  a.balance += credits(rec.op.kind) ? -rec.op.amount : rec.op.amount;
  a.version += 1;
  a.statements.push_back({inverse_kind(rec.op.kind), rec.op.amount, correlation, a.balance});
  return ok(a);
}

std::vector<Term> Replica::statements(const Term& query) const {
  std::vector<Term> out;
  if (!query.is_compound() || query.text() != "look-up" || query.arity() == 0) return out;
  if (query.arg(0).text() != bank()) return out;
  if (query.arity() == 2) {
    auto it = ledger_.accounts.find(query.arg(1).text());
    if (it != ledger_.accounts.end()) out.push_back(statement_term(it->second));
    return out;
  }
  for (const auto& [id, account] : ledger_.accounts) out.push_back(statement_term(account));
  return out;
}

Term statement_term(const Account& account) {
  std::vector<Term> history;
  history.reserve(account.statements.size());
  for (const StatementEntry& e : account.statements) {
    history.push_back(Term::compound("entry", {Term::atom(to_string(e.kind)), Term::integer(e.amount),
                                               Term::integer(e.resulting_balance)}));
  }
  return Term::compound("statement", {Term::atom(account.id), Term::integer(account.balance),
                                      Term::integer(account.version), Term::compound("history", std::move(history))});
}

}  // namespace lokit::banking
