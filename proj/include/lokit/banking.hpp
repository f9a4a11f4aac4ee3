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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lokit/simnet.hpp"
#include "lokit/term.hpp"
#include "lokit/toolkit.hpp"

namespace lokit::banking {

enum class EntryKind { deposit, withdraw, transfer_in, transfer_out, overdraft_attempt, create, remove };

/// Wire spelling: deposit, withdraw, transfer-in, transfer-out,
/// overdraft-attempt, create, delete.
const char* to_string(EntryKind k);

struct StatementEntry {
  EntryKind kind = EntryKind::deposit;
  std::int64_t amount = 0;
  std::string correlation;
  std::int64_t resulting_balance = 0;

  friend bool operator==(const StatementEntry&, const StatementEntry&) = default;
};

struct Account {
  std::string bank;
  std::string id;
  std::int64_t balance = 0;
  std::vector<StatementEntry> statements;
  std::int64_t version = 0;

  friend bool operator==(const Account&, const Account&) = default;
};

struct Ledger {
  std::string replica_of;
  std::map<std::string, Account> accounts;

  friend bool operator==(const Ledger&, const Ledger&) = default;
};

/// Same balances, versions and statement histories; correlation ids ignored.
bool same_content(const Ledger& a, const Ledger& b);

class BankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mutating requests carried by the RPC rules.
enum class OpKind { deposit, withdraw, transfer_in, transfer_out, create, remove, undo };

struct Operation {
  OpKind kind = OpKind::deposit;
  std::string bank;
  std::string account;
  std::int64_t amount = 0;
  /// undo only: correlation of the request to roll back.
  std::string target;

  /// deposit(B,A,Am), transfer-in(B,A,Am), create(B,A), undo(B,Id), ...
  Term to_term() const;
  /// Throws BankError for anything that is not a well-formed write.
  static Operation from_term(const Term& t);
};

/// One server's replica of a bank. Replies are ok(Balance,Version) or
/// err(no-account | overdraft | exists | nonzero-balance | cancelled | conflict | unknown-request).
class Replica {
 public:
  Replica(std::string name, std::string bank);

  const std::string& name() const { return name_; }
  const std::string& bank() const { return ledger_.replica_of; }
  const Ledger& ledger() const { return ledger_; }
  /// Test fixtures and initial setup: version 0, no history.
  void seed_account(const std::string& account, std::int64_t balance);

  Term apply(const Operation& op, const std::string& correlation);
  Term apply(const Term& params, const std::string& correlation);

  /// look-up(B) or look-up(B,A): one statement term per matching account.
  std::vector<Term> statements(const Term& query) const;

 private:
  struct Applied {
    Operation op;
    std::string account;
    std::optional<Account> before;
    std::int64_t version_after = 0;
    std::size_t entries_after = 0;
  };

  Term apply_write(const Operation& op, const std::string& correlation);
  Term undo(const std::string& target, const std::string& correlation);
  Term inverse(const Applied& rec, const std::string& correlation);

  std::string name_;
  Ledger ledger_;
  std::map<std::string, Applied> applied_;
  std::set<std::string> tombstones_;
};

/// statement(A, Balance, Version, history(entry(kind, amount, resulting)...)).
Term statement_term(const Account& account);

enum class Outcome { pending, committed, aborted, aborted_overdraft, read, rejected };
const char* to_string(Outcome o);

/// One client task from the banking vocabulary and how it ended.
struct OpRecord {
  std::string client;
  Term request;
  Outcome outcome = Outcome::pending;
  SimTime issued;
  SimTime finished;
  /// Statement terms of the committed read (first replying server per bank).
  std::vector<Term> results;
  /// Query replies consumed by catch agents.
  std::size_t absorbed = 0;
  /// Compensations that could not reach a majority.
  std::size_t failed_compensations = 0;
};

struct BankSpec {
  std::string name;
  int replicas = 1;
  std::vector<std::pair<std::string, std::int64_t>> accounts;
};

struct DeploymentConfig {
  std::vector<BankSpec> banks;
  std::vector<std::string> clients;
  SimTime timeout = SimTime::seconds(5);
};

/// Builds the replicated bank world inside a Simulation: replica servers
/// `<bank>-r<i>` running the RPC and query server rules, and clients running
/// the replicated, timer-controlled client rules. Triggers scheduled for a
/// client go through a per-client task queue; each task runs to its timeout
/// decision before the next starts.
class Deployment {
 public:
  Deployment(simnet::Simulation& sim, DeploymentConfig config);
  ~Deployment();
  Deployment(const Deployment&) = delete;
  Deployment& operator=(const Deployment&) = delete;

  /// Queues a banking trigger for `client` now. Throws BankError for unknown
  /// clients or malformed triggers.
  void submit(const std::string& client, const Term& trigger);

  const DeploymentConfig& config() const { return config_; }
  const std::vector<OpRecord>& records() const { return records_; }
  std::vector<const Replica*> replicas() const;
  std::vector<const Replica*> replicas_of(const std::string& bank) const;
  Replica& replica(const std::string& name);
  bool idle() const;

  static std::string replica_name(const std::string& bank, int index);

 private:
  struct Driver;
  struct ClientState;

  simnet::Simulation& sim_;
  DeploymentConfig config_;
  std::map<std::string, std::unique_ptr<Replica>> replicas_;
  std::map<std::string, std::size_t> replica_counts_;
  std::vector<OpRecord> records_;
  std::unique_ptr<Driver> driver_;
};

/// Trigger validation shared with the scenario parser and the oracle.
/// Throws BankError when `t` is not in the trigger vocabulary or Am <= 0.
void validate_trigger(const Term& t);

}  // namespace lokit::banking
