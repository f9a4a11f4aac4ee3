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
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lokit/rule.hpp"
#include "lokit/sim_time.hpp"
#include "lokit/term.hpp"
#include "lokit/world.hpp"

namespace lokit::toolkit {

enum class CorrelationKind { rpc, query };

/// Binds a request to its replies. Rendered as rpc-id(C,n) or query-id(C,n).
struct CorrelationId {
  std::string origin;
  std::int64_t counter = 0;
  CorrelationKind kind = CorrelationKind::rpc;

  Term to_term() const;
  static std::optional<CorrelationId> from_term(const Term& t);
  std::string to_string() const { return to_term().to_string(); }

  friend auto operator<=>(const CorrelationId&, const CorrelationId&) = default;
};

/// Position of a query reply within one server's stream.
struct ReplyTag {
  std::int64_t reply_no = 1;
  bool is_last = false;
};

struct Reply {
  std::string server;
  Term result;
};

enum class Decision { commit, abort };

const char* to_string(Decision d);

/// Application side of the generic rules: the PRODUCE, CONSUME and
/// SOME-POLICY resources plus a request filter.
struct CommHooks {
  /// RPC servers. An exception becomes the reply result err("what").
  std::function<Term(const std::string& server, const CorrelationId&, const Term& params)> produce;
  /// Query servers: the whole reply stream, in order.
  std::function<std::vector<Term>(const std::string& server, const CorrelationId&, const Term& params)>
      produce_stream;
  /// Called once per consumed reply; returning false blocks the consuming rule.
  std::function<bool(const std::string& server, const CorrelationId&, const Term& result)> consume;
  /// Timeout decision over the replies consumed so far for the request.
  std::function<Decision(const std::string& client, const CorrelationId&, std::span<const Reply> replies)>
      some_policy;
  /// Which params this party handles: triggers on the client side, requests
  /// on the server side. Absent means everything.
  std::function<bool(const Term& params)> accepts;
};

struct ClientOptions {
  bool replicated = false;
  /// Timer-controlled when set: initiation spawns timer(C, Id, T).
  std::optional<SimTime> timeout;
  /// Query only: after the first server's last reply stop listening to others.
  bool first_only = false;
};

struct TimerSpec {
  std::string owner;
  CorrelationId correlation;
  SimTime timeout;
};

/// {R1,R3}, {R1_t,R3,R3_t}, {Rr1,Rr3,Rr4} or {Rr1_t,Rr3,Rr4,Rr3_t,Rr4_t}.
RuleSet make_rpc_client_rules(const ClientOptions& options, const CommHooks& hooks);

/// {R2}; the same rule serves replicated deployments.
RuleSet make_rpc_server_rules(const CommHooks& hooks);

/// Plain: Q1,Q3,Q4 (+Q4_0 for empty streams); replicated: Qr1,Qr3..Qr10
/// (+Qr4_0, Qr8_0). Timer-controlled variants swap in Q1_t/Qr1_t and add
/// Q3_t,Q4_t or Qr3_t..Qr6_t.
RuleSet make_query_client_rules(const ClientOptions& options, const CommHooks& hooks);

/// Q2 family: intake, k-th reply, last reply, empty stream.
RuleSet make_query_server_rules(const CommHooks& hooks);

/// {T, Tgc}: the timer agent's rule and the stale-timeout cleanup for ready clients.
RuleSet make_timer_rules();

/// Spawns a timer agent holding timer(owner, correlation, T). `timer_rules`
/// must contain rule T. Throws std::invalid_argument unless T > 0.
AgentId set_timer(World& world, RuleSetId timer_rules, const TimerSpec& spec);

/// commit iff more than half of `total_servers` distinct servers replied.
Decision majority_policy(std::size_t total_servers, std::span<const Reply> replies);
Decision majority_policy(std::size_t total_servers, const std::set<std::string>& servers);

/// commit iff at least one reply arrived.
Decision first_reply_policy(std::span<const Reply> replies);

/// Query reply term for a stream position: msg-reply(S,k,Id,R) or
/// msg-reply(S,last,k,Id,R).
Term query_reply(const std::string& server, ReplyTag tag, const CorrelationId& id, const Term& result);

}  // namespace lokit::toolkit
