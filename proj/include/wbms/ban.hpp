// Copyright 2026 The wbms Authors
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

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wbms::ban {

// ---------------------------------------------------------------------------
// Terms and statements
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind {
    kPrincipal,
    kKey,
    kNonce,
    kSharedKey,        // left <-name-> right
    kPair,             // (left, right)
    kEncrypted,        // {left}name
    kDoubleEncrypted,  // {{left}name}name
  };

  Kind kind;
  std::string name;  // atom name, or key name for kSharedKey / encryption
  TermPtr left;
  TermPtr right;
};

TermPtr principal(std::string name);
TermPtr key(std::string name);
TermPtr nonce(std::string name);
TermPtr shared_key(std::string p, std::string k, std::string q);
TermPtr pair(TermPtr a, TermPtr b);
TermPtr encrypted(TermPtr body, std::string k);
TermPtr double_encrypted(TermPtr body, std::string k);

struct Statement;
using StatementPtr = std::shared_ptr<const Statement>;

struct Statement {
  enum class Kind {
    kBelieves,  // principal |= inner
    kSees,      // principal <| term
    kSaid,      // principal |~ term
    kFresh,     // fresh(term)
    kFormula,   // a term asserted as a formula, e.g. the key statement P <-K-> Q
  };

  Kind kind;
  std::string principal;
  StatementPtr inner;
  TermPtr term;
};

StatementPtr believes(std::string p, StatementPtr inner);
StatementPtr sees(std::string p, TermPtr t);
StatementPtr said(std::string p, TermPtr t);
StatementPtr fresh(TermPtr t);
StatementPtr formula(TermPtr t);

// ASCII rendering in the input grammar.
std::string to_string(const Term& t);
std::string to_string(const Statement& s);
// Identity key: like to_string but with shared-key principals ordered, since
// P <-K-> Q and Q <-K-> P denote the same fact.
std::string canonical(const Statement& s);
bool same(const Statement& a, const Statement& b);

// Number of nested Believes operators at the head of s.
std::size_t belief_depth(const Statement& s);
inline constexpr std::size_t kMaxBeliefDepth = 6;
inline constexpr std::size_t kMaxTermDepth = 16;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

enum class SymbolKind { kPrincipal, kKey, kNonce };

// Empty table: kinds are inferred from position (left of |=, <|, |~ and
// around <-K-> are principals, after a closing brace or inside <-K-> is a
// key, everything else is a nonce). Non-empty table: every name must be
// declared with a kind that fits its position.
using SymbolTable = std::map<std::string, SymbolKind, std::less<>>;

// Grammar:
//   statement := NAME '|=' (statement | term)
//              | NAME '<|' term | NAME '|~' term | 'fresh' '(' term ')'
//   term      := NAME | NAME '<-' NAME '->' NAME | '(' term {',' term} ')'
//              | '{' term '}' NAME
// Tuples nest to the right; {{t}K}K parses as a double encryption.
// Throws Error(kSyntaxError) naming the column of the offending token.
StatementPtr parse_statement(std::string_view text, const SymbolTable& symbols = {});

struct LabeledStatement {
  std::string id;  // "A3", "M2", "G1.1"
  StatementPtr statement;
};

// Protocol description file. One directive per line, '#' starts a comment:
//   principal NR MN
//   key KM KS
//   nonce chr cht X X'
//   assume NR |= fresh(chr)
//   message 2 NR <| {{(chr, NR <-KM-> MN)}KM}KM
//   goal G1.1 NR |= MN |= NR <-KM-> MN
struct ProtocolSpec {
  SymbolTable symbols;
  std::vector<LabeledStatement> assumptions;  // ids A1, A2, ...
  std::vector<LabeledStatement> messages;     // ids M<n>
  std::vector<LabeledStatement> goals;        // ids as written
};

// Parses directives into spec, so several files can be merged (protocol
// then goals). Errors report the line number.
void parse_spec(std::string_view text, ProtocolSpec& spec);
ProtocolSpec parse_spec(std::string_view text);

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

enum class Rule {
  kMessageMeaning,      // P|=P<-K->Q, P<|{X}K (or {{X}K}K) => P|=Q|~X
  kFreshnessPromotion,  // #(X) => #(X,Y), also under any belief prefix
  kNonceVerification,   // P|=#(X), P|=Q|~X => P|=Q|=X
  kBelief,              // ..|=(X,Y) => ..|=X and ..|=Y, under >= 1 belief
};

std::string_view to_string(Rule r);
std::optional<Rule> parse_rule(std::string_view name);

// All conclusions of the rule obtainable from the premises (in any order).
// Freshness promotion only builds tuples that occur as subterms of the
// premises or the context, which keeps the statement universe finite.
std::vector<StatementPtr> apply_rule(Rule rule, const std::vector<StatementPtr>& premises,
                                     const std::vector<StatementPtr>& context = {});

struct ProofStep {
  std::string id;  // S1, S2, ...
  Rule rule;
  std::vector<std::string> premises;  // ids of assumptions, messages or steps
  StatementPtr conclusion;
};

enum class DeriveStatus { kDerived, kNotDerivable, kDepthExceeded };

std::string_view to_string(DeriveStatus s);

struct GoalResult {
  std::string label;
  StatementPtr goal;
  bool derived = false;
  std::string fact_id;             // id of the fact that matches the goal
  std::vector<std::string> steps;  // step ids in the goal's proof, in order
};

struct DeriveResult {
  DeriveStatus status = DeriveStatus::kNotDerivable;
  std::size_t rounds = 0;
  std::size_t facts_total = 0;
  // Only the steps needed by at least one reached goal, in derivation order.
  std::vector<ProofStep> steps;
  std::vector<GoalResult> goals;
  std::map<std::string, StatementPtr> given;  // assumptions and messages by id

  const ProofStep* step(std::string_view id) const;
  // Rules of the steps proving the goal, in derivation order.
  std::vector<Rule> rule_sequence(std::string_view goal_label) const;
};

// Forward chaining in rounds until every goal is reached, a fixpoint, or
// max_depth rounds. max_depth must be >= 1.
DeriveResult derive(const std::vector<LabeledStatement>& assumptions,
                    const std::vector<LabeledStatement>& messages,
                    const std::vector<LabeledStatement>& goals, std::size_t max_depth = 16);

inline DeriveResult derive(const ProtocolSpec& spec, std::size_t max_depth = 16) {
  return derive(spec.assumptions, spec.messages, spec.goals, max_depth);
}

// Human-readable trace listing.
std::string format_trace(const DeriveResult& result);

}  // namespace wbms::ban
