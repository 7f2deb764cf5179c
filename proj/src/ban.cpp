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

#include "wbms/ban.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "wbms/error.hpp"

namespace wbms::ban {

// ---------------------------------------------------------------------------
// Construction and rendering
// ---------------------------------------------------------------------------

namespace {
TermPtr make_term(Term::Kind kind, std::string name, TermPtr l = nullptr, TermPtr r = nullptr) {
  return std::make_shared<const Term>(Term{kind, std::move(name), std::move(l), std::move(r)});
}

StatementPtr make_statement(Statement::Kind kind, std::string p, StatementPtr inner,
                            TermPtr term) {
  return std::make_shared<const Statement>(
      Statement{kind, std::move(p), std::move(inner), std::move(term)});
}

std::size_t term_depth(const Term& t) {
  std::size_t d = 0;
  if (t.left) d = std::max(d, term_depth(*t.left));
  if (t.right) d = std::max(d, term_depth(*t.right));
  return d + 1;
}

void render(const Term& t, bool canonical_form, std::string& out) {
  switch (t.kind) {
    case Term::Kind::kPrincipal:
    case Term::Kind::kKey:
    case Term::Kind::kNonce:
      out += t.name;
      return;
    case Term::Kind::kSharedKey: {
      const std::string* a = &t.left->name;
      const std::string* b = &t.right->name;
      if (canonical_form && *b < *a) std::swap(a, b);
      out += *a + " <-" + t.name + "-> " + *b;
      return;
    }
    case Term::Kind::kPair:
      out += '(';
      render(*t.left, canonical_form, out);
      out += ", ";
      render(*t.right, canonical_form, out);
      out += ')';
      return;
    case Term::Kind::kEncrypted:
      out += '{';
      render(*t.left, canonical_form, out);
      out += '}' + t.name;
      return;
    case Term::Kind::kDoubleEncrypted:
      out += "{{";
      render(*t.left, canonical_form, out);
      out += '}' + t.name + '}' + t.name;
      return;
  }
}

void render(const Statement& s, bool canonical_form, std::string& out) {
  switch (s.kind) {
    case Statement::Kind::kBelieves:
      out += s.principal + " |= ";
      render(*s.inner, canonical_form, out);
      return;
    case Statement::Kind::kSees:
      out += s.principal + " <| ";
      render(*s.term, canonical_form, out);
      return;
    case Statement::Kind::kSaid:
      out += s.principal + " |~ ";
      render(*s.term, canonical_form, out);
      return;
    case Statement::Kind::kFresh:
      out += "fresh(";
      render(*s.term, canonical_form, out);
      out += ')';
      return;
    case Statement::Kind::kFormula:
      render(*s.term, canonical_form, out);
      return;
  }
}

std::string canonical(const Term& t) {
  std::string out;
  render(t, true, out);
  return out;
}

}  // namespace

TermPtr principal(std::string name) { return make_term(Term::Kind::kPrincipal, std::move(name)); }
TermPtr key(std::string name) { return make_term(Term::Kind::kKey, std::move(name)); }
TermPtr nonce(std::string name) { return make_term(Term::Kind::kNonce, std::move(name)); }

TermPtr shared_key(std::string p, std::string k, std::string q) {
  return make_term(Term::Kind::kSharedKey, std::move(k), principal(std::move(p)),
                   principal(std::move(q)));
}

TermPtr pair(TermPtr a, TermPtr b) {
  return make_term(Term::Kind::kPair, "", std::move(a), std::move(b));
}

TermPtr encrypted(TermPtr body, std::string k) {
  return make_term(Term::Kind::kEncrypted, std::move(k), std::move(body));
}

TermPtr double_encrypted(TermPtr body, std::string k) {
  return make_term(Term::Kind::kDoubleEncrypted, std::move(k), std::move(body));
}

StatementPtr believes(std::string p, StatementPtr inner) {
  return make_statement(Statement::Kind::kBelieves, std::move(p), std::move(inner), nullptr);
}
StatementPtr sees(std::string p, TermPtr t) {
  return make_statement(Statement::Kind::kSees, std::move(p), nullptr, std::move(t));
}
StatementPtr said(std::string p, TermPtr t) {
  return make_statement(Statement::Kind::kSaid, std::move(p), nullptr, std::move(t));
}
StatementPtr fresh(TermPtr t) {
  return make_statement(Statement::Kind::kFresh, "", nullptr, std::move(t));
}
StatementPtr formula(TermPtr t) {
  return make_statement(Statement::Kind::kFormula, "", nullptr, std::move(t));
}

std::string to_string(const Term& t) {
  std::string out;
  render(t, false, out);
  return out;
}

std::string to_string(const Statement& s) {
  std::string out;
  render(s, false, out);
  return out;
}

std::string canonical(const Statement& s) {
  std::string out;
  render(s, true, out);
  return out;
}

bool same(const Statement& a, const Statement& b) { return canonical(a) == canonical(b); }

std::size_t belief_depth(const Statement& s) {
  std::size_t d = 0;
  const Statement* cur = &s;
  while (cur->kind == Statement::Kind::kBelieves) {
    ++d;
    cur = cur->inner.get();
  }
  return d;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok { kName, kBelieves, kSees, kSaid, kKeyOpen, kKeyClose, kLParen, kRParen,
                 kLBrace, kRBrace, kComma, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;  // 1-based
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto syntax = [&](const std::string& msg) {
    throw Error(ErrorCode::kSyntaxError, "column " + std::to_string(i + 1) + ": " + msg);
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t col = i + 1;
    auto two = text.substr(i, 2);
    if (two == "|=") { out.push_back({Tok::kBelieves, "|=", col}); i += 2; continue; }
    if (two == "|~") { out.push_back({Tok::kSaid, "|~", col}); i += 2; continue; }
    if (two == "<|") { out.push_back({Tok::kSees, "<|", col}); i += 2; continue; }
    if (two == "<-") { out.push_back({Tok::kKeyOpen, "<-", col}); i += 2; continue; }
    if (two == "->") { out.push_back({Tok::kKeyClose, "->", col}); i += 2; continue; }
    switch (c) {
      case '(': out.push_back({Tok::kLParen, "(", col}); ++i; continue;
      case ')': out.push_back({Tok::kRParen, ")", col}); ++i; continue;
      case '{': out.push_back({Tok::kLBrace, "{", col}); ++i; continue;
      case '}': out.push_back({Tok::kRBrace, "}", col}); ++i; continue;
      case ',': out.push_back({Tok::kComma, ",", col}); ++i; continue;
      default: break;
    }
    if (name_char(c)) {
      std::size_t start = i;
      while (i < text.size() && name_char(text[i])) ++i;
      out.push_back({Tok::kName, std::string(text.substr(start, i - start)), col});
      continue;
    }
    syntax(std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::kEnd, "", text.size() + 1});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols)
      : tokens_(lex(text)), symbols_(symbols) {}

  StatementPtr statement_only() {
    StatementPtr s = parse_formula();
    if (s->kind == Statement::Kind::kFormula) {
      fail(tokens_.front(), "expected a statement, found a bare term");
    }
    expect(Tok::kEnd, "end of input");
    return s;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw Error(ErrorCode::kSyntaxError, "column " + std::to_string(t.column) + ": " + msg +
                                             (t.kind == Tok::kEnd ? " (at end)" : " near '" + t.text + "'"));
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) fail(t, std::string("expected ") + what);
    return next();
  }

  std::string name_of(const Token& t, SymbolKind want) {
    if (symbols_.empty()) return t.text;
    auto it = symbols_.find(t.text);
    if (it == symbols_.end()) fail(t, "undeclared name");
    if (it->second != want) fail(t, "name has the wrong kind here");
    return t.text;
  }

  StatementPtr parse_formula() {
    const Token& t = peek();
    if (t.kind == Tok::kName && t.text == "fresh" && peek(1).kind == Tok::kLParen) {
      next();
      next();
      TermPtr body = parse_term();
      expect(Tok::kRParen, "')'");
      return fresh(std::move(body));
    }
    if (t.kind == Tok::kName) {
      Tok op = peek(1).kind;
      if (op == Tok::kBelieves || op == Tok::kSees || op == Tok::kSaid) {
        std::string p = name_of(next(), SymbolKind::kPrincipal);
        next();
        if (op == Tok::kBelieves) return believes(std::move(p), parse_formula());
        TermPtr body = parse_term();
        return op == Tok::kSees ? sees(std::move(p), std::move(body))
                                : said(std::move(p), std::move(body));
      }
    }
    return formula(parse_term());
  }

  TermPtr parse_term() {
    if (++depth_ > kMaxTermDepth) fail(peek(), "term nesting too deep");
    TermPtr out = parse_term_inner();
    --depth_;
    return out;
  }

  TermPtr parse_term_inner() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kName: {
        if (peek(1).kind == Tok::kKeyOpen) {
          std::string p = name_of(next(), SymbolKind::kPrincipal);
          next();
          std::string k = name_of(expect(Tok::kName, "key name"), SymbolKind::kKey);
          expect(Tok::kKeyClose, "'->'");
          std::string q = name_of(expect(Tok::kName, "principal name"), SymbolKind::kPrincipal);
          return shared_key(std::move(p), std::move(k), std::move(q));
        }
        const Token& n = next();
        if (symbols_.empty()) return nonce(n.text);
        auto it = symbols_.find(n.text);
        if (it == symbols_.end()) fail(n, "undeclared name");
        switch (it->second) {
          case SymbolKind::kPrincipal: return principal(n.text);
          case SymbolKind::kKey: return key(n.text);
          case SymbolKind::kNonce: return nonce(n.text);
        }
        return nonce(n.text);
      }
      case Tok::kLParen: {
        next();
        std::vector<TermPtr> items{parse_term()};
        while (peek().kind == Tok::kComma) {
          next();
          items.push_back(parse_term());
        }
        expect(Tok::kRParen, "')'");
        TermPtr acc = items.back();
        for (std::size_t i = items.size() - 1; i-- > 0;) acc = pair(items[i], acc);
        return acc;
      }
      case Tok::kLBrace: {
        next();
        TermPtr body = parse_term();
        expect(Tok::kRBrace, "'}'");
        std::string k = name_of(expect(Tok::kName, "key name after '}'"), SymbolKind::kKey);
        if (body->kind == Term::Kind::kEncrypted && body->name == k) {
          return double_encrypted(body->left, std::move(k));
        }
        return encrypted(std::move(body), std::move(k));
      }
      default:
        fail(t, "expected a term");
    }
  }

  std::vector<Token> tokens_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Rest of the line after skipping n whitespace-separated words.
std::string_view after_words(std::string_view line, std::size_t n) {
  std::size_t i = 0;
  for (std::size_t w = 0; w < n; ++w) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  }
  return trim(line.substr(i));
}

}  // namespace

StatementPtr parse_statement(std::string_view text, const SymbolTable& symbols) {
  return Parser(text, symbols).statement_only();
}

void parse_spec(std::string_view text, ProtocolSpec& spec) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto words = split_words(line);
    const std::string& directive = words[0];
    auto at_line = [&](const std::string& msg) {
      return Error(ErrorCode::kSyntaxError, "line " + std::to_string(line_no) + ": " + msg);
    };
    try {
      if (directive == "principal" || directive == "key" || directive == "nonce") {
        SymbolKind kind = directive == "principal" ? SymbolKind::kPrincipal
                          : directive == "key"     ? SymbolKind::kKey
                                                   : SymbolKind::kNonce;
        if (words.size() < 2) throw at_line("declaration without names");
        for (std::size_t i = 1; i < words.size(); ++i) {
          auto [it, inserted] = spec.symbols.emplace(words[i], kind);
          if (!inserted && it->second != kind) throw at_line("'" + words[i] + "' redeclared");
        }
      } else if (directive == "assume") {
        std::string id = "A" + std::to_string(spec.assumptions.size() + 1);
        spec.assumptions.push_back({id, parse_statement(after_words(line, 1), spec.symbols)});
      } else if (directive == "message") {
        if (words.size() < 3) throw at_line("message needs a number and a statement");
        spec.messages.push_back(
            {"M" + words[1], parse_statement(after_words(line, 2), spec.symbols)});
      } else if (directive == "goal") {
        if (words.size() < 3) throw at_line("goal needs a label and a statement");
        spec.goals.push_back({words[1], parse_statement(after_words(line, 2), spec.symbols)});
      } else {
        throw at_line("unknown directive '" + directive + "'");
      }
    } catch (const Error& e) {
      if (std::string_view(e.what()).find("line ") != std::string_view::npos) throw;
      throw at_line(e.what());
    }
  }
}

ProtocolSpec parse_spec(std::string_view text) {
  ProtocolSpec spec;
  parse_spec(text, spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::kMessageMeaning: return "MessageMeaning";
    case Rule::kFreshnessPromotion: return "FreshnessPromotion";
    case Rule::kNonceVerification: return "NonceVerification";
    case Rule::kBelief: return "Belief";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view name) {
  for (Rule r : {Rule::kMessageMeaning, Rule::kFreshnessPromotion, Rule::kNonceVerification,
                 Rule::kBelief}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(DeriveStatus s) {
  switch (s) {
    case DeriveStatus::kDerived: return "Derived";
    case DeriveStatus::kNotDerivable: return "NotDerivable";
    case DeriveStatus::kDepthExceeded: return "DepthExceeded";
  }
  return "?";
}

namespace {

using Emit = std::function<void(StatementPtr, std::vector<std::size_t>)>;

void collect_pairs(const Term& t, std::vector<TermPtr>& out, std::set<std::string>& seen,
                   const TermPtr& self) {
  if (t.kind == Term::Kind::kPair && seen.insert(canonical(t)).second) out.push_back(self);
  if (t.left) collect_pairs(*t.left, out, seen, t.left);
  if (t.right) collect_pairs(*t.right, out, seen, t.right);
}

void collect_pairs(const Statement& s, std::vector<TermPtr>& out, std::set<std::string>& seen) {
  if (s.inner) collect_pairs(*s.inner, out, seen);
  if (s.term) collect_pairs(*s.term, out, seen, s.term);
}

// Splits s into its leading believers and the core statement.
const Statement& strip_beliefs(const Statement& s, std::vector<std::string>& prefix) {
  const Statement* cur = &s;
  while (cur->kind == Statement::Kind::kBelieves) {
    prefix.push_back(cur->principal);
    cur = cur->inner.get();
  }
  return *cur;
}

StatementPtr wrap(const std::vector<std::string>& prefix, StatementPtr core) {
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) core = believes(*it, core);
  return core;
}

void message_meaning(const std::vector<StatementPtr>& facts, const Emit& emit) {
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const Statement& b = *facts[i];
    if (b.kind != Statement::Kind::kBelieves || b.inner->kind != Statement::Kind::kFormula ||
        b.inner->term->kind != Term::Kind::kSharedKey) {
      continue;
    }
    const Term& sk = *b.inner->term;
    const std::string& p = b.principal;
    const std::string* other = nullptr;
    if (sk.left->name == p) other = &sk.right->name;
    else if (sk.right->name == p) other = &sk.left->name;
    if (other == nullptr || *other == p) continue;

    for (std::size_t j = 0; j < facts.size(); ++j) {
      const Statement& s = *facts[j];
      if (s.kind != Statement::Kind::kSees || s.principal != p) continue;
      const Term& t = *s.term;
      if ((t.kind == Term::Kind::kEncrypted || t.kind == Term::Kind::kDoubleEncrypted) &&
          t.name == sk.name) {
        emit(believes(p, said(*other, t.left)), {i, j});
      }
    }
  }
}

void freshness(const std::vector<StatementPtr>& facts, const std::vector<TermPtr>& pairs,
               const Emit& emit) {
  for (std::size_t i = 0; i < facts.size(); ++i) {
    std::vector<std::string> prefix;
    const Statement& core = strip_beliefs(*facts[i], prefix);
    if (core.kind != Statement::Kind::kFresh) continue;
    std::string x = canonical(*core.term);
    for (const TermPtr& p : pairs) {
      if (canonical(*p->left) == x || canonical(*p->right) == x) {
        emit(wrap(prefix, fresh(p)), {i});
      }
    }
  }
}

void nonce_verification(const std::vector<StatementPtr>& facts, const Emit& emit) {
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const Statement& f = *facts[i];
    if (f.kind != Statement::Kind::kBelieves || f.inner->kind != Statement::Kind::kFresh) continue;
    std::string x = canonical(*f.inner->term);
    for (std::size_t j = 0; j < facts.size(); ++j) {
      const Statement& s = *facts[j];
      if (s.kind != Statement::Kind::kBelieves || s.principal != f.principal ||
          s.inner->kind != Statement::Kind::kSaid) {
        continue;
      }
      if (canonical(*s.inner->term) != x) continue;
      emit(believes(f.principal, believes(s.inner->principal, formula(s.inner->term))), {i, j});
    }
  }
}

void belief(const std::vector<StatementPtr>& facts, const Emit& emit) {
  for (std::size_t i = 0; i < facts.size(); ++i) {
    std::vector<std::string> prefix;
    const Statement& core = strip_beliefs(*facts[i], prefix);
    if (prefix.empty() || core.kind != Statement::Kind::kFormula ||
        core.term->kind != Term::Kind::kPair) {
      continue;
    }
    emit(wrap(prefix, formula(core.term->left)), {i});
    emit(wrap(prefix, formula(core.term->right)), {i});
  }
}

void run_rule(Rule rule, const std::vector<StatementPtr>& facts,
              const std::vector<TermPtr>& pairs, const Emit& emit) {
  Emit bounded = [&](StatementPtr s, std::vector<std::size_t> used) {
    if (belief_depth(*s) <= kMaxBeliefDepth) emit(std::move(s), std::move(used));
  };
  switch (rule) {
    case Rule::kMessageMeaning: message_meaning(facts, bounded); break;
    case Rule::kFreshnessPromotion: freshness(facts, pairs, bounded); break;
    case Rule::kNonceVerification: nonce_verification(facts, bounded); break;
    case Rule::kBelief: belief(facts, bounded); break;
  }
}

constexpr Rule kRuleOrder[] = {Rule::kMessageMeaning, Rule::kFreshnessPromotion,
                               Rule::kNonceVerification, Rule::kBelief};

}  // namespace

std::vector<StatementPtr> apply_rule(Rule rule, const std::vector<StatementPtr>& premises,
                                     const std::vector<StatementPtr>& context) {
  std::vector<TermPtr> pairs;
  std::set<std::string> seen_pairs;
  for (const auto& s : premises) collect_pairs(*s, pairs, seen_pairs);
  for (const auto& s : context) collect_pairs(*s, pairs, seen_pairs);

  std::vector<StatementPtr> out;
  std::set<std::string> seen;
  run_rule(rule, premises, pairs, [&](StatementPtr s, std::vector<std::size_t>) {
    if (seen.insert(canonical(*s)).second) out.push_back(std::move(s));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Derivation
// ---------------------------------------------------------------------------

const ProofStep* DeriveResult::step(std::string_view id) const {
  for (const auto& s : steps) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<Rule> DeriveResult::rule_sequence(std::string_view goal_label) const {
  std::vector<Rule> out;
  for (const auto& g : goals) {
    if (g.label != goal_label) continue;
    for (const auto& id : g.steps) {
      if (const ProofStep* s = step(id)) out.push_back(s->rule);
    }
  }
  return out;
}

DeriveResult derive(const std::vector<LabeledStatement>& assumptions,
                    const std::vector<LabeledStatement>& messages,
                    const std::vector<LabeledStatement>& goals, std::size_t max_depth) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");

  struct Fact {
    std::string id;
    StatementPtr statement;
    std::optional<Rule> rule;
    std::vector<std::size_t> premises;
  };
  std::vector<Fact> facts;
  std::vector<StatementPtr> statements;
  std::unordered_map<std::string, std::size_t> index;
  DeriveResult result;

  auto add_given = [&](const LabeledStatement& ls) {
    result.given[ls.id] = ls.statement;
    if (index.emplace(canonical(*ls.statement), facts.size()).second) {
      facts.push_back({ls.id, ls.statement, std::nullopt, {}});
      statements.push_back(ls.statement);
    }
  };
  for (const auto& a : assumptions) add_given(a);
  for (const auto& m : messages) add_given(m);

  std::vector<TermPtr> pairs;
  std::set<std::string> seen_pairs;
  for (const auto& s : statements) collect_pairs(*s, pairs, seen_pairs);

  auto goals_reached = [&] {
    return std::all_of(goals.begin(), goals.end(), [&](const LabeledStatement& g) {
      return index.count(canonical(*g.statement)) != 0;
    });
  };

  std::size_t step_counter = 0;
  bool fixpoint = false;
  while (!goals_reached()) {
    if (result.rounds == max_depth) break;
    ++result.rounds;
    // Rules in a round only see facts from earlier rounds.
    std::vector<StatementPtr> snapshot(statements.begin(), statements.end());
    bool grew = false;
    for (Rule rule : kRuleOrder) {
      run_rule(rule, snapshot, pairs, [&](StatementPtr s, std::vector<std::size_t> used) {
        if (!index.emplace(canonical(*s), facts.size()).second) return;
        facts.push_back({"", s, rule, std::move(used)});
        facts.back().id = "#" + std::to_string(++step_counter);
        statements.push_back(std::move(s));
        grew = true;
      });
    }
    if (!grew) {
      fixpoint = true;
      break;
    }
  }
  result.facts_total = facts.size();

  // Backward closure of each reached goal over derived facts.
  std::set<std::size_t> needed;
  std::vector<std::set<std::size_t>> per_goal(goals.size());
  for (std::size_t g = 0; g < goals.size(); ++g) {
    auto it = index.find(canonical(*goals[g].statement));
    if (it == index.end()) continue;
    std::vector<std::size_t> stack{it->second};
    while (!stack.empty()) {
      std::size_t f = stack.back();
      stack.pop_back();
      if (!facts[f].rule || !per_goal[g].insert(f).second) continue;
      for (std::size_t p : facts[f].premises) stack.push_back(p);
    }
    needed.insert(per_goal[g].begin(), per_goal[g].end());
  }

  std::map<std::size_t, std::string> step_id;
  for (std::size_t f : needed) step_id[f] = "S" + std::to_string(step_id.size() + 1);
  auto id_of = [&](std::size_t f) { return facts[f].rule ? step_id.at(f) : facts[f].id; };

  for (std::size_t f : needed) {
    ProofStep step{step_id[f], *facts[f].rule, {}, facts[f].statement};
    for (std::size_t p : facts[f].premises) step.premises.push_back(id_of(p));
    result.steps.push_back(std::move(step));
  }

  for (std::size_t g = 0; g < goals.size(); ++g) {
    GoalResult gr{goals[g].id, goals[g].statement, false, "", {}};
    auto it = index.find(canonical(*goals[g].statement));
    if (it != index.end()) {
      gr.derived = true;
      gr.fact_id = id_of(it->second);
      for (std::size_t f : per_goal[g]) gr.steps.push_back(step_id[f]);
    }
    result.goals.push_back(std::move(gr));
  }

  if (goals_reached()) {
    result.status = DeriveStatus::kDerived;
  } else {
    result.status = fixpoint ? DeriveStatus::kNotDerivable : DeriveStatus::kDepthExceeded;
  }
  return result;
}

std::string format_trace(const DeriveResult& result) {
  std::ostringstream out;
  out << "status: " << to_string(result.status) << " after " << result.rounds << " round(s)\n";
  for (const auto& [id, s] : result.given) out << "  " << id << "  given  " << to_string(*s) << "\n";
  for (const auto& step : result.steps) {
    out << "  " << step.id << "  " << to_string(step.rule) << "(";
    for (std::size_t i = 0; i < step.premises.size(); ++i) {
      out << (i ? ", " : "") << step.premises[i];
    }
    out << ")  " << to_string(*step.conclusion) << "\n";
  }
  for (const auto& g : result.goals) {
    out << "goal " << g.label << ": " << (g.derived ? "derived as " + g.fact_id : "NOT derived")
        << "  " << to_string(*g.goal) << "\n";
  }
  return out.str();
}

}  // namespace wbms::ban
