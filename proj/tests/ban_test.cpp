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

#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace wbms;
using namespace wbms::ban;

namespace {

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(WBMS_DATA_DIR) + "/ban/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ProtocolSpec bundled_spec() {
  ProtocolSpec spec;
  parse_spec(read_data("protocol.ban"), spec);
  parse_spec(read_data("goals.ban"), spec);
  return spec;
}

const GoalResult& goal(const DeriveResult& r, const std::string& label) {
  for (const auto& g : r.goals) {
    if (g.label == label) return g;
  }
  throw std::runtime_error("no goal " + label);
}

std::vector<LabeledStatement> without(std::vector<LabeledStatement> v,
                                      const std::string& needle) {
  std::erase_if(v, [&](const LabeledStatement& s) {
    return to_string(*s.statement).find(needle) != std::string::npos;
  });
  return v;
}

// Swaps the two principals and the nonce roles throughout a statement.
std::string mirror(std::string text) {
  const std::vector<std::pair<std::string, std::string>> swaps = {
      {"NR", "MN"}, {"chr", "cht"}, {"X'", "X"}};
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    bool done = false;
    for (const auto& [a, b] : swaps) {
      for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
        if (text.compare(i, from.size(), from) == 0 &&
            (from != "X" || i + 1 >= text.size() || text[i + 1] != '\'')) {
          out += to;
          i += from.size();
          done = true;
          break;
        }
      }
      if (done) break;
    }
    if (!done) out += text[i++];
  }
  return out;
}

}  // namespace

TEST(BanParse, BundledNotation) {
  StatementPtr s = parse_statement("NR |= fresh(chr)");
  ASSERT_EQ(s->kind, Statement::Kind::kBelieves);
  EXPECT_EQ(s->principal, "NR");
  ASSERT_EQ(s->inner->kind, Statement::Kind::kFresh);
  EXPECT_EQ(s->inner->term->kind, Term::Kind::kNonce);
  EXPECT_EQ(s->inner->term->name, "chr");

  StatementPtr k = parse_statement("MN |= NR <-KM-> MN");
  ASSERT_EQ(k->inner->kind, Statement::Kind::kFormula);
  const Term& sk = *k->inner->term;
  EXPECT_EQ(sk.kind, Term::Kind::kSharedKey);
  EXPECT_EQ(sk.name, "KM");
  EXPECT_EQ(sk.left->name, "NR");
  EXPECT_EQ(sk.right->name, "MN");
  EXPECT_EQ(to_string(*k), "MN |= NR <-KM-> MN");

  StatementPtr m = parse_statement("NR <| {{(chr, NR <-KM-> MN)}KM}KM");
  ASSERT_EQ(m->kind, Statement::Kind::kSees);
  EXPECT_EQ(m->term->kind, Term::Kind::kDoubleEncrypted);
  EXPECT_EQ(m->term->left->kind, Term::Kind::kPair);

  StatementPtr nested = parse_statement("NR |= MN |= NR <-KS-> MN");
  EXPECT_EQ(belief_depth(*nested), 2u);
  StatementPtr said = parse_statement("NR |= MN |~ (chr, X)");
  EXPECT_EQ(said->inner->kind, Statement::Kind::kSaid);
}

TEST(BanParse, TuplesNestRight) {
  StatementPtr a = parse_statement("NR <| (a, b, c)");
  StatementPtr b = parse_statement("NR <| (a, (b, c))");
  EXPECT_TRUE(same(*a, *b));
}

TEST(BanParse, SharedKeyOrderIsIrrelevant) {
  EXPECT_TRUE(same(*parse_statement("NR |= NR <-KM-> MN"), *parse_statement("NR |= MN <-KM-> NR")));
  EXPECT_FALSE(same(*parse_statement("NR |= NR <-KM-> MN"), *parse_statement("MN |= NR <-KM-> MN")));
}

TEST(BanParse, SyntaxErrors) {
  for (const char* bad : {"NR |= fresh(chr", "NR |= (chr, cht", "NR |=", "|= X", "NR <| {X}",
                          "NR |= NR <-KM- MN", "NR $ X", "fresh chr", "NR |= fresh(chr))"}) {
    try {
      parse_statement(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kSyntaxError) << bad;
      EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
    }
  }
}

TEST(BanParse, SymbolTableChecksKinds) {
  SymbolTable t{{"NR", SymbolKind::kPrincipal}, {"MN", SymbolKind::kPrincipal},
                {"KM", SymbolKind::kKey}, {"chr", SymbolKind::kNonce}};
  EXPECT_NO_THROW(parse_statement("NR |= fresh(chr)", t));
  EXPECT_NO_THROW(parse_statement("NR |= fresh(KM)", t));
  EXPECT_WBMS_ERROR(parse_statement("NR |= NR <-chr-> MN", t), ErrorCode::kSyntaxError);
  EXPECT_WBMS_ERROR(parse_statement("chr |= fresh(chr)", t), ErrorCode::kSyntaxError);
  EXPECT_WBMS_ERROR(parse_statement("NR |= fresh(unknown)", t), ErrorCode::kSyntaxError);
}

TEST(BanParse, SpecFileErrorsNameTheLine) {
  try {
    parse_spec("principal A B\nassume A |= fresh(\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyntaxError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_WBMS_ERROR(parse_spec("believe A |= B"), ErrorCode::kSyntaxError);
}

TEST(BanRules, MessageMeaningOnDoubleEncryption) {
  auto out = apply_rule(Rule::kMessageMeaning,
                        {parse_statement("NR |= NR <-KM-> MN"),
                         parse_statement("NR <| {{(chr, NR <-KM-> MN)}KM}KM")});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(same(*out[0], *parse_statement("NR |= MN |~ (chr, NR <-KM-> MN)")));
  // Wrong key: nothing.
  EXPECT_TRUE(apply_rule(Rule::kMessageMeaning,
                         {parse_statement("NR |= NR <-KS-> MN"),
                          parse_statement("NR <| {{(chr, NR <-KM-> MN)}KM}KM")})
                  .empty());
  // Plaintext message: nothing.
  EXPECT_TRUE(apply_rule(Rule::kMessageMeaning,
                         {parse_statement("NR |= NR <-KM-> MN"), parse_statement("NR <| (chr, MN)")})
                  .empty());
}

TEST(BanRules, FreshnessPromotion) {
  auto out = apply_rule(Rule::kFreshnessPromotion,
                        {parse_statement("NR |= fresh(chr)"),
                         parse_statement("NR |= MN |~ (chr, NR <-KM-> MN)")});
  bool found = false;
  for (const auto& s : out) {
    found = found || same(*s, *parse_statement("NR |= fresh((chr, NR <-KM-> MN))"));
  }
  EXPECT_TRUE(found);
}

TEST(BanRules, NonceVerificationAndBelief) {
  auto nv = apply_rule(Rule::kNonceVerification,
                       {parse_statement("NR |= fresh((chr, NR <-KM-> MN))"),
                        parse_statement("NR |= MN |~ (chr, NR <-KM-> MN)")});
  ASSERT_EQ(nv.size(), 1u);
  EXPECT_TRUE(same(*nv[0], *parse_statement("NR |= MN |= (chr, NR <-KM-> MN)")));

  auto b = apply_rule(Rule::kBelief, {nv[0]});
  bool found = false;
  for (const auto& s : b) found = found || same(*s, *parse_statement("NR |= MN |= NR <-KM-> MN"));
  EXPECT_TRUE(found);
  EXPECT_TRUE(apply_rule(Rule::kNonceVerification,
                         {parse_statement("NR |= fresh(cht)"),
                          parse_statement("NR |= MN |~ (chr, NR <-KM-> MN)")})
                  .empty());
}

TEST(BanRules, ParseRuleNames) {
  for (Rule r : {Rule::kMessageMeaning, Rule::kFreshnessPromotion, Rule::kNonceVerification,
                 Rule::kBelief}) {
    EXPECT_EQ(parse_rule(to_string(r)), r);
  }
  EXPECT_FALSE(parse_rule("Jurisdiction"));
}

TEST(BanDerive, BundledGoalsAllDerived) {
  auto t0 = std::chrono::steady_clock::now();
  DeriveResult r = derive(bundled_spec());
  auto elapsed = std::chrono::steady_clock::now() - t0;
  EXPECT_LT(elapsed, std::chrono::seconds(1));
  EXPECT_EQ(r.status, DeriveStatus::kDerived);
  for (const char* g : {"G1.1", "G1.2", "G2.1", "G2.2"}) EXPECT_TRUE(goal(r, g).derived) << g;
  EXPECT_GE(r.steps.size(), 8u);

  using R = Rule;
  EXPECT_EQ(r.rule_sequence("G1.1"),
            (std::vector<Rule>{R::kMessageMeaning, R::kFreshnessPromotion,
                               R::kNonceVerification, R::kBelief}));
  EXPECT_EQ(r.rule_sequence("G1.2"), r.rule_sequence("G1.1"));
  std::vector<Rule> g2 = r.rule_sequence("G2.1");
  // Session key belief from the key confirmation, then the same chain as G1.
  EXPECT_EQ(g2, (std::vector<Rule>{R::kFreshnessPromotion, R::kBelief, R::kMessageMeaning,
                                   R::kNonceVerification, R::kBelief}));
}

TEST(BanDerive, TraceIsSound) {
  DeriveResult r = derive(bundled_spec());
  std::map<std::string, StatementPtr> facts = r.given;
  std::vector<StatementPtr> context;
  for (const auto& [id, st] : r.given) context.push_back(st);
  for (const auto& step : r.steps) {
    std::vector<StatementPtr> premises;
    for (const auto& id : step.premises) {
      ASSERT_TRUE(facts.count(id)) << "premise " << id << " of " << step.id << " unknown";
      premises.push_back(facts.at(id));
    }
    auto out = apply_rule(step.rule, premises, context);
    bool reproduced = false;
    for (const auto& s : out) reproduced = reproduced || same(*s, *step.conclusion);
    EXPECT_TRUE(reproduced) << step.id << " " << to_string(*step.conclusion);
    facts[step.id] = step.conclusion;
  }
}

TEST(BanDerive, WithoutFreshnessGoalsFail) {
  ProtocolSpec spec = bundled_spec();
  DeriveResult r = derive(without(spec.assumptions, "fresh("), spec.messages, spec.goals);
  EXPECT_EQ(r.status, DeriveStatus::kNotDerivable);
  for (const char* g : {"G1.1", "G1.2", "G2.1", "G2.2"}) EXPECT_FALSE(goal(r, g).derived) << g;

  // Keeping the nonce freshness but dropping the transfer to X, X' loses only G2.
  DeriveResult r2 = derive(without(without(spec.assumptions, "fresh(X)"), "fresh(X')"),
                           spec.messages, spec.goals);
  EXPECT_TRUE(goal(r2, "G1.1").derived);
  EXPECT_TRUE(goal(r2, "G1.2").derived);
  EXPECT_FALSE(goal(r2, "G2.1").derived);
  EXPECT_FALSE(goal(r2, "G2.2").derived);
}

TEST(BanDerive, MissingKeyBeliefBlocksMessageMeaning) {
  ProtocolSpec spec = bundled_spec();
  DeriveResult r = derive(without(spec.assumptions, "NR |= NR <-KM-> MN"), spec.messages, spec.goals);
  EXPECT_FALSE(goal(r, "G1.1").derived);
  EXPECT_TRUE(goal(r, "G1.2").derived);
}

TEST(BanDerive, DepthExceededIsDistinct) {
  DeriveResult r = derive(bundled_spec(), 2);
  EXPECT_EQ(r.status, DeriveStatus::kDepthExceeded);
  EXPECT_THROW(derive(bundled_spec(), 0), std::invalid_argument);
}

TEST(BanDerive, MirroredAssumptionsGiveMirroredGoals) {
  ProtocolSpec spec = bundled_spec();
  ProtocolSpec mirrored;
  mirrored.symbols = spec.symbols;
  auto flip = [](const std::vector<LabeledStatement>& in) {
    std::vector<LabeledStatement> out;
    for (const auto& s : in) out.push_back({s.id, parse_statement(mirror(to_string(*s.statement)))});
    return out;
  };
  // Only G1.1's premises, mirrored, should yield G1.2 and nothing of G1.1.
  std::vector<LabeledStatement> reader_side;
  for (const auto& a : spec.assumptions) {
    if (to_string(*a.statement).rfind("NR |=", 0) == 0) reader_side.push_back(a);
  }
  std::vector<LabeledStatement> reader_msgs;
  for (const auto& m : spec.messages) {
    if (to_string(*m.statement).rfind("NR <|", 0) == 0) reader_msgs.push_back(m);
  }
  DeriveResult orig = derive(reader_side, reader_msgs, spec.goals);
  DeriveResult mir = derive(flip(reader_side), flip(reader_msgs), spec.goals);
  EXPECT_TRUE(goal(orig, "G1.1").derived);
  EXPECT_FALSE(goal(orig, "G1.2").derived);
  EXPECT_TRUE(goal(mir, "G1.2").derived);
  EXPECT_FALSE(goal(mir, "G1.1").derived);
  EXPECT_EQ(goal(orig, "G2.1").derived, goal(mir, "G2.2").derived);
  EXPECT_EQ(orig.rule_sequence("G1.1"), mir.rule_sequence("G1.2"));
}

TEST(BanDerive, MoreAssumptionsNeverLoseGoals) {
  ProtocolSpec spec = bundled_spec();
  std::vector<LabeledStatement> extra = spec.assumptions;
  extra.push_back({"A99", parse_statement("NR |= fresh(cht)")});
  extra.push_back({"A100", parse_statement("MN |= MN <-KM-> NR")});
  extra.push_back({"A101", parse_statement("NR |= MN |= fresh(chr)")});
  DeriveResult base = derive(spec);
  DeriveResult more = derive(extra, spec.messages, spec.goals);
  for (const auto& g : base.goals) {
    if (g.derived) EXPECT_TRUE(goal(more, g.label).derived) << g.label;
  }
  // Also for every subset obtained by dropping one assumption.
  for (std::size_t i = 0; i < spec.assumptions.size(); ++i) {
    auto fewer = spec.assumptions;
    fewer.erase(fewer.begin() + static_cast<long>(i));
    DeriveResult small = derive(fewer, spec.messages, spec.goals);
    for (const auto& g : small.goals) {
      if (g.derived) EXPECT_TRUE(goal(base, g.label).derived);
    }
  }
}

TEST(BanDerive, BeliefDepthIsCapped) {
  std::string deep = "A |= B |= A |= B |= A |= B |= A |= (x, y)";
  std::vector<LabeledStatement> a{{"A1", parse_statement(deep)}};
  DeriveResult r = derive(a, {}, {{"G", parse_statement("A |= B |= A |= B |= A |= B |= A |= x")}});
  EXPECT_FALSE(goal(r, "G").derived);
  EXPECT_EQ(r.status, DeriveStatus::kNotDerivable);
}

TEST(BanDerive, TraceFormats) {
  DeriveResult r = derive(bundled_spec());
  std::string text = format_trace(r);
  EXPECT_NE(text.find("MessageMeaning"), std::string::npos);
  EXPECT_NE(text.find("G2.2"), std::string::npos);
}
