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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "wbms/adversary.hpp"
#include "wbms/ban.hpp"
#include "wbms/diagnostics.hpp"
#include "wbms/handshake.hpp"
#include "wbms/secure_channel.hpp"
#include "wbms/sndef_codec.hpp"
#include "wbms/wakeup_sim.hpp"

using namespace wbms;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Bytes b(const Block& x) { return Bytes(x.begin(), x.end()); }
Bytes b(const aes::Key& x, int) { return Bytes(x.begin(), x.end()); }

// AC1
Check protocol_completeness() {
  Check c;
  using handshake::Handshake;
  using handshake::Phase;
  using handshake::Role;
  auto t0 = Clock::now();
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(s);
    MasterKey k = MasterKey::random(rng);
    Handshake r(Role::kReader, adversary::kDefaultReaderId, k, Rng(adversary::mix_seed(s, 1)));
    Handshake t(Role::kController, adversary::kDefaultControllerId, k,
                Rng(adversary::mix_seed(s, 2)));
    int messages = 0;
    try {
      auto m1 = r.reader_start().encode();
      ++messages;
      auto m2 = t.controller_respond(m1).encode();
      ++messages;
      auto m3 = r.reader_answer(m2).encode();
      ++messages;
      auto m4 = t.controller_key_confirm(m3).encode();
      ++messages;
      auto m5 = r.reader_key_confirm(m4).encode();
      ++messages;
      t.controller_finalize(m5);
    } catch (const Error& e) {
      c.require(false, "seed " + std::to_string(s) + ": " + e.what());
      continue;
    }
    c.require(messages == 5, "message count");
    c.require(r.phase() == Phase::kEstablished && t.phase() == Phase::kEstablished,
              "seed " + std::to_string(s) + " not established");
    c.require(r.session_keys() && t.session_keys() && *r.session_keys() == *t.session_keys(),
              "session keys differ at seed " + std::to_string(s));
    if (r.session_keys()) {
      auto ok = oracle::kdf(b(k.bytes(), 0), b(r.ch_r()->bytes), b(r.ch_t()->bytes));
      c.require(ok.k_enc == b(r.session_keys()->k_enc, 0) &&
                    ok.k_mac == b(r.session_keys()->k_mac, 0),
                "session keys disagree with the reference KDF");
    }
  }
  double secs = seconds_since(t0);
  c.require(secs < 5.0, "took " + std::to_string(secs) + " s");
  if (c.ok) c.detail = "1000/1000 established in 5 messages, " + std::to_string(secs) + " s";
  return c;
}

// AC2
Check attack_suite() {
  Check c;
  auto a = adversary::run_attack_suite(20260101, 100);
  auto again = adversary::run_attack_suite(20260101, 100);
  std::ostringstream summary;
  for (std::size_t i = 0; i < a.strategies.size(); ++i) {
    const auto& s = a.strategies[i];
    std::string name(adversary::to_string(s.kind));
    c.require(s.runs == 100, name + " ran " + std::to_string(s.runs));
    c.require(s.successes == 0, name + " succeeded " + std::to_string(s.successes) + " times");
    c.require(s.leak_hits == 0, name + " leaked plaintext");
    if (s.kind == adversary::StrategyKind::kEavesdrop) {
      summary << name << " passive 0 leaks; ";
    } else {
      c.require(s.blocked == s.runs, name + " blocked only " + std::to_string(s.blocked));
      summary << name << " blocked " << s.blocked << " at";
      for (const auto& [msg, n] : s.failure_messages) summary << " " << msg << "x" << n;
      summary << "; ";
    }
    for (std::size_t k = 0; k < s.records.size(); ++k) {
      const auto& x = s.records[k];
      const auto& y = again.strategies[i].records[k];
      c.require(x.blocked == !!x.failure_message, name + " blocked run without a message number");
      c.require(x.failure_message == y.failure_message && x.error == y.error,
                name + " failure point not deterministic");
    }
  }
  if (c.ok) c.detail = summary.str();
  return c;
}

// Re-sends a recorded frame after a later one, or substitutes it from a
// prior session.
class RecordReplayer : public adversary::Adversary {
 public:
  RecordReplayer(std::size_t replay, std::size_t after) : replay_(replay), after_(after) {}
  std::vector<adversary::Delivery> intercept(const adversary::Frame& f) override {
    if (f.index == replay_) saved_ = f.bytes;
    std::vector<adversary::Delivery> out{{f.to, f.bytes}};
    if (f.index == after_) out.push_back({f.to, saved_});
    return out;
  }

 private:
  std::size_t replay_, after_;
  Bytes saved_;
};

// AC3
Check chained_tag_replay() {
  Check c;
  std::size_t within = 0, across = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(adversary::mix_seed(s, 0xac3));
    MasterKey k = MasterKey::random(rng);
    adversary::EndpointConfig r{adversary::kDefaultReaderId, k, adversary::mix_seed(s, 1)};
    adversary::EndpointConfig t{adversary::kDefaultControllerId, k, adversary::mix_seed(s, 2)};
    std::vector<diag::DiagPacket> w;
    std::size_t batches = 1 + rng.uniform(3);
    for (std::size_t i = 0; i < batches; ++i) {
      for (auto& p : adversary::sample_workload(rng)) w.push_back(std::move(p));
    }
    std::size_t j = rng.uniform(w.size());
    adversary::SessionOutcome o;
    if (rng.uniform(2) == 0) {
      std::size_t m = j + rng.uniform(w.size() - j);
      adversary::LinkChannel link(std::make_unique<RecordReplayer>(6 + j, 6 + m));
      o = adversary::run_session(link, r, t, w);
      c.require(o.records_delivered == m + 1, "records before the replay were lost");
      ++within;
    } else {
      adversary::LinkChannel honest;
      adversary::EndpointConfig r0 = r, t0 = t;
      r0.seed = adversary::mix_seed(s, 3);
      t0.seed = adversary::mix_seed(s, 4);
      auto prior = adversary::run_session(honest, r0, t0, w).transcript;
      adversary::AdversaryStrategy st{adversary::StrategyKind::kReplay, 6 + j};
      adversary::LinkChannel link(adversary::make_adversary(st, prior));
      o = adversary::run_session(link, r, t, w);
      c.require(o.records_delivered == j, "records before the replay were lost");
      ++across;
    }
    c.require(o.failure && o.failure->error == ErrorCode::kTagMismatch,
              "session " + std::to_string(s) + " accepted or misclassified a replayed record");
  }
  if (c.ok) {
    c.detail = "1000/1000 TagMismatch (" + std::to_string(within) + " in-session, " +
               std::to_string(across) + " cross-session)";
  }
  return c;
}

// AC4
Check crypto_oracle() {
  Check c;
  Rng rng(0x0ac4);
  std::size_t vectors = 0;
  for (int i = 0; i < 64; ++i) {
    MasterKey master = MasterKey::random(rng);
    Nonce ch_r = Nonce::generate(rng), ch_t = Nonce::generate(rng);
    SessionKeys keys = derive_session_keys(master, ch_r, ch_t);
    auto ok = oracle::kdf(b(master.bytes(), 0), b(ch_r.bytes), b(ch_t.bytes));
    c.require(ok.k_enc == b(keys.k_enc, 0) && ok.k_mac == b(keys.k_mac, 0), "kdf");

    Bytes payload(1 + rng.uniform(100));
    rng.fill(payload);
    c.require(double_encrypt(master, payload) ==
                  oracle::double_encrypt(b(master.bytes(), 0), payload, true),
              "double_encrypt");

    Bytes sec(16 * (1 + rng.uniform(4))), add(rng.uniform(12));
    rng.fill(sec);
    rng.fill(add);
    Block iv = rng.block(), prev = rng.block();
    c.require(b(compute_chained_tag(keys.k_mac, sec, iv, add, prev)) ==
                  oracle::chained_tag(b(keys.k_mac, 0), sec, b(iv), add, b(prev)),
              "compute_chained_tag");

    ChannelState tx(keys);
    Bytes expected_prev(16, 0);
    for (int n = 0; n < 3; ++n) {
      Bytes plain(1 + rng.uniform(80));
      rng.fill(plain);
      SecureRecord rec = seal_record(tx, plain, add, rng);
      auto ref = oracle::seal({b(keys.k_enc, 0), b(keys.k_mac, 0)}, b(rec.iv), plain, add,
                              expected_prev);
      c.require(rec.sec_data == ref.sec_data && b(rec.tag) == ref.tag, "seal_record");
      expected_prev = ref.tag;
    }
    ++vectors;
  }
  c.require(vectors >= 50, "too few vectors");
  if (c.ok) c.detail = std::to_string(vectors) + " vectors bit-exact against OpenSSL";
  return c;
}

// AC5
Check power_figures() {
  Check c;
  wakeup::PowerModel m;
  double ed = wakeup::idle_power(m, wakeup::Method::kEventDetection);
  double eh = wakeup::idle_power(m, wakeup::Method::kEnergyHarvesting);
  c.require(std::abs(ed - 117.81) < 0.005, "ED idle " + std::to_string(ed));
  c.require(std::abs(eh - 98.34) < 0.005, "EH idle " + std::to_string(eh));
  Rng rng(0x0ac5);
  auto draw = [&](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng.uniform(1'000'000)) / 1e6;
  };
  for (int i = 0; i < 1000; ++i) {
    wakeup::PowerModel r;
    r.supply_voltage_v = draw(1.8, 5.0);
    r.bpc_vlps_current_ua = draw(1, 200);
    r.bpc_active_current_ma = draw(1, 100);
    r.ntag_standby_current_ua = draw(0.1, 50);
    r.ntag_active_current_ma = draw(0.1, 20);
    r.ed_wakeup_latency_ms = draw(0.1, 20);
    r.eh_wakeup_latency_ms = draw(20, 200);
    c.require(wakeup::idle_power(r, wakeup::Method::kEnergyHarvesting) <
                  wakeup::idle_power(r, wakeup::Method::kEventDetection),
              "EH >= ED for random model " + std::to_string(i));
  }
  if (c.ok) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "ED %.2f uW, EH %.2f uW, EH < ED for 1000/1000 models", ed,
                  eh);
    c.detail = buf;
  }
  return c;
}

// AC6
Check duty_cycle() {
  Check c;
  wakeup::PowerModel m;
  wakeup::StorageScenario day{1, {}};
  for (int i = 0; i < 10; ++i) day.readouts.push_back({3600.0 * (2 * i + 1), 60});
  std::ostringstream d;
  for (auto method : {wakeup::Method::kEventDetection, wakeup::Method::kEnergyHarvesting}) {
    auto t = wakeup::simulate(m, day, method);
    c.require(t.avg_power_uw < 1000, std::string(wakeup::to_string(method)) + " avg " +
                                         std::to_string(t.avg_power_uw) + " uW");
    d << wakeup::to_string(method) << " " << t.avg_power_uw << " uW; ";
  }
  auto on = wakeup::simulate(m, day, wakeup::Method::kAlwaysOn);
  c.require(on.avg_power_uw > 1000, "always-on avg " + std::to_string(on.avg_power_uw));
  d << "always-on " << on.avg_power_uw << " uW";
  if (c.ok) c.detail = d.str();
  return c;
}

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(WBMS_DATA_DIR) + "/ban/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// AC7
Check ban_reproduction() {
  Check c;
  using namespace wbms::ban;
  ProtocolSpec spec;
  parse_spec(read_data("protocol.ban"), spec);
  parse_spec(read_data("goals.ban"), spec);
  auto t0 = Clock::now();
  DeriveResult r = derive(spec);
  double secs = seconds_since(t0);
  c.require(r.status == DeriveStatus::kDerived, "not all goals derived");
  for (const auto& g : r.goals) c.require(g.derived, g.label + " not derived");
  c.require(r.goals.size() == 4, "expected four goals");
  c.require(r.rule_sequence("G1.1") == std::vector<Rule>{Rule::kMessageMeaning,
                                                          Rule::kFreshnessPromotion,
                                                          Rule::kNonceVerification,
                                                          Rule::kBelief},
            "G1.1 rule sequence");
  c.require(secs < 1.0, "took " + std::to_string(secs) + " s");

  std::vector<LabeledStatement> stale = spec.assumptions;
  std::erase_if(stale, [](const LabeledStatement& s) {
    return to_string(*s.statement).find("fresh(") != std::string::npos;
  });
  c.require(stale.size() + 4 == spec.assumptions.size(), "expected four freshness assumptions");
  DeriveResult weak = derive(stale, spec.messages, spec.goals);
  for (const auto& g : weak.goals) {
    if (g.label == "G1.1" || g.label == "G2.1") {
      c.require(!g.derived, g.label + " derivable without freshness");
    }
  }
  c.require(weak.status == DeriveStatus::kNotDerivable, "weakened status");
  if (c.ok) {
    c.detail = "4/4 goals in " + std::to_string(r.steps.size()) +
               " steps, G1.1 via MM-FR-NV-BEL, freshness removal blocks G1.1/G2.1";
  }
  return c;
}

// AC8
Check codec_totality() {
  Check c;
  Rng rng(0x0ac8);
  std::vector<Bytes> seeds;
  for (int i = 0; i < 8; ++i) {
    auto w = adversary::sample_workload(rng);
    for (const auto& p : w) {
      Bytes diag = diag::encode_diag(p);
      seeds.push_back(diag);
      SecureRecord sr{rng.block(), diag, Bytes{1, 2, 3}, rng.block()};
      seeds.push_back(sndef::encode_message(sndef::make_message({sndef::wrap_secure(sr)})));
    }
  }
  std::size_t accepted = 0, rejected = 0;
  auto fuzz = [&](const std::function<void(ByteView)>& decode) {
    for (int i = 0; i < 100000; ++i) {
      Bytes in;
      if (i % 2 == 0) {
        in.resize(rng.uniform(200));
        rng.fill(in);
      } else {
        in = seeds[rng.uniform(seeds.size())];
        std::size_t flips = 1 + rng.uniform(4);
        for (std::size_t f = 0; f < flips && !in.empty(); ++f) {
          in[rng.uniform(in.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
        }
        if (rng.uniform(4) == 0) in.resize(rng.uniform(in.size() + 1));
      }
      // Exact-size heap copy so that overreads are visible to sanitizers.
      auto buf = std::make_unique<std::uint8_t[]>(in.size() + 1);
      std::copy(in.begin(), in.end(), buf.get());
      try {
        decode(ByteView(buf.get(), in.size()));
        ++accepted;
      } catch (const Error&) {
        ++rejected;
      } catch (const std::exception& e) {
        c.require(false, std::string("unstructured exception: ") + e.what());
      }
    }
  };
  fuzz([](ByteView v) { (void)sndef::decode_message(v); });
  fuzz([](ByteView v) { (void)diag::decode_diag(v); });
  if (c.ok) {
    c.detail = "2x100000 inputs, " + std::to_string(accepted) + " decoded, " +
               std::to_string(rejected) + " structured errors";
  }
  return c;
}

// AC9
Check topology_plan() {
  Check c;
  using namespace wbms::diag;
  c.require(topology_plan(Topology::kCentralized, 1) == InterfacePlan{1, 1, false},
            "centralized");
  c.require(topology_plan(Topology::kCentralized, 1, true) == InterfacePlan{1, 1, true},
            "centralized, stored controller");
  c.require(topology_plan(Topology::kDistributed, 4) == InterfacePlan{5, 5, true},
            "distributed, 4 modules");
  c.require(topology_plan(Topology::kModulated, 3) == InterfacePlan{4, 4, true},
            "modulated, 3 modules");
  std::vector<Subsystem> subs{{Topology::kDistributed, 2}, {Topology::kDistributed, 3}};
  c.require(plan_decentralized(subs) == InterfacePlan{7, 7, true}, "decentralized 2+3");
  if (c.ok) c.detail = "worked examples match";
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Check()> fn;
  };
  const Entry entries[] = {
      {"AC1 protocol completeness", protocol_completeness},
      {"AC2 attack suite zero-success", attack_suite},
      {"AC3 chained-tag replay rejection", chained_tag_replay},
      {"AC4 crypto oracle equivalence", crypto_oracle},
      {"AC5 power figures", power_figures},
      {"AC6 duty-cycle claim", duty_cycle},
      {"AC7 BAN reproduction", ban_reproduction},
      {"AC8 codec totality", codec_totality},
      {"AC9 topology plan", topology_plan},
  };
  int failed = 0;
  for (const auto& e : entries) {
    Check c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    std::printf("%s %s: %s\n", c.ok ? "PASS" : "FAIL", e.name, c.detail.c_str());
    if (!c.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
