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

#include "wbms/adversary.hpp"

#include <deque>
#include <future>
#include <sstream>
#include <unordered_set>

#include "wbms/sndef_codec.hpp"

namespace wbms::adversary {

using handshake::Handshake;
using handshake::HandshakeMessage;
using handshake::Phase;

std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::kEavesdrop: return "eavesdrop";
    case StrategyKind::kReplay: return "replay";
    case StrategyKind::kReflect: return "reflect";
    case StrategyKind::kChosenChallenge: return "chosen-challenge";
    case StrategyKind::kBitFlip: return "bitflip";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (StrategyKind k : {StrategyKind::kEavesdrop, StrategyKind::kReplay, StrategyKind::kReflect,
                         StrategyKind::kChosenChallenge, StrategyKind::kBitFlip}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

Role other(Role r) { return r == Role::kReader ? Role::kController : Role::kReader; }

Bytes frame_handshake(const HandshakeMessage& msg) {
  return sndef::encode_message(
      sndef::make_message({sndef::NdefRecord{sndef::RecordType::kHandshake, 0, msg.encode()}}));
}

Bytes frame_record(const SecureRecord& rec) {
  return sndef::encode_message(sndef::make_message({sndef::wrap_secure(rec)}));
}

// Handshake payload of a single-record HANDSHAKE message.
Bytes unframe_handshake(ByteView raw) {
  sndef::NdefMessage msg;
  try {
    msg = sndef::decode_message(raw);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedMessage, e.what());
  }
  if (msg.records.size() != 1 || msg.records[0].type != sndef::RecordType::kHandshake) {
    throw Error(ErrorCode::kMalformedMessage, "expected one HANDSHAKE record");
  }
  return msg.records[0].payload;
}

SecureRecord unframe_record(ByteView raw) {
  sndef::NdefMessage msg = sndef::decode_message(raw);
  if (msg.records.size() != 1) throw Error(ErrorCode::kUnknownType, "expected one record");
  return sndef::unwrap_secure(msg.records[0]);
}

class Eavesdropper : public Adversary {
 public:
  std::vector<Delivery> intercept(const Frame& f) override { return {{f.to, f.bytes}}; }
};

class Replayer : public Adversary {
 public:
  Replayer(std::size_t frame, std::vector<Frame> prior) : frame_(frame), prior_(std::move(prior)) {}

  std::vector<Delivery> intercept(const Frame& f) override {
    if (f.index == frame_) {
      for (const Frame& p : prior_) {
        if (p.index == frame_) return {{f.to, p.bytes}};
      }
    }
    return {{f.to, f.bytes}};
  }

 private:
  std::size_t frame_;
  std::vector<Frame> prior_;
};

// frame == 0: forge message 3 from the message-2 challenge.
// otherwise: bounce the frame back to its sender.
class Reflector : public Adversary {
 public:
  explicit Reflector(std::size_t frame) : frame_(frame) {}

  std::vector<Delivery> intercept(const Frame& f) override {
    if (frame_ != 0) {
      if (f.index == frame_) return {{f.from, f.bytes}};
      return {{f.to, f.bytes}};
    }
    try {
      if (f.index == 1) reader_id_ = HandshakeMessage::decode(unframe_handshake(f.bytes)).sender;
      if (f.index == 2) {
        Bytes body = HandshakeMessage::decode(unframe_handshake(f.bytes)).body;
        challenge_.assign(body.end() - handshake::kChallengeSize, body.end());
      }
      if (f.index == 3 && reader_id_ && !challenge_.empty()) {
        HandshakeMessage forged{3, *reader_id_, challenge_};
        return {{f.to, frame_handshake(forged)}};
      }
    } catch (const Error&) {
      // Unparseable frames are passed through untouched.
    }
    return {{f.to, f.bytes}};
  }

 private:
  std::size_t frame_;
  std::optional<PrincipalId> reader_id_;
  Bytes challenge_;
};

class BitFlipper : public Adversary {
 public:
  BitFlipper(std::size_t frame, std::size_t bit) : frame_(frame), bit_(bit) {}

  std::vector<Delivery> intercept(const Frame& f) override {
    Bytes b = f.bytes;
    if (f.index == frame_ && !b.empty()) {
      std::size_t pos = (bit_ / 8) % b.size();
      b[pos] ^= static_cast<std::uint8_t>(1u << (bit_ % 8));
    }
    return {{f.to, std::move(b)}};
  }

 private:
  std::size_t frame_;
  std::size_t bit_;
};

}  // namespace

std::unique_ptr<Adversary> make_adversary(const AdversaryStrategy& s, std::vector<Frame> prior) {
  switch (s.kind) {
    case StrategyKind::kEavesdrop:
    case StrategyKind::kChosenChallenge:
      return std::make_unique<Eavesdropper>();
    case StrategyKind::kReplay:
      return std::make_unique<Replayer>(s.frame, std::move(prior));
    case StrategyKind::kReflect:
      return std::make_unique<Reflector>(s.frame);
    case StrategyKind::kBitFlip:
      return std::make_unique<BitFlipper>(s.frame, s.bit_offset);
  }
  return std::make_unique<Eavesdropper>();
}

std::vector<Delivery> LinkChannel::transmit(Frame frame) {
  std::vector<Delivery> out;
  if (adversary_) {
    out = adversary_->intercept(frame);
  } else {
    out.push_back({frame.to, frame.bytes});
  }
  bool altered = out.size() != 1 || out[0].to != frame.to || out[0].bytes != frame.bytes;
  transcript_.push_back(frame);
  if (altered) {
    tampered_ = true;
    for (const Delivery& d : out) {
      transcript_.push_back(Frame{frame.index, other(d.to), d.to, d.bytes, true});
    }
  }
  return out;
}

std::vector<SecrecyHit> scan_secrecy(const std::vector<Bytes>& plaintexts,
                                     const std::vector<Frame>& transcript, std::size_t min_len) {
  std::vector<SecrecyHit> hits;
  if (min_len == 0) return hits;
  std::unordered_set<std::string_view> windows;
  for (const Frame& f : transcript) {
    if (f.bytes.size() < min_len) continue;
    auto data = reinterpret_cast<const char*>(f.bytes.data());
    for (std::size_t i = 0; i + min_len <= f.bytes.size(); ++i) {
      windows.emplace(data + i, min_len);
    }
  }
  for (std::size_t p = 0; p < plaintexts.size(); ++p) {
    const Bytes& text = plaintexts[p];
    auto data = reinterpret_cast<const char*>(text.data());
    constexpr std::size_t kNoRun = static_cast<std::size_t>(-1);
    std::size_t run_start = kNoRun;
    for (std::size_t i = 0; i + min_len <= text.size() + 1; ++i) {
      bool hit = i + min_len <= text.size() && windows.count(std::string_view(data + i, min_len));
      if (hit && run_start == kNoRun) run_start = i;
      if (!hit && run_start != kNoRun) {
        hits.push_back({p, run_start, i - 1 - run_start + min_len});
        run_start = kNoRun;
      }
    }
  }
  return hits;
}

SessionOutcome run_session(LinkChannel& channel, const EndpointConfig& reader_cfg,
                           const EndpointConfig& controller_cfg,
                           const std::vector<diag::DiagPacket>& workload) {
  SessionOutcome out;
  Handshake reader(Role::kReader, reader_cfg.id, reader_cfg.master, Rng(reader_cfg.seed));
  Handshake controller(Role::kController, controller_cfg.id, controller_cfg.master,
                       Rng(controller_cfg.seed));

  std::vector<Bytes> plaintexts;
  for (const auto& p : workload) plaintexts.push_back(diag::encode_diag(p));

  std::size_t next_index = 1;
  std::deque<Delivery> inbox;
  auto send = [&](Role from, Bytes bytes) {
    for (Delivery& d : channel.transmit(Frame{next_index++, from, other(from), std::move(bytes)})) {
      inbox.push_back(std::move(d));
    }
  };
  auto send_next_record = [&] {
    if (out.records_sent >= workload.size()) return;
    const diag::DiagPacket& p = workload[out.records_sent];
    Bytes add_data{static_cast<std::uint8_t>(p.use_case)};
    put_u32be(add_data, p.sequence_no);
    SecureRecord rec = controller.channel().seal(plaintexts[out.records_sent], add_data,
                                                 controller.rng());
    ++out.records_sent;
    send(Role::kController, frame_record(rec));
  };

  send(Role::kReader, frame_handshake(reader.reader_start()));

  while (!inbox.empty() && !out.failure) {
    Delivery d = std::move(inbox.front());
    inbox.pop_front();
    Handshake& ep = d.to == Role::kReader ? reader : controller;
    int step = 0;
    switch (ep.phase()) {
      case Phase::kInit: step = d.to == Role::kController ? 2 : 1; break;
      case Phase::kChallenged: step = d.to == Role::kController ? 4 : 3; break;
      case Phase::kAuthenticated:
      case Phase::kKeyConfirmSent: step = 5; break;
      case Phase::kEstablished:
        step = 5 + static_cast<int>(d.to == Role::kReader ? out.records_delivered + 1
                                                          : out.records_sent);
        break;
      case Phase::kFailed: step = 0; break;
    }
    try {
      if (d.to == Role::kController) {
        switch (controller.phase()) {
          case Phase::kInit:
            send(Role::kController, frame_handshake(controller.controller_respond(unframe_handshake(d.bytes))));
            ++out.handshake_messages;
            break;
          case Phase::kChallenged:
            send(Role::kController,
                 frame_handshake(controller.controller_key_confirm(unframe_handshake(d.bytes))));
            ++out.handshake_messages;
            break;
          case Phase::kKeyConfirmSent:
            controller.controller_finalize(unframe_handshake(d.bytes));
            ++out.handshake_messages;
            out.controller_established = true;
            send_next_record();
            break;
          default:
            // The controller only sends in the data phase; anything arriving
            // now must still pass its receive chain.
            controller.channel().open(unframe_record(d.bytes));
            throw Error(ErrorCode::kWrongPhase, "unexpected record at controller");
        }
      } else {
        switch (reader.phase()) {
          case Phase::kChallenged:
            send(Role::kReader, frame_handshake(reader.reader_answer(unframe_handshake(d.bytes))));
            ++out.handshake_messages;
            break;
          case Phase::kAuthenticated:
            send(Role::kReader,
                 frame_handshake(reader.reader_key_confirm(unframe_handshake(d.bytes))));
            ++out.handshake_messages;
            out.reader_established = true;
            break;
          case Phase::kEstablished: {
            Bytes plain = reader.channel().open(unframe_record(d.bytes));
            out.received.push_back(diag::decode_diag(plain));
            ++out.records_delivered;
            send_next_record();
            break;
          }
          default:
            throw Error(ErrorCode::kWrongPhase, "reader received a frame in phase " +
                                                    std::string(to_string(reader.phase())));
        }
      }
    } catch (const Error& e) {
      out.failure = FailurePoint{step, e.code(), d.to, e.what()};
    }
  }

  if (reader.ch_r() && reader.ch_t()) {
    out.session_id = to_hex(ByteView(reader.ch_r()->bytes).first(4)) +
                     to_hex(ByteView(reader.ch_t()->bytes).first(4));
  }
  out.transcript = channel.transcript();
  out.tampered = channel.tampered();
  out.secrecy_hits = scan_secrecy(plaintexts, out.transcript);
  return out;
}

ChosenChallengeOutcome run_chosen_challenge(const EndpointConfig& controller_cfg,
                                            const std::vector<Nonce>& probes, std::uint64_t seed) {
  ChosenChallengeOutcome out;
  Rng rng(seed);
  const PrincipalId spoofed_reader = kDefaultReaderId;

  std::uint64_t session = 0;
  auto fresh_controller = [&] {
    return Handshake(Role::kController, controller_cfg.id, controller_cfg.master,
                     Rng(mix_seed(controller_cfg.seed, ++session)));
  };

  for (const Nonce& probe : probes) {
    Handshake c = fresh_controller();
    HandshakeMessage msg1{1, spoofed_reader, Bytes(probe.bytes.begin(), probe.bytes.end())};
    try {
      HandshakeMessage msg2 = c.controller_respond(msg1.encode());
      out.responses.emplace_back(msg2.body.end() - handshake::kChallengeSize, msg2.body.end());
    } catch (const Error&) {
      ++out.probes_rejected;
    }
  }

  // Impersonation: answer a live challenge with each harvested response and
  // with the live message-2 challenge itself.
  Handshake probe_session = fresh_controller();
  std::vector<Bytes> candidates = out.responses;
  {
    Nonce ch_r = Nonce::generate(rng);
    HandshakeMessage msg1{1, spoofed_reader, Bytes(ch_r.bytes.begin(), ch_r.bytes.end())};
    HandshakeMessage msg2 = probe_session.controller_respond(msg1.encode());
    candidates.emplace_back(msg2.body.end() - handshake::kChallengeSize, msg2.body.end());
  }
  if (candidates.empty()) return out;

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Handshake c = i + 1 == candidates.size() ? std::move(probe_session) : fresh_controller();
    try {
      if (c.phase() == Phase::kInit) {
        Nonce ch_r = Nonce::generate(rng);
        HandshakeMessage msg1{1, spoofed_reader, Bytes(ch_r.bytes.begin(), ch_r.bytes.end())};
        c.controller_respond(msg1.encode());
      }
      HandshakeMessage msg3{3, spoofed_reader, candidates[i]};
      c.controller_key_confirm(msg3.encode());
      out.controller_authenticated_adversary = true;
    } catch (const Error& e) {
      if (!out.failure) out.failure = FailurePoint{4, e.code(), Role::kController, e.what()};
    }
  }
  return out;
}

std::size_t AttackReport::total_successes() const {
  std::size_t n = 0;
  for (const auto& s : strategies) n += s.successes;
  return n;
}

std::vector<diag::DiagPacket> sample_workload(Rng& rng) {
  auto report = [&](bool stored) {
    diag::BpcReport r;
    rng.fill(r.pack_id);
    r.timestamp = 1'700'000'000ULL + rng.uniform(100'000'000);
    r.soc_permille = static_cast<std::uint16_t>(rng.uniform(1001));
    r.soh_permille = static_cast<std::uint16_t>(600 + rng.uniform(401));
    for (int c = 0; c < 12; ++c) {
      r.cell_voltages_mv.push_back(static_cast<std::uint16_t>(3000 + rng.uniform(1201)));
    }
    for (int t = 0; t < 2; ++t) {
      r.temperatures_dk.push_back(static_cast<std::int16_t>(2880 + rng.uniform(301)));
    }
    r.status_flags = stored ? diag::status::kStored : diag::status::kBalancing;
    return r;
  };
  std::vector<diag::BpcReport> bpcs{report(false), report(false), report(false)};
  return {diag::collect_from_bpcs(bpcs, 1), diag::make_idle_packet(report(true), 2)};
}

RunRecord run_attack(StrategyKind kind, std::uint64_t seed,
                     std::optional<AdversaryStrategy> override_strategy) {
  Rng rng(seed);
  MasterKey master = MasterKey::random(rng);
  EndpointConfig reader{kDefaultReaderId, master, mix_seed(seed, 1)};
  EndpointConfig controller{kDefaultControllerId, master, mix_seed(seed, 2)};
  std::vector<diag::DiagPacket> workload = sample_workload(rng);

  AdversaryStrategy strategy;
  strategy.kind = kind;
  switch (kind) {
    case StrategyKind::kReplay:
      strategy.frame = 2;
      strategy.prior_seed = mix_seed(seed, 3);
      break;
    case StrategyKind::kReflect:
      strategy.frame = 0;
      break;
    case StrategyKind::kBitFlip:
      strategy.frame = 1 + rng.uniform(5 + workload.size());
      strategy.bit_offset = rng.uniform(1u << 16);
      break;
    case StrategyKind::kChosenChallenge:
      strategy.probes.push_back(Nonce{});  // all-zero probe
      for (int i = 0; i < 8; ++i) strategy.probes.push_back(Nonce::generate(rng));
      break;
    case StrategyKind::kEavesdrop:
      break;
  }
  if (override_strategy) {
    strategy = *override_strategy;
    strategy.kind = kind;
  }

  RunRecord rec;
  rec.seed = seed;
  if (kind == StrategyKind::kChosenChallenge) {
    ChosenChallengeOutcome cc = run_chosen_challenge(controller, strategy.probes, mix_seed(seed, 4));
    rec.success = cc.controller_authenticated_adversary;
    rec.blocked = !rec.success && cc.failure.has_value();
    if (cc.failure) {
      rec.failure_message = cc.failure->message;
      rec.error = cc.failure->error;
    }
    return rec;
  }

  std::vector<Frame> prior;
  if (kind == StrategyKind::kReplay) {
    LinkChannel honest;
    EndpointConfig r0 = reader, c0 = controller;
    r0.seed = mix_seed(strategy.prior_seed, 1);
    c0.seed = mix_seed(strategy.prior_seed, 2);
    prior = run_session(honest, r0, c0, workload).transcript;
  }

  LinkChannel link(make_adversary(strategy, std::move(prior)));
  SessionOutcome o = run_session(link, reader, controller, workload);
  rec.leaks = o.secrecy_hits.size();
  if (o.failure) {
    rec.failure_message = o.failure->message;
    rec.error = o.failure->error;
  }
  rec.blocked = o.failure.has_value();
  bool undetected = o.tampered && !o.failure;
  rec.success = undetected || rec.leaks > 0;
  return rec;
}

AttackReport run_attack_suite(std::uint64_t seed, std::size_t runs,
                              const std::vector<StrategyKind>& kinds,
                              std::optional<AdversaryStrategy> override_strategy) {
  AttackReport report;
  report.seed = seed;
  std::vector<std::future<StrategyReport>> jobs;
  for (StrategyKind kind : kinds) {
    jobs.push_back(std::async(std::launch::async, [kind, seed, runs, override_strategy] {
      StrategyReport sr;
      sr.kind = kind;
      for (std::size_t i = 0; i < runs; ++i) {
        std::uint64_t run_seed = mix_seed(seed, (static_cast<std::uint64_t>(kind) << 32) | i);
        RunRecord rec = run_attack(kind, run_seed, override_strategy);
        ++sr.runs;
        if (rec.blocked) ++sr.blocked;
        if (rec.success) ++sr.successes;
        sr.leak_hits += rec.leaks;
        if (rec.failure_message) ++sr.failure_messages[*rec.failure_message];
        if (rec.error) ++sr.errors[std::string(to_string(*rec.error))];
        sr.records.push_back(rec);
      }
      return sr;
    }));
  }
  for (auto& j : jobs) report.strategies.push_back(j.get());
  return report;
}

std::string format_transcript(const std::vector<Frame>& transcript) {
  std::ostringstream out;
  for (const Frame& f : transcript) {
    out << "frame " << f.index << (f.injected ? " [adversary] " : " ")
        << handshake::to_string(f.from) << " -> " << handshake::to_string(f.to) << "  "
        << to_hex(f.bytes) << "\n";
  }
  return out.str();
}

}  // namespace wbms::adversary
