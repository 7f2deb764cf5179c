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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbms/bytes.hpp"
#include "wbms/diagnostics.hpp"
#include "wbms/error.hpp"
#include "wbms/handshake.hpp"
#include "wbms/secure_channel.hpp"

namespace wbms::adversary {

using handshake::PrincipalId;
using handshake::Role;

inline const PrincipalId kDefaultReaderId = PrincipalId::from_u32(0x52454144);      // "READ"
inline const PrincipalId kDefaultControllerId = PrincipalId::from_u32(0x424d5331);  // "BMS1"

struct EndpointConfig {
  PrincipalId id;
  MasterKey master;
  std::uint64_t seed = 0;
};

// One NDEF message on the simulated link. Honest frames are numbered in send
// order: 1..5 are the handshake, 6 onward the sealed workload records.
struct Frame {
  std::size_t index = 0;
  Role from = Role::kReader;
  Role to = Role::kController;
  Bytes bytes;
  bool injected = false;  // produced or altered by the adversary
};

// What the adversary does with a frame in flight. Empty result drops it.
struct Delivery {
  Role to;
  Bytes bytes;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::vector<Delivery> intercept(const Frame& frame) = 0;
};

// Full read/modify/inject control over the link, no key material.
enum class StrategyKind { kEavesdrop, kReplay, kReflect, kChosenChallenge, kBitFlip };

std::string_view to_string(StrategyKind k);
// "eavesdrop", "replay", "reflect", "chosen-challenge", "bitflip".
std::optional<StrategyKind> parse_strategy(std::string_view name);

struct AdversaryStrategy {
  StrategyKind kind = StrategyKind::kEavesdrop;
  // Replay: frame to substitute with the same-numbered frame of an earlier
  // honest session. Reflect: 0 turns the message-2 challenge into a forged
  // message 3; any other value bounces that frame back to its sender.
  // BitFlip: frame to corrupt.
  std::size_t frame = 2;
  // BitFlip: bit position within the frame, taken modulo its length.
  std::size_t bit_offset = 0;
  // ChosenChallenge: ch_r values the adversary submits to the controller.
  std::vector<Nonce> probes;
  // Replay: seed of the earlier session the frames come from.
  std::uint64_t prior_seed = 0;
};

std::unique_ptr<Adversary> make_adversary(const AdversaryStrategy& strategy,
                                          std::vector<Frame> prior_session = {});

// Simulated NFC link. Honest policy delivers every frame unchanged and in
// order; an adversary sees every frame and decides what gets delivered.
class LinkChannel {
 public:
  LinkChannel() = default;
  explicit LinkChannel(std::unique_ptr<Adversary> adversary)
      : adversary_(std::move(adversary)) {}

  std::vector<Delivery> transmit(Frame frame);

  // Every frame that appeared on the wire, honest and injected.
  const std::vector<Frame>& transcript() const { return transcript_; }
  bool tampered() const { return tampered_; }

 private:
  std::unique_ptr<Adversary> adversary_;
  std::vector<Frame> transcript_;
  bool tampered_ = false;
};

struct FailurePoint {
  // Protocol step that rejected: the number of the message the failing
  // operation would have produced (2..5; 5 also covers the controller
  // accepting message 5), or 5 + k for the k-th workload record.
  int message = 0;
  ErrorCode error = ErrorCode::kMalformedMessage;
  Role detected_by = Role::kReader;
  std::string detail;
};

struct SecrecyHit {
  std::size_t packet = 0;  // workload index
  std::size_t offset = 0;  // within the encoded packet
  std::size_t length = 0;  // maximal run, >= 8
};

struct SessionOutcome {
  bool reader_established = false;
  bool controller_established = false;
  std::size_t handshake_messages = 0;  // accepted handshake messages
  std::size_t records_sent = 0;
  std::size_t records_delivered = 0;   // opened successfully by the reader
  std::optional<FailurePoint> failure;
  std::vector<SecrecyHit> secrecy_hits;
  std::vector<Frame> transcript;
  std::vector<diag::DiagPacket> received;
  std::string session_id;  // hex, derived from the public nonces
  bool tampered = false;

  bool established() const { return reader_established && controller_established; }
};

// Drives the handshake, then seals each workload packet controller -> reader.
// Protocol errors end the session and are recorded, never thrown.
SessionOutcome run_session(LinkChannel& channel, const EndpointConfig& reader,
                           const EndpointConfig& controller,
                           const std::vector<diag::DiagPacket>& workload);

// Every maximal common substring of length >= min_len between a workload
// plaintext and any frame of the transcript.
std::vector<SecrecyHit> scan_secrecy(const std::vector<Bytes>& plaintexts,
                                     const std::vector<Frame>& transcript,
                                     std::size_t min_len = 8);

struct ChosenChallengeOutcome {
  std::vector<Bytes> responses;  // raw message-2 challenge fields, per probe
  std::size_t probes_rejected = 0;
  bool controller_authenticated_adversary = false;
  std::optional<FailurePoint> failure;  // of the impersonation attempt
};

// The adversary plays the reader: harvests the controller's message-2
// responses to chosen ch_r values, then tries to answer a fresh challenge
// with material built from them.
ChosenChallengeOutcome run_chosen_challenge(const EndpointConfig& controller,
                                            const std::vector<Nonce>& probes,
                                            std::uint64_t seed);

struct RunRecord {
  std::uint64_t seed = 0;
  bool blocked = false;
  bool success = false;
  std::optional<int> failure_message;
  std::optional<ErrorCode> error;
  std::size_t leaks = 0;
};

struct StrategyReport {
  StrategyKind kind;
  std::size_t runs = 0;
  std::size_t blocked = 0;
  std::size_t successes = 0;
  std::size_t leak_hits = 0;
  std::map<int, std::size_t> failure_messages;
  std::map<std::string, std::size_t> errors;
  std::vector<RunRecord> records;
};

struct AttackReport {
  std::uint64_t seed = 0;
  std::vector<StrategyReport> strategies;

  std::size_t total_successes() const;
};

// Standard workload for harness runs: one ACTIVE_DIAG packet from three BPCs
// and one IDLE_DIAG packet, with field values drawn from rng.
std::vector<diag::DiagPacket> sample_workload(Rng& rng);

// One attacked session for the given strategy and per-run seed.
RunRecord run_attack(StrategyKind kind, std::uint64_t seed,
                     std::optional<AdversaryStrategy> override_strategy = std::nullopt);

inline const std::vector<StrategyKind> kAllStrategies = {
    StrategyKind::kEavesdrop, StrategyKind::kReplay, StrategyKind::kReflect,
    StrategyKind::kChosenChallenge, StrategyKind::kBitFlip};

// Every strategy over runs_per_strategy derived seeds. Strategies run in
// parallel; results depend only on the seed. override_strategy replaces the
// per-run parameters of every run.
AttackReport run_attack_suite(std::uint64_t seed, std::size_t runs_per_strategy = 100,
                              const std::vector<StrategyKind>& kinds = kAllStrategies,
                              std::optional<AdversaryStrategy> override_strategy = std::nullopt);

// splitmix64 step; derives independent per-run seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

std::string format_transcript(const std::vector<Frame>& transcript);

}  // namespace wbms::adversary
