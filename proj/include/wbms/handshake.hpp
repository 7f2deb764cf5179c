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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wbms/bytes.hpp"
#include "wbms/rng.hpp"
#include "wbms/secure_channel.hpp"

namespace wbms::handshake {

struct PrincipalId {
  std::array<std::uint8_t, 4> bytes{};

  static PrincipalId from_u32(std::uint32_t v);
  std::uint32_t value() const;
  bool is_zero() const { return value() == 0; }
  friend bool operator==(const PrincipalId&, const PrincipalId&) = default;
};

enum class Role { kReader, kController };

// Phases only move forward; kFailed is terminal.
enum class Phase {
  kInit,
  kChallenged,
  kAuthenticated,
  kKeyConfirmSent,
  kEstablished,
  kFailed,
};

std::string_view to_string(Role role);
std::string_view to_string(Phase phase);

// Wire: msg_no(1) || sender_id(4) || body_len(2, big-endian) || body
inline constexpr std::size_t kHeaderSize = 7;
inline constexpr std::size_t kChallengeSize = 32;

struct HandshakeMessage {
  std::uint8_t msg_no = 0;
  PrincipalId sender;
  Bytes body;

  Bytes encode() const;
  // Throws Error(kMalformedMessage) on any framing inconsistency.
  static HandshakeMessage decode(ByteView raw);
  friend bool operator==(const HandshakeMessage&, const HandshakeMessage&) = default;
};

// id || nonce zero-extended to two blocks; input to the unpadded challenge
// transform in messages 2 and 3.
Bytes challenge_plaintext(const PrincipalId& id, const Nonce& nonce);

// One endpoint of the five-message mutual authentication and key
// confirmation exchange:
//
//   1) R -> C : N_R, ch_r
//   2) C -> R : M_N, ch_t, E(E(M_N || ch_r))
//   3) R -> C : D(D(N_R || ch_t))
//   4) C -> R : seal_KS(M_N || msg1 || msg3)
//   5) R -> C : seal_KS(N_R || msg2 || msg4)
//
// The controller only ever applies the encryption direction to challenge
// material and the reader only the decryption direction, so neither side
// can be used as an oracle for the other's response.
//
// Each step method accepts the raw wire bytes of the peer's message. On any
// protocol error the endpoint moves to kFailed and the Error is rethrown.
// Calling a step out of order throws kWrongPhase and leaves the phase alone.
class Handshake {
 public:
  Handshake(Role role, PrincipalId self, MasterKey master, Rng rng);

  HandshakeMessage reader_start();
  HandshakeMessage controller_respond(ByteView msg1);
  HandshakeMessage reader_answer(ByteView msg2);
  HandshakeMessage controller_key_confirm(ByteView msg3);
  HandshakeMessage reader_key_confirm(ByteView msg4);
  void controller_finalize(ByteView msg5);

  Role role() const { return role_; }
  Phase phase() const { return phase_; }
  const PrincipalId& self_id() const { return self_; }
  const std::optional<PrincipalId>& peer_id() const { return peer_; }
  const std::optional<Nonce>& ch_r() const { return ch_r_; }
  const std::optional<Nonce>& ch_t() const { return ch_t_; }
  // Raw bytes of every message received, in order.
  const std::vector<Bytes>& transcript() const { return received_; }
  // Present from kAuthenticated onwards.
  const std::optional<SessionKeys>& session_keys() const { return keys_; }

  // Live record channel once established (and during key confirmation).
  ChannelState& channel() { return channel_; }
  const ChannelState& channel() const { return channel_; }
  Rng& rng() { return rng_; }

 private:
  void expect(Role role, Phase phase) const;
  HandshakeMessage receive(ByteView raw, std::uint8_t msg_no);
  HandshakeMessage send(std::uint8_t msg_no, Bytes body);
  void establish_keys();
  Bytes open_confirmation(const HandshakeMessage& msg, ByteView expected_tail);
  template <typename Fn>
  auto guarded(Fn&& fn);

  Role role_;
  PrincipalId self_;
  MasterKey master_;
  Rng rng_;
  Phase phase_ = Phase::kInit;
  std::optional<PrincipalId> peer_;
  std::optional<Nonce> ch_r_;
  std::optional<Nonce> ch_t_;
  std::optional<SessionKeys> keys_;
  ChannelState channel_;
  std::vector<Bytes> received_;
  std::vector<Bytes> sent_;
};

}  // namespace wbms::handshake
