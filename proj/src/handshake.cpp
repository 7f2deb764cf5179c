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

#include "wbms/handshake.hpp"

#include <algorithm>

#include "wbms/error.hpp"
#include "wbms/sndef_codec.hpp"

namespace wbms::handshake {
namespace {

constexpr std::size_t kIdSize = 4;

Nonce nonce_at(ByteView body, std::size_t offset) {
  return Nonce::from(body.subspan(offset, kBlockSize));
}

}  // namespace

PrincipalId PrincipalId::from_u32(std::uint32_t v) {
  PrincipalId id;
  for (int i = 0; i < 4; ++i) id.bytes[i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
  return id;
}

std::uint32_t PrincipalId::value() const {
  std::uint32_t v = 0;
  for (auto b : bytes) v = (v << 8) | b;
  return v;
}

std::string_view to_string(Role role) {
  return role == Role::kReader ? "reader" : "controller";
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kInit: return "Init";
    case Phase::kChallenged: return "Challenged";
    case Phase::kAuthenticated: return "Authenticated";
    case Phase::kKeyConfirmSent: return "KeyConfirmSent";
    case Phase::kEstablished: return "Established";
    case Phase::kFailed: return "Failed";
  }
  return "?";
}

Bytes HandshakeMessage::encode() const {
  Bytes out;
  out.reserve(kHeaderSize + body.size());
  out.push_back(msg_no);
  append(out, sender.bytes);
  put_u16be(out, static_cast<std::uint16_t>(body.size()));
  append(out, body);
  return out;
}

HandshakeMessage HandshakeMessage::decode(ByteView raw) {
  if (raw.size() < kHeaderSize) {
    throw Error(ErrorCode::kMalformedMessage, "shorter than the 7-byte header");
  }
  HandshakeMessage msg;
  msg.msg_no = raw[0];
  std::copy_n(raw.begin() + 1, kIdSize, msg.sender.bytes.begin());
  std::size_t body_len = (static_cast<std::size_t>(raw[5]) << 8) | raw[6];
  if (raw.size() != kHeaderSize + body_len) {
    throw Error(ErrorCode::kMalformedMessage,
                "body_len " + std::to_string(body_len) + " does not match " +
                    std::to_string(raw.size() - kHeaderSize) + " body bytes");
  }
  if (msg.msg_no < 1 || msg.msg_no > 5) {
    throw Error(ErrorCode::kMalformedMessage, "msg_no out of range");
  }
  if (msg.sender.is_zero()) throw Error(ErrorCode::kMalformedMessage, "zero sender id");
  msg.body.assign(raw.begin() + kHeaderSize, raw.end());
  return msg;
}

Bytes challenge_plaintext(const PrincipalId& id, const Nonce& nonce) {
  Bytes out = concat(id.bytes, nonce.bytes);
  out.resize(kChallengeSize, 0x00);
  return out;
}

Handshake::Handshake(Role role, PrincipalId self, MasterKey master, Rng rng)
    : role_(role), self_(self), master_(std::move(master)), rng_(std::move(rng)) {
  if (self_.is_zero()) throw Error(ErrorCode::kMalformedMessage, "zero self id");
}

template <typename Fn>
auto Handshake::guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kWrongPhase) phase_ = Phase::kFailed;
    throw;
  }
}

void Handshake::expect(Role role, Phase phase) const {
  if (role_ != role || phase_ != phase) {
    throw Error(ErrorCode::kWrongPhase, std::string(to_string(role_)) + " in phase " +
                                            std::string(to_string(phase_)));
  }
}

HandshakeMessage Handshake::receive(ByteView raw, std::uint8_t msg_no) {
  HandshakeMessage msg = HandshakeMessage::decode(raw);
  if (msg.msg_no != msg_no) {
    throw Error(ErrorCode::kMalformedMessage, "expected message " + std::to_string(msg_no) +
                                                  ", got " + std::to_string(msg.msg_no));
  }
  if (msg.sender == self_) throw Error(ErrorCode::kMalformedMessage, "sender id is our own");
  received_.emplace_back(raw.begin(), raw.end());
  return msg;
}

HandshakeMessage Handshake::send(std::uint8_t msg_no, Bytes body) {
  HandshakeMessage msg{msg_no, self_, std::move(body)};
  sent_.push_back(msg.encode());
  return msg;
}

void Handshake::establish_keys() {
  keys_ = derive_session_keys(master_, *ch_r_, *ch_t_);
  channel_ = ChannelState(*keys_);
}

HandshakeMessage Handshake::reader_start() {
  expect(Role::kReader, Phase::kInit);
  ch_r_ = Nonce::generate(rng_);
  HandshakeMessage out = send(1, Bytes(ch_r_->bytes.begin(), ch_r_->bytes.end()));
  phase_ = Phase::kChallenged;
  return out;
}

HandshakeMessage Handshake::controller_respond(ByteView raw) {
  expect(Role::kController, Phase::kInit);
  return guarded([&] {
    HandshakeMessage msg1 = receive(raw, 1);
    if (msg1.body.size() != kBlockSize) {
      throw Error(ErrorCode::kMalformedMessage, "message 1 body must be 16 bytes");
    }
    Nonce ch_r = nonce_at(msg1.body, 0);
    if (ch_r.is_zero()) throw Error(ErrorCode::kInvalidNonce, "ch_r is all-zero");
    Nonce ch_t;
    do {
      ch_t = Nonce::generate(rng_);
    } while (ch_t == ch_r);
    peer_ = msg1.sender;
    ch_r_ = ch_r;
    ch_t_ = ch_t;

    Bytes body(ch_t.bytes.begin(), ch_t.bytes.end());
    append(body, double_encrypt(master_, challenge_plaintext(self_, ch_r), Padding::kNone));
    HandshakeMessage out = send(2, std::move(body));
    phase_ = Phase::kChallenged;
    return out;
  });
}

HandshakeMessage Handshake::reader_answer(ByteView raw) {
  expect(Role::kReader, Phase::kChallenged);
  return guarded([&] {
    HandshakeMessage msg2 = receive(raw, 2);
    if (msg2.body.size() != kBlockSize + kChallengeSize) {
      throw Error(ErrorCode::kMalformedMessage, "message 2 body must be 48 bytes");
    }
    Nonce ch_t = nonce_at(msg2.body, 0);
    validate_nonce_pair(*ch_r_, ch_t);

    ByteView chal = ByteView(msg2.body).subspan(kBlockSize);
    Bytes opened = double_decrypt(master_, chal, Padding::kNone);
    if (!equal_ct(opened, challenge_plaintext(msg2.sender, *ch_r_))) {
      throw Error(ErrorCode::kAuthFailure, "controller challenge response mismatch");
    }
    peer_ = msg2.sender;
    ch_t_ = ch_t;

    HandshakeMessage out =
        send(3, double_decrypt(master_, challenge_plaintext(self_, ch_t), Padding::kNone));
    establish_keys();
    phase_ = Phase::kAuthenticated;
    return out;
  });
}

HandshakeMessage Handshake::controller_key_confirm(ByteView raw) {
  expect(Role::kController, Phase::kChallenged);
  return guarded([&] {
    HandshakeMessage msg3 = receive(raw, 3);
    if (msg3.body.size() != kChallengeSize) {
      throw Error(ErrorCode::kMalformedMessage, "message 3 body must be 32 bytes");
    }
    if (msg3.sender != *peer_) {
      throw Error(ErrorCode::kAuthFailure, "message 3 sender differs from message 1");
    }
    Bytes check = double_encrypt(master_, msg3.body, Padding::kNone);
    if (!equal_ct(check, challenge_plaintext(*peer_, *ch_t_))) {
      throw Error(ErrorCode::kAuthFailure, "reader challenge response mismatch");
    }
    establish_keys();

    // X = msg1 || msg3 as received from the reader.
    Bytes confirm = concat(self_.bytes, received_[0], received_[1]);
    SecureRecord rec = channel_.seal(confirm, {}, rng_);
    HandshakeMessage out = send(4, sndef::encode_secure_payload(rec));
    phase_ = Phase::kKeyConfirmSent;
    return out;
  });
}

Bytes Handshake::open_confirmation(const HandshakeMessage& msg, ByteView expected_tail) {
  if (msg.sender != *peer_) {
    throw Error(ErrorCode::kKeyConfirmFailure, "outer sender id differs from peer");
  }
  SecureRecord rec;
  try {
    rec = sndef::decode_secure_payload(msg.body);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedMessage, e.what());
  }
  Bytes plain;
  try {
    plain = channel_.open(rec);
  } catch (const Error& e) {
    throw Error(ErrorCode::kKeyConfirmFailure, e.what());
  }
  Bytes expected = concat(peer_->bytes, expected_tail);
  if (!equal_ct(plain, expected)) {
    throw Error(ErrorCode::kKeyConfirmFailure, "confirmation transcript mismatch");
  }
  return plain;
}

HandshakeMessage Handshake::reader_key_confirm(ByteView raw) {
  expect(Role::kReader, Phase::kAuthenticated);
  return guarded([&] {
    HandshakeMessage msg4 = receive(raw, 4);
    // Our view of X: msg1 || msg3 as we sent them.
    open_confirmation(msg4, concat(sent_[0], sent_[1]));

    // X' = msg2 || msg4 as received from the controller.
    Bytes confirm = concat(self_.bytes, received_[0], received_[1]);
    SecureRecord rec = channel_.seal(confirm, {}, rng_);
    HandshakeMessage out = send(5, sndef::encode_secure_payload(rec));
    phase_ = Phase::kEstablished;
    return out;
  });
}

void Handshake::controller_finalize(ByteView raw) {
  expect(Role::kController, Phase::kKeyConfirmSent);
  guarded([&] {
    HandshakeMessage msg5 = receive(raw, 5);
    open_confirmation(msg5, concat(sent_[0], sent_[1]));
    phase_ = Phase::kEstablished;
    return 0;
  });
}

}  // namespace wbms::handshake
