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
#include <optional>

#include "wbms/aes.hpp"
#include "wbms/bytes.hpp"
#include "wbms/rng.hpp"

namespace wbms {

// Pre-embedded 128-bit master key. Deliberately has no stream operator or
// hex accessor: nothing in the library can print it.
class MasterKey {
 public:
  explicit MasterKey(ByteView bytes);
  explicit MasterKey(const aes::Key& bytes) : bytes_(bytes) {}
  ~MasterKey();
  MasterKey(const MasterKey&) = default;
  MasterKey& operator=(const MasterKey&) = default;

  static MasterKey random(Rng& rng);

  const aes::Key& bytes() const { return bytes_; }
  friend bool operator==(const MasterKey&, const MasterKey&) = default;

 private:
  aes::Key bytes_;
};

struct SessionKeys {
  aes::Key k_enc{};
  aes::Key k_mac{};
  friend bool operator==(const SessionKeys&, const SessionKeys&) = default;
};

// 16-byte challenge. A nonce may hold any value so that malformed input can
// be represented; validity is checked where the protocol consumes it.
struct Nonce {
  Block bytes{};

  static Nonce from(ByteView data);
  // Draws until non-zero.
  static Nonce generate(Rng& rng);
  bool is_zero() const;
  friend bool operator==(const Nonce&, const Nonce&) = default;
};

// Throws Error(kInvalidNonce) if either nonce is zero or both are equal.
void validate_nonce_pair(const Nonce& ch_r, const Nonce& ch_t);

// One SNDEF unit.
struct SecureRecord {
  Block iv{};
  Bytes sec_data;
  Bytes add_data;
  Block tag{};
  friend bool operator==(const SecureRecord&, const SecureRecord&) = default;
};

// k_enc = CMAC(K_M, 0x01 || "SKEYENC" || ch_r || ch_t || 0x0080)
// k_mac = CMAC(K_M, 0x02 || "SKEYMAC" || ch_r || ch_t || 0x0080)
SessionKeys derive_session_keys(const MasterKey& master, const Nonce& ch_r,
                                const Nonce& ch_t);

// Input string fed to CMAC for the given counter (1 = enc, 2 = mac).
Bytes kdf_input(std::uint8_t counter, const Nonce& ch_r, const Nonce& ch_t);

enum class Padding { kPkcs7, kNone };

// E(E(x)) with AES-128-CBC and an all-zero IV on both passes. With kPkcs7
// the payload is padded first; with kNone it must already be block aligned.
Bytes double_encrypt(const MasterKey& key, ByteView payload,
                     Padding padding = Padding::kPkcs7);
// D(D(x)); the reverse direction. kPkcs7 strips padding after the second
// pass, kNone returns the raw blocks.
Bytes double_decrypt(const MasterKey& key, ByteView payload,
                     Padding padding = Padding::kNone);

// CMAC(k_mac, sec_data || iv || add_data || previous_tag).
Block compute_chained_tag(const aes::Key& k_mac, ByteView sec_data, ByteView iv,
                          ByteView add_data, ByteView previous_tag);

// Per-direction tag chains over one set of session keys. Both chains start at
// the all-zero sentinel and advance only on a successful seal or open.
class ChannelState {
 public:
  ChannelState() = default;
  explicit ChannelState(const SessionKeys& keys) : keys_(keys) {}

  bool established() const { return keys_.has_value(); }

  SecureRecord seal(ByteView plaintext, ByteView add_data, Rng& rng);
  // Verifies the chained tag before touching the ciphertext.
  Bytes open(const SecureRecord& record);

  const Block& last_tag_sent() const { return last_tag_sent_; }
  const Block& last_tag_received() const { return last_tag_received_; }
  std::uint64_t records_sealed() const { return records_sealed_; }
  std::uint64_t records_opened() const { return records_opened_; }

 private:
  const SessionKeys& keys() const;

  std::optional<SessionKeys> keys_;
  Block last_tag_sent_{};
  Block last_tag_received_{};
  std::uint64_t records_sealed_ = 0;
  std::uint64_t records_opened_ = 0;
};

inline SecureRecord seal_record(ChannelState& state, ByteView plaintext,
                                ByteView add_data, Rng& rng) {
  return state.seal(plaintext, add_data, rng);
}

inline Bytes open_record(ChannelState& state, const SecureRecord& record) {
  return state.open(record);
}

}  // namespace wbms
