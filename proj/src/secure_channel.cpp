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

#include "wbms/secure_channel.hpp"

#include <algorithm>

#include "wbms/error.hpp"

namespace wbms {
namespace {

constexpr Block kZeroBlock{};

aes::Key key_from(ByteView data) {
  if (data.size() != aes::kKeySize) {
    throw Error(ErrorCode::kBadLength,
                "key must be 16 bytes, got " + std::to_string(data.size()));
  }
  aes::Key k;
  std::copy(data.begin(), data.end(), k.begin());
  return k;
}

}  // namespace

MasterKey::MasterKey(ByteView bytes) : bytes_(key_from(bytes)) {}

MasterKey::~MasterKey() { secure_zero(bytes_); }

MasterKey MasterKey::random(Rng& rng) {
  aes::Key k;
  rng.fill(k);
  return MasterKey(k);
}

Nonce Nonce::from(ByteView data) {
  if (data.size() != kBlockSize) {
    throw Error(ErrorCode::kBadLength,
                "nonce must be 16 bytes, got " + std::to_string(data.size()));
  }
  Nonce n;
  std::copy(data.begin(), data.end(), n.bytes.begin());
  return n;
}

Nonce Nonce::generate(Rng& rng) {
  Nonce n;
  do {
    n.bytes = rng.block();
  } while (n.is_zero());
  return n;
}

bool Nonce::is_zero() const { return bytes == kZeroBlock; }

void validate_nonce_pair(const Nonce& ch_r, const Nonce& ch_t) {
  if (ch_r.is_zero() || ch_t.is_zero()) {
    throw Error(ErrorCode::kInvalidNonce, "nonce is all-zero");
  }
  if (ch_r == ch_t) throw Error(ErrorCode::kInvalidNonce, "ch_r equals ch_t");
}

Bytes kdf_input(std::uint8_t counter, const Nonce& ch_r, const Nonce& ch_t) {
  static constexpr std::string_view kEncLabel = "SKEYENC";
  static constexpr std::string_view kMacLabel = "SKEYMAC";
  std::string_view label = counter == 1 ? kEncLabel : kMacLabel;
  Bytes in;
  in.push_back(counter);
  in.insert(in.end(), label.begin(), label.end());
  append(in, ch_r.bytes);
  append(in, ch_t.bytes);
  put_u16be(in, 0x0080);  // output length in bits
  return in;
}

SessionKeys derive_session_keys(const MasterKey& master, const Nonce& ch_r,
                                const Nonce& ch_t) {
  validate_nonce_pair(ch_r, ch_t);
  SessionKeys keys;
  keys.k_enc = aes::cmac(master.bytes(), kdf_input(1, ch_r, ch_t));
  keys.k_mac = aes::cmac(master.bytes(), kdf_input(2, ch_r, ch_t));
  return keys;
}

Bytes double_encrypt(const MasterKey& key, ByteView payload, Padding padding) {
  if (payload.empty()) throw Error(ErrorCode::kBadLength, "empty payload");
  Bytes first = padding == Padding::kPkcs7
                    ? aes::cbc_encrypt(key.bytes(), kZeroBlock, aes::pkcs7_pad(payload))
                    : aes::cbc_encrypt(key.bytes(), kZeroBlock, payload);
  return aes::cbc_encrypt(key.bytes(), kZeroBlock, first);
}

Bytes double_decrypt(const MasterKey& key, ByteView payload, Padding padding) {
  Bytes once = aes::cbc_decrypt(key.bytes(), kZeroBlock, payload);
  Bytes twice = aes::cbc_decrypt(key.bytes(), kZeroBlock, once);
  return padding == Padding::kPkcs7 ? aes::pkcs7_unpad(twice) : twice;
}

Block compute_chained_tag(const aes::Key& k_mac, ByteView sec_data, ByteView iv,
                          ByteView add_data, ByteView previous_tag) {
  if (iv.size() != kBlockSize || previous_tag.size() != kBlockSize) {
    throw Error(ErrorCode::kBadLength, "iv and previous tag must be 16 bytes");
  }
  return aes::cmac(k_mac, concat(sec_data, iv, add_data, previous_tag));
}

const SessionKeys& ChannelState::keys() const {
  if (!keys_) throw Error(ErrorCode::kChannelNotEstablished);
  return *keys_;
}

SecureRecord ChannelState::seal(ByteView plaintext, ByteView add_data, Rng& rng) {
  const SessionKeys& k = keys();
  SecureRecord rec;
  rec.iv = rng.block();
  rec.sec_data = aes::cbc_encrypt(k.k_enc, rec.iv, aes::pkcs7_pad(plaintext));
  rec.add_data.assign(add_data.begin(), add_data.end());
  rec.tag = compute_chained_tag(k.k_mac, rec.sec_data, rec.iv, rec.add_data,
                                last_tag_sent_);
  last_tag_sent_ = rec.tag;
  ++records_sealed_;
  return rec;
}

Bytes ChannelState::open(const SecureRecord& record) {
  const SessionKeys& k = keys();
  if (record.sec_data.empty() || record.sec_data.size() % kBlockSize != 0) {
    throw Error(ErrorCode::kBadLength, "sec_data is not a positive multiple of 16");
  }
  Block expected = compute_chained_tag(k.k_mac, record.sec_data, record.iv,
                                       record.add_data, last_tag_received_);
  if (!equal_ct(expected, record.tag)) throw Error(ErrorCode::kTagMismatch);

  Bytes plaintext = aes::pkcs7_unpad(aes::cbc_decrypt(k.k_enc, record.iv, record.sec_data));
  last_tag_received_ = record.tag;
  ++records_opened_;
  return plaintext;
}

}  // namespace wbms
