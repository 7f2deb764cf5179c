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

#include "wbms/bytes.hpp"

namespace wbms::aes {

inline constexpr std::size_t kKeySize = 16;
using Key = std::array<std::uint8_t, kKeySize>;

// AES-128 block cipher (FIPS-197). Portable byte-oriented implementation;
// no hardware acceleration and no side-channel hardening.
class Aes128 {
 public:
  explicit Aes128(const Key& key);
  ~Aes128();
  Aes128(const Aes128&) = default;
  Aes128& operator=(const Aes128&) = default;

  Block encrypt_block(const Block& in) const;
  Block decrypt_block(const Block& in) const;

 private:
  std::array<std::uint8_t, 176> round_keys_;
};

// CBC over block-aligned data. Throws Error(kBadLength) otherwise.
Bytes cbc_encrypt(const Key& key, const Block& iv, ByteView data);
Bytes cbc_decrypt(const Key& key, const Block& iv, ByteView data);

// PKCS#7 padding to the 16-byte block size; always adds at least one byte.
Bytes pkcs7_pad(ByteView data);
// Throws Error(kPaddingError) on malformed padding.
Bytes pkcs7_unpad(ByteView data);

// AES-CMAC (NIST SP 800-38B / RFC 4493).
Block cmac(const Key& key, ByteView message);

}  // namespace wbms::aes
