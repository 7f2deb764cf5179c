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

#include "wbms/aes.hpp"

#include "wbms/error.hpp"

namespace wbms::aes {
namespace {

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b != 0) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

struct SboxTables {
  std::array<std::uint8_t, 256> fwd{};
  std::array<std::uint8_t, 256> inv{};
};

// S-box from the multiplicative inverse in GF(2^8) followed by the affine map.
constexpr SboxTables make_sboxes() {
  SboxTables t{};
  for (int x = 0; x < 256; ++x) {
    std::uint8_t inverse = 0;
    if (x != 0) {
      for (int y = 1; y < 256; ++y) {
        if (gmul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
          inverse = static_cast<std::uint8_t>(y);
          break;
        }
      }
    }
    std::uint8_t s = inverse;
    std::uint8_t r = inverse;
    for (int i = 0; i < 4; ++i) {
      r = static_cast<std::uint8_t>((r << 1) | (r >> 7));
      s ^= r;
    }
    s ^= 0x63;
    t.fwd[x] = s;
    t.inv[s] = static_cast<std::uint8_t>(x);
  }
  return t;
}

constexpr SboxTables kSbox = make_sboxes();
static_assert(kSbox.fwd[0x00] == 0x63 && kSbox.fwd[0x53] == 0xed);

using State = std::array<std::uint8_t, 16>;

void add_round_key(State& s, const std::uint8_t* rk) {
  for (int i = 0; i < 16; ++i) s[i] ^= rk[i];
}

void sub_bytes(State& s) {
  for (auto& b : s) b = kSbox.fwd[b];
}

void inv_sub_bytes(State& s) {
  for (auto& b : s) b = kSbox.inv[b];
}

// Column-major state: byte index = 4 * column + row.
void shift_rows(State& s) {
  State t = s;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) s[4 * c + r] = t[4 * ((c + r) % 4) + r];
  }
}

void inv_shift_rows(State& s) {
  State t = s;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
  }
}

void mix_columns(State& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = static_cast<std::uint8_t>(xtime(a0) ^ (xtime(a1) ^ a1) ^ a2 ^ a3);
    col[1] = static_cast<std::uint8_t>(a0 ^ xtime(a1) ^ (xtime(a2) ^ a2) ^ a3);
    col[2] = static_cast<std::uint8_t>(a0 ^ a1 ^ xtime(a2) ^ (xtime(a3) ^ a3));
    col[3] = static_cast<std::uint8_t>((xtime(a0) ^ a0) ^ a1 ^ a2 ^ xtime(a3));
  }
}

void inv_mix_columns(State& s) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t* col = &s[4 * c];
    std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9);
    col[1] = gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13);
    col[2] = gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11);
    col[3] = gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14);
  }
}

void require_aligned(ByteView data) {
  if (data.empty() || data.size() % kBlockSize != 0) {
    throw Error(ErrorCode::kBadLength,
                "CBC input of " + std::to_string(data.size()) +
                    " bytes is not a positive multiple of 16");
  }
}

Block load_block(ByteView data, std::size_t offset) {
  Block b;
  for (std::size_t i = 0; i < kBlockSize; ++i) b[i] = data[offset + i];
  return b;
}

}  // namespace

Aes128::Aes128(const Key& key) {
  static constexpr std::uint8_t kRcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10,
                                             0x20, 0x40, 0x80, 0x1b, 0x36};
  for (int i = 0; i < 16; ++i) round_keys_[i] = key[i];
  for (int i = 4; i < 44; ++i) {
    std::uint8_t t[4];
    for (int j = 0; j < 4; ++j) t[j] = round_keys_[4 * (i - 1) + j];
    if (i % 4 == 0) {
      std::uint8_t first = t[0];
      t[0] = kSbox.fwd[t[1]] ^ kRcon[i / 4 - 1];
      t[1] = kSbox.fwd[t[2]];
      t[2] = kSbox.fwd[t[3]];
      t[3] = kSbox.fwd[first];
    }
    for (int j = 0; j < 4; ++j) {
      round_keys_[4 * i + j] = round_keys_[4 * (i - 4) + j] ^ t[j];
    }
  }
}

Aes128::~Aes128() { secure_zero(round_keys_); }

Block Aes128::encrypt_block(const Block& in) const {
  State s = in;
  add_round_key(s, &round_keys_[0]);
  for (int round = 1; round < 10; ++round) {
    sub_bytes(s);
    shift_rows(s);
    mix_columns(s);
    add_round_key(s, &round_keys_[16 * round]);
  }
  sub_bytes(s);
  shift_rows(s);
  add_round_key(s, &round_keys_[160]);
  return s;
}

Block Aes128::decrypt_block(const Block& in) const {
  State s = in;
  add_round_key(s, &round_keys_[160]);
  for (int round = 9; round >= 1; --round) {
    inv_shift_rows(s);
    inv_sub_bytes(s);
    add_round_key(s, &round_keys_[16 * round]);
    inv_mix_columns(s);
  }
  inv_shift_rows(s);
  inv_sub_bytes(s);
  add_round_key(s, &round_keys_[0]);
  return s;
}

Bytes cbc_encrypt(const Key& key, const Block& iv, ByteView data) {
  require_aligned(data);
  Aes128 cipher(key);
  Bytes out;
  out.reserve(data.size());
  Block chain = iv;
  for (std::size_t off = 0; off < data.size(); off += kBlockSize) {
    Block b = load_block(data, off);
    for (std::size_t i = 0; i < kBlockSize; ++i) b[i] ^= chain[i];
    chain = cipher.encrypt_block(b);
    out.insert(out.end(), chain.begin(), chain.end());
  }
  return out;
}

Bytes cbc_decrypt(const Key& key, const Block& iv, ByteView data) {
  require_aligned(data);
  Aes128 cipher(key);
  Bytes out;
  out.reserve(data.size());
  Block chain = iv;
  for (std::size_t off = 0; off < data.size(); off += kBlockSize) {
    Block c = load_block(data, off);
    Block p = cipher.decrypt_block(c);
    for (std::size_t i = 0; i < kBlockSize; ++i) p[i] ^= chain[i];
    chain = c;
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

Bytes pkcs7_pad(ByteView data) {
  std::size_t pad = kBlockSize - data.size() % kBlockSize;
  Bytes out(data.begin(), data.end());
  out.insert(out.end(), pad, static_cast<std::uint8_t>(pad));
  return out;
}

Bytes pkcs7_unpad(ByteView data) {
  if (data.empty() || data.size() % kBlockSize != 0) {
    throw Error(ErrorCode::kPaddingError, "padded length not block aligned");
  }
  std::uint8_t pad = data.back();
  if (pad == 0 || pad > kBlockSize) {
    throw Error(ErrorCode::kPaddingError, "pad byte out of range");
  }
  for (std::size_t i = data.size() - pad; i < data.size(); ++i) {
    if (data[i] != pad) throw Error(ErrorCode::kPaddingError, "inconsistent pad bytes");
  }
  return Bytes(data.begin(), data.end() - pad);
}

namespace {
Block shift_left_one(const Block& in) {
  Block out{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    out[i] = static_cast<std::uint8_t>(in[i] << 1);
    if (i + 1 < kBlockSize) out[i] |= in[i + 1] >> 7;
  }
  return out;
}

Block derive_subkey(const Block& in) {
  Block out = shift_left_one(in);
  if (in[0] & 0x80) out[kBlockSize - 1] ^= 0x87;
  return out;
}
}  // namespace

Block cmac(const Key& key, ByteView message) {
  Aes128 cipher(key);
  Block k1 = derive_subkey(cipher.encrypt_block(Block{}));
  Block k2 = derive_subkey(k1);

  std::size_t n_blocks = (message.size() + kBlockSize - 1) / kBlockSize;
  bool complete = !message.empty() && message.size() % kBlockSize == 0;
  if (n_blocks == 0) n_blocks = 1;

  Block x{};
  for (std::size_t blk = 0; blk + 1 < n_blocks; ++blk) {
    for (std::size_t i = 0; i < kBlockSize; ++i) x[i] ^= message[blk * kBlockSize + i];
    x = cipher.encrypt_block(x);
  }

  Block last{};
  std::size_t off = (n_blocks - 1) * kBlockSize;
  std::size_t tail = message.size() - off;
  for (std::size_t i = 0; i < tail; ++i) last[i] = message[off + i];
  if (complete) {
    for (std::size_t i = 0; i < kBlockSize; ++i) last[i] ^= k1[i];
  } else {
    last[tail] = 0x80;
    for (std::size_t i = 0; i < kBlockSize; ++i) last[i] ^= k2[i];
  }
  for (std::size_t i = 0; i < kBlockSize; ++i) x[i] ^= last[i];
  return cipher.encrypt_block(x);
}

}  // namespace wbms::aes
