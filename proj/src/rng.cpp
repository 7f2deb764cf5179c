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

#include "wbms/rng.hpp"

namespace wbms {
namespace {
aes::Key seed_key(std::uint64_t seed) {
  aes::Key key{'w', 'b', 'm', 's', '-', 'r', 'n', 'g'};
  for (int i = 0; i < 8; ++i) key[8 + i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  return key;
}
}  // namespace

Rng::Rng(std::uint64_t seed) : cipher_(seed_key(seed)) {}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == kBlockSize) {
      buffer_ = cipher_.encrypt_block(counter_);
      for (int i = kBlockSize - 1; i >= 0; --i) {
        if (++counter_[i] != 0) break;
      }
      used_ = 0;
    }
    b = buffer_[used_++];
  }
}

Block Rng::block() {
  Block b;
  fill(b);
  return b;
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> raw;
  fill(raw);
  std::uint64_t v = 0;
  for (auto b : raw) v = (v << 8) | b;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  // Rejection sampling removes modulo bias.
  std::uint64_t limit = max() - max() % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

}  // namespace wbms
