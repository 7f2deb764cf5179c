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
#include <limits>
#include <span>

#include "wbms/aes.hpp"

namespace wbms {

// Seedable CSPRNG: AES-128 in counter mode keyed from the seed. The same
// seed always reproduces the same stream, which keeps every simulation,
// report and golden vector deterministic. Also satisfies
// std::uniform_random_bit_generator so it can drive <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out);
  Block block();
  std::uint64_t next_u64();
  // Uniform in [0, bound). bound must be non-zero.
  std::uint64_t uniform(std::uint64_t bound);

  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  aes::Aes128 cipher_;
  Block counter_{};
  Block buffer_{};
  std::size_t used_ = kBlockSize;
};

}  // namespace wbms
