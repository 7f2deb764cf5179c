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

#include "wbms/bytes.hpp"

#include <stdexcept>

#include "wbms/error.hpp"

namespace wbms {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidNonce: return "InvalidNonce";
    case ErrorCode::kBadLength: return "BadLength";
    case ErrorCode::kChannelNotEstablished: return "ChannelNotEstablished";
    case ErrorCode::kTagMismatch: return "TagMismatch";
    case ErrorCode::kPaddingError: return "PaddingError";
    case ErrorCode::kWrongPhase: return "WrongPhase";
    case ErrorCode::kMalformedMessage: return "MalformedMessage";
    case ErrorCode::kAuthFailure: return "AuthFailure";
    case ErrorCode::kKeyConfirmFailure: return "KeyConfirmFailure";
    case ErrorCode::kOversizeMessage: return "OversizeMessage";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kBadFlags: return "BadFlags";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kTrailingBytes: return "TrailingBytes";
    case ErrorCode::kDuplicatePackId: return "DuplicatePackId";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kRangeViolation: return "RangeViolation";
    case ErrorCode::kOverlappingSessions: return "OverlappingSessions";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kStoreError: return "StoreError";
  }
  return "Unknown";
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("non-hex character");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

void put_u16be(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32be(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_u64be(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteReader::need(std::size_t n) const {
  if (n > remaining()) {
    throw Error(ErrorCode::kTruncated,
                "need " + std::to_string(n) + " bytes at offset " +
                    std::to_string(pos_) + ", have " +
                    std::to_string(remaining()));
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16be() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32be() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64be() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 8;
  return v;
}

ByteView ByteReader::take(std::size_t n) {
  need(n);
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

bool equal_ct(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  std::uint8_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= a[i] ^ b[i];
  return diff == 0;
}

void secure_zero(std::span<std::uint8_t> data) {
  volatile std::uint8_t* p = data.data();
  for (std::size_t i = 0; i < data.size(); ++i) p[i] = 0;
}

}  // namespace wbms
