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
#include <vector>

#include "wbms/bytes.hpp"
#include "wbms/secure_channel.hpp"

namespace wbms::sndef {

// Compact NDEF-style framing. Per record:
//   type(1) || flags(1) || payload_len(4, big-endian) || payload
// Not NFC Forum NDEF: there is no TNF or type-name field.
enum class RecordType : std::uint8_t {
  kHandshake = 0x01,
  kSecure = 0x02,
  kDiagPlain = 0x03,
};

inline constexpr std::uint8_t kFlagMessageBegin = 0x80;
inline constexpr std::uint8_t kFlagMessageEnd = 0x40;
inline constexpr std::size_t kRecordHeaderSize = 6;
inline constexpr std::size_t kDefaultMaxMessageSize = 8 * 1024;

struct NdefRecord {
  RecordType type = RecordType::kDiagPlain;
  std::uint8_t flags = 0;
  Bytes payload;
  friend bool operator==(const NdefRecord&, const NdefRecord&) = default;
};

struct NdefMessage {
  std::vector<NdefRecord> records;
  friend bool operator==(const NdefMessage&, const NdefMessage&) = default;
};

// Builds a message from records, setting MB on the first and ME on the last.
NdefMessage make_message(std::vector<NdefRecord> records);

// Throws kEmptyInput, kBadFlags or kOversizeMessage.
Bytes encode_message(const NdefMessage& msg,
                     std::size_t max_size = kDefaultMaxMessageSize);
// Throws kTruncated, kBadFlags, kUnknownType, kOversizeMessage.
NdefMessage decode_message(ByteView raw,
                           std::size_t max_size = kDefaultMaxMessageSize);

// SNDEF payload: iv(16) || tag(16) || add_len(2) || add_data || sec_data
inline constexpr std::size_t kSecureOverhead = 34;

Bytes encode_secure_payload(const SecureRecord& record);
SecureRecord decode_secure_payload(ByteView payload);

NdefRecord wrap_secure(const SecureRecord& record);
// Throws kUnknownType unless rec.type is kSecure.
SecureRecord unwrap_secure(const NdefRecord& rec);

}  // namespace wbms::sndef
