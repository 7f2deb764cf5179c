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

#include "wbms/sndef_codec.hpp"

#include <algorithm>
#include <limits>

#include "wbms/error.hpp"

namespace wbms::sndef {
namespace {

constexpr std::uint8_t kKnownFlags = kFlagMessageBegin | kFlagMessageEnd;

bool known_type(std::uint8_t t) {
  return t == static_cast<std::uint8_t>(RecordType::kHandshake) ||
         t == static_cast<std::uint8_t>(RecordType::kSecure) ||
         t == static_cast<std::uint8_t>(RecordType::kDiagPlain);
}

std::uint8_t expected_flags(std::size_t index, std::size_t count) {
  std::uint8_t f = 0;
  if (index == 0) f |= kFlagMessageBegin;
  if (index + 1 == count) f |= kFlagMessageEnd;
  return f;
}

}  // namespace

NdefMessage make_message(std::vector<NdefRecord> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].flags = expected_flags(i, records.size());
  }
  return NdefMessage{std::move(records)};
}

Bytes encode_message(const NdefMessage& msg, std::size_t max_size) {
  if (msg.records.empty()) throw Error(ErrorCode::kEmptyInput, "message has no records");
  std::size_t total = 0;
  for (std::size_t i = 0; i < msg.records.size(); ++i) {
    const NdefRecord& r = msg.records[i];
    if (r.flags != expected_flags(i, msg.records.size())) {
      throw Error(ErrorCode::kBadFlags, "record " + std::to_string(i));
    }
    if (r.payload.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::kOversizeMessage, "payload exceeds 32-bit length");
    }
    total += kRecordHeaderSize + r.payload.size();
  }
  if (total > max_size) {
    throw Error(ErrorCode::kOversizeMessage,
                std::to_string(total) + " > " + std::to_string(max_size) + " bytes");
  }
  Bytes out;
  out.reserve(total);
  for (const NdefRecord& r : msg.records) {
    out.push_back(static_cast<std::uint8_t>(r.type));
    out.push_back(r.flags);
    put_u32be(out, static_cast<std::uint32_t>(r.payload.size()));
    append(out, r.payload);
  }
  return out;
}

NdefMessage decode_message(ByteView raw, std::size_t max_size) {
  if (raw.size() > max_size) {
    throw Error(ErrorCode::kOversizeMessage,
                std::to_string(raw.size()) + " > " + std::to_string(max_size) + " bytes");
  }
  if (raw.empty()) throw Error(ErrorCode::kTruncated, "empty input");

  NdefMessage msg;
  ByteReader in(raw);
  bool ended = false;
  while (!in.done()) {
    if (ended) throw Error(ErrorCode::kBadFlags, "record after ME");
    std::uint8_t type = in.u8();
    std::uint8_t flags = in.u8();
    std::uint32_t len = in.u32be();
    if (!known_type(type)) {
      throw Error(ErrorCode::kUnknownType, "type code " + std::to_string(type));
    }
    if ((flags & ~kKnownFlags) != 0) throw Error(ErrorCode::kBadFlags, "reserved bits set");
    bool first = msg.records.empty();
    if (first != ((flags & kFlagMessageBegin) != 0)) {
      throw Error(ErrorCode::kBadFlags, "MB must be set exactly on the first record");
    }
    ByteView payload = in.take(len);
    ended = (flags & kFlagMessageEnd) != 0;
    msg.records.push_back(NdefRecord{static_cast<RecordType>(type), flags,
                                     Bytes(payload.begin(), payload.end())});
  }
  if (!ended) throw Error(ErrorCode::kBadFlags, "final record lacks ME");
  return msg;
}

Bytes encode_secure_payload(const SecureRecord& record) {
  if (record.add_data.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kBadLength, "add_data longer than 65535 bytes");
  }
  Bytes out(kSecureOverhead + record.add_data.size() + record.sec_data.size());
  auto it = std::copy(record.iv.begin(), record.iv.end(), out.begin());
  it = std::copy(record.tag.begin(), record.tag.end(), it);
  *it++ = static_cast<std::uint8_t>(record.add_data.size() >> 8);
  *it++ = static_cast<std::uint8_t>(record.add_data.size());
  it = std::copy(record.add_data.begin(), record.add_data.end(), it);
  std::copy(record.sec_data.begin(), record.sec_data.end(), it);
  return out;
}

SecureRecord decode_secure_payload(ByteView payload) {
  ByteReader in(payload);
  SecureRecord rec;
  ByteView iv = in.take(kBlockSize);
  std::copy(iv.begin(), iv.end(), rec.iv.begin());
  ByteView tag = in.take(kBlockSize);
  std::copy(tag.begin(), tag.end(), rec.tag.begin());
  std::uint16_t add_len = in.u16be();
  ByteView add = in.take(add_len);
  rec.add_data.assign(add.begin(), add.end());
  ByteView sec = in.take(in.remaining());
  if (sec.empty() || sec.size() % kBlockSize != 0) {
    throw Error(ErrorCode::kBadLength, "sec_data is not a positive multiple of 16");
  }
  rec.sec_data.assign(sec.begin(), sec.end());
  return rec;
}

NdefRecord wrap_secure(const SecureRecord& record) {
  return NdefRecord{RecordType::kSecure, 0, encode_secure_payload(record)};
}

SecureRecord unwrap_secure(const NdefRecord& rec) {
  if (rec.type != RecordType::kSecure) {
    throw Error(ErrorCode::kUnknownType, "record is not SNDEF_SECURE");
  }
  return decode_secure_payload(rec.payload);
}

}  // namespace wbms::sndef
