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

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wbms/rng.hpp"

using namespace wbms;
using namespace wbms::sndef;

namespace {

NdefRecord rec(RecordType t, Bytes payload) { return NdefRecord{t, 0, std::move(payload)}; }

NdefMessage random_message(Rng& rng) {
  std::vector<NdefRecord> records;
  std::size_t n = 1 + rng.uniform(4);
  for (std::size_t i = 0; i < n; ++i) {
    Bytes p(rng.uniform(300));
    rng.fill(p);
    records.push_back(rec(static_cast<RecordType>(1 + rng.uniform(3)), std::move(p)));
  }
  return make_message(std::move(records));
}

}  // namespace

TEST(Ndef, EmptyPayloadRecordIsSixBytes) {
  Bytes raw = encode_message(make_message({rec(RecordType::kDiagPlain, {})}));
  EXPECT_EQ(to_hex(raw), "03c000000000");
}

TEST(Ndef, LayoutIsBigEndian) {
  Bytes raw = encode_message(
      make_message({rec(RecordType::kHandshake, Bytes(0x102, 7)), rec(RecordType::kSecure, {1})}));
  ASSERT_EQ(raw.size(), 6u + 0x102 + 6 + 1);
  EXPECT_EQ(to_hex(ByteView(raw).first(6)), "018000000102");
  EXPECT_EQ(to_hex(ByteView(raw).subspan(6 + 0x102, 7)), "02400000000101");
}

TEST(Ndef, RoundTripRandomMessages) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    NdefMessage m = random_message(rng);
    Bytes raw = encode_message(m);
    std::size_t expected = 0;
    for (const auto& r : m.records) expected += kRecordHeaderSize + r.payload.size();
    EXPECT_EQ(raw.size(), expected);
    EXPECT_EQ(decode_message(raw), m);
  }
}

TEST(Ndef, SizeCap) {
  NdefMessage big = make_message({rec(RecordType::kDiagPlain, Bytes(kDefaultMaxMessageSize - 6))});
  Bytes raw = encode_message(big);
  EXPECT_EQ(raw.size(), kDefaultMaxMessageSize);
  EXPECT_EQ(decode_message(raw), big);
  NdefMessage over = make_message({rec(RecordType::kDiagPlain, Bytes(kDefaultMaxMessageSize - 5))});
  EXPECT_WBMS_ERROR(encode_message(over), ErrorCode::kOversizeMessage);
  Bytes raw_over = raw;
  raw_over.push_back(0);
  EXPECT_WBMS_ERROR(decode_message(raw_over), ErrorCode::kOversizeMessage);
  EXPECT_NO_THROW(encode_message(over, 16 * 1024));
}

TEST(Ndef, EncodeRejectsInvalidMessages) {
  EXPECT_WBMS_ERROR(encode_message(NdefMessage{}), ErrorCode::kEmptyInput);
  NdefMessage m = make_message({rec(RecordType::kDiagPlain, {}), rec(RecordType::kDiagPlain, {})});
  m.records[1].flags = 0;
  EXPECT_WBMS_ERROR(encode_message(m), ErrorCode::kBadFlags);
}

TEST(Ndef, DecodeErrors) {
  EXPECT_WBMS_ERROR(decode_message(Bytes{}), ErrorCode::kTruncated);
  EXPECT_WBMS_ERROR(decode_message(from_hex("03c0000000")), ErrorCode::kTruncated);
  EXPECT_WBMS_ERROR(decode_message(from_hex("03c00000000501")), ErrorCode::kTruncated);
  EXPECT_WBMS_ERROR(decode_message(from_hex("038000000000")), ErrorCode::kBadFlags);  // no ME
  EXPECT_WBMS_ERROR(decode_message(from_hex("034000000000")), ErrorCode::kBadFlags);  // no MB
  EXPECT_WBMS_ERROR(decode_message(from_hex("03c100000000")), ErrorCode::kBadFlags);  // reserved
  EXPECT_WBMS_ERROR(decode_message(from_hex("09c000000000")), ErrorCode::kUnknownType);
  EXPECT_WBMS_ERROR(decode_message(from_hex("03c000000000034000000000")), ErrorCode::kBadFlags);
  EXPECT_WBMS_ERROR(decode_message(from_hex("03800000000003c000000000")), ErrorCode::kBadFlags);
}

TEST(Ndef, DecodeIsTotalOnRandomAndMutatedInput) {
  Rng rng(2);
  std::size_t accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    Bytes raw;
    if (i % 2 == 0) {
      raw.resize(rng.uniform(64));
      rng.fill(raw);
    } else {
      raw = encode_message(random_message(rng));
      raw[rng.uniform(raw.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
      if (rng.uniform(4) == 0) raw.resize(rng.uniform(raw.size() + 1));
    }
    try {
      NdefMessage m = decode_message(raw);
      EXPECT_EQ(encode_message(m), raw);
      ++accepted;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(accepted, 0u);
}

TEST(Secure, PayloadLayout) {
  SecureRecord r;
  r.iv.fill(0x11);
  r.tag.fill(0x22);
  r.sec_data = Bytes(32, 0x33);
  NdefRecord wrapped = wrap_secure(r);
  EXPECT_EQ(wrapped.type, RecordType::kSecure);
  EXPECT_EQ(wrapped.payload.size(), kSecureOverhead + 32);
  EXPECT_EQ(wrapped.payload[32], 0);
  EXPECT_EQ(wrapped.payload[33], 0);
  EXPECT_EQ(unwrap_secure(wrapped), r);

  r.add_data = {0xa, 0xb, 0xc};
  Bytes p = encode_secure_payload(r);
  EXPECT_EQ(to_hex(ByteView(p).subspan(32, 5)), "00030a0b0c");
  EXPECT_EQ(decode_secure_payload(p), r);
}

TEST(Secure, RoundTripRandomRecords) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    SecureRecord r;
    r.iv = rng.block();
    r.tag = rng.block();
    r.sec_data.resize(16 * (1 + rng.uniform(10)));
    rng.fill(r.sec_data);
    r.add_data.resize(rng.uniform(40));
    rng.fill(r.add_data);
    NdefMessage m = make_message({wrap_secure(r)});
    EXPECT_EQ(unwrap_secure(decode_message(encode_message(m)).records[0]), r);
  }
}

TEST(Secure, UnwrapErrors) {
  EXPECT_WBMS_ERROR(unwrap_secure(rec(RecordType::kDiagPlain, Bytes(50))), ErrorCode::kUnknownType);
  EXPECT_WBMS_ERROR(unwrap_secure(rec(RecordType::kSecure, Bytes(33))), ErrorCode::kTruncated);
  Bytes p(kSecureOverhead + 16);
  p[32] = 0;
  p[33] = 20;  // add_len beyond the payload
  EXPECT_WBMS_ERROR(decode_secure_payload(p), ErrorCode::kTruncated);
  EXPECT_WBMS_ERROR(decode_secure_payload(Bytes(kSecureOverhead + 15)), ErrorCode::kBadLength);
  EXPECT_WBMS_ERROR(decode_secure_payload(Bytes(kSecureOverhead)), ErrorCode::kBadLength);
}
