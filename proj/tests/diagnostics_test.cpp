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

#include "wbms/diagnostics.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.hpp"
#include "wbms/rng.hpp"

using namespace wbms;
using namespace wbms::diag;

namespace {

BpcReport report(std::uint8_t id, std::uint64_t ts = 1704067200) {
  BpcReport r;
  r.pack_id = {1, 2, 3, 4, 5, 6, 7, id};
  r.timestamp = ts;
  r.soc_permille = 500;
  r.soh_permille = 950;
  r.cell_voltages_mv = {3700, 3650};
  r.temperatures_dk = {2981};
  r.status_flags = status::kFault | status::kStored;
  return r;
}

BpcReport random_report(Rng& rng) {
  BpcReport r;
  rng.fill(r.pack_id);
  r.timestamp = rng.next_u64();
  r.soc_permille = static_cast<std::uint16_t>(rng.uniform(kMaxPermille + 1));
  r.soh_permille = static_cast<std::uint16_t>(rng.uniform(kMaxPermille + 1));
  r.cell_voltages_mv.resize(1 + rng.uniform(kMaxCells));
  for (auto& v : r.cell_voltages_mv) v = static_cast<std::uint16_t>(rng.uniform(kMaxCellMillivolts + 1));
  r.temperatures_dk.resize(rng.uniform(8));
  for (auto& t : r.temperatures_dk) t = static_cast<std::int16_t>(rng.next_u64());
  r.status_flags = static_cast<std::uint16_t>(rng.next_u64());
  return r;
}

}  // namespace

TEST(Diag, GoldenOneReportPacket) {
  BpcReport r = report(8);
  DiagPacket p = collect_from_bpcs(std::vector<BpcReport>{r}, 7);
  EXPECT_EQ(to_hex(encode_diag(p)),
            "0302" "00000007" "0001"
            "0102030405060708" "0000000065920080" "01f4" "03b6" "0011"
            "02" "0e74" "0e42" "01" "0ba5");
}

TEST(Diag, CollectPreservesOrder) {
  std::vector<BpcReport> in{report(3), report(1), report(2)};
  DiagPacket p = collect_from_bpcs(in, 42);
  EXPECT_EQ(p.use_case, UseCase::kActiveDiag);
  EXPECT_EQ(p.origin, Origin::kBmsController);
  EXPECT_EQ(p.sequence_no, 42u);
  EXPECT_EQ(p.reports, in);
}

TEST(Diag, CollectErrors) {
  EXPECT_WBMS_ERROR(collect_from_bpcs(std::vector<BpcReport>{}, 0), ErrorCode::kEmptyInput);
  std::vector<BpcReport> dup{report(1), report(2), report(1)};
  EXPECT_WBMS_ERROR(collect_from_bpcs(dup, 0), ErrorCode::kDuplicatePackId);
}

TEST(Diag, SingleBpcIsValidPacket) {
  DiagPacket p = collect_from_bpcs(std::vector<BpcReport>{report(1)}, 0);
  EXPECT_EQ(decode_diag(encode_diag(p)), p);
}

TEST(Diag, IdlePacket) {
  DiagPacket p = make_idle_packet(report(1), 9);
  EXPECT_EQ(p.use_case, UseCase::kIdleDiag);
  EXPECT_EQ(p.origin, Origin::kBpc);
  ASSERT_EQ(p.reports.size(), 1u);
  EXPECT_EQ(decode_diag(encode_diag(p)), p);
  p.reports.push_back(report(2));
  EXPECT_WBMS_ERROR(validate(p), ErrorCode::kRangeViolation);
  EXPECT_WBMS_ERROR(encode_diag(p), ErrorCode::kRangeViolation);
}

TEST(Diag, RangeViolations) {
  auto bad = [](auto mutate) {
    BpcReport r = report(1);
    mutate(r);
    EXPECT_WBMS_ERROR(validate(r), ErrorCode::kRangeViolation);
  };
  bad([](BpcReport& r) { r.soc_permille = 1001; });
  bad([](BpcReport& r) { r.soh_permille = 1001; });
  bad([](BpcReport& r) { r.cell_voltages_mv.clear(); });
  bad([](BpcReport& r) { r.cell_voltages_mv.assign(kMaxCells + 1, 3700); });
  bad([](BpcReport& r) { r.cell_voltages_mv[1] = 5001; });
  bad([](BpcReport& r) { r.temperatures_dk.assign(256, 0); });

  Bytes raw = encode_diag(make_idle_packet(report(1), 0));
  raw[8 + 8 + 8] = 0x03;  // soc high byte -> 0x03f4 = 1012
  EXPECT_WBMS_ERROR(decode_diag(raw), ErrorCode::kRangeViolation);
}

TEST(Diag, DecodeErrors) {
  Bytes raw = encode_diag(collect_from_bpcs(std::vector<BpcReport>{report(1), report(2)}, 1));
  for (std::size_t n = 0; n < raw.size(); ++n) {
    EXPECT_THROW(decode_diag(ByteView(raw).first(n)), Error) << n;
  }
  EXPECT_WBMS_ERROR(decode_diag(ByteView(raw).first(5)), ErrorCode::kTruncated);
  Bytes extra = raw;
  extra.push_back(0);
  EXPECT_WBMS_ERROR(decode_diag(extra), ErrorCode::kTrailingBytes);
  Bytes bad_use = raw;
  bad_use[0] = 9;
  EXPECT_WBMS_ERROR(decode_diag(bad_use), ErrorCode::kRangeViolation);
}

TEST(Diag, RandomRoundTripAndAggregation) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    std::vector<BpcReport> reports;
    std::size_t n = 1 + rng.uniform(6);
    for (std::size_t k = 0; k < n; ++k) reports.push_back(random_report(rng));
    DiagPacket p = collect_from_bpcs(reports, static_cast<std::uint32_t>(rng.next_u64()));
    DiagPacket back = decode_diag(encode_diag(p));
    EXPECT_EQ(back, p);
    std::vector<PackId> a, b;
    for (const auto& r : reports) a.push_back(r.pack_id);
    for (const auto& r : back.reports) b.push_back(r.pack_id);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(Diag, DecodeIsTotal) {
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    Bytes raw(rng.uniform(120));
    rng.fill(raw);
    if (raw.size() > 8 && rng.uniform(2)) {
      raw[0] = static_cast<std::uint8_t>(1 + rng.uniform(3));
      raw[1] = static_cast<std::uint8_t>(1 + rng.uniform(2));
      raw[6] = 0;
      raw[7] = static_cast<std::uint8_t>(rng.uniform(3));
    }
    try {
      DiagPacket p = decode_diag(raw);
      EXPECT_EQ(encode_diag(p), raw);
    } catch (const Error&) {
    }
  }
}

TEST(Topology, WorkedExamples) {
  EXPECT_EQ(topology_plan(Topology::kCentralized, 1), (InterfacePlan{1, 1, false}));
  EXPECT_EQ(topology_plan(Topology::kCentralized, 1, true), (InterfacePlan{1, 1, true}));
  EXPECT_EQ(topology_plan(Topology::kDistributed, 4), (InterfacePlan{5, 5, true}));
  EXPECT_EQ(topology_plan(Topology::kModulated, 3), (InterfacePlan{4, 4, true}));
  std::vector<Subsystem> subs{{Topology::kDistributed, 2}, {Topology::kDistributed, 3}};
  EXPECT_EQ(plan_decentralized(subs), (InterfacePlan{7, 7, true}));
}

TEST(Topology, DecentralizedIsLinear) {
  InterfacePlan one = topology_plan(Topology::kDecentralized, 1);
  for (unsigned n = 1; n < 10; ++n) {
    InterfacePlan p = topology_plan(Topology::kDecentralized, n);
    EXPECT_EQ(p.ntag_count, n * one.ntag_count);
    EXPECT_EQ(p.reader_count, n * one.reader_count);
  }
  std::vector<Subsystem> mixed{{Topology::kDistributed, 2}, {Topology::kCentralized, 1}};
  EXPECT_FALSE(plan_decentralized(mixed).idle_feasible);
  EXPECT_EQ(plan_decentralized(mixed).ntag_count, 4u);
}

TEST(Topology, MonotoneInModuleCount) {
  for (Topology t : {Topology::kModulated, Topology::kDistributed, Topology::kDecentralized}) {
    for (unsigned n = 1; n < 20; ++n) {
      InterfacePlan a = topology_plan(t, n), b = topology_plan(t, n + 1);
      EXPECT_LE(a.ntag_count, b.ntag_count);
      EXPECT_LE(a.reader_count, b.reader_count);
    }
  }
}
