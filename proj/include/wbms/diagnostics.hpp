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
#include <span>
#include <string_view>
#include <vector>

#include "wbms/bytes.hpp"

namespace wbms::diag {

using PackId = std::array<std::uint8_t, 8>;

namespace status {
inline constexpr std::uint16_t kFault = 1u << 0;
inline constexpr std::uint16_t kOverTemp = 1u << 1;
inline constexpr std::uint16_t kUnderVolt = 1u << 2;
inline constexpr std::uint16_t kBalancing = 1u << 3;
inline constexpr std::uint16_t kStored = 1u << 4;
}  // namespace status

inline constexpr std::uint16_t kMaxPermille = 1000;
inline constexpr std::size_t kMaxCells = 32;
inline constexpr std::uint16_t kMaxCellMillivolts = 5000;

struct BpcReport {
  PackId pack_id{};
  std::uint64_t timestamp = 0;  // seconds since epoch
  std::uint16_t soc_permille = 0;
  std::uint16_t soh_permille = 0;
  std::vector<std::uint16_t> cell_voltages_mv;
  std::vector<std::int16_t> temperatures_dk;  // deci-kelvin
  std::uint16_t status_flags = 0;
  friend bool operator==(const BpcReport&, const BpcReport&) = default;
};

enum class UseCase : std::uint8_t { kActiveSensor = 1, kIdleDiag = 2, kActiveDiag = 3 };
enum class Origin : std::uint8_t { kBpc = 1, kBmsController = 2 };

std::string_view to_string(UseCase u);
std::string_view to_string(Origin o);

struct DiagPacket {
  UseCase use_case = UseCase::kActiveDiag;
  Origin origin = Origin::kBmsController;
  std::vector<BpcReport> reports;
  std::uint32_t sequence_no = 0;
  friend bool operator==(const DiagPacket&, const DiagPacket&) = default;
};

// Throws kRangeViolation when a report breaks its bounds.
void validate(const BpcReport& r);
// Report bounds plus the per-use-case report count.
void validate(const DiagPacket& p);

// BMS controller aggregation: one ACTIVE_DIAG packet, reports in input order.
// Throws kEmptyInput or kDuplicatePackId.
DiagPacket collect_from_bpcs(std::span<const BpcReport> reports, std::uint32_t seq);

// A stored pack answering an external reader on its own.
DiagPacket make_idle_packet(const BpcReport& report, std::uint32_t seq);

// Layout (big-endian):
//   use_case(1) origin(1) seq(4) count(2)
//   per report: pack_id(8) ts(8) soc(2) soh(2) flags(2)
//               n_cells(1) voltages(2 * n_cells) n_temps(1) temps(2 * n_temps)
Bytes encode_diag(const DiagPacket& p);
// Throws kTruncated, kRangeViolation or kTrailingBytes.
DiagPacket decode_diag(ByteView raw);

enum class Topology { kCentralized, kModulated, kDistributed, kDecentralized };

std::string_view to_string(Topology t);

struct InterfacePlan {
  unsigned ntag_count = 0;
  unsigned reader_count = 0;  // internal readers plus the external one
  bool idle_feasible = false;
  friend bool operator==(const InterfacePlan&, const InterfacePlan&) = default;
};

// NFC interface counts for a BMS topology with module_count modules.
// Centralized has no intermediate modules, so the count is ignored and idle
// diagnosis is only feasible if the controller itself is stored with the
// packs. For kDecentralized, module_count is the number of centralized
// subsystems; use plan_decentralized for mixed subsystems.
InterfacePlan topology_plan(Topology topology, unsigned module_count,
                            bool controller_stored = false);

struct Subsystem {
  Topology topology = Topology::kDistributed;
  unsigned module_count = 1;
};

// Interfaces grow linearly: the sum over the subsystems' own plans. Idle
// diagnosis is feasible only if it is feasible in every subsystem.
InterfacePlan plan_decentralized(std::span<const Subsystem> subsystems);

}  // namespace wbms::diag
