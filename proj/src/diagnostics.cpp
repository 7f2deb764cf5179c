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

#include <algorithm>
#include <limits>
#include <set>

#include "wbms/error.hpp"

namespace wbms::diag {

std::string_view to_string(UseCase u) {
  switch (u) {
    case UseCase::kActiveSensor: return "ACTIVE_SENSOR";
    case UseCase::kIdleDiag: return "IDLE_DIAG";
    case UseCase::kActiveDiag: return "ACTIVE_DIAG";
  }
  return "?";
}

std::string_view to_string(Origin o) {
  return o == Origin::kBpc ? "BPC" : "BMS_CONTROLLER";
}

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::kCentralized: return "centralized";
    case Topology::kModulated: return "modulated";
    case Topology::kDistributed: return "distributed";
    case Topology::kDecentralized: return "decentralized";
  }
  return "?";
}

void validate(const BpcReport& r) {
  if (r.soc_permille > kMaxPermille) {
    throw Error(ErrorCode::kRangeViolation, "soc_permille " + std::to_string(r.soc_permille));
  }
  if (r.soh_permille > kMaxPermille) {
    throw Error(ErrorCode::kRangeViolation, "soh_permille " + std::to_string(r.soh_permille));
  }
  if (r.cell_voltages_mv.empty() || r.cell_voltages_mv.size() > kMaxCells) {
    throw Error(ErrorCode::kRangeViolation,
                "cell count " + std::to_string(r.cell_voltages_mv.size()));
  }
  for (auto mv : r.cell_voltages_mv) {
    if (mv > kMaxCellMillivolts) {
      throw Error(ErrorCode::kRangeViolation, "cell voltage " + std::to_string(mv) + " mV");
    }
  }
  if (r.temperatures_dk.size() > std::numeric_limits<std::uint8_t>::max()) {
    throw Error(ErrorCode::kRangeViolation, "too many temperature channels");
  }
}

void validate(const DiagPacket& p) {
  switch (p.use_case) {
    case UseCase::kIdleDiag:
      if (p.reports.size() != 1) {
        throw Error(ErrorCode::kRangeViolation, "IDLE_DIAG carries exactly one report");
      }
      break;
    case UseCase::kActiveDiag:
    case UseCase::kActiveSensor:
      if (p.reports.empty()) throw Error(ErrorCode::kRangeViolation, "no reports");
      break;
    default:
      throw Error(ErrorCode::kRangeViolation, "unknown use case");
  }
  if (p.origin != Origin::kBpc && p.origin != Origin::kBmsController) {
    throw Error(ErrorCode::kRangeViolation, "unknown origin");
  }
  if (p.reports.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kRangeViolation, "too many reports");
  }
  for (const auto& r : p.reports) validate(r);
}

DiagPacket collect_from_bpcs(std::span<const BpcReport> reports, std::uint32_t seq) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "no BPC reports");
  std::set<PackId> seen;
  for (const auto& r : reports) {
    if (!seen.insert(r.pack_id).second) {
      throw Error(ErrorCode::kDuplicatePackId, to_hex(r.pack_id));
    }
  }
  DiagPacket p;
  p.use_case = UseCase::kActiveDiag;
  p.origin = Origin::kBmsController;
  p.reports.assign(reports.begin(), reports.end());
  p.sequence_no = seq;
  validate(p);
  return p;
}

DiagPacket make_idle_packet(const BpcReport& report, std::uint32_t seq) {
  DiagPacket p{UseCase::kIdleDiag, Origin::kBpc, {report}, seq};
  validate(p);
  return p;
}

Bytes encode_diag(const DiagPacket& p) {
  validate(p);
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(p.use_case));
  out.push_back(static_cast<std::uint8_t>(p.origin));
  put_u32be(out, p.sequence_no);
  put_u16be(out, static_cast<std::uint16_t>(p.reports.size()));
  for (const auto& r : p.reports) {
    append(out, r.pack_id);
    put_u64be(out, r.timestamp);
    put_u16be(out, r.soc_permille);
    put_u16be(out, r.soh_permille);
    put_u16be(out, r.status_flags);
    out.push_back(static_cast<std::uint8_t>(r.cell_voltages_mv.size()));
    for (auto mv : r.cell_voltages_mv) put_u16be(out, mv);
    out.push_back(static_cast<std::uint8_t>(r.temperatures_dk.size()));
    for (auto t : r.temperatures_dk) put_u16be(out, static_cast<std::uint16_t>(t));
  }
  return out;
}

DiagPacket decode_diag(ByteView raw) {
  ByteReader in(raw);
  DiagPacket p;
  std::uint8_t use_case = in.u8();
  if (use_case < 1 || use_case > 3) {
    throw Error(ErrorCode::kRangeViolation, "use_case " + std::to_string(use_case));
  }
  p.use_case = static_cast<UseCase>(use_case);
  std::uint8_t origin = in.u8();
  if (origin < 1 || origin > 2) {
    throw Error(ErrorCode::kRangeViolation, "origin " + std::to_string(origin));
  }
  p.origin = static_cast<Origin>(origin);
  p.sequence_no = in.u32be();
  std::uint16_t count = in.u16be();
  // Each report is at least 26 bytes; bound the reservation by the input.
  p.reports.reserve(std::min<std::size_t>(count, in.remaining() / 26));
  for (std::uint16_t i = 0; i < count; ++i) {
    BpcReport r;
    ByteView id = in.take(r.pack_id.size());
    std::copy(id.begin(), id.end(), r.pack_id.begin());
    r.timestamp = in.u64be();
    r.soc_permille = in.u16be();
    r.soh_permille = in.u16be();
    r.status_flags = in.u16be();
    std::uint8_t n_cells = in.u8();
    r.cell_voltages_mv.reserve(n_cells);
    for (int c = 0; c < n_cells; ++c) r.cell_voltages_mv.push_back(in.u16be());
    std::uint8_t n_temps = in.u8();
    r.temperatures_dk.reserve(n_temps);
    for (int t = 0; t < n_temps; ++t) {
      r.temperatures_dk.push_back(static_cast<std::int16_t>(in.u16be()));
    }
    validate(r);
    p.reports.push_back(std::move(r));
  }
  if (!in.done()) {
    throw Error(ErrorCode::kTrailingBytes, std::to_string(in.remaining()) + " bytes");
  }
  validate(p);
  return p;
}

InterfacePlan topology_plan(Topology topology, unsigned module_count,
                            bool controller_stored) {
  switch (topology) {
    case Topology::kCentralized:
      return InterfacePlan{1, 1, controller_stored};
    case Topology::kModulated:
    case Topology::kDistributed:
      // Main module plus one tag and one internal reader per follower module;
      // the external reader brings the reader total to n + 1.
      return InterfacePlan{module_count + 1, module_count + 1, true};
    case Topology::kDecentralized: {
      std::vector<Subsystem> subs(module_count, Subsystem{Topology::kCentralized, 1});
      return plan_decentralized(subs);
    }
  }
  return {};
}

InterfacePlan plan_decentralized(std::span<const Subsystem> subsystems) {
  InterfacePlan total{0, 0, !subsystems.empty()};
  for (const auto& s : subsystems) {
    InterfacePlan p = topology_plan(s.topology, s.module_count);
    total.ntag_count += p.ntag_count;
    total.reader_count += p.reader_count;
    total.idle_feasible = total.idle_feasible && p.idle_feasible;
  }
  return total;
}

}  // namespace wbms::diag
