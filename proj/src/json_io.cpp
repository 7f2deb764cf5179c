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

#include "wbms/json_io.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace wbms::json_io {
namespace {

template <typename T>
T checked_int(const json& j, const char* field) {
  if (!j.is_number_integer()) {
    throw Error(ErrorCode::kRangeViolation, std::string(field) + " must be an integer");
  }
  auto v = j.get<long long>();
  if (v < static_cast<long long>(std::numeric_limits<T>::min()) ||
      (v > 0 && static_cast<unsigned long long>(v) > std::numeric_limits<T>::max())) {
    throw Error(ErrorCode::kRangeViolation, std::string(field) + " out of range");
  }
  return static_cast<T>(v);
}

diag::UseCase parse_use_case(const std::string& s) {
  for (auto u : {diag::UseCase::kActiveSensor, diag::UseCase::kIdleDiag, diag::UseCase::kActiveDiag}) {
    if (diag::to_string(u) == s) return u;
  }
  throw Error(ErrorCode::kRangeViolation, "unknown use_case " + s);
}

diag::Origin parse_origin(const std::string& s) {
  for (auto o : {diag::Origin::kBpc, diag::Origin::kBmsController}) {
    if (diag::to_string(o) == s) return o;
  }
  throw Error(ErrorCode::kRangeViolation, "unknown origin " + s);
}

}  // namespace

json to_json(const diag::BpcReport& r) {
  return json{{"pack_id", to_hex(r.pack_id)},
              {"timestamp", r.timestamp},
              {"soc_permille", r.soc_permille},
              {"soh_permille", r.soh_permille},
              {"cell_voltages_mv", r.cell_voltages_mv},
              {"temperatures_dk", r.temperatures_dk},
              {"status_flags", r.status_flags}};
}

diag::BpcReport report_from_json(const json& j) {
  diag::BpcReport r;
  Bytes id;
  try {
    id = from_hex(j.at("pack_id").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::kRangeViolation, std::string("pack_id: ") + e.what());
  }
  if (id.size() != r.pack_id.size()) {
    throw Error(ErrorCode::kRangeViolation, "pack_id must be 8 bytes (16 hex digits)");
  }
  std::copy(id.begin(), id.end(), r.pack_id.begin());
  r.timestamp = checked_int<std::uint64_t>(j.at("timestamp"), "timestamp");
  r.soc_permille = checked_int<std::uint16_t>(j.at("soc_permille"), "soc_permille");
  r.soh_permille = checked_int<std::uint16_t>(j.at("soh_permille"), "soh_permille");
  for (const auto& v : j.at("cell_voltages_mv")) {
    r.cell_voltages_mv.push_back(checked_int<std::uint16_t>(v, "cell_voltages_mv"));
  }
  if (j.contains("temperatures_dk")) {
    for (const auto& v : j.at("temperatures_dk")) {
      r.temperatures_dk.push_back(checked_int<std::int16_t>(v, "temperatures_dk"));
    }
  }
  r.status_flags = j.contains("status_flags")
                       ? checked_int<std::uint16_t>(j.at("status_flags"), "status_flags")
                       : 0;
  diag::validate(r);
  return r;
}

std::vector<diag::BpcReport> reports_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("reports") : j;
  if (!arr.is_array()) throw Error(ErrorCode::kRangeViolation, "reports must be an array");
  std::vector<diag::BpcReport> out;
  for (const auto& r : arr) out.push_back(report_from_json(r));
  return out;
}

json to_json(const diag::DiagPacket& p) {
  json reports = json::array();
  for (const auto& r : p.reports) reports.push_back(to_json(r));
  return json{{"use_case", diag::to_string(p.use_case)},
              {"origin", diag::to_string(p.origin)},
              {"sequence_no", p.sequence_no},
              {"reports", reports}};
}

diag::DiagPacket packet_from_json(const json& j) {
  diag::DiagPacket p;
  p.use_case = parse_use_case(j.at("use_case").get<std::string>());
  p.origin = parse_origin(j.at("origin").get<std::string>());
  p.sequence_no = checked_int<std::uint32_t>(j.at("sequence_no"), "sequence_no");
  p.reports = reports_from_json(j.at("reports"));
  diag::validate(p);
  return p;
}

json to_json(const wakeup::PowerModel& m) {
  return json{{"supply_voltage_v", m.supply_voltage_v},
              {"bpc_vlps_current_ua", m.bpc_vlps_current_ua},
              {"bpc_active_current_ma", m.bpc_active_current_ma},
              {"ntag_standby_current_ua", m.ntag_standby_current_ua},
              {"ntag_active_current_ma", m.ntag_active_current_ma},
              {"ed_wakeup_latency_ms", m.ed_wakeup_latency_ms},
              {"eh_wakeup_latency_ms", m.eh_wakeup_latency_ms}};
}

wakeup::PowerModel model_from_json(const json& j, wakeup::PowerModel m) {
  auto field = [&](const char* name, double& dst) {
    if (j.contains(name)) dst = j.at(name).get<double>();
  };
  field("supply_voltage_v", m.supply_voltage_v);
  field("bpc_vlps_current_ua", m.bpc_vlps_current_ua);
  field("bpc_active_current_ma", m.bpc_active_current_ma);
  field("ntag_standby_current_ua", m.ntag_standby_current_ua);
  field("ntag_active_current_ma", m.ntag_active_current_ma);
  field("ed_wakeup_latency_ms", m.ed_wakeup_latency_ms);
  field("eh_wakeup_latency_ms", m.eh_wakeup_latency_ms);
  wakeup::validate(m);
  return m;
}

wakeup::StorageScenario scenario_from_json(const json& j) {
  wakeup::StorageScenario s;
  if (j.contains("duration_days")) s.duration_days = j.at("duration_days").get<double>();
  if (j.contains("readouts")) {
    for (const auto& r : j.at("readouts")) {
      s.readouts.push_back({r.at("start_s").get<double>(), r.at("session_length_s").get<double>()});
    }
  }
  return s;
}

json to_json(const wakeup::StorageScenario& s) {
  json readouts = json::array();
  for (const auto& r : s.readouts) {
    readouts.push_back({{"start_s", r.start_s}, {"session_length_s", r.session_length_s}});
  }
  return json{{"duration_days", s.duration_days}, {"readouts", readouts}};
}

json to_json(const wakeup::WakeupTrace& t, bool with_events) {
  json j{{"method", wakeup::to_string(t.method)},
         {"duration_us", t.duration_us},
         {"idle_energy_uj", t.idle_energy_uj},
         {"active_energy_uj", t.active_energy_uj},
         {"total_energy_uj", t.total_energy_uj()},
         {"avg_power_uw", t.avg_power_uw}};
  if (with_events) {
    json events = json::array();
    for (const auto& e : t.events) {
      events.push_back({{"time_us", e.time_us},
                        {"state", wakeup::to_string(e.state)},
                        {"power_uw", e.power_uw()}});
    }
    j["events"] = events;
  }
  return j;
}

std::string trace_jsonl(const wakeup::WakeupTrace& t) {
  std::ostringstream out;
  for (const auto& e : t.events) {
    out << json{{"time_us", e.time_us},
                {"state", wakeup::to_string(e.state)},
                {"power_uw", e.power_uw()}}
               .dump()
        << "\n";
  }
  return out.str();
}

namespace {
json summary_json(const wakeup::MethodSummary& s) {
  return json{{"method", wakeup::to_string(s.method)},
              {"avg_power_uw", s.avg_power_uw},
              {"idle_power_uw", s.idle_power_uw},
              {"total_energy_uj", s.total_energy_uj},
              {"wakeup_latency_ms", s.wakeup_latency_ms}};
}
}  // namespace

json to_json(const wakeup::Comparison& c) {
  json table = json::array();
  for (const auto& row : c.table) {
    table.push_back({{"method", wakeup::to_string(row.method)},
                     {"prerequisites", row.prerequisites},
                     {"pros", row.pros},
                     {"cons", row.cons}});
  }
  return json{{"methods",
               {summary_json(c.event_detection), summary_json(c.energy_harvesting),
                summary_json(c.always_on)}},
              {"power_winner", c.power_winner},
              {"latency_winner", c.latency_winner},
              {"pros_cons", table}};
}

json to_json(const ban::DeriveResult& r) {
  json given = json::object();
  for (const auto& [id, s] : r.given) given[id] = ban::to_string(*s);
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"id", s.id},
                     {"rule", ban::to_string(s.rule)},
                     {"premises", s.premises},
                     {"conclusion", ban::to_string(*s.conclusion)}});
  }
  json goals = json::array();
  for (const auto& g : r.goals) {
    json rules = json::array();
    for (ban::Rule rule : r.rule_sequence(g.label)) rules.push_back(ban::to_string(rule));
    goals.push_back({{"label", g.label},
                     {"statement", ban::to_string(*g.goal)},
                     {"derived", g.derived},
                     {"fact", g.derived ? json(g.fact_id) : json(nullptr)},
                     {"steps", g.steps},
                     {"rules", rules}});
  }
  return json{{"status", ban::to_string(r.status)},
              {"rounds", r.rounds},
              {"facts_total", r.facts_total},
              {"given", given},
              {"steps", steps},
              {"goals", goals}};
}

json to_json(const adversary::FailurePoint& f) {
  return json{{"message", f.message},
              {"error", to_string(f.error)},
              {"detected_by", handshake::to_string(f.detected_by)},
              {"detail", f.detail}};
}

json to_json(const adversary::SessionOutcome& o, bool with_transcript) {
  json hits = json::array();
  for (const auto& h : o.secrecy_hits) {
    hits.push_back({{"packet", h.packet}, {"offset", h.offset}, {"length", h.length}});
  }
  json j{{"established", o.established()},
         {"reader_established", o.reader_established},
         {"controller_established", o.controller_established},
         {"handshake_messages", o.handshake_messages},
         {"records_sent", o.records_sent},
         {"records_delivered", o.records_delivered},
         {"session_id", o.session_id},
         {"tampered", o.tampered},
         {"failure", o.failure ? to_json(*o.failure) : json(nullptr)},
         {"secrecy_hits", hits}};
  if (with_transcript) {
    json frames = json::array();
    for (const auto& f : o.transcript) {
      frames.push_back({{"index", f.index},
                        {"from", handshake::to_string(f.from)},
                        {"to", handshake::to_string(f.to)},
                        {"injected", f.injected},
                        {"hex", to_hex(f.bytes)}});
    }
    j["transcript"] = frames;
  }
  return j;
}

json to_json(const adversary::AttackReport& r, bool with_runs) {
  json strategies = json::array();
  for (const auto& s : r.strategies) {
    json fm = json::object();
    for (const auto& [msg, n] : s.failure_messages) fm[std::to_string(msg)] = n;
    json blocked_at = nullptr;
    if (s.failure_messages.size() == 1 && s.blocked == s.runs) {
      blocked_at = s.failure_messages.begin()->first;
    }
    json entry{{"strategy", adversary::to_string(s.kind)},
               {"runs", s.runs},
               {"blocked", s.blocked},
               {"successes", s.successes},
               {"leak_hits", s.leak_hits},
               {"blocked_at_message", blocked_at},
               {"failure_messages", fm},
               {"errors", s.errors}};
    if (with_runs) {
      json runs = json::array();
      for (const auto& rec : s.records) {
        runs.push_back({{"seed", rec.seed},
                        {"blocked", rec.blocked},
                        {"success", rec.success},
                        {"failure_message", rec.failure_message ? json(*rec.failure_message)
                                                                : json(nullptr)},
                        {"error", rec.error ? json(to_string(*rec.error)) : json(nullptr)},
                        {"leaks", rec.leaks}});
      }
      entry["runs_detail"] = runs;
    }
    strategies.push_back(entry);
  }
  return json{{"seed", r.seed},
              {"total_successes", r.total_successes()},
              {"strategies", strategies}};
}

}  // namespace wbms::json_io
