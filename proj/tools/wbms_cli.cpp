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

// Command-line front end: handshake, passport readout and history, wake-up
// simulation, attack suite and BAN verification.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wbms/adversary.hpp"
#include "wbms/ban.hpp"
#include "wbms/json_io.hpp"
#include "wbms/passport_store.hpp"
#include "wbms/wakeup_sim.hpp"

#ifndef WBMS_DATA_DIR
#define WBMS_DATA_DIR "data"
#endif

namespace {

using namespace wbms;
using nlohmann::json;

enum Exit : int {
  kOk = 0,
  kProtocolFailure = 1,
  kInputError = 2,
  kStoreFailure = 3,
  kNotDerivable = 4,
  kSimulationError = 5,
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 1;
  std::string key_hex;
  std::string key_file;
  std::string peer_key_hex;
  std::string store;
  std::string format = "json";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

MasterKey parse_key(std::string hex, const char* what) {
  std::erase_if(hex, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  Bytes b;
  try {
    b = from_hex(hex);
  } catch (const std::invalid_argument&) {
    throw InputError(std::string(what) + " is not valid hex");
  }
  if (b.size() != 16) throw InputError(std::string(what) + " must be 16 bytes");
  MasterKey k(b);
  secure_zero(b);
  return k;
}

// Without --key or --key-file both endpoints use a key derived from the seed.
MasterKey master_key(const Options& o) {
  if (!o.key_hex.empty()) return parse_key(o.key_hex, "--key");
  if (!o.key_file.empty()) return parse_key(read_file(o.key_file), "--key-file");
  Rng rng(adversary::mix_seed(o.seed, 0x6b6579));
  return MasterKey::random(rng);
}

std::string store_path(const Options& o) {
  if (!o.store.empty()) return o.store;
  if (const char* env = std::getenv("BMS_STORE_PATH"); env && *env) return env;
  return "passport.ndjson";
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.format == "text") {
    std::cout << text;
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

std::string failure_text(const adversary::FailurePoint& f) {
  std::ostringstream s;
  s << "failed at message " << f.message << ": " << to_string(f.error) << " (detected by "
    << handshake::to_string(f.detected_by) << ")\n";
  return s.str();
}

std::pair<adversary::EndpointConfig, adversary::EndpointConfig> endpoints(const Options& o) {
  MasterKey reader_key = master_key(o);
  MasterKey controller_key =
      o.peer_key_hex.empty() ? reader_key : parse_key(o.peer_key_hex, "--peer-key");
  return {adversary::EndpointConfig{adversary::kDefaultReaderId, reader_key,
                                    adversary::mix_seed(o.seed, 1)},
          adversary::EndpointConfig{adversary::kDefaultControllerId, controller_key,
                                    adversary::mix_seed(o.seed, 2)}};
}

int cmd_handshake(const Options& o, bool with_transcript) {
  auto [reader, controller] = endpoints(o);
  adversary::LinkChannel link;
  auto outcome = adversary::run_session(link, reader, controller, {});
  json j = json_io::to_json(outcome, with_transcript);
  j.erase("secrecy_hits");
  std::string text = outcome.established()
                         ? "established in " + std::to_string(outcome.handshake_messages) +
                               " messages, session " + outcome.session_id + "\n"
                         : failure_text(*outcome.failure);
  if (with_transcript) text += adversary::format_transcript(outcome.transcript);
  emit(o, j, text);
  return outcome.established() ? kOk : kProtocolFailure;
}

int cmd_readout(const Options& o, const std::string& mode, const std::string& reports_file,
                std::optional<std::uint64_t> received_at, std::uint32_t seq) {
  std::vector<diag::BpcReport> reports;
  diag::DiagPacket packet;
  try {
    reports = json_io::reports_from_json(read_json(reports_file));
    if (mode == "idle") {
      if (reports.size() != 1) {
        throw InputError("idle readout carries exactly one report, got " +
                         std::to_string(reports.size()));
      }
      packet = diag::make_idle_packet(reports.front(), seq);
    } else {
      packet = diag::collect_from_bpcs(reports, seq);
    }
  } catch (const Error& e) {
    throw InputError(reports_file + ": " + e.what());
  } catch (const json::exception& e) {
    throw InputError(reports_file + ": " + e.what());
  }

  auto [reader, controller] = endpoints(o);
  adversary::LinkChannel link;
  auto outcome = adversary::run_session(link, reader, controller, {packet});

  std::vector<PassportEntry> entries;
  for (const auto& p : outcome.received) {
    PassportEntry e = make_entry(p, outcome.session_id);
    if (received_at) e.received_at = *received_at;
    entries.push_back(std::move(e));
  }
  PassportStore store(store_path(o));
  if (!entries.empty()) store.append(entries);

  json rows = json::array();
  for (const auto& e : entries) rows.push_back(json::parse(entry_to_line(e)));
  json j{{"established", outcome.established()},
         {"session_id", outcome.session_id},
         {"records_sent", outcome.records_sent},
         {"records_delivered", outcome.records_delivered},
         {"failure", outcome.failure ? json_io::to_json(*outcome.failure) : json(nullptr)},
         {"store", store.path().string()},
         {"appended", rows}};
  std::ostringstream text;
  if (outcome.failure) text << failure_text(*outcome.failure);
  text << "appended " << entries.size() << " entr" << (entries.size() == 1 ? "y" : "ies")
       << " to " << store.path().string() << "\n";
  emit(o, j, text.str());
  return outcome.established() && outcome.records_delivered == 1 ? kOk : kProtocolFailure;
}

int cmd_history(const Options& o, const std::string& pack_hex) {
  diag::PackId id{};
  Bytes b;
  try {
    b = from_hex(pack_hex);
  } catch (const std::invalid_argument&) {
    throw InputError("--pack-id is not valid hex");
  }
  if (b.size() != id.size()) throw InputError("--pack-id must be 8 bytes");
  std::copy(b.begin(), b.end(), id.begin());

  auto entries = PassportStore(store_path(o)).history(id);
  json arr = json::array();
  std::ostringstream text;
  for (const auto& e : entries) {
    arr.push_back(json::parse(entry_to_line(e)));
    text << e.received_at << "  " << diag::to_string(e.source) << "  session " << e.session_id
         << "  " << e.diag.reports.size() << " report(s)\n";
  }
  emit(o, arr, text.str());
  return kOk;
}

struct SimArgs {
  std::string method = "both";
  std::optional<double> days;
  std::string scenario_file;
  std::string trace_file;
  std::size_t sessions = 0;
  double session_length_s = 60;
  std::map<std::string, double> overrides;
};

int cmd_wakeup_sim(const Options& o, const SimArgs& a) {
  wakeup::StorageScenario scenario;
  wakeup::PowerModel model;
  try {
    if (!a.scenario_file.empty()) {
      json sj = read_json(a.scenario_file);
      scenario = json_io::scenario_from_json(sj);
      if (sj.contains("model")) model = json_io::model_from_json(sj.at("model"), model);
    }
  } catch (const json::exception& e) {
    throw InputError(a.scenario_file + ": " + e.what());
  }
  if (a.days) scenario.duration_days = *a.days;
  if (a.sessions > 0) {
    double span = scenario.duration_days * 86400.0 / static_cast<double>(a.sessions);
    for (std::size_t i = 0; i < a.sessions; ++i) {
      scenario.readouts.push_back({span * static_cast<double>(i) + span / 2, a.session_length_s});
    }
  }
  json overrides(a.overrides);
  model = json_io::model_from_json(overrides, model);

  json j{{"model", json_io::to_json(model)}, {"scenario", json_io::to_json(scenario)}};
  std::ostringstream text;
  std::vector<wakeup::WakeupTrace> traces;
  if (a.method == "both") {
    auto cmp = wakeup::compare_methods(model, scenario);
    j["comparison"] = json_io::to_json(cmp);
    for (const auto* s : {&cmp.event_detection, &cmp.energy_harvesting, &cmp.always_on}) {
      text << wakeup::to_string(s->method) << ": idle " << s->idle_power_uw << " uW, avg "
           << s->avg_power_uw << " uW, wake-up " << s->wakeup_latency_ms << " ms\n";
    }
    text << "lower power: " << cmp.power_winner << ", faster wake-up: " << cmp.latency_winner
         << "\n";
    if (!a.trace_file.empty()) {
      traces.push_back(wakeup::simulate(model, scenario, wakeup::Method::kEventDetection));
      traces.push_back(wakeup::simulate(model, scenario, wakeup::Method::kEnergyHarvesting));
    }
  } else {
    wakeup::Method m;
    try {
      m = wakeup::parse_method(a.method);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    auto trace = wakeup::simulate(model, scenario, m);
    j["method"] = wakeup::to_string(m);
    j["idle_power_uw"] = wakeup::idle_power(model, m);
    j["wakeup_latency_ms"] = static_cast<double>(wakeup::wakeup_latency_us(model, m)) / 1000.0;
    j["result"] = json_io::to_json(trace);
    text << wakeup::to_string(m) << ": idle " << wakeup::idle_power(model, m) << " uW, avg "
         << trace.avg_power_uw << " uW, energy " << trace.total_energy_uj() << " uJ\n";
    traces.push_back(std::move(trace));
  }
  if (!a.trace_file.empty()) {
    std::ofstream out(a.trace_file, std::ios::trunc);
    if (!out) throw InputError("cannot write " + a.trace_file);
    for (const auto& t : traces) out << json_io::trace_jsonl(t);
  }
  emit(o, j, text.str());
  return kOk;
}

int cmd_attack(const Options& o, const std::string& strategy, std::size_t runs,
               std::optional<std::size_t> frame, std::size_t bit, bool details) {
  std::vector<adversary::StrategyKind> kinds;
  if (strategy == "all") {
    kinds = adversary::kAllStrategies;
  } else if (auto k = adversary::parse_strategy(strategy)) {
    kinds.push_back(*k);
  } else {
    throw InputError("unknown strategy " + strategy);
  }
  std::optional<adversary::AdversaryStrategy> override_strategy;
  if (frame) {
    if (kinds.size() != 1 || kinds[0] == adversary::StrategyKind::kEavesdrop ||
        kinds[0] == adversary::StrategyKind::kChosenChallenge) {
      throw InputError("--frame applies to a single replay, reflect or bitflip strategy");
    }
    adversary::AdversaryStrategy s;
    s.kind = kinds[0];
    s.frame = *frame;
    s.bit_offset = bit;
    s.prior_seed = adversary::mix_seed(o.seed, 3);
    override_strategy = s;
  }
  auto report = adversary::run_attack_suite(o.seed, runs, kinds, override_strategy);
  json j = json_io::to_json(report, details);
  std::ostringstream text;
  for (const auto& s : report.strategies) {
    text << adversary::to_string(s.kind) << ": ";
    if (s.kind == adversary::StrategyKind::kEavesdrop && s.blocked == 0) {
      text << "passive, " << s.runs << " sessions observed";
    } else if (s.blocked == s.runs && s.failure_messages.size() == 1) {
      text << "blocked at message " << s.failure_messages.begin()->first;
    } else {
      text << s.blocked << "/" << s.runs << " blocked";
      for (const auto& [msg, n] : s.failure_messages) text << ", " << n << " at message " << msg;
    }
    text << ", " << s.successes << " successes, " << s.leak_hits << " secrecy hits\n";
  }
  emit(o, j, text.str());
  return report.total_successes() == 0 ? kOk : kProtocolFailure;
}

int cmd_ban_verify(const Options& o, const std::string& protocol_file,
                   const std::string& goals_file, std::size_t max_depth) {
  ban::ProtocolSpec spec;
  try {
    ban::parse_spec(read_file(protocol_file), spec);
    ban::parse_spec(read_file(goals_file), spec);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  auto result = ban::derive(spec, max_depth);
  emit(o, json_io::to_json(result), ban::format_trace(result));
  return result.status == ban::DeriveStatus::kDerived ? kOk : kNotDerivable;
}

int exit_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kStoreError: return kStoreFailure;
    case ErrorCode::kInvalidModel:
    case ErrorCode::kOverlappingSessions: return kSimulationError;
    case ErrorCode::kRangeViolation:
    case ErrorCode::kSyntaxError:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kDuplicatePackId: return kInputError;
    default: return kProtocolFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure NFC readout simulator for wireless battery management"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  auto* key_opt = app.add_option("--key", o.key_hex, "Master key, 32 hex digits");
  app.add_option("--key-file", o.key_file, "File holding the master key as hex")
      ->excludes(key_opt);
  app.add_option("--store", o.store, "Passport store (default $BMS_STORE_PATH or passport.ndjson)");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  auto* hs = app.add_subcommand("handshake", "Run one honest mutual authentication");
  bool with_transcript = false;
  hs->add_option("--peer-key", o.peer_key_hex, "Controller master key, if different");
  hs->add_flag("--transcript", with_transcript, "Include the frames sent on the link");

  auto* ro = app.add_subcommand("readout", "Read diagnostics into the passport store");
  std::string mode, reports_file;
  std::optional<std::uint64_t> received_at;
  std::uint32_t seq = 0;
  ro->add_option("--mode", mode, "idle or active")
      ->required()
      ->check(CLI::IsMember({"idle", "active"}));
  ro->add_option("--reports", reports_file, "BpcReport JSON file")->required();
  ro->add_option("--received-at", received_at, "Receive time stored with the entry");
  ro->add_option("--sequence", seq, "Packet sequence number");
  ro->add_option("--peer-key", o.peer_key_hex, "Controller master key, if different");

  auto* hi = app.add_subcommand("history", "List stored entries for a pack");
  std::string pack_hex;
  hi->add_option("--pack-id", pack_hex, "Pack id, 16 hex digits")->required();

  auto* ws = app.add_subcommand("wakeup-sim", "Compare the stored-pack wake-up methods");
  SimArgs sim;
  ws->add_option("--method", sim.method, "ed, eh, always-on or both")->capture_default_str();
  ws->add_option("--days", sim.days, "Scenario length in days");
  ws->add_option("--scenario", sim.scenario_file, "Scenario JSON file");
  ws->add_option("--sessions", sim.sessions, "Evenly spaced readouts to add");
  ws->add_option("--session-length", sim.session_length_s, "Seconds per added readout");
  ws->add_option("--trace", sim.trace_file, "Write the state trace as JSON lines");
  for (const char* field : {"supply_voltage_v", "bpc_vlps_current_ua", "bpc_active_current_ma",
                            "ntag_standby_current_ua", "ntag_active_current_ma",
                            "ed_wakeup_latency_ms", "eh_wakeup_latency_ms"}) {
    std::string flag = std::string("--") + field;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    ws->add_option_function<double>(
        flag, [&sim, field](double v) { sim.overrides[field] = v; }, "Power model override");
  }

  auto* at = app.add_subcommand("attack", "Run the Dolev-Yao attack suite");
  std::string strategy = "all";
  std::size_t runs = 100, bit = 0;
  std::optional<std::size_t> frame;
  bool details = false;
  at->add_option("--strategy", strategy,
                 "eavesdrop, replay, reflect, chosen-challenge, bitflip or all")
      ->capture_default_str();
  at->add_option("--runs", runs, "Runs per strategy")->capture_default_str();
  at->add_option("--frame", frame, "Frame the strategy targets");
  at->add_option("--bit", bit, "Bit to flip within the frame");
  at->add_flag("--details", details, "Include every run");

  auto* bv = app.add_subcommand("ban-verify", "Derive the protocol goals in BAN logic");
  std::string protocol_file = std::string(WBMS_DATA_DIR) + "/ban/protocol.ban";
  std::string goals_file = std::string(WBMS_DATA_DIR) + "/ban/goals.ban";
  std::size_t max_depth = 16;
  bv->add_option("--protocol", protocol_file, "Assumptions and messages")->capture_default_str();
  bv->add_option("--goals", goals_file, "Goals")->capture_default_str();
  bv->add_option("--max-depth", max_depth, "Inference rounds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*hs) return cmd_handshake(o, with_transcript);
    if (*ro) return cmd_readout(o, mode, reports_file, received_at, seq);
    if (*hi) return cmd_history(o, pack_hex);
    if (*ws) return cmd_wakeup_sim(o, sim);
    if (*at) return cmd_attack(o, strategy, runs, frame, bit, details);
    if (*bv) return cmd_ban_verify(o, protocol_file, goals_file, max_depth);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
