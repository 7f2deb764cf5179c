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

#include <json.hpp>

#include "wbms/adversary.hpp"
#include "wbms/ban.hpp"
#include "wbms/diagnostics.hpp"
#include "wbms/wakeup_sim.hpp"

// JSON schemas of every document the CLI reads or writes. Parsing functions
// throw Error(kRangeViolation) or nlohmann::json::exception on bad input.
namespace wbms::json_io {

using nlohmann::json;

json to_json(const diag::BpcReport& r);
diag::BpcReport report_from_json(const json& j);
// Accepts a bare array or {"reports": [...]}.
std::vector<diag::BpcReport> reports_from_json(const json& j);

json to_json(const diag::DiagPacket& p);
diag::DiagPacket packet_from_json(const json& j);

json to_json(const wakeup::PowerModel& m);
// Missing fields keep the defaults of base.
wakeup::PowerModel model_from_json(const json& j, wakeup::PowerModel base = {});

// {"duration_days": 1, "readouts": [{"start_s": 3600, "session_length_s": 60}],
//  "model": {...optional overrides...}}
wakeup::StorageScenario scenario_from_json(const json& j);
json to_json(const wakeup::StorageScenario& s);
json to_json(const wakeup::WakeupTrace& t, bool with_events = false);
// One JSON object per event: {"time_us", "state", "power_uw"}.
std::string trace_jsonl(const wakeup::WakeupTrace& t);
json to_json(const wakeup::Comparison& c);

json to_json(const ban::DeriveResult& r);

json to_json(const adversary::FailurePoint& f);
json to_json(const adversary::SessionOutcome& o, bool with_transcript = false);
json to_json(const adversary::AttackReport& r, bool with_runs = false);

}  // namespace wbms::json_io
