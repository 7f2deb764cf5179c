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
#include <string>
#include <string_view>
#include <vector>

namespace wbms::wakeup {

// Component currents and supply of the stored battery pack controller (BPC)
// and its NFC tag. Idle currents and the supply voltage reproduce the
// measured setup; active currents and wake latencies are placeholders.
struct PowerModel {
  double supply_voltage_v = 3.3;
  double bpc_vlps_current_ua = 29.8;
  double bpc_active_current_ma = 30.0;
  double ntag_standby_current_ua = 5.9;
  double ntag_active_current_ma = 5.0;
  double ed_wakeup_latency_ms = 5.0;
  double eh_wakeup_latency_ms = 50.0;
};

// Throws Error(kInvalidModel) unless every field is positive and the EH
// latency is not shorter than the ED latency.
void validate(const PowerModel& model);

enum class Method { kEventDetection, kEnergyHarvesting, kAlwaysOn };

std::string_view to_string(Method m);
// Accepts "ed", "eh", "always-on". Throws std::invalid_argument.
Method parse_method(std::string_view name);

enum class PowerState {
  kIdleVlpsStandby,  // ED idle: BPC in VLPS, tag in standby on BPC power
  kIdleVlpsTagOff,   // EH idle: BPC in VLPS, tag unpowered
  kEdPinAsserted,    // RF field seen by the tag, event pin raised
  kTagHarvestBoot,   // tag boots from harvested field energy
  kBpcWaking,
  kSession,          // BPC active and powering the tag
  kAlwaysOnIdle,     // baseline: BPC never sleeps
};

std::string_view to_string(PowerState s);

// Edges of the wake-up flowchart for each method.
bool valid_transition(Method method, PowerState from, PowerState to);

// Integer quantities used internally so energy integrals are exact:
// power in picowatts (mV * nA), time in microseconds, energy in attojoules.
struct IntegerModel {
  std::int64_t supply_mv;
  std::int64_t bpc_vlps_na;
  std::int64_t bpc_active_na;
  std::int64_t ntag_standby_na;
  std::int64_t ntag_active_na;
  std::uint64_t ed_latency_us;
  std::uint64_t eh_latency_us;
};

IntegerModel to_integer(const PowerModel& model);

std::int64_t state_power_pw(const IntegerModel& m, Method method, PowerState s);

// Idle power of the method in picowatts and microwatts.
std::int64_t idle_power_pw(const PowerModel& model, Method method);
double idle_power(const PowerModel& model, Method method);

std::uint64_t wakeup_latency_us(const PowerModel& model, Method method);

struct Readout {
  double start_s = 0;           // RF field appears
  double session_length_s = 0;  // after the BPC is awake
};

struct StorageScenario {
  double duration_days = 1;
  std::vector<Readout> readouts;
};

struct TraceEvent {
  std::uint64_t time_us = 0;
  PowerState state = PowerState::kIdleVlpsStandby;
  std::int64_t power_pw = 0;

  double power_uw() const { return static_cast<double>(power_pw) / 1e6; }
};

struct WakeupTrace {
  Method method = Method::kEventDetection;
  std::uint64_t duration_us = 0;
  std::vector<TraceEvent> events;
  double idle_energy_uj = 0;
  double active_energy_uj = 0;
  double avg_power_uw = 0;

  double total_energy_uj() const { return idle_energy_uj + active_energy_uj; }
};

// Throws kOverlappingSessions when two readouts (including their wake-up
// latency) overlap, and kRangeViolation when one runs past the end.
WakeupTrace simulate(const PowerModel& model, const StorageScenario& scenario,
                     Method method);

struct MethodSummary {
  Method method;
  double avg_power_uw = 0;
  double idle_power_uw = 0;
  double total_energy_uj = 0;
  double wakeup_latency_ms = 0;
};

struct ProsCons {
  Method method;
  std::vector<std::string> prerequisites;
  std::vector<std::string> pros;
  std::vector<std::string> cons;
};

struct Comparison {
  MethodSummary event_detection;
  MethodSummary energy_harvesting;
  MethodSummary always_on;
  // "ED", "EH" or "tie".
  std::string power_winner;
  std::string latency_winner;
  std::vector<ProsCons> table;
};

Comparison compare_methods(const PowerModel& model, const StorageScenario& scenario);

}  // namespace wbms::wakeup
