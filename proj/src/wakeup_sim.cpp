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

#include "wbms/wakeup_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wbms/error.hpp"

namespace wbms::wakeup {
namespace {

using Energy = __int128;  // attojoules (pW * us)

constexpr std::uint64_t kUsPerDay = 86'400'000'000ULL;

std::int64_t to_int(double v, double scale) {
  return static_cast<std::int64_t>(std::llround(v * scale));
}

std::uint64_t seconds_to_us(double s) {
  return static_cast<std::uint64_t>(std::llround(s * 1e6));
}

PowerState idle_state(Method m) {
  switch (m) {
    case Method::kEventDetection: return PowerState::kIdleVlpsStandby;
    case Method::kEnergyHarvesting: return PowerState::kIdleVlpsTagOff;
    case Method::kAlwaysOn: return PowerState::kAlwaysOnIdle;
  }
  return PowerState::kIdleVlpsStandby;
}

bool is_idle(PowerState s) {
  return s == PowerState::kIdleVlpsStandby || s == PowerState::kIdleVlpsTagOff ||
         s == PowerState::kAlwaysOnIdle;
}

double aj_to_uj(Energy e) { return static_cast<double>(e) / 1e12; }

}  // namespace

void validate(const PowerModel& m) {
  const double fields[] = {m.supply_voltage_v,       m.bpc_vlps_current_ua,
                           m.bpc_active_current_ma,  m.ntag_standby_current_ua,
                           m.ntag_active_current_ma, m.ed_wakeup_latency_ms,
                           m.eh_wakeup_latency_ms};
  for (double f : fields) {
    if (!(f > 0) || !std::isfinite(f)) {
      throw Error(ErrorCode::kInvalidModel, "all model fields must be positive");
    }
  }
  if (m.eh_wakeup_latency_ms < m.ed_wakeup_latency_ms) {
    throw Error(ErrorCode::kInvalidModel, "EH wake-up latency shorter than ED");
  }
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kEventDetection: return "ED";
    case Method::kEnergyHarvesting: return "EH";
    case Method::kAlwaysOn: return "always-on";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "ed" || name == "ED") return Method::kEventDetection;
  if (name == "eh" || name == "EH") return Method::kEnergyHarvesting;
  if (name == "always-on") return Method::kAlwaysOn;
  throw std::invalid_argument("unknown wake-up method: " + std::string(name));
}

std::string_view to_string(PowerState s) {
  switch (s) {
    case PowerState::kIdleVlpsStandby: return "idle_vlps_tag_standby";
    case PowerState::kIdleVlpsTagOff: return "idle_vlps_tag_off";
    case PowerState::kEdPinAsserted: return "ed_pin_asserted";
    case PowerState::kTagHarvestBoot: return "tag_harvest_boot";
    case PowerState::kBpcWaking: return "bpc_waking";
    case PowerState::kSession: return "session";
    case PowerState::kAlwaysOnIdle: return "always_on_idle";
  }
  return "?";
}

bool valid_transition(Method method, PowerState from, PowerState to) {
  using S = PowerState;
  switch (method) {
    case Method::kEventDetection:
      return (from == S::kIdleVlpsStandby && to == S::kEdPinAsserted) ||
             (from == S::kEdPinAsserted && to == S::kBpcWaking) ||
             (from == S::kBpcWaking && to == S::kSession) ||
             (from == S::kSession && to == S::kIdleVlpsStandby);
    case Method::kEnergyHarvesting:
      return (from == S::kIdleVlpsTagOff && to == S::kTagHarvestBoot) ||
             (from == S::kTagHarvestBoot && to == S::kBpcWaking) ||
             (from == S::kBpcWaking && to == S::kSession) ||
             (from == S::kSession && to == S::kIdleVlpsTagOff);
    case Method::kAlwaysOn:
      return (from == S::kAlwaysOnIdle && to == S::kSession) ||
             (from == S::kSession && to == S::kAlwaysOnIdle);
  }
  return false;
}

IntegerModel to_integer(const PowerModel& m) {
  validate(m);
  return IntegerModel{
      to_int(m.supply_voltage_v, 1e3),
      to_int(m.bpc_vlps_current_ua, 1e3),
      to_int(m.bpc_active_current_ma, 1e6),
      to_int(m.ntag_standby_current_ua, 1e3),
      to_int(m.ntag_active_current_ma, 1e6),
      static_cast<std::uint64_t>(to_int(m.ed_wakeup_latency_ms, 1e3)),
      static_cast<std::uint64_t>(to_int(m.eh_wakeup_latency_ms, 1e3)),
  };
}

std::int64_t state_power_pw(const IntegerModel& m, Method method, PowerState s) {
  std::int64_t na = 0;
  switch (s) {
    case PowerState::kIdleVlpsStandby:
    case PowerState::kEdPinAsserted:
      na = m.bpc_vlps_na + m.ntag_standby_na;
      break;
    case PowerState::kIdleVlpsTagOff:
    case PowerState::kTagHarvestBoot:
      na = m.bpc_vlps_na;  // tag runs from the reader's field
      break;
    case PowerState::kBpcWaking:
      na = m.bpc_active_na +
           (method == Method::kEventDetection ? m.ntag_standby_na : 0);
      break;
    case PowerState::kSession:
      na = m.bpc_active_na + m.ntag_active_na;
      break;
    case PowerState::kAlwaysOnIdle:
      na = m.bpc_active_na + m.ntag_standby_na;
      break;
  }
  return m.supply_mv * na;
}

std::int64_t idle_power_pw(const PowerModel& model, Method method) {
  return state_power_pw(to_integer(model), method, idle_state(method));
}

double idle_power(const PowerModel& model, Method method) {
  return static_cast<double>(idle_power_pw(model, method)) / 1e6;
}

std::uint64_t wakeup_latency_us(const PowerModel& model, Method method) {
  IntegerModel m = to_integer(model);
  switch (method) {
    case Method::kEventDetection: return m.ed_latency_us;
    case Method::kEnergyHarvesting: return m.eh_latency_us;
    case Method::kAlwaysOn: return 0;
  }
  return 0;
}

WakeupTrace simulate(const PowerModel& model, const StorageScenario& scenario,
                     Method method) {
  IntegerModel m = to_integer(model);
  if (!(scenario.duration_days > 0)) {
    throw Error(ErrorCode::kRangeViolation, "duration must be positive");
  }
  const std::uint64_t duration =
      static_cast<std::uint64_t>(std::llround(scenario.duration_days * kUsPerDay));
  const std::uint64_t latency = wakeup_latency_us(model, method);

  struct Window {
    std::uint64_t start, awake, end;
  };
  std::vector<Window> windows;
  for (const Readout& r : scenario.readouts) {
    if (r.start_s < 0 || !(r.session_length_s > 0)) {
      throw Error(ErrorCode::kRangeViolation, "readout needs start >= 0 and length > 0");
    }
    std::uint64_t start = seconds_to_us(r.start_s);
    std::uint64_t awake = start + latency;
    windows.push_back({start, awake, awake + seconds_to_us(r.session_length_s)});
  }
  std::sort(windows.begin(), windows.end(),
            [](const Window& a, const Window& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].end > duration) {
      throw Error(ErrorCode::kRangeViolation, "readout runs past the scenario end");
    }
    if (i > 0 && windows[i].start < windows[i - 1].end) {
      throw Error(ErrorCode::kOverlappingSessions,
                  "readout at " + std::to_string(windows[i].start) + " us");
    }
  }

  WakeupTrace trace;
  trace.method = method;
  trace.duration_us = duration;
  const PowerState idle = idle_state(method);
  auto push = [&](std::uint64_t t, PowerState s) {
    trace.events.push_back({t, s, state_power_pw(m, method, s)});
  };

  push(0, idle);
  for (const Window& w : windows) {
    switch (method) {
      case Method::kEventDetection:
        push(w.start, PowerState::kEdPinAsserted);
        push(w.start, PowerState::kBpcWaking);
        break;
      case Method::kEnergyHarvesting:
        push(w.start, PowerState::kTagHarvestBoot);
        push(w.start, PowerState::kBpcWaking);
        break;
      case Method::kAlwaysOn:
        break;
    }
    push(w.awake, PowerState::kSession);
    push(w.end, idle);
  }

  Energy idle_e = 0;
  Energy active_e = 0;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const TraceEvent& e = trace.events[i];
    std::uint64_t next = i + 1 < trace.events.size() ? trace.events[i + 1].time_us : duration;
    Energy e_aj = static_cast<Energy>(e.power_pw) * static_cast<Energy>(next - e.time_us);
    (is_idle(e.state) ? idle_e : active_e) += e_aj;
  }
  trace.idle_energy_uj = aj_to_uj(idle_e);
  trace.active_energy_uj = aj_to_uj(active_e);
  // pW * us / us = pW; / 1e6 -> uW
  trace.avg_power_uw =
      static_cast<double>((idle_e + active_e) * 1000 / static_cast<Energy>(duration)) / 1e9;
  return trace;
}

namespace {
MethodSummary summarize(const PowerModel& model, const StorageScenario& scenario,
                        Method method) {
  WakeupTrace t = simulate(model, scenario, method);
  return MethodSummary{method, t.avg_power_uw, idle_power(model, method),
                       t.total_energy_uj(),
                       static_cast<double>(wakeup_latency_us(model, method)) / 1e3};
}
}  // namespace

Comparison compare_methods(const PowerModel& model, const StorageScenario& scenario) {
  Comparison c;
  c.event_detection = summarize(model, scenario, Method::kEventDetection);
  c.energy_harvesting = summarize(model, scenario, Method::kEnergyHarvesting);
  c.always_on = summarize(model, scenario, Method::kAlwaysOn);

  auto winner = [](double ed, double eh) -> std::string {
    if (ed < eh) return "ED";
    if (eh < ed) return "EH";
    return "tie";
  };
  c.power_winner = winner(c.event_detection.total_energy_uj, c.energy_harvesting.total_energy_uj);
  c.latency_winner =
      winner(c.event_detection.wakeup_latency_ms, c.energy_harvesting.wakeup_latency_ms);

  c.table = {
      {Method::kEventDetection,
       {"tag exposes an event pin", "tag powered continuously by the BPC"},
       {"shorter wake-up"},
       {"needs a constant supply to the tag", "higher idle power"}},
      {Method::kEnergyHarvesting,
       {"tag configured for energy harvesting", "reader field strong enough to harvest"},
       {"tag draws nothing while idle", "BPC powers the tag once awake"},
       {"longer wake-up"}},
  };
  return c;
}

}  // namespace wbms::wakeup
