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

// Python bindings. Structured results cross the boundary as JSON text and
// are decoded on the Python side.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "wbms/adversary.hpp"
#include "wbms/ban.hpp"
#include "wbms/diagnostics.hpp"
#include "wbms/json_io.hpp"
#include "wbms/secure_channel.hpp"
#include "wbms/wakeup_sim.hpp"

namespace py = pybind11;
using namespace wbms;
using json_io::json;

namespace {

Bytes to_vec(const py::bytes& b) {
  std::string s = b;
  return Bytes(s.begin(), s.end());
}

py::bytes to_py(ByteView b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

MasterKey key_from(const py::bytes& b) {
  Bytes v = to_vec(b);
  if (v.size() != 16) throw Error(ErrorCode::kBadLength, "master key must be 16 bytes");
  return MasterKey(v);
}

json parse(const std::string& text) { return text.empty() ? json::object() : json::parse(text); }

std::string handshake_json(std::uint64_t seed, const py::bytes& key, const py::object& peer_key,
                           bool with_transcript) {
  MasterKey k = key_from(key);
  MasterKey peer = peer_key.is_none() ? k : key_from(peer_key.cast<py::bytes>());
  adversary::EndpointConfig reader{adversary::kDefaultReaderId, k, adversary::mix_seed(seed, 1)};
  adversary::EndpointConfig controller{adversary::kDefaultControllerId, peer,
                                       adversary::mix_seed(seed, 2)};
  adversary::LinkChannel link;
  auto outcome = adversary::run_session(link, reader, controller, {});
  return json_io::to_json(outcome, with_transcript).dump();
}

std::string attack_json(std::uint64_t seed, std::size_t runs,
                        const std::vector<std::string>& strategies, bool details) {
  std::vector<adversary::StrategyKind> kinds;
  for (const auto& s : strategies) {
    auto k = adversary::parse_strategy(s);
    if (!k) throw py::value_error("unknown strategy " + s);
    kinds.push_back(*k);
  }
  if (kinds.empty()) kinds = adversary::kAllStrategies;
  return json_io::to_json(adversary::run_attack_suite(seed, runs, kinds), details).dump();
}

double idle_power(const std::string& method, const std::string& model) {
  return wakeup::idle_power(json_io::model_from_json(parse(model)), wakeup::parse_method(method));
}

std::string simulate_json(const std::string& method, const std::string& scenario,
                          const std::string& model, bool with_events) {
  auto m = json_io::model_from_json(parse(model));
  auto s = json_io::scenario_from_json(parse(scenario));
  return json_io::to_json(wakeup::simulate(m, s, wakeup::parse_method(method)), with_events)
      .dump();
}

std::string compare_json(const std::string& scenario, const std::string& model) {
  auto m = json_io::model_from_json(parse(model));
  auto s = json_io::scenario_from_json(parse(scenario));
  return json_io::to_json(wakeup::compare_methods(m, s)).dump();
}

std::string ban_json(const std::string& protocol, const std::string& goals,
                     std::size_t max_depth) {
  ban::ProtocolSpec spec;
  ban::parse_spec(protocol, spec);
  ban::parse_spec(goals, spec);
  return json_io::to_json(ban::derive(spec, max_depth)).dump();
}

std::string plan_json(const std::string& topology, unsigned modules, bool stored) {
  for (auto t : {diag::Topology::kCentralized, diag::Topology::kModulated,
                 diag::Topology::kDistributed, diag::Topology::kDecentralized}) {
    if (diag::to_string(t) == topology) {
      auto p = diag::topology_plan(t, modules, stored);
      return json{{"ntag_count", p.ntag_count},
                  {"reader_count", p.reader_count},
                  {"idle_feasible", p.idle_feasible}}
          .dump();
    }
  }
  throw py::value_error("unknown topology " + topology);
}

}  // namespace

PYBIND11_MODULE(_wbms, m) {
  m.doc() = "Secure NFC diagnostics readout simulator";

  static PyObject* wbms_error =
      py::exception<Error>(m, "WbmsError", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc =
          py::reinterpret_steal<py::object>(PyObject_CallFunction(wbms_error, "s", e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(wbms_error, exc.ptr());
    }
  });

  m.def("handshake_json", &handshake_json, py::arg("seed"), py::arg("key"),
        py::arg("peer_key") = py::none(), py::arg("with_transcript") = false);
  m.def("attack_json", &attack_json, py::arg("seed"), py::arg("runs") = 100,
        py::arg("strategies") = std::vector<std::string>{}, py::arg("details") = false);
  m.def("idle_power", &idle_power, py::arg("method"), py::arg("model") = "");
  m.def("simulate_json", &simulate_json, py::arg("method"), py::arg("scenario"),
        py::arg("model") = "", py::arg("with_events") = false);
  m.def("compare_json", &compare_json, py::arg("scenario"), py::arg("model") = "");
  m.def("ban_json", &ban_json, py::arg("protocol"), py::arg("goals"), py::arg("max_depth") = 16);
  m.def("plan_json", &plan_json, py::arg("topology"), py::arg("modules"),
        py::arg("controller_stored") = false);

  m.def("encode_diag", [](const std::string& packet) {
    return to_py(diag::encode_diag(json_io::packet_from_json(json::parse(packet))));
  });
  m.def("decode_diag", [](const py::bytes& raw) {
    return json_io::to_json(diag::decode_diag(to_vec(raw))).dump();
  });
  m.def("double_encrypt", [](const py::bytes& key, const py::bytes& payload, bool pad) {
    return to_py(double_encrypt(key_from(key), to_vec(payload),
                                pad ? Padding::kPkcs7 : Padding::kNone));
  }, py::arg("key"), py::arg("payload"), py::arg("pad") = true);
  m.def("double_decrypt", [](const py::bytes& key, const py::bytes& payload, bool pad) {
    return to_py(double_decrypt(key_from(key), to_vec(payload),
                                pad ? Padding::kPkcs7 : Padding::kNone));
  }, py::arg("key"), py::arg("payload"), py::arg("pad") = true);
}
