# Copyright 2026 The wbms Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Secure NFC diagnostics readout simulator for battery management systems."""

import json as _json

from . import _wbms
from ._wbms import WbmsError, decode_diag as _decode_diag, double_decrypt, double_encrypt

__all__ = [
    "WbmsError",
    "handshake",
    "attack_suite",
    "idle_power",
    "simulate",
    "compare_methods",
    "ban_verify",
    "topology_plan",
    "encode_diag",
    "decode_diag",
    "double_encrypt",
    "double_decrypt",
]


def _dump(obj):
    return "" if obj is None else _json.dumps(obj)


def handshake(seed, key, peer_key=None, with_transcript=False):
    return _json.loads(_wbms.handshake_json(seed, key, peer_key, with_transcript))


def attack_suite(seed, runs=100, strategies=(), details=False):
    return _json.loads(_wbms.attack_json(seed, runs, list(strategies), details))


def idle_power(method, model=None):
    return _wbms.idle_power(method, _dump(model))


def simulate(method, scenario, model=None, with_events=False):
    return _json.loads(_wbms.simulate_json(method, _dump(scenario), _dump(model), with_events))


def compare_methods(scenario, model=None):
    return _json.loads(_wbms.compare_json(_dump(scenario), _dump(model)))


def ban_verify(protocol, goals, max_depth=16):
    return _json.loads(_wbms.ban_json(protocol, goals, max_depth))


def topology_plan(topology, modules, controller_stored=False):
    return _json.loads(_wbms.plan_json(topology, modules, controller_stored))


def encode_diag(packet):
    return _wbms.encode_diag(_json.dumps(packet))


def decode_diag(raw):
    return _json.loads(_decode_diag(raw))
