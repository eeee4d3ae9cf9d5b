/* Copyright 2026 The wavepipe Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "wavepipe/serialize.hpp"

#include <set>
#include <string>

#include <json.hpp>

namespace wavepipe {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(where, "unknown field '" + it.key() + "'");
  }
}

int require_int(const json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  if (!it->is_number_integer()) fail(where, "field '" + key + "' must be an integer");
  return it->get<int>();
}

std::string require_string(const json& obj, const std::string& where,
                           const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  if (!it->is_string()) fail(where, "field '" + key + "' must be a string");
  return it->get<std::string>();
}

json fraction_to_json(const Rational& r) { return json::array({r.num(), r.den()}); }

Rational fraction_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    fail(where, "field 'fraction' must be a [numerator, denominator] pair");
  }
  int64_t den = j[1].get<int64_t>();
  if (den <= 0) fail(where, "fraction denominator must be positive");
  return Rational(j[0].get<int64_t>(), den);
}

json action_to_json(const Action& a) {
  json j;
  j["kind"] = action_kind_name(a.kind);
  if (a.microbatch >= 0) j["microbatch"] = a.microbatch;
  if (a.local_module_rank >= 0) j["local_module_rank"] = a.local_module_rank;
  if (a.slice_index >= 0) j["slice_index"] = a.slice_index;
  if (a.peer >= 0) j["peer"] = a.peer;
  if (a.payload >= 0) j["payload"] = payload_name(static_cast<Payload>(a.payload));
  if (a.batch_group >= 0) j["batch_group"] = a.batch_group;
  return j;
}

Action action_from_json(const json& j, const std::string& where,
                        const ScheduleConfig& cfg,
                        const StagePlacement& placement, int device) {
  if (!j.is_object()) fail(where, "action must be an object");
  expect_keys(j, where,
              {"kind", "microbatch", "local_module_rank", "slice_index", "peer",
               "payload", "batch_group"});

  Action a;
  std::string kind = require_string(j, where, "kind");
  if (!action_kind_from_name(kind, &a.kind)) {
    fail(where, "unknown action kind '" + kind + "'");
  }

  bool is_opt = a.kind == ActionKind::OptimizerStep;
  bool is_comm = a.kind == ActionKind::Send || a.kind == ActionKind::Receive ||
                 a.kind == ActionKind::BatchedExchange;

  if (is_opt) {
    expect_keys(j, where, {"kind"});
    return a;
  }

  a.microbatch = require_int(j, where, "microbatch");
  if (a.microbatch < 0 || a.microbatch >= cfg.microbatches) {
    fail(where, "microbatch out of range");
  }
  a.local_module_rank = require_int(j, where, "local_module_rank");
  const auto& slices = placement.assignment[device];
  if (a.local_module_rank < 0 ||
      a.local_module_rank >= static_cast<int>(slices.size())) {
    fail(where, "local_module_rank out of range");
  }
  a.slice_index = require_int(j, where, "slice_index");
  if (a.slice_index < 0 || a.slice_index >= cfg.stages) {
    fail(where, "slice_index out of range");
  }
  if (slices[a.local_module_rank].index != a.slice_index) {
    fail(where, "slice_index does not match the slice at local_module_rank");
  }

  if (is_comm) {
    a.peer = require_int(j, where, "peer");
    if (a.peer < 0 || a.peer >= cfg.devices) fail(where, "peer rank out of range");
    if (a.peer == device) fail(where, "peer must differ from the device itself");
    std::string payload = require_string(j, where, "payload");
    Payload p;
    if (!payload_from_name(payload, &p)) {
      fail(where, "unknown payload '" + payload + "'");
    }
    a.payload = static_cast<int>(p);
    if (a.kind == ActionKind::BatchedExchange) {
      a.batch_group = require_int(j, where, "batch_group");
      if (a.batch_group < 0) fail(where, "batch_group must be nonnegative");
    } else if (j.contains("batch_group")) {
      fail(where, "field 'batch_group' is only valid on batched_exchange");
    }
  } else {
    // Compute actions never carry communication fields.
    for (const char* k : {"peer", "payload", "batch_group"}) {
      if (j.contains(k)) {
        fail(where, std::string("field '") + k + "' is not valid on " + kind);
      }
    }
  }
  return a;
}

ScheduleConfig config_from_json(const json& j) {
  const std::string where = "config";
  if (!j.is_object()) fail(where, "must be an object");
  expect_keys(j, where, {"scheme", "P", "B", "W", "D", "S"});
  std::string scheme_str = require_string(j, where, "scheme");
  Scheme scheme;
  if (!scheme_from_name(scheme_str, &scheme)) {
    fail(where, "unknown scheme '" + scheme_str + "'");
  }
  int P = require_int(j, where, "P");
  int B = require_int(j, where, "B");
  int W = require_int(j, where, "W");
  int D = require_int(j, where, "D");
  int S = require_int(j, where, "S");
  ScheduleConfig cfg;
  try {
    cfg = make_config(scheme, P, B, W, D);
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  if (cfg.stages != S) {
    fail(where, "S must equal " + std::to_string(cfg.stages) + " for this config");
  }
  return cfg;
}

StagePlacement placement_from_json(const json& j, const ScheduleConfig& cfg) {
  if (!j.is_array() || static_cast<int>(j.size()) != cfg.devices) {
    fail("placement", "must be an array with one entry per device");
  }
  StagePlacement placement;
  placement.assignment.resize(cfg.devices);
  // Every stage index must appear exactly once -- once per direction for
  // Chimera's paired replicas.
  std::vector<int> seen(cfg.stages * (cfg.scheme == Scheme::Chimera ? 2 : 1), 0);
  for (int device = 0; device < cfg.devices; ++device) {
    const json& dev = j[device];
    std::string dev_where = "placement[" + std::to_string(device) + "]";
    if (!dev.is_array()) fail(dev_where, "must be an array of slices");
    Rational weight(0);
    for (size_t i = 0; i < dev.size(); ++i) {
      std::string where = dev_where + "[" + std::to_string(i) + "]";
      const json& sj = dev[i];
      if (!sj.is_object()) fail(where, "slice must be an object");
      expect_keys(sj, where, {"index", "fraction", "direction"});
      StageSlice slice;
      slice.index = require_int(sj, where, "index");
      if (slice.index < 0 || slice.index >= cfg.stages) {
        fail(where, "slice index out of range");
      }
      auto fit = sj.find("fraction");
      if (fit == sj.end()) fail(where, "missing field 'fraction'");
      slice.fraction = fraction_from_json(*fit, where);
      std::string dir = require_string(sj, where, "direction");
      if (!direction_from_name(dir, &slice.direction)) {
        fail(where, "unknown direction '" + dir + "'");
      }
      Rational expected = is_wave_scheme(cfg.scheme)
                              ? Rational(1, 2 * cfg.waves)
                              : Rational(1);
      if (slice.fraction != expected) {
        fail(where, "fraction must be " + expected.to_string() +
                        " for this scheme");
      }
      int slot = slice.index;
      if (cfg.scheme == Scheme::Chimera && slice.direction == Direction::Up) {
        slot += cfg.stages;
      }
      if (seen[slot]++) fail(where, "duplicate slice assignment");
      weight += slice.fraction;
      placement.assignment[device].push_back(slice);
    }
    Rational expected_weight(cfg.scheme == Scheme::Chimera ? 2 : 1);
    if (weight != expected_weight) {
      fail(dev_where, "per-device fractions must sum to " +
                          expected_weight.to_string());
    }
  }
  for (size_t slot = 0; slot < seen.size(); ++slot) {
    if (!seen[slot]) {
      fail("placement", "slice " + std::to_string(slot % cfg.stages) +
                            " is not assigned to any device");
    }
  }
  return placement;
}

}  // namespace

std::string serialize_action_list(const ActionList& list) {
  json doc;
  json cfg;
  cfg["scheme"] = scheme_name(list.config.scheme);
  cfg["P"] = list.config.devices;
  cfg["B"] = list.config.microbatches;
  cfg["W"] = list.config.waves;
  cfg["D"] = list.config.replicas;
  cfg["S"] = list.config.stages;
  doc["config"] = cfg;

  json placement = json::array();
  for (const auto& device : list.placement.assignment) {
    json dev = json::array();
    for (const auto& slice : device) {
      json sj;
      sj["index"] = slice.index;
      sj["fraction"] = fraction_to_json(slice.fraction);
      sj["direction"] = direction_name(slice.direction);
      dev.push_back(sj);
    }
    placement.push_back(dev);
  }
  doc["placement"] = placement;

  json actions = json::array();
  for (const auto& device : list.per_device) {
    json dev = json::array();
    for (const auto& action : device) dev.push_back(action_to_json(action));
    actions.push_back(dev);
  }
  doc["actions"] = actions;

  return doc.dump(2) + "\n";
}

ActionList parse_action_list(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "top level must be an object");
  expect_keys(doc, "document", {"config", "placement", "actions"});
  for (const char* key : {"config", "placement", "actions"}) {
    if (!doc.contains(key)) fail("document", std::string("missing field '") + key + "'");
  }

  ActionList list;
  list.config = config_from_json(doc["config"]);
  list.placement = placement_from_json(doc["placement"], list.config);

  const json& actions = doc["actions"];
  if (!actions.is_array() || static_cast<int>(actions.size()) != list.config.devices) {
    fail("actions", "must be an array with one entry per device");
  }
  list.per_device.resize(list.config.devices);
  for (int device = 0; device < list.config.devices; ++device) {
    const json& dev = actions[device];
    if (!dev.is_array()) {
      fail("actions[" + std::to_string(device) + "]", "must be an array");
    }
    for (size_t i = 0; i < dev.size(); ++i) {
      std::string where =
          "actions[" + std::to_string(device) + "][" + std::to_string(i) + "]";
      list.per_device[device].push_back(
          action_from_json(dev[i], where, list.config, list.placement, device));
    }
  }
  return list;
}

}  // namespace wavepipe
