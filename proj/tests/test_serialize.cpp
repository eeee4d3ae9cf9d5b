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

#include <string>

#include "doctest.h"
#include "json.hpp"
#include "wavepipe/cost_model.hpp"
#include "wavepipe/placement.hpp"
#include "wavepipe/schedule.hpp"

using namespace wavepipe;
using nlohmann::ordered_json;

namespace {

ActionList sample_list(Scheme scheme = Scheme::GPipe, int devices = 2,
                       int microbatches = 2, int waves = 1) {
  ScheduleConfig cfg = make_config(scheme, devices, microbatches, waves);
  return generate_schedule(make_placement(cfg), cfg, CostModel{});
}

ordered_json sample_doc() {
  return ordered_json::parse(serialize_action_list(sample_list()));
}

void expect_reject(const ordered_json& doc, const std::string& needle) {
  CHECK_THROWS_WITH_AS(parse_action_list(doc.dump()),
                       doctest::Contains(needle.c_str()), ParseError);
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("round-trip preserves the list and is byte-stable") {
  ActionList list = sample_list(Scheme::Hanayo, 4, 4, 2);
  std::string text = serialize_action_list(list);
  CHECK(serialize_action_list(list) == text);  // deterministic bytes

  ActionList back = parse_action_list(text);
  CHECK(back.config.scheme == list.config.scheme);
  CHECK(back.config.devices == list.config.devices);
  CHECK(back.config.stages == list.config.stages);
  REQUIRE(back.per_device.size() == list.per_device.size());
  for (size_t d = 0; d < list.per_device.size(); ++d) {
    REQUIRE(back.per_device[d].size() == list.per_device[d].size());
    for (size_t i = 0; i < list.per_device[d].size(); ++i) {
      CHECK(back.per_device[d][i].kind == list.per_device[d][i].kind);
      CHECK(back.per_device[d][i].microbatch == list.per_device[d][i].microbatch);
      CHECK(back.per_device[d][i].slice_index == list.per_device[d][i].slice_index);
      CHECK(back.per_device[d][i].peer == list.per_device[d][i].peer);
      CHECK(back.per_device[d][i].payload == list.per_device[d][i].payload);
      CHECK(back.per_device[d][i].batch_group ==
            list.per_device[d][i].batch_group);
    }
  }
  CHECK(serialize_action_list(back) == text);
}

TEST_CASE("document structure") {
  ordered_json doc = sample_doc();
  CHECK(doc["config"]["scheme"] == "gpipe");
  CHECK(doc["config"]["P"] == 2);
  CHECK(doc["config"]["S"] == 2);
  CHECK(doc["placement"].size() == 2);
  CHECK(doc["placement"][0][0]["index"] == 0);
  CHECK(doc["placement"][0][0]["fraction"][0] == 1);
  CHECK(doc["actions"].size() == 2);
  // every stream ends with a bare optimizer step
  for (const auto& stream : doc["actions"]) {
    CHECK(stream.back() == ordered_json({{"kind", "optimizer_step"}}));
  }
}

TEST_CASE("malformed JSON is rejected") {
  CHECK_THROWS_WITH_AS(parse_action_list("{\"config\": "),
                       doctest::Contains("invalid JSON"), ParseError);
  CHECK_THROWS_AS(parse_action_list("[]"), ParseError);
}

TEST_CASE("unknown fields are rejected") {
  ordered_json doc = sample_doc();
  doc["extra"] = 1;
  expect_reject(doc, "unknown field");

  doc = sample_doc();
  doc["config"]["note"] = "x";
  expect_reject(doc, "unknown field");

  doc = sample_doc();
  doc["actions"][0][0]["note"] = "x";
  expect_reject(doc, "unknown field");
}

TEST_CASE("config is revalidated on parse") {
  ordered_json doc = sample_doc();
  doc["config"]["scheme"] = "chimera";
  doc["config"]["P"] = 3;
  doc["config"]["B"] = 4;
  doc["config"]["S"] = 3;
  expect_reject(doc, "P must be even");

  doc = sample_doc();
  doc["config"]["S"] = 7;
  expect_reject(doc, "S must equal");

  doc = sample_doc();
  doc["config"]["scheme"] = "pipedream";
  expect_reject(doc, "unknown scheme");
}

TEST_CASE("placement is revalidated on parse") {
  ordered_json doc = sample_doc();
  doc["placement"][0][0]["fraction"] = {1, 2};
  expect_reject(doc, "fraction must be");

  doc = sample_doc();
  doc["placement"][1][0]["index"] = 0;  // device 1 repeats slice 0
  expect_reject(doc, "duplicate slice");

  doc = sample_doc();
  doc["placement"][0][0]["direction"] = "sideways";
  expect_reject(doc, "unknown direction");
}

TEST_CASE("action fields are checked") {
  ordered_json doc = sample_doc();
  doc["actions"][0][0]["kind"] = "warp";
  expect_reject(doc, "unknown action kind");

  doc = sample_doc();
  doc["actions"][0][0]["microbatch"] = 9;
  expect_reject(doc, "microbatch out of range");

  // find a send on device 0 to corrupt
  doc = sample_doc();
  for (auto& a : doc["actions"][0]) {
    if (a["kind"] == "send") {
      a["peer"] = 5;
      break;
    }
  }
  expect_reject(doc, "peer rank out of range");

  doc = sample_doc();
  for (auto& a : doc["actions"][0]) {
    if (a["kind"] == "send") {
      a["batch_group"] = 0;
      break;
    }
  }
  expect_reject(doc, "only valid on batched_exchange");

  doc = sample_doc();
  doc["actions"][0][0]["payload"] = "activation";  // compute action
  expect_reject(doc, "not valid on");

  doc = sample_doc();
  doc["actions"][1][0]["slice_index"] = 0;  // device 1 owns slice 1
  expect_reject(doc, "does not match the slice");
}

TEST_CASE("schema does not require a flush step") {
  // Dropping the trailing optimizer steps leaves a parseable document; the
  // flush check, not the parser, owns that rule.
  ordered_json doc = sample_doc();
  for (auto& stream : doc["actions"]) stream.erase(stream.size() - 1);
  ActionList list = parse_action_list(doc.dump());
  CHECK(list.per_device[0].back().kind != ActionKind::OptimizerStep);
}

TEST_CASE("bidirectional placements serialize both directions") {
  ScheduleConfig cfg = make_config(Scheme::Chimera, 4, 4);
  ActionList list = generate_schedule(make_placement(cfg), cfg, CostModel{});
  ActionList back = parse_action_list(serialize_action_list(list));
  CHECK(back.placement.assignment[0][1].direction == Direction::Up);
  CHECK(back.config.scheme == Scheme::Chimera);
}

}  // TEST_SUITE
