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

#include "wavepipe/schedule.hpp"

#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "wavepipe/placement.hpp"
#include "wavepipe/serialize.hpp"

using namespace wavepipe;

namespace {

ActionList generate(Scheme scheme, int devices, int microbatches, int waves = 1,
                    int replicas = 1) {
  ScheduleConfig cfg =
      make_config(scheme, devices, microbatches, waves, replicas);
  return generate_schedule(make_placement(cfg), cfg, CostModel{});
}

// Compact compute transcript of one device: "F0 F1 B0 ..." with the
// microbatch number; slice omitted for single-slice devices.
struct Step {
  char phase;
  int microbatch;
  int slice;

  bool operator==(const Step& o) const {
    return phase == o.phase && microbatch == o.microbatch && slice == o.slice;
  }
};

std::vector<Step> computes(const ActionList& list, int device) {
  std::vector<Step> out;
  for (const Action& a : list.per_device[device]) {
    if (a.kind == ActionKind::Forward) {
      out.push_back({'F', a.microbatch, a.slice_index});
    } else if (a.kind == ActionKind::Backward) {
      out.push_back({'B', a.microbatch, a.slice_index});
    }
  }
  return out;
}

std::vector<std::pair<char, int>> phase_microbatch(const ActionList& list,
                                                   int device) {
  std::vector<std::pair<char, int>> out;
  for (const Step& s : computes(list, device)) out.push_back({s.phase, s.microbatch});
  return out;
}

int count_kind(const ActionList& list, ActionKind kind) {
  int n = 0;
  for (const auto& stream : list.per_device) {
    for (const Action& a : stream) n += a.kind == kind ? 1 : 0;
  }
  return n;
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("all-forward-then-all-backward per device") {
  ActionList list = generate(Scheme::GPipe, 4, 4);
  std::vector<std::pair<char, int>> expected = {
      {'F', 0}, {'F', 1}, {'F', 2}, {'F', 3},
      {'B', 0}, {'B', 1}, {'B', 2}, {'B', 3}};
  for (int d = 0; d < 4; ++d) {
    CHECK(phase_microbatch(list, d) == expected);
  }
}

TEST_CASE("one-forward-one-backward steady state") {
  ActionList list = generate(Scheme::Dapple, 4, 4);
  // warmup depth on device p is min(P - p, B)
  CHECK(phase_microbatch(list, 3) ==
        std::vector<std::pair<char, int>>{{'F', 0}, {'B', 0}, {'F', 1},
                                          {'B', 1}, {'F', 2}, {'B', 2},
                                          {'F', 3}, {'B', 3}});
  CHECK(phase_microbatch(list, 2) ==
        std::vector<std::pair<char, int>>{{'F', 0}, {'F', 1}, {'B', 0},
                                          {'F', 2}, {'B', 1}, {'F', 3},
                                          {'B', 2}, {'B', 3}});
  CHECK(phase_microbatch(list, 1) ==
        std::vector<std::pair<char, int>>{{'F', 0}, {'F', 1}, {'F', 2},
                                          {'B', 0}, {'F', 3}, {'B', 1},
                                          {'B', 2}, {'B', 3}});
  CHECK(phase_microbatch(list, 0) ==
        std::vector<std::pair<char, int>>{{'F', 0}, {'F', 1}, {'F', 2},
                                          {'F', 3}, {'B', 0}, {'B', 1},
                                          {'B', 2}, {'B', 3}});
}

TEST_CASE("in-flight cap never exceeds min(P - p, B)") {
  for (int b : {4, 8}) {
    ActionList list = generate(Scheme::Dapple, 4, b);
    for (int d = 0; d < 4; ++d) {
      int cap = std::min(4 - d, b);
      int in_flight = 0, peak = 0;
      for (const Step& s : computes(list, d)) {
        in_flight += s.phase == 'F' ? 1 : -1;
        peak = std::max(peak, in_flight);
      }
      CHECK(peak == cap);
    }
  }
}

TEST_CASE("wave traversal visits the V locally at the bottom device") {
  ActionList list = generate(Scheme::Hanayo, 4, 4, 1);
  std::vector<Step> d3 = computes(list, 3);
  // slices 3 and 4 live on the same device; each microbatch crosses the V
  // bottom back to back
  REQUIRE(d3.size() == 16);
  CHECK(d3[0] == Step{'F', 0, 3});
  CHECK(d3[1] == Step{'F', 0, 4});
  for (int d = 0; d < 4; ++d) {
    CHECK(computes(list, d).size() == 16);  // 4 mbs x 2 slices x 2 phases
  }
}

TEST_CASE("bidirectional generation balances both directions") {
  ActionList list = generate(Scheme::Chimera, 4, 4);
  for (int d = 0; d < 4; ++d) {
    int down = 0, up = 0;
    for (const Step& s : computes(list, d)) {
      ScheduleConfig cfg = list.config;
      (microbatch_direction(cfg, s.microbatch) == Direction::Down ? down : up)++;
    }
    CHECK(down == 4);  // 2 microbatches x 2 phases per direction
    CHECK(up == 4);
  }
}

TEST_CASE("communication hugs its compute") {
  for (const ActionList& list :
       {generate(Scheme::GPipe, 4, 4), generate(Scheme::Dapple, 4, 8),
        generate(Scheme::Chimera, 4, 4), generate(Scheme::Hanayo, 4, 4, 2),
        generate(Scheme::Hanayo, 2, 4, 1)}) {
    for (const auto& stream : list.per_device) {
      for (size_t i = 0; i < stream.size(); ++i) {
        const Action& a = stream[i];
        if (a.kind == ActionKind::Send) {
          REQUIRE(i > 0);
          CHECK(stream[i - 1].is_compute());
          CHECK(stream[i - 1].microbatch == a.microbatch);
          CHECK(stream[i - 1].slice_index == a.slice_index);
        } else if (a.kind == ActionKind::Receive) {
          REQUIRE(i + 1 < stream.size());
          CHECK(stream[i + 1].is_compute());
          CHECK(stream[i + 1].microbatch == a.microbatch);
          CHECK(stream[i + 1].slice_index == a.slice_index);
        } else if (a.kind == ActionKind::BatchedExchange) {
          REQUIRE(i > 0);
          REQUIRE(i + 1 < stream.size());
          CHECK(stream[i - 1].is_compute());
          CHECK(stream[i - 1].microbatch == a.microbatch);
          CHECK(stream[i - 1].slice_index == a.slice_index);
          CHECK(stream[i + 1].is_compute());
        }
      }
      REQUIRE(!stream.empty());
      CHECK(stream.back().kind == ActionKind::OptimizerStep);
    }
  }
}

TEST_CASE("mutual adjacent exchanges are batched") {
  // The 1F1B steady state crosses activations and gradients between
  // neighbors; those pairs must fuse.  The all-forward-then-all-backward
  // scheme has no adjacent crossings, so nothing fuses there.
  ActionList dapple = generate(Scheme::Dapple, 4, 4);
  CHECK(count_kind(dapple, ActionKind::BatchedExchange) == 12);  // 6 pairs
  std::map<int, int> group_size;
  for (const auto& stream : dapple.per_device) {
    for (const Action& a : stream) {
      if (a.kind == ActionKind::BatchedExchange) group_size[a.batch_group]++;
    }
  }
  CHECK(group_size.size() == 6);
  for (const auto& [group, size] : group_size) CHECK(size == 2);

  ActionList gpipe = generate(Scheme::GPipe, 4, 4);
  CHECK(count_kind(gpipe, ActionKind::BatchedExchange) == 0);

  ActionList hanayo = generate(Scheme::Hanayo, 2, 2, 1);
  CHECK(count_kind(hanayo, ActionKind::BatchedExchange) > 0);
}

TEST_CASE("single device needs no communication") {
  ActionList list = generate(Scheme::Dapple, 1, 3);
  CHECK(count_kind(list, ActionKind::Send) == 0);
  CHECK(count_kind(list, ActionKind::Receive) == 0);
  CHECK(count_kind(list, ActionKind::BatchedExchange) == 0);
  CHECK(phase_microbatch(list, 0) ==
        std::vector<std::pair<char, int>>{{'F', 0}, {'B', 0}, {'F', 1},
                                          {'B', 1}, {'F', 2}, {'B', 2}});
}

TEST_CASE("generation is deterministic") {
  for (int round = 0; round < 2; ++round) {
    CHECK(serialize_action_list(generate(Scheme::Hanayo, 4, 8, 2)) ==
          serialize_action_list(generate(Scheme::Hanayo, 4, 8, 2)));
    CHECK(serialize_action_list(generate(Scheme::Chimera, 8, 8)) ==
          serialize_action_list(generate(Scheme::Chimera, 8, 8)));
  }
}

TEST_CASE("comm insertion rejects non-compute input") {
  ActionList list = generate(Scheme::GPipe, 2, 2);
  CHECK_THROWS_AS(insert_comm(list), ScheduleError);
}

TEST_CASE("generation covers the full legal grid") {
  for (Scheme scheme : {Scheme::GPipe, Scheme::Dapple, Scheme::Chimera,
                        Scheme::ChimeraWave, Scheme::Hanayo}) {
    for (int p : {1, 2, 4, 8}) {
      for (int w : {1, 2, 4}) {
        for (int bm : {1, 2}) {
          int b = p * bm;
          ScheduleConfig cfg;
          try {
            cfg = make_config(scheme, p, b, w,
                              scheme == Scheme::ChimeraWave ? 2 : 1);
          } catch (const ConfigError&) {
            continue;  // illegal combination
          }
          ActionList list;
          CHECK_NOTHROW(list = generate_schedule(make_placement(cfg), cfg,
                                                 CostModel{}));
          int total = 0;
          for (int d = 0; d < cfg.devices; ++d) {
            total += static_cast<int>(computes(list, d).size());
          }
          CHECK(total == 2 * cfg.microbatches * cfg.stages);
        }
      }
    }
  }
}

}  // TEST_SUITE
