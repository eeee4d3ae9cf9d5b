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

#include "wavepipe/simulate.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "wavepipe/placement.hpp"
#include "wavepipe/schedule.hpp"

using namespace wavepipe;

namespace {

constexpr double kEps = 1e-9;

ActionList generate(Scheme scheme, int devices, int microbatches, int waves = 1,
                    int replicas = 1, CostModel cost = CostModel{}) {
  ScheduleConfig cfg =
      make_config(scheme, devices, microbatches, waves, replicas);
  return generate_schedule(make_placement(cfg), cfg, cost);
}

double device_busy(const SimTrace& trace, int device) {
  double busy = 0.0;
  for (const TraceInterval& iv : trace.intervals[device]) {
    if (iv.kind == ActionKind::Forward || iv.kind == ActionKind::Backward) {
      busy += iv.end - iv.start;
    }
  }
  return busy;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("makespan matches hand-derived timelines") {
  CostModel unit;  // t_forward=1, t_backward=2, t_comm=0
  CHECK(simulate(generate(Scheme::GPipe, 4, 4), unit).makespan ==
        doctest::Approx(21.0).epsilon(kEps));
  CHECK(simulate(generate(Scheme::Dapple, 4, 4), unit).makespan ==
        doctest::Approx(21.0).epsilon(kEps));
  CHECK(simulate(generate(Scheme::Dapple, 1, 3), unit).makespan ==
        doctest::Approx(9.0).epsilon(kEps));
  CHECK(simulate(generate(Scheme::Hanayo, 4, 4, 1), unit).makespan ==
        doctest::Approx(18.0).epsilon(kEps));
  CHECK(simulate(generate(Scheme::Chimera, 4, 4), unit).makespan ==
        doctest::Approx(16.0).epsilon(kEps));
}

TEST_CASE("every device performs its full compute load") {
  // Per device: each microbatch contributes one full forward and one full
  // backward stage worth of work, regardless of how the stage is sliced.
  for (Scheme scheme :
       {Scheme::GPipe, Scheme::Dapple, Scheme::Chimera, Scheme::Hanayo}) {
    int waves = scheme == Scheme::Hanayo ? 2 : 1;
    ActionList list = generate(scheme, 4, 8, waves);
    SimTrace trace = simulate(list, CostModel{});
    for (int d = 0; d < 4; ++d) {
      CHECK(device_busy(trace, d) == doctest::Approx(8 * 3.0).epsilon(kEps));
    }
  }
}

TEST_CASE("intervals are disjoint, ordered, and correctly sized") {
  CostModel cost;
  cost.t_comm = 0.5;
  for (Scheme scheme :
       {Scheme::GPipe, Scheme::Dapple, Scheme::Chimera, Scheme::Hanayo}) {
    ActionList list = generate(scheme, 4, 4, scheme == Scheme::Hanayo ? 2 : 1,
                               1, cost);
    SimTrace trace = simulate(list, cost);
    REQUIRE(trace.intervals.size() == 4);
    for (int d = 0; d < 4; ++d) {
      double prev_end = 0.0;
      for (const TraceInterval& iv : trace.intervals[d]) {
        CHECK(iv.start >= prev_end - kEps);
        double want = 0.0;
        if (iv.kind == ActionKind::Forward) {
          want = cost.slice_forward(list.config);
        } else if (iv.kind == ActionKind::Backward) {
          want = cost.slice_backward(list.config);
        } else {
          REQUIRE(iv.kind == ActionKind::BatchedExchange);
          want = cost.t_comm;
        }
        CHECK(iv.end - iv.start == doctest::Approx(want).epsilon(kEps));
        CHECK(iv.end <= trace.makespan + kEps);
        prev_end = iv.end;
      }
    }
  }
}

TEST_CASE("communication cost stretches the makespan") {
  ActionList list = generate(Scheme::Dapple, 4, 4);
  CostModel free;
  CostModel slow;
  slow.t_comm = 0.5;
  double base = simulate(list, free).makespan;
  double stretched = simulate(list, slow).makespan;
  CHECK(stretched > base + 0.25);
}

TEST_CASE("comm events are recorded and sorted by arrival") {
  ActionList list = generate(Scheme::GPipe, 4, 4);
  SimTrace trace = simulate(list, CostModel{});
  // 3 boundaries x 4 microbatches x (activation + gradient), no fusion here
  CHECK(trace.comm_events.size() == 24);
  for (size_t i = 1; i < trace.comm_events.size(); ++i) {
    CHECK(trace.comm_events[i - 1].arrival_time <=
          trace.comm_events[i].arrival_time + kEps);
  }
  for (const CommEvent& ev : trace.comm_events) {
    CHECK(ev.src_device != ev.dst_device);
    CHECK(ev.post_time <= ev.arrival_time + kEps);
  }

  ActionList single = generate(Scheme::Dapple, 1, 2);
  CHECK(simulate(single, CostModel{}).comm_events.empty());
}

TEST_CASE("simulation is deterministic") {
  ActionList list = generate(Scheme::Hanayo, 4, 8, 2);
  CostModel cost;
  cost.t_comm = 0.25;
  SimTrace a = simulate(list, cost);
  SimTrace b = simulate(list, cost);
  CHECK(a.makespan == b.makespan);
  REQUIRE(a.intervals.size() == b.intervals.size());
  for (size_t d = 0; d < a.intervals.size(); ++d) {
    REQUIRE(a.intervals[d].size() == b.intervals[d].size());
    for (size_t i = 0; i < a.intervals[d].size(); ++i) {
      CHECK(a.intervals[d][i].start == b.intervals[d][i].start);
      CHECK(a.intervals[d][i].end == b.intervals[d][i].end);
      CHECK(a.intervals[d][i].action_index == b.intervals[d][i].action_index);
    }
  }
}

TEST_CASE("a receive whose send never fires stalls the simulation") {
  ScheduleConfig cfg = make_config(Scheme::GPipe, 2, 2, 1);
  ActionList list;
  list.config = cfg;
  list.placement = make_placement(cfg);
  list.per_device.resize(2);
  Action f0;
  f0.kind = ActionKind::Forward;
  f0.microbatch = 0;
  f0.slice_index = 0;
  f0.local_module_rank = 0;
  Action send = f0;
  send.kind = ActionKind::Send;
  send.peer = 1;
  send.payload = static_cast<int>(Payload::Activation);
  list.per_device[0] = {f0, send};
  Action recv;
  recv.kind = ActionKind::Receive;
  recv.microbatch = 1;  // never sent
  recv.slice_index = 1;
  recv.local_module_rank = 0;
  recv.peer = 0;
  recv.payload = static_cast<int>(Payload::Activation);
  Action f1 = f0;
  f1.microbatch = 1;
  f1.slice_index = 1;
  list.per_device[1] = {recv, f1};
  CHECK_THROWS_WITH_AS(simulate(list, CostModel{}),
                       doctest::Contains("simulation stalled"),
                       SimulationError);
}

TEST_CASE("malformed batch groups are rejected") {
  ActionList list = generate(Scheme::Dapple, 4, 4);
  for (auto& stream : list.per_device) {
    for (size_t i = 0; i < stream.size(); ++i) {
      if (stream[i].kind == ActionKind::BatchedExchange) {
        stream.erase(stream.begin() + i);
        CHECK_THROWS_AS(simulate(list, CostModel{}), SimulationError);
        return;
      }
    }
  }
  FAIL("expected at least one batched exchange");
}

TEST_CASE("trace serializes to JSON") {
  ActionList list = generate(Scheme::Dapple, 2, 2);
  SimTrace trace = simulate(list, CostModel{});
  nlohmann::json doc = nlohmann::json::parse(trace_to_json(trace));
  CHECK(doc.at("makespan").get<double>() ==
        doctest::Approx(trace.makespan).epsilon(kEps));
  REQUIRE(doc.at("intervals").is_array());
  REQUIRE(doc.at("intervals").size() == 2);
  for (const auto& iv : doc.at("intervals").at(0)) {
    CHECK(iv.contains("kind"));
    CHECK(iv.at("start").is_number());
    CHECK(iv.at("end").is_number());
  }
  CHECK(doc.at("comm_events").is_array());
}

}  // TEST_SUITE
