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

#ifndef WAVEPIPE_SIMULATE_HPP_
#define WAVEPIPE_SIMULATE_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "wavepipe/action.hpp"
#include "wavepipe/cost_model.hpp"

namespace wavepipe {

class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what)
      : std::runtime_error(what) {}
};

// One engine-occupying interval on a device: a forward, a backward, or a
// batched exchange.  Plain sends/receives and optimizer steps take no engine
// time and are not recorded.
struct TraceInterval {
  int action_index = -1;  // position in the device's action stream
  ActionKind kind = ActionKind::Forward;
  int microbatch = -1;
  int slice_index = -1;
  Direction direction = Direction::Down;
  double start = 0.0;
  double end = 0.0;
};

// One delivered message: posted at `post_time` on the receiving side,
// payload available at `arrival_time`.
struct CommEvent {
  int src_device = -1;
  int dst_device = -1;
  double post_time = 0.0;
  double arrival_time = 0.0;
};

struct SimTrace {
  double makespan = 0.0;
  std::vector<std::vector<TraceInterval>> intervals;  // per device
  std::vector<CommEvent> comm_events;
};

// Deterministic discrete-event execution of an action list.
//
// Semantics: compute actions occupy the device engine exclusively for their
// slice duration.  A send is buffered: it costs the sender no engine time
// and fires when the sender's engine has finished everything preceding it.
// A receive is posted when the device begins the compute action immediately
// preceding it in program order (list start if none) — one outstanding
// prefetch — and its payload arrives at max(post, sender fire) + T_C, which
// stalls the following compute only if it exceeds the engine's own
// readiness.  A batched exchange synchronizes both participants: it starts
// when both reach it and occupies both engines for T_C.  Optimizer steps
// cost nothing.
//
// The input must satisfy the structural validator; a stream that blocks
// forever (e.g. a receive whose send never fires) raises SimulationError.
SimTrace simulate(const ActionList& list, const CostModel& cost);

// JSON rendering of the trace: makespan, per-device intervals, comm events.
std::string trace_to_json(const SimTrace& trace);

}  // namespace wavepipe

#endif  // WAVEPIPE_SIMULATE_HPP_
