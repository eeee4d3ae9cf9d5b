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

#ifndef WAVEPIPE_ACTION_HPP_
#define WAVEPIPE_ACTION_HPP_

#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/rational.hpp"

namespace wavepipe {

// Traversal direction of a stage slice along the device array.
enum class Direction { Down, Up };

// One contiguous chunk of the model held by a device.  `fraction` is the
// chunk's share of a single device's classic stage: 1 for one-stage-per-device
// schedules, 1/(2W) for wave schedules.  Chimera devices hold two full stages
// (one per direction), so their per-device fractions sum to 2.
struct StageSlice {
  int index = 0;            // global stage index in [0, S)
  Rational fraction{1, 1};  // share of one classic stage
  Direction direction = Direction::Down;
};

// Slice-to-device assignment.  assignment[p] lists device p's slices in the
// order a microbatch's forward pass visits them; an action's
// local_module_rank indexes into that list.
struct StagePlacement {
  std::vector<std::vector<StageSlice>> assignment;

  int device_count() const { return static_cast<int>(assignment.size()); }
};

enum class ActionKind {
  Forward,
  Backward,
  Send,
  Receive,
  BatchedExchange,
  OptimizerStep,
};

enum class Payload { Activation, Gradient };

const char* action_kind_name(ActionKind k);
bool action_kind_from_name(const std::string& name, ActionKind* out);
const char* payload_name(Payload p);
bool payload_from_name(const std::string& name, Payload* out);
const char* direction_name(Direction d);
bool direction_from_name(const std::string& name, Direction* out);

// One instruction in a device's program.  Compute actions (Forward/Backward)
// carry no peer or payload.  Send/Receive carry the peer device and payload;
// a Send's slice_index is the producing slice, the matching Receive's is the
// consuming slice.  A BatchedExchange fuses one outgoing and one incoming
// message with a peer into a single synchronizing action: its fields describe
// the OUTGOING message, the incoming one is described by the peer's exchange
// with the same batch_group.  OptimizerStep carries no microbatch or slice.
struct Action {
  ActionKind kind = ActionKind::Forward;
  int microbatch = -1;        // -1 means absent (OptimizerStep)
  int local_module_rank = -1; // index into the device's slice list; -1 absent
  int slice_index = -1;       // global stage index; -1 absent
  int peer = -1;              // communication peer device; -1 absent
  int payload = -1;           // Payload enum value; -1 absent
  int batch_group = -1;       // shared id of a fused exchange; -1 absent

  bool is_compute() const {
    return kind == ActionKind::Forward || kind == ActionKind::Backward;
  }
  bool is_comm() const {
    return kind == ActionKind::Send || kind == ActionKind::Receive ||
           kind == ActionKind::BatchedExchange;
  }
};

// A complete schedule: one instruction stream per device, plus the config and
// placement it was generated against.  Treated as immutable once built.
struct ActionList {
  ScheduleConfig config;
  StagePlacement placement;
  std::vector<std::vector<Action>> per_device;
};

// --- Structural helpers shared by the scheduler, validator and simulator ---

// Which direction's replica microbatch b runs through.  Only Chimera assigns
// directions to microbatches (first ceil(B/2) go down, the rest up); every
// other scheme traverses the single placement in slice order.
Direction microbatch_direction(const ScheduleConfig& cfg, int microbatch);

// Owner of stage slice `index` for a microbatch travelling in `dir`.
// Returns {device, local_module_rank}.  For non-Chimera schemes the slice
// index alone identifies the owner and `dir` is ignored.
struct SliceOwner {
  int device = -1;
  int local_rank = -1;
};
SliceOwner slice_owner(const ScheduleConfig& cfg, const StagePlacement& placement,
                       int slice_index, Direction dir);

// Human-readable one-line description, for diagnostics.
std::string describe_action(const Action& a);

}  // namespace wavepipe

#endif  // WAVEPIPE_ACTION_HPP_
