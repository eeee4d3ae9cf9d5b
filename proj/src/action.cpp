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

#include "wavepipe/action.hpp"

#include <cassert>

namespace wavepipe {

const char* action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::Forward:
      return "forward";
    case ActionKind::Backward:
      return "backward";
    case ActionKind::Send:
      return "send";
    case ActionKind::Receive:
      return "receive";
    case ActionKind::BatchedExchange:
      return "batched_exchange";
    case ActionKind::OptimizerStep:
      return "optimizer_step";
  }
  return "?";
}

bool action_kind_from_name(const std::string& name, ActionKind* out) {
  for (ActionKind k :
       {ActionKind::Forward, ActionKind::Backward, ActionKind::Send,
        ActionKind::Receive, ActionKind::BatchedExchange,
        ActionKind::OptimizerStep}) {
    if (name == action_kind_name(k)) {
      *out = k;
      return true;
    }
  }
  return false;
}

const char* payload_name(Payload p) {
  return p == Payload::Activation ? "activation" : "gradient";
}

bool payload_from_name(const std::string& name, Payload* out) {
  if (name == "activation") {
    *out = Payload::Activation;
    return true;
  }
  if (name == "gradient") {
    *out = Payload::Gradient;
    return true;
  }
  return false;
}

const char* direction_name(Direction d) {
  return d == Direction::Down ? "down" : "up";
}

bool direction_from_name(const std::string& name, Direction* out) {
  if (name == "down") {
    *out = Direction::Down;
    return true;
  }
  if (name == "up") {
    *out = Direction::Up;
    return true;
  }
  return false;
}

Direction microbatch_direction(const ScheduleConfig& cfg, int microbatch) {
  if (cfg.scheme != Scheme::Chimera) return Direction::Down;
  int down_count = (cfg.microbatches + 1) / 2;
  return microbatch < down_count ? Direction::Down : Direction::Up;
}

SliceOwner slice_owner(const ScheduleConfig& cfg, const StagePlacement& placement,
                       int slice_index, Direction dir) {
  for (int device = 0; device < placement.device_count(); ++device) {
    const auto& slices = placement.assignment[device];
    for (int rank = 0; rank < static_cast<int>(slices.size()); ++rank) {
      if (slices[rank].index != slice_index) continue;
      if (cfg.scheme == Scheme::Chimera && slices[rank].direction != dir) continue;
      return SliceOwner{device, rank};
    }
  }
  return SliceOwner{};
}

std::string describe_action(const Action& a) {
  std::string s = action_kind_name(a.kind);
  if (a.microbatch >= 0) s += " microbatch " + std::to_string(a.microbatch);
  if (a.slice_index >= 0) s += " slice " + std::to_string(a.slice_index);
  if (a.payload >= 0) s += std::string(" ") + payload_name(static_cast<Payload>(a.payload));
  if (a.peer >= 0) s += " peer " + std::to_string(a.peer);
  if (a.batch_group >= 0) s += " group " + std::to_string(a.batch_group);
  return s;
}

}  // namespace wavepipe
