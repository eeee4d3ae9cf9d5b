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

#ifndef WAVEPIPE_SCHEDULE_HPP_
#define WAVEPIPE_SCHEDULE_HPP_

#include "wavepipe/action.hpp"
#include "wavepipe/config.hpp"
#include "wavepipe/cost_model.hpp"
#include "wavepipe/placement.hpp"

namespace wavepipe {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Emits the complete per-device instruction streams for the configured
// scheme: compute actions ordered by a deterministic greedy executor, then
// communication actions via insert_comm, then one final OptimizerStep per
// device.
//
// The executor runs dependency-driven list scheduling against `cost`: a
// device never idles while an eligible action's inputs have arrived, and
// among eligible actions it prefers Backward over Forward, then the lower
// microbatch, then traversal order (ascending slice for Forward, descending
// for Backward).  Eligibility adds each scheme's defining structure on top
// of dataflow: GPipe devices finish all forwards before any backward; Dapple
// devices keep at most min(P-p, B) microbatches in flight (1F1B); Chimera
// applies the same cap per direction at the device's position in that
// direction's pipeline; wave schemes admit at most P microbatches into the
// pipeline at once.  Output depends only on (config, placement, cost).
ActionList generate_schedule(const StagePlacement& placement,
                             const ScheduleConfig& cfg, const CostModel& cost);

// Adds communication to a compute-only schedule (per_device holding only
// Forward/Backward actions): a Send immediately after the producer and a
// matching Receive immediately before the consumer at every slice boundary
// that crosses devices (activations along the forward chain, gradients along
// the backward chain); nothing for same-device boundaries.  When a device
// pair exchanges messages in both directions at adjacent stream positions
// (distance 1 on both sides), the four actions are fused into one
// BatchedExchange per device sharing a batch_group -- the minimal batching
// that keeps opposing sends from deadlocking a rendezvous transport.
// Appends the final OptimizerStep per device.
ActionList insert_comm(const ActionList& compute_only);

}  // namespace wavepipe

#endif  // WAVEPIPE_SCHEDULE_HPP_
