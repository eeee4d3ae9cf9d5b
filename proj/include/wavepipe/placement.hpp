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

#ifndef WAVEPIPE_PLACEMENT_HPP_
#define WAVEPIPE_PLACEMENT_HPP_

#include <utility>

#include "wavepipe/action.hpp"
#include "wavepipe/config.hpp"

namespace wavepipe {

// Classic one-stage-per-device placement: device p holds stage p, weight 1.
StagePlacement placement_gpipe(const ScheduleConfig& cfg);
StagePlacement placement_dapple(const ScheduleConfig& cfg);

// Bidirectional placement: device p holds down-stage p and up-stage P-1-p,
// each a full stage (per-device weight 2).
StagePlacement placement_chimera(const ScheduleConfig& cfg);

// Wave placement: device p holds, for each wave w, slice 2wP+p going down and
// slice 2wP+(2P-1-p) going up, each of weight 1/(2W).  A microbatch's forward
// pass sweeps the device array down and back up once per wave.
StagePlacement placement_hanayo(const ScheduleConfig& cfg);

// Placement for cfg.scheme (ChimeraWave shares the wave placement).
StagePlacement make_placement(const ScheduleConfig& cfg);

// Swaps the symmetric halves of a Chimera schedule into its equivalent
// replica-free form: two identical one-wave pipelines of P/2 devices, each
// processing half the microbatches, with the replica pair folded into data
// parallelism (D doubles).  Returns one group's config and placement; per-P
// normalized costs must be rescaled by 2 when comparing against the input
// (the model itself is not re-partitioned).
std::pair<ScheduleConfig, StagePlacement> transform_chimera_to_wave(
    const ScheduleConfig& cfg);

}  // namespace wavepipe

#endif  // WAVEPIPE_PLACEMENT_HPP_
