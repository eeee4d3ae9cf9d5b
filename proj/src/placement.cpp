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

#include "wavepipe/placement.hpp"

namespace wavepipe {

namespace {

StagePlacement classic_placement(const ScheduleConfig& cfg) {
  StagePlacement placement;
  placement.assignment.resize(cfg.devices);
  for (int p = 0; p < cfg.devices; ++p) {
    placement.assignment[p].push_back(StageSlice{p, Rational(1), Direction::Down});
  }
  return placement;
}

}  // namespace

StagePlacement placement_gpipe(const ScheduleConfig& cfg) {
  return classic_placement(cfg);
}

StagePlacement placement_dapple(const ScheduleConfig& cfg) {
  return classic_placement(cfg);
}

StagePlacement placement_chimera(const ScheduleConfig& cfg) {
  StagePlacement placement;
  placement.assignment.resize(cfg.devices);
  for (int p = 0; p < cfg.devices; ++p) {
    placement.assignment[p].push_back(StageSlice{p, Rational(1), Direction::Down});
    placement.assignment[p].push_back(
        StageSlice{cfg.devices - 1 - p, Rational(1), Direction::Up});
  }
  return placement;
}

StagePlacement placement_hanayo(const ScheduleConfig& cfg) {
  StagePlacement placement;
  placement.assignment.resize(cfg.devices);
  Rational fraction(1, 2 * cfg.waves);
  for (int p = 0; p < cfg.devices; ++p) {
    for (int w = 0; w < cfg.waves; ++w) {
      int base = 2 * w * cfg.devices;
      placement.assignment[p].push_back(
          StageSlice{base + p, fraction, Direction::Down});
      placement.assignment[p].push_back(
          StageSlice{base + 2 * cfg.devices - 1 - p, fraction, Direction::Up});
    }
    // Order by forward traversal: within a wave the down slice precedes the
    // up slice, and waves follow each other, which the loop already yields.
  }
  return placement;
}

StagePlacement make_placement(const ScheduleConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::GPipe:
      return placement_gpipe(cfg);
    case Scheme::Dapple:
      return placement_dapple(cfg);
    case Scheme::Chimera:
      return placement_chimera(cfg);
    case Scheme::ChimeraWave:
    case Scheme::Hanayo:
      return placement_hanayo(cfg);
  }
  throw ConfigError("unknown scheme");
}

std::pair<ScheduleConfig, StagePlacement> transform_chimera_to_wave(
    const ScheduleConfig& cfg) {
  if (cfg.scheme != Scheme::Chimera) {
    throw ConfigError("transform_chimera_to_wave requires a chimera config");
  }
  // Swapping the up-replica blocks on the lower half of the device array with
  // the symmetric down-replica blocks on the upper half leaves two identical
  // groups of P/2 devices.  Each group runs every stage of the model exactly
  // once (a single wave), processes half the microbatches, and pairs with the
  // other group as plain data parallelism.
  ScheduleConfig wave = make_config(Scheme::Hanayo, cfg.devices / 2,
                                    cfg.microbatches / 2, /*waves=*/1,
                                    /*replicas=*/2 * cfg.replicas);
  return {wave, placement_hanayo(wave)};
}

}  // namespace wavepipe
