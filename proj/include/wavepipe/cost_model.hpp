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

#ifndef WAVEPIPE_COST_MODEL_HPP_
#define WAVEPIPE_COST_MODEL_HPP_

#include "wavepipe/config.hpp"

namespace wavepipe {

// Time costs in abstract units.  t_forward/t_backward are the costs of one
// classic stage (the full pass divided by the config's device count); wave
// slices take a 1/(2W) share of that.  t_comm is the cost of one point-to-
// point transfer or one batched exchange.
struct CostModel {
  double t_forward = 1.0;
  double t_backward = 2.0;
  double t_comm = 0.0;

  double slice_forward(const ScheduleConfig& cfg) const {
    return is_wave_scheme(cfg.scheme) ? t_forward / (2.0 * cfg.waves) : t_forward;
  }
  double slice_backward(const ScheduleConfig& cfg) const {
    return is_wave_scheme(cfg.scheme) ? t_backward / (2.0 * cfg.waves) : t_backward;
  }

  // The same model expressed against a different device count: scheduling a
  // fixed model over fewer devices makes each per-device stage
  // proportionally larger.  Communication cost is unaffected.
  CostModel rescaled(int budget_devices, int config_devices) const {
    CostModel out = *this;
    double k = static_cast<double>(budget_devices) / config_devices;
    out.t_forward *= k;
    out.t_backward *= k;
    return out;
  }
};

}  // namespace wavepipe

#endif  // WAVEPIPE_COST_MODEL_HPP_
