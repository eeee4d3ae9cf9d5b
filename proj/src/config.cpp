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

#include "wavepipe/config.hpp"

namespace wavepipe {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::GPipe:
      return "gpipe";
    case Scheme::Dapple:
      return "dapple";
    case Scheme::Chimera:
      return "chimera";
    case Scheme::ChimeraWave:
      return "chimera-wave";
    case Scheme::Hanayo:
      return "hanayo";
  }
  return "?";
}

bool scheme_from_name(const std::string& name, Scheme* out) {
  for (Scheme s : {Scheme::GPipe, Scheme::Dapple, Scheme::Chimera,
                   Scheme::ChimeraWave, Scheme::Hanayo}) {
    if (name == scheme_name(s)) {
      *out = s;
      return true;
    }
  }
  return false;
}

ScheduleConfig make_config(Scheme scheme, int devices, int microbatches,
                           int waves, int replicas) {
  if (devices < 1) throw ConfigError("P must be positive");
  if (microbatches < 1) throw ConfigError("B must be positive");
  if (waves < 1) throw ConfigError("W must be positive");
  if (replicas < 1) throw ConfigError("D must be positive");
  if (microbatches < devices) {
    throw ConfigError("B must be >= P: " + std::to_string(microbatches) +
                      " microbatches underfill a " + std::to_string(devices) +
                      "-device pipeline");
  }
  if (scheme == Scheme::Chimera || scheme == Scheme::ChimeraWave) {
    if (devices % 2 != 0) {
      throw ConfigError(std::string(scheme_name(scheme)) +
                        ": P must be even, got " + std::to_string(devices));
    }
    if (microbatches % 2 != 0) {
      throw ConfigError(std::string(scheme_name(scheme)) +
                        ": B must be even, got " + std::to_string(microbatches));
    }
  }
  if (!is_wave_scheme(scheme) && waves > 1) {
    throw ConfigError(std::string(scheme_name(scheme)) +
                      " does not take waves; W must be 1");
  }

  ScheduleConfig cfg;
  cfg.scheme = scheme;
  cfg.devices = devices;
  cfg.microbatches = microbatches;
  cfg.waves = waves;
  cfg.replicas = replicas;
  cfg.stages = is_wave_scheme(scheme) ? 2 * waves * devices : devices;
  return cfg;
}

}  // namespace wavepipe
