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

#ifndef WAVEPIPE_CONFIG_HPP_
#define WAVEPIPE_CONFIG_HPP_

#include <stdexcept>
#include <string>

namespace wavepipe {

// Synchronous pipeline-parallel schedule families supported by the toolkit.
//
//   GPipe       - one stage per device, all forwards before any backward.
//   Dapple      - one stage per device, 1F1B steady state (bounded in-flight).
//   Chimera     - two full model replicas running in opposite directions.
//   ChimeraWave - one group of the block-swapped Chimera schedule: a single
//                 one-wave pipeline on P devices plus data parallelism (D
//                 counts all groups).  Structurally a wave schedule.
//   Hanayo      - wave schedule: each device holds 2W slices, a microbatch
//                 sweeps down and up the device array W times.
enum class Scheme { GPipe, Dapple, Chimera, ChimeraWave, Hanayo };

// Canonical lowercase names, also used in JSON documents and CLI flags.
const char* scheme_name(Scheme s);
bool scheme_from_name(const std::string& name, Scheme* out);

// True for schedules built from fractional wave slices (S = 2*W*P).
inline bool is_wave_scheme(Scheme s) {
  return s == Scheme::Hanayo || s == Scheme::ChimeraWave;
}

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Immutable description of one schedule instance.  Build via make_config,
// which validates and derives the stage count.
struct ScheduleConfig {
  Scheme scheme = Scheme::GPipe;
  int devices = 1;      // P
  int microbatches = 1; // B
  int waves = 1;        // W, meaningful for wave schemes only
  int replicas = 1;     // D, data-parallel bookkeeping (never expanded here)
  int stages = 1;       // S, derived: 2*W*P for wave schemes, P otherwise
};

// Validates and derives S.  Throws ConfigError on violations:
//   - P, B, W, D must be positive
//   - B < P underfills the pipeline
//   - Chimera/ChimeraWave: P must be even, B must be even
//   - W > 1 only for wave schemes
ScheduleConfig make_config(Scheme scheme, int devices, int microbatches,
                           int waves = 1, int replicas = 1);

}  // namespace wavepipe

#endif  // WAVEPIPE_CONFIG_HPP_
