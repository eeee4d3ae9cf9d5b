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

#ifndef WAVEPIPE_GANTT_HPP_
#define WAVEPIPE_GANTT_HPP_

#include <string>

#include "wavepipe/simulate.hpp"

namespace wavepipe {

// Renders a trace as a Gantt chart.  Formats:
//   "svg" — one row per device, one rectangle per engine interval, colored
//           by action kind and traversal direction, labeled with the
//           microbatch number;
//   "csv" — header "device,kind,microbatch,slice,start,end" plus one row per
//           interval.
// Throws std::invalid_argument for any other format name.
std::string trace_to_gantt(const SimTrace& trace, const std::string& format);

}  // namespace wavepipe

#endif  // WAVEPIPE_GANTT_HPP_
