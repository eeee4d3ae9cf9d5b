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

#ifndef WAVEPIPE_SERIALIZE_HPP_
#define WAVEPIPE_SERIALIZE_HPP_

#include <stdexcept>
#include <string>

#include "wavepipe/action.hpp"

namespace wavepipe {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Renders the schedule as a JSON document:
//
//   {
//     "config":    {"scheme": "hanayo", "P": 4, "B": 4, "W": 2, "D": 1, "S": 16},
//     "placement": [[{"index": 0, "fraction": [1, 4], "direction": "down"}, ...], ...],
//     "actions":   [[{"kind": "forward", "microbatch": 0, ...}, ...], ...]
//   }
//
// Absent action fields are omitted.  Output is deterministic: equal inputs
// produce byte-identical documents.
std::string serialize_action_list(const ActionList& list);

// Inverse of serialize_action_list.  Strict: unknown fields, unknown enum
// names, wrong types, out-of-range ranks and indices, malformed placements
// and config violations are rejected with a ParseError whose message names
// the offending location, e.g. "actions[2][5]: peer rank out of range".
ActionList parse_action_list(const std::string& text);

}  // namespace wavepipe

#endif  // WAVEPIPE_SERIALIZE_HPP_
