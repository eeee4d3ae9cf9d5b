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

#ifndef WAVEPIPE_VALIDATE_HPP_
#define WAVEPIPE_VALIDATE_HPP_

#include <string>
#include <vector>

#include "wavepipe/action.hpp"

namespace wavepipe {

// One validation finding.  `device` and `position` are -1 when the finding
// is not tied to a specific stream location.
struct Diagnostic {
  std::string check;     // "completeness", "dependencies", "deadlock_free", "flush"
  std::string severity;  // "error"
  int device = -1;
  int position = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
  void merge(const ValidationReport& other) {
    diagnostics.insert(diagnostics.end(), other.diagnostics.begin(),
                       other.diagnostics.end());
  }
};

// Verifies each (microbatch, slice) has exactly one Forward and one Backward,
// each on the device that owns the slice.  Reports every missing, duplicated,
// or misplaced compute action.
ValidationReport check_completeness(const ActionList& list);

// Builds the global happens-before graph (per-device program order, Send ->
// Receive message edges with batched-exchange pairs contracted to single
// nodes, and compute dataflow edges) and verifies it is acyclic and that
// every dataflow edge is realized either by program order on one device or
// by a matched Send/Receive pair straddling the boundary.
ValidationReport check_dependencies(const ActionList& list);

// Replays the streams under buffered-send semantics: a Send completes as
// soon as it is issued, a Receive blocks until the peer has issued the
// matching Send, and a BatchedExchange synchronizes with its counterpart.
// Reports the blocked device set if the replay cannot run to completion.
// Also certifies that every mutual exchange between a device pair at
// adjacent stream positions on both sides is fused into a BatchedExchange.
ValidationReport check_deadlock_free(const ActionList& list);

// Verifies every device ends with exactly one OptimizerStep, placed after
// all of the device's other actions.
ValidationReport check_flush(const ActionList& list);

// Runs all four checks and concatenates their findings.
ValidationReport validate_all(const ActionList& list);

// One line per diagnostic: "error [check] device D pos P: message".
std::string render_diagnostics_text(const ValidationReport& report);

// JSON array of {check, severity, device, position, message}.
std::string render_diagnostics_json(const ValidationReport& report);

}  // namespace wavepipe

#endif  // WAVEPIPE_VALIDATE_HPP_
