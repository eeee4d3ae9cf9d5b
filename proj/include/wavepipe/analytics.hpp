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

#ifndef WAVEPIPE_ANALYTICS_HPP_
#define WAVEPIPE_ANALYTICS_HPP_

#include <string>
#include <vector>

#include "wavepipe/action.hpp"
#include "wavepipe/cost_model.hpp"
#include "wavepipe/rational.hpp"
#include "wavepipe/simulate.hpp"

namespace wavepipe {

// Per-device memory footprint in model units.  weight_units: the resident
// parameter share, where 1 unit = (whole model) / devices — the sum of the
// device's slice fractions.  peak_activation_units: maximum live activation
// over time, where a slice's activation counts fraction * 1 unit; an
// activation is allocated when its forward starts and freed when the
// matching backward ends (frees apply before allocations at equal times).
struct MemoryProfile {
  std::vector<Rational> weight_units;
  std::vector<Rational> peak_activation_units;
};

// Idle fraction of the device-time area: 1 - (sum of forward/backward busy
// time) / (devices * makespan).  Batched-exchange engine time counts as
// bubble, not busy.  Throws std::invalid_argument on a zero-makespan trace.
double bubble_ratio(const SimTrace& trace);

MemoryProfile memory_profile(const SimTrace& trace, const ActionList& list);

// Population variance across devices of peak activation units.
Rational activation_variance(const MemoryProfile& profile);

// Idle-zone sizes for one device of a wave schedule.
struct ZoneBubbleInput {
  int devices = 1;      // P
  int waves = 1;        // W
  int local_rank = 0;   // LR, in [0, devices)
  double t_forward = 1.0;
  double t_backward = 2.0;
  double t_comm = 0.0;
};

struct ZoneBubbles {
  double a = 0.0;        // startup gap: T_F/(2W) + T_C
  double b = 0.0;        // mid gap: ((P-LR)/(2W)) * (T_B-T_F) + 2*T_C
  double c_first = 0.0;  // turnaround gap, larger variant: T_B + 2*T_C
  double c_second = 0.0; // turnaround gap, smaller variant: T_B + T_C
};

// Throws ConfigError when local_rank is out of range.
ZoneBubbles zone_bubbles(const ZoneBubbleInput& input);

// Closed-form bubble ratio of a wave schedule:
//   [ T_B/W + (1 + 2W + 2/P + (P-2)/3) T_C ]
//   / [ (P/(P-1)) T_F + (1/(2W) + P/(P-1)) T_B + ((P-2)/2 + 4W) T_C ]
// Exact rational evaluation; throws ConfigError for P < 2 or W < 1, or when
// every cost is zero.
Rational analytic_bubble_hanayo(int devices, int waves, const Rational& t_forward,
                                const Rational& t_backward,
                                const Rational& t_comm);

// Floating-point convenience form of the same expression.
double analytic_bubble_hanayo_d(int devices, int waves, double t_forward,
                                double t_backward, double t_comm);

// Reduced form of the ratio at T_B = 2 T_F, T_C = 0:
// (2P-2)/(3PW+P-1).  Throws ConfigError for P < 2 or W < 1.
Rational analytic_bubble_simplified(int devices, int waves);

// K = P^2/2 - P (bidirectional-scheme bubble constant).
double analytic_chimera_k(int devices);

// Aggregate empirical metrics of a trace.
struct MetricsReport {
  double makespan = 0.0;
  double bubble_ratio = 0.0;
  std::vector<double> busy;  // per-device forward+backward time
  MemoryProfile memory;
  Rational activation_variance;
};

MetricsReport compute_metrics(const SimTrace& trace, const ActionList& list);

std::string metrics_to_text(const MetricsReport& report);
std::string metrics_to_json(const MetricsReport& report);

// One requested scheme variant in a comparison sweep.
struct CompareRequest {
  Scheme scheme = Scheme::GPipe;
  int waves = 1;
};

// One evaluated comparison row.  The chimera-wave scheme is evaluated as one
// of its two symmetric device groups (half the budget, half the
// microbatches, compute costs rescaled so the per-slice work matches the
// budget-wide partition).  Makespan and bubble ratio equal the budget-level
// ones by symmetry; the memory columns describe one group's share of a
// device (each physical device additionally hosts the mirrored group).
struct CompareRow {
  Scheme scheme = Scheme::GPipe;
  int devices = 0;       // shared device budget
  int microbatches = 0;  // total microbatches
  int waves = 1;
  double makespan = 0.0;
  double simulated_ratio = 0.0;
  bool has_analytic = false;
  double analytic_ratio = 0.0;
  Rational weight_units;     // per device (uniform across devices)
  Rational peak_activation;  // max across devices
  Rational variance;
  bool failed = false;
  std::string error;
};

// Evaluates every request at a shared device budget and total microbatch
// count, sorted by ascending makespan (throughput order); per-row failures
// are captured, not thrown, and sort after all successful rows.
std::vector<CompareRow> compare(const std::vector<CompareRequest>& requests,
                                int budget_devices, int microbatches,
                                const CostModel& base_cost);

std::string compare_to_csv(const std::vector<CompareRow>& rows);
std::string compare_to_json(const std::vector<CompareRow>& rows);

}  // namespace wavepipe

#endif  // WAVEPIPE_ANALYTICS_HPP_
