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

#include "wavepipe/analytics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "wavepipe/config.hpp"
#include "wavepipe/placement.hpp"
#include "wavepipe/schedule.hpp"

namespace wavepipe {

double bubble_ratio(const SimTrace& trace) {
  if (trace.makespan <= 0.0) {
    throw std::invalid_argument("bubble ratio undefined for a zero-makespan trace");
  }
  double busy = 0.0;
  for (const auto& device_intervals : trace.intervals) {
    for (const TraceInterval& iv : device_intervals) {
      if (iv.kind == ActionKind::Forward || iv.kind == ActionKind::Backward) {
        busy += iv.end - iv.start;
      }
    }
  }
  double area = static_cast<double>(trace.intervals.size()) * trace.makespan;
  return 1.0 - busy / area;
}

MemoryProfile memory_profile(const SimTrace& trace, const ActionList& list) {
  const int devices = static_cast<int>(list.per_device.size());
  MemoryProfile profile;
  profile.weight_units.assign(devices, Rational(0));
  profile.peak_activation_units.assign(devices, Rational(0));

  for (int d = 0; d < devices; ++d) {
    std::map<int, Rational> fraction;  // slice index -> parameter share
    for (const StageSlice& slice : list.placement.assignment[d]) {
      profile.weight_units[d] += slice.fraction;
      fraction[slice.index] = slice.fraction;
    }

    // Liveness sweep: +fraction at each forward's start, -fraction at the
    // matching backward's end; frees apply before allocations when times tie.
    std::vector<std::pair<double, Rational>> events;
    for (const TraceInterval& iv : trace.intervals[d]) {
      if (iv.kind == ActionKind::BatchedExchange) continue;
      auto it = fraction.find(iv.slice_index);
      if (it == fraction.end()) {
        throw std::invalid_argument(
            "trace interval references slice " + std::to_string(iv.slice_index) +
            " not placed on device " + std::to_string(d));
      }
      if (iv.kind == ActionKind::Forward) {
        events.emplace_back(iv.start, it->second);
      } else {
        events.emplace_back(iv.end, -it->second);
      }
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return a.second < b.second;
              });
    Rational live(0), peak(0);
    for (const auto& [time, delta] : events) {
      live += delta;
      if (peak < live) peak = live;
    }
    profile.peak_activation_units[d] = peak;
  }
  return profile;
}

Rational activation_variance(const MemoryProfile& profile) {
  const int n = static_cast<int>(profile.peak_activation_units.size());
  if (n == 0) return Rational(0);
  Rational mean(0);
  for (const Rational& x : profile.peak_activation_units) mean += x;
  mean /= Rational(n);
  Rational var(0);
  for (const Rational& x : profile.peak_activation_units) {
    Rational d = x - mean;
    var += d * d;
  }
  return var / Rational(n);
}

ZoneBubbles zone_bubbles(const ZoneBubbleInput& input) {
  if (input.devices < 1) throw ConfigError("zone bubbles: P must be >= 1");
  if (input.waves < 1) throw ConfigError("zone bubbles: W must be >= 1");
  if (input.local_rank < 0 || input.local_rank >= input.devices) {
    throw ConfigError("zone bubbles: LR must be in [0, P)");
  }
  double two_w = 2.0 * input.waves;
  ZoneBubbles z;
  z.a = input.t_forward / two_w + input.t_comm;
  z.b = (static_cast<double>(input.devices - input.local_rank) / two_w) *
            (input.t_backward - input.t_forward) +
        2.0 * input.t_comm;
  z.c_first = input.t_backward + 2.0 * input.t_comm;
  z.c_second = input.t_backward + input.t_comm;
  return z;
}

Rational analytic_bubble_hanayo(int devices, int waves, const Rational& t_forward,
                                const Rational& t_backward,
                                const Rational& t_comm) {
  if (devices < 2) throw ConfigError("analytic bubble ratio requires P >= 2");
  if (waves < 1) throw ConfigError("analytic bubble ratio requires W >= 1");
  const int64_t p = devices, w = waves;
  Rational num = t_backward / Rational(w) +
                 (Rational(1) + Rational(2 * w) + Rational(2, p) +
                  Rational(p - 2, 3)) *
                     t_comm;
  Rational den = Rational(p, p - 1) * t_forward +
                 (Rational(1, 2 * w) + Rational(p, p - 1)) * t_backward +
                 (Rational(p - 2, 2) + Rational(4 * w)) * t_comm;
  if (den == Rational(0)) {
    throw ConfigError("analytic bubble ratio undefined for an all-zero cost model");
  }
  return num / den;
}

double analytic_bubble_hanayo_d(int devices, int waves, double t_forward,
                                double t_backward, double t_comm) {
  if (devices < 2) throw ConfigError("analytic bubble ratio requires P >= 2");
  if (waves < 1) throw ConfigError("analytic bubble ratio requires W >= 1");
  const double p = devices, w = waves;
  double num =
      t_backward / w + (1.0 + 2.0 * w + 2.0 / p + (p - 2.0) / 3.0) * t_comm;
  double den = (p / (p - 1.0)) * t_forward +
               (1.0 / (2.0 * w) + p / (p - 1.0)) * t_backward +
               ((p - 2.0) / 2.0 + 4.0 * w) * t_comm;
  if (den == 0.0) {
    throw ConfigError("analytic bubble ratio undefined for an all-zero cost model");
  }
  return num / den;
}

Rational analytic_bubble_simplified(int devices, int waves) {
  if (devices < 2) throw ConfigError("simplified bubble ratio requires P >= 2");
  if (waves < 1) throw ConfigError("simplified bubble ratio requires W >= 1");
  const int64_t p = devices, w = waves;
  return Rational(2 * p - 2, 3 * p * w + p - 1);
}

double analytic_chimera_k(int devices) {
  const double p = devices;
  return p * p / 2.0 - p;
}

MetricsReport compute_metrics(const SimTrace& trace, const ActionList& list) {
  MetricsReport report;
  report.makespan = trace.makespan;
  report.bubble_ratio = bubble_ratio(trace);
  report.busy.assign(trace.intervals.size(), 0.0);
  for (int d = 0; d < static_cast<int>(trace.intervals.size()); ++d) {
    for (const TraceInterval& iv : trace.intervals[d]) {
      if (iv.kind == ActionKind::Forward || iv.kind == ActionKind::Backward) {
        report.busy[d] += iv.end - iv.start;
      }
    }
  }
  report.memory = memory_profile(trace, list);
  report.activation_variance = activation_variance(report.memory);
  return report;
}

std::string metrics_to_text(const MetricsReport& report) {
  std::ostringstream os;
  os << "makespan:            " << report.makespan << "\n";
  os << "bubble_ratio:        " << report.bubble_ratio << "\n";
  os << "activation_variance: " << report.activation_variance.to_string()
     << "\n";
  os << "device  busy  weight_units  peak_activation_units\n";
  for (int d = 0; d < static_cast<int>(report.busy.size()); ++d) {
    os << std::left << std::setw(8) << d << std::setw(6) << report.busy[d]
       << std::setw(14) << report.memory.weight_units[d].to_string()
       << report.memory.peak_activation_units[d].to_string() << "\n";
  }
  return os.str();
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["makespan"] = report.makespan;
  doc["bubble_ratio"] = report.bubble_ratio;
  doc["activation_variance"] = report.activation_variance.to_string();
  doc["devices"] = nlohmann::ordered_json::array();
  for (int d = 0; d < static_cast<int>(report.busy.size()); ++d) {
    nlohmann::ordered_json o;
    o["device"] = d;
    o["busy"] = report.busy[d];
    o["weight_units"] = report.memory.weight_units[d].to_string();
    o["peak_activation_units"] =
        report.memory.peak_activation_units[d].to_string();
    doc["devices"].push_back(o);
  }
  return doc.dump(2) + "\n";
}

std::vector<CompareRow> compare(const std::vector<CompareRequest>& requests,
                                int budget_devices, int microbatches,
                                const CostModel& base_cost) {
  std::vector<CompareRow> rows;
  for (const CompareRequest& req : requests) {
    CompareRow row;
    row.scheme = req.scheme;
    row.devices = budget_devices;
    row.microbatches = microbatches;
    row.waves = req.waves;
    try {
      ScheduleConfig cfg{};
      CostModel cost = base_cost;
      if (req.scheme == Scheme::ChimeraWave) {
        // Evaluate one of the two symmetric device groups.
        if (budget_devices % 2 != 0 || budget_devices < 2) {
          throw ConfigError("chimera-wave: device budget must be even");
        }
        if (microbatches % 2 != 0) {
          throw ConfigError("chimera-wave: B must be even");
        }
        cfg = make_config(Scheme::ChimeraWave, budget_devices / 2,
                          microbatches / 2, req.waves, 2);
        cost = base_cost.rescaled(budget_devices, cfg.devices);
      } else {
        cfg = make_config(req.scheme, budget_devices, microbatches, req.waves);
      }
      StagePlacement placement = make_placement(cfg);
      ActionList list = generate_schedule(placement, cfg, cost);
      SimTrace trace = simulate(list, cost);
      MetricsReport metrics = compute_metrics(trace, list);
      row.makespan = metrics.makespan;
      row.simulated_ratio = metrics.bubble_ratio;
      if (req.scheme == Scheme::Hanayo && cfg.devices >= 2) {
        row.has_analytic = true;
        row.analytic_ratio = analytic_bubble_hanayo_d(
            cfg.devices, cfg.waves, cost.t_forward, cost.t_backward, cost.t_comm);
      }
      for (const Rational& w : metrics.memory.weight_units) {
        if (row.weight_units < w) row.weight_units = w;
      }
      for (const Rational& a : metrics.memory.peak_activation_units) {
        if (row.peak_activation < a) row.peak_activation = a;
      }
      row.variance = metrics.activation_variance;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (a.failed != b.failed) return b.failed;
    if (!a.failed && a.makespan != b.makespan) return a.makespan < b.makespan;
    if (a.scheme != b.scheme) {
      return static_cast<int>(a.scheme) < static_cast<int>(b.scheme);
    }
    return a.waves < b.waves;
  });
  return rows;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "scheme,devices,microbatches,waves,makespan,simulated_bubble_ratio,"
        "analytic_bubble_ratio,weight_units,peak_activation_units,"
        "activation_variance,error\n";
  for (const CompareRow& row : rows) {
    os << scheme_name(row.scheme) << "," << row.devices << ","
       << row.microbatches << "," << row.waves << ",";
    if (row.failed) {
      std::string msg = row.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      os << ",,,,,," << msg << "\n";
      continue;
    }
    os << row.makespan << "," << row.simulated_ratio << ",";
    if (row.has_analytic) os << row.analytic_ratio;
    os << "," << row.weight_units.to_string() << ","
       << row.peak_activation.to_string() << "," << row.variance.to_string()
       << ",\n";
  }
  return os.str();
}

std::string compare_to_json(const std::vector<CompareRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CompareRow& row : rows) {
    nlohmann::ordered_json o;
    o["scheme"] = scheme_name(row.scheme);
    o["devices"] = row.devices;
    o["microbatches"] = row.microbatches;
    o["waves"] = row.waves;
    if (row.failed) {
      o["error"] = row.error;
    } else {
      o["makespan"] = row.makespan;
      o["simulated_bubble_ratio"] = row.simulated_ratio;
      if (row.has_analytic) {
        o["analytic_bubble_ratio"] = row.analytic_ratio;
      } else {
        o["analytic_bubble_ratio"] = nullptr;
      }
      o["weight_units"] = row.weight_units.to_string();
      o["peak_activation_units"] = row.peak_activation.to_string();
      o["activation_variance"] = row.variance.to_string();
    }
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

}  // namespace wavepipe
