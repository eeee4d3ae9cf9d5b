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

#include "wavepipe/simulate.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "json.hpp"

namespace wavepipe {

namespace {

struct MessageKey {
  int payload = -1;
  int microbatch = -1;
  int low_slice = -1;

  bool operator<(const MessageKey& o) const {
    return std::tie(payload, microbatch, low_slice) <
           std::tie(o.payload, o.microbatch, o.low_slice);
  }
};

MessageKey message_key(const Action& a) {
  bool activation = a.payload == static_cast<int>(Payload::Activation);
  bool sending =
      a.kind == ActionKind::Send || a.kind == ActionKind::BatchedExchange;
  int low = activation ? (sending ? a.slice_index : a.slice_index - 1)
                       : (sending ? a.slice_index - 1 : a.slice_index);
  return MessageKey{a.payload, a.microbatch, low};
}

struct DeviceState {
  int pc = 0;
  double clock = 0.0;               // engine free time
  double last_compute_start = 0.0;  // prefetch anchor (list start = 0)
  double pending_arrival = 0.0;     // latest arrival gating the next compute
};

}  // namespace

SimTrace simulate(const ActionList& list, const CostModel& cost) {
  const ScheduleConfig& cfg = list.config;
  const int devices = static_cast<int>(list.per_device.size());
  const double fwd = cost.slice_forward(cfg);
  const double bwd = cost.slice_backward(cfg);

  // Counterpart of each batched exchange, by batch_group.
  std::map<int, std::vector<std::pair<int, int>>> groups;
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      if (list.per_device[d][i].kind == ActionKind::BatchedExchange) {
        groups[list.per_device[d][i].batch_group].emplace_back(d, i);
      }
    }
  }
  for (const auto& [group, members] : groups) {
    if (members.size() != 2 || members[0].first == members[1].first) {
      throw SimulationError("batch_group " + std::to_string(group) +
                            " does not pair two devices");
    }
  }

  std::map<MessageKey, double> fire;              // send fire time
  std::map<std::pair<int, int>, double> reached;  // device/pos -> BE reach time

  SimTrace trace;
  trace.intervals.resize(devices);
  std::vector<DeviceState> st(devices);

  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (int d = 0; d < devices; ++d) {
      DeviceState& s = st[d];
      while (s.pc < static_cast<int>(list.per_device[d].size())) {
        const Action& a = list.per_device[d][s.pc];
        if (a.is_compute()) {
          double start = std::max(s.clock, s.pending_arrival);
          double dur = a.kind == ActionKind::Forward ? fwd : bwd;
          TraceInterval iv;
          iv.action_index = s.pc;
          iv.kind = a.kind;
          iv.microbatch = a.microbatch;
          iv.slice_index = a.slice_index;
          iv.direction = microbatch_direction(cfg, a.microbatch);
          iv.start = start;
          iv.end = start + dur;
          trace.intervals[d].push_back(iv);
          s.clock = iv.end;
          s.last_compute_start = start;
          s.pending_arrival = 0.0;
          ++s.pc;
          progressed = true;
          continue;
        }
        if (a.kind == ActionKind::OptimizerStep) {
          ++s.pc;
          progressed = true;
          continue;
        }
        if (a.kind == ActionKind::Send) {
          fire[message_key(a)] = s.clock;
          ++s.pc;
          progressed = true;
          continue;
        }
        if (a.kind == ActionKind::Receive) {
          auto it = fire.find(message_key(a));
          if (it == fire.end()) break;  // sender has not fired yet
          double post = s.last_compute_start;
          double arrival = std::max(post, it->second) + cost.t_comm;
          s.pending_arrival = std::max(s.pending_arrival, arrival);
          trace.comm_events.push_back(CommEvent{a.peer, d, post, arrival});
          ++s.pc;
          progressed = true;
          continue;
        }
        // Batched exchange: synchronize with the counterpart.
        reached[{d, s.pc}] = s.clock;
        const auto& members = groups.at(a.batch_group);
        std::pair<int, int> other =
            members[0] == std::make_pair(d, s.pc) ? members[1] : members[0];
        auto rit = reached.find(other);
        if (rit == reached.end()) break;  // counterpart not yet at the exchange
        double start = std::max(s.clock, rit->second);
        double end = start + cost.t_comm;
        TraceInterval iv;
        iv.action_index = s.pc;
        iv.kind = ActionKind::BatchedExchange;
        iv.microbatch = a.microbatch;
        iv.slice_index = a.slice_index;
        iv.direction = microbatch_direction(cfg, a.microbatch);
        iv.start = start;
        iv.end = end;
        trace.intervals[d].push_back(iv);
        trace.comm_events.push_back(CommEvent{d, a.peer, start, end});
        s.clock = end;
        ++s.pc;
        progressed = true;
      }
    }
  }

  for (int d = 0; d < devices; ++d) {
    if (st[d].pc < static_cast<int>(list.per_device[d].size())) {
      throw SimulationError(
          "simulation stalled: device " + std::to_string(d) + " blocked at " +
          describe_action(list.per_device[d][st[d].pc]));
    }
    trace.makespan = std::max(trace.makespan, st[d].clock);
  }

  // Deterministic event order regardless of relaxation order.
  std::sort(trace.comm_events.begin(), trace.comm_events.end(),
            [](const CommEvent& a, const CommEvent& b) {
              return std::tie(a.arrival_time, a.post_time, a.src_device,
                              a.dst_device) <
                     std::tie(b.arrival_time, b.post_time, b.src_device,
                              b.dst_device);
            });
  return trace;
}

std::string trace_to_json(const SimTrace& trace) {
  nlohmann::ordered_json doc;
  doc["makespan"] = trace.makespan;
  doc["intervals"] = nlohmann::ordered_json::array();
  for (const auto& device_intervals : trace.intervals) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const TraceInterval& iv : device_intervals) {
      nlohmann::ordered_json o;
      o["action_index"] = iv.action_index;
      o["kind"] = action_kind_name(iv.kind);
      o["microbatch"] = iv.microbatch;
      o["slice_index"] = iv.slice_index;
      o["direction"] = direction_name(iv.direction);
      o["start"] = iv.start;
      o["end"] = iv.end;
      row.push_back(o);
    }
    doc["intervals"].push_back(row);
  }
  doc["comm_events"] = nlohmann::ordered_json::array();
  for (const CommEvent& ev : trace.comm_events) {
    nlohmann::ordered_json o;
    o["src_device"] = ev.src_device;
    o["dst_device"] = ev.dst_device;
    o["post_time"] = ev.post_time;
    o["arrival_time"] = ev.arrival_time;
    doc["comm_events"].push_back(o);
  }
  return doc.dump(2) + "\n";
}

}  // namespace wavepipe
