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

#include "wavepipe/schedule.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

namespace wavepipe {

namespace {

// One compute node of the dependency graph: (phase, microbatch, slice).
struct Node {
  bool backward = false;
  int microbatch = 0;
  int slice = 0;
};

// Per-microbatch forward path through the placement.
struct Chain {
  std::vector<SliceOwner> owner;  // indexed by slice
};

std::vector<Chain> build_chains(const ScheduleConfig& cfg,
                                const StagePlacement& placement) {
  std::vector<Chain> chains(cfg.microbatches);
  for (int b = 0; b < cfg.microbatches; ++b) {
    Direction dir = microbatch_direction(cfg, b);
    chains[b].owner.resize(cfg.stages);
    for (int s = 0; s < cfg.stages; ++s) {
      SliceOwner o = slice_owner(cfg, placement, s, dir);
      if (o.device < 0) {
        throw ScheduleError("placement does not cover slice " + std::to_string(s));
      }
      chains[b].owner[s] = o;
    }
  }
  return chains;
}

// Greedy timed executor state.
class GreedyScheduler {
 public:
  GreedyScheduler(const ScheduleConfig& cfg, const StagePlacement& placement,
                  const CostModel& cost)
      : cfg_(cfg),
        chains_(build_chains(cfg, placement)),
        fwd_dur_(cost.slice_forward(cfg)),
        bwd_dur_(cost.slice_backward(cfg)),
        comm_(cost.t_comm) {
    int B = cfg.microbatches, S = cfg.stages;
    fwd_end_.assign(B, std::vector<double>(S, kUnscheduled));
    bwd_end_.assign(B, std::vector<double>(S, kUnscheduled));
    engine_free_.assign(cfg.devices, 0.0);
    streams_.resize(cfg.devices);
    fwd_started_.assign(cfg.devices, std::vector<int>(2, 0));
    bwd_done_.assign(cfg.devices, std::vector<int>(2, 0));
    fwd_done_count_.assign(cfg.devices, 0);
    fwd_total_.assign(cfg.devices, 0);
    entered_.assign(2, 0);
    exited_.assign(2, 0);
    for (int b = 0; b < B; ++b) {
      for (int s = 0; s < S; ++s) ++fwd_total_[chains_[b].owner[s].device];
    }
  }

  std::vector<std::vector<Node>> run() {
    int total = 2 * cfg_.microbatches * cfg_.stages;
    for (int step = 0; step < total; ++step) {
      if (!schedule_one()) {
        throw ScheduleError("schedule generation stalled with work remaining");
      }
    }
    return streams_;
  }

 private:
  static constexpr double kUnscheduled = -1.0;

  int dir_id(int microbatch) const {
    return microbatch_direction(cfg_, microbatch) == Direction::Down ? 0 : 1;
  }

  // Position of `device` in the pipeline seen by microbatches of direction
  // `dir`: for Chimera's up replica the array is reversed; elsewhere it is
  // the device rank itself.
  int pipeline_pos(int device, int dir) const {
    if (cfg_.scheme == Scheme::Chimera && dir == 1) {
      return cfg_.devices - 1 - device;
    }
    return device;
  }

  int direction_batch_count(int dir) const {
    if (cfg_.scheme != Scheme::Chimera) return cfg_.microbatches;
    int down = (cfg_.microbatches + 1) / 2;
    return dir == 0 ? down : cfg_.microbatches - down;
  }

  bool admissible_forward(int device, int b, int s) const {
    int dir = dir_id(b);
    switch (cfg_.scheme) {
      case Scheme::GPipe:
        return true;
      case Scheme::Dapple:
      case Scheme::Chimera: {
        // 1F1B: keep at most min(P - pos, B_dir) microbatches in flight on
        // this device (per direction for Chimera).
        int cap = std::min(cfg_.devices - pipeline_pos(device, dir),
                           direction_batch_count(dir));
        return fwd_started_[device][dir] - bwd_done_[device][dir] < cap ||
               started_here(device, b, s, dir);
      }
      case Scheme::Hanayo:
      case Scheme::ChimeraWave:
        // Admission happens at the pipeline entry; at most P microbatches
        // between entry and retirement.
        if (s != 0) return true;
        return entered_[dir] - exited_[dir] < cfg_.devices;
    }
    return true;
  }

  // Whether microbatch b already started on this device in this direction
  // (a later slice of an admitted batch is never blocked by the cap).
  bool started_here(int device, int b, int s, int dir) const {
    (void)device;
    (void)dir;
    for (int prev = 0; prev < s; ++prev) {
      if (chains_[b].owner[prev].device == chains_[b].owner[s].device &&
          fwd_end_[b][prev] != kUnscheduled) {
        return true;
      }
    }
    return false;
  }

  bool admissible_backward(int device, int b) const {
    if (cfg_.scheme == Scheme::GPipe) {
      // All-forwards-then-all-backwards on each device.
      return fwd_done_count_[device] == fwd_total_[device];
    }
    (void)b;
    return true;
  }

  // Arrival time of the input for a compute node, kUnscheduled if the
  // producer has not been scheduled yet.
  double input_arrival(const Node& n) const {
    const Chain& chain = chains_[n.microbatch];
    if (!n.backward) {
      if (n.slice == 0) return 0.0;
      double produced = fwd_end_[n.microbatch][n.slice - 1];
      if (produced == kUnscheduled) return kUnscheduled;
      bool cross = chain.owner[n.slice - 1].device != chain.owner[n.slice].device;
      return produced + (cross ? comm_ : 0.0);
    }
    if (n.slice == cfg_.stages - 1) {
      // Loss turnaround: the last forward and first backward share a device.
      return fwd_end_[n.microbatch][n.slice];
    }
    double produced = bwd_end_[n.microbatch][n.slice + 1];
    if (produced == kUnscheduled) return kUnscheduled;
    bool cross = chain.owner[n.slice + 1].device != chain.owner[n.slice].device;
    return produced + (cross ? comm_ : 0.0);
  }

  // Policy order among actions runnable at the same instant: Backward before
  // Forward, then the microbatch with the least work left on its traversal
  // (keeps opposite-direction pipelines interleaved instead of serialized),
  // then lower microbatch, then traversal order.
  bool policy_less(const Node& a, const Node& b) const {
    if (a.backward != b.backward) return a.backward;
    int ra = a.backward ? a.slice : cfg_.stages - 1 - a.slice;
    int rb = b.backward ? b.slice : cfg_.stages - 1 - b.slice;
    if (ra != rb) return ra < rb;
    if (a.microbatch != b.microbatch) return a.microbatch < b.microbatch;
    if (a.slice != b.slice) return a.backward ? a.slice > b.slice : a.slice < b.slice;
    return false;
  }

  bool schedule_one() {
    bool found = false;
    double best_start = 0.0;
    int best_device = -1;
    Node best_node;

    for (int device = 0; device < cfg_.devices; ++device) {
      // Gather this device's ready candidates (producer scheduled, admission
      // rules pass), tracking the earliest feasible start.
      std::vector<std::pair<double, Node>> ready;
      for (int b = 0; b < cfg_.microbatches; ++b) {
        for (int s = 0; s < cfg_.stages; ++s) {
          const SliceOwner& o = chains_[b].owner[s];
          if (o.device != device) continue;
          if (fwd_end_[b][s] == kUnscheduled) {
            Node n{false, b, s};
            double arr = input_arrival(n);
            if (arr != kUnscheduled && admissible_forward(device, b, s)) {
              ready.emplace_back(arr, n);
            }
          } else if (bwd_end_[b][s] == kUnscheduled) {
            Node n{true, b, s};
            if (s + 1 < cfg_.stages &&
                bwd_end_[b][s + 1] == kUnscheduled) {
              continue;
            }
            double arr = input_arrival(n);
            if (arr != kUnscheduled && admissible_backward(device, b)) {
              ready.emplace_back(arr, n);
            }
          }
        }
      }
      if (ready.empty()) continue;

      double start = std::numeric_limits<double>::infinity();
      for (const auto& [arr, n] : ready) {
        start = std::min(start, std::max(engine_free_[device], arr));
      }
      // Among candidates runnable at `start`, apply the policy.
      const Node* pick = nullptr;
      for (const auto& [arr, n] : ready) {
        if (arr > start) continue;
        if (!pick || policy_less(n, *pick)) pick = &n;
      }
      assert(pick != nullptr);
      if (!found || start < best_start ||
          (start == best_start && device < best_device)) {
        found = true;
        best_start = start;
        best_device = device;
        best_node = *pick;
      }
    }

    if (!found) return false;

    const Node& n = best_node;
    double dur = n.backward ? bwd_dur_ : fwd_dur_;
    double end = best_start + dur;
    engine_free_[best_device] = end;
    streams_[best_device].push_back(n);
    int dir = dir_id(n.microbatch);
    if (!n.backward) {
      fwd_end_[n.microbatch][n.slice] = end;
      ++fwd_done_count_[best_device];
      if (!started_before(n.microbatch, n.slice, best_device)) {
        ++fwd_started_[best_device][dir];
      }
      if (n.slice == 0) ++entered_[dir];
    } else {
      bwd_end_[n.microbatch][n.slice] = end;
      if (last_visit_on_device(n.microbatch, n.slice, best_device)) {
        ++bwd_done_[best_device][dir];
      }
      if (n.slice == 0) ++exited_[dir];
    }
    return true;
  }

  // True if microbatch b had already run an earlier slice on this device
  // before forward slice s (so it was already counted as in flight there).
  bool started_before(int b, int s, int device) const {
    for (int prev = 0; prev < s; ++prev) {
      if (chains_[b].owner[prev].device == device) return true;
    }
    return false;
  }

  // True if backward slice s is microbatch b's last work on this device
  // (its in-flight slot there is released).
  bool last_visit_on_device(int b, int s, int device) const {
    for (int later = s - 1; later >= 0; --later) {
      if (chains_[b].owner[later].device == device) return false;
    }
    return true;
  }

  const ScheduleConfig& cfg_;
  std::vector<Chain> chains_;
  double fwd_dur_, bwd_dur_, comm_;

  std::vector<std::vector<double>> fwd_end_;  // [b][s]
  std::vector<std::vector<double>> bwd_end_;  // [b][s]
  std::vector<double> engine_free_;
  std::vector<std::vector<Node>> streams_;
  std::vector<std::vector<int>> fwd_started_;  // [device][dir]
  std::vector<std::vector<int>> bwd_done_;     // [device][dir]
  std::vector<int> fwd_done_count_;
  std::vector<int> fwd_total_;
  std::vector<int> entered_;  // [dir]
  std::vector<int> exited_;   // [dir]
};

// A pending point-to-point message keyed by its boundary.
struct MessageKey {
  int payload;  // Payload enum value
  int microbatch;
  int low_slice;  // min(producer slice, consumer slice)

  bool operator<(const MessageKey& o) const {
    return std::tie(payload, microbatch, low_slice) <
           std::tie(o.payload, o.microbatch, o.low_slice);
  }
};

struct CommRef {
  int device = -1;
  int position = -1;  // index in the assembled stream
};

}  // namespace

ActionList insert_comm(const ActionList& compute_only) {
  const ScheduleConfig& cfg = compute_only.config;
  const StagePlacement& placement = compute_only.placement;
  std::vector<Chain> chains = build_chains(cfg, placement);

  // Assemble per-device streams: Receive immediately before its consumer,
  // Send immediately after its producer.
  std::vector<std::vector<Action>> streams(cfg.devices);
  for (int device = 0; device < cfg.devices; ++device) {
    for (const Action& c : compute_only.per_device[device]) {
      if (!c.is_compute()) {
        throw ScheduleError("insert_comm expects compute-only input streams");
      }
      const Chain& chain = chains[c.microbatch];
      bool backward = c.kind == ActionKind::Backward;
      int s = c.slice_index;

      // Incoming boundary.
      int src_slice = backward ? s + 1 : s - 1;
      if (src_slice >= 0 && src_slice < cfg.stages &&
          chain.owner[src_slice].device != device) {
        Action r;
        r.kind = ActionKind::Receive;
        r.microbatch = c.microbatch;
        r.slice_index = s;
        r.local_module_rank = chain.owner[s].local_rank;
        r.peer = chain.owner[src_slice].device;
        r.payload =
            static_cast<int>(backward ? Payload::Gradient : Payload::Activation);
        streams[device].push_back(r);
      }

      streams[device].push_back(c);

      // Outgoing boundary.
      int dst_slice = backward ? s - 1 : s + 1;
      if (dst_slice >= 0 && dst_slice < cfg.stages &&
          chain.owner[dst_slice].device != device) {
        Action snd;
        snd.kind = ActionKind::Send;
        snd.microbatch = c.microbatch;
        snd.slice_index = s;
        snd.local_module_rank = chain.owner[s].local_rank;
        snd.peer = chain.owner[dst_slice].device;
        snd.payload =
            static_cast<int>(backward ? Payload::Gradient : Payload::Activation);
        streams[device].push_back(snd);
      }
    }
  }

  // Index every message's send and receive position.
  std::map<MessageKey, CommRef> send_at, recv_at;
  for (int device = 0; device < cfg.devices; ++device) {
    for (int i = 0; i < static_cast<int>(streams[device].size()); ++i) {
      const Action& a = streams[device][i];
      if (a.kind != ActionKind::Send && a.kind != ActionKind::Receive) continue;
      bool fwd_payload = a.payload == static_cast<int>(Payload::Activation);
      bool sending = a.kind == ActionKind::Send;
      // Producer slice for activation: the lower one; for gradient: the
      // higher one.  Normalize to the lower slice of the boundary.
      int low;
      if (fwd_payload) {
        low = sending ? a.slice_index : a.slice_index - 1;
      } else {
        low = sending ? a.slice_index - 1 : a.slice_index;
      }
      MessageKey key{a.payload, a.microbatch, low};
      (sending ? send_at : recv_at)[key] = CommRef{device, i};
    }
  }

  // Fuse opposing message pairs that sit at adjacent positions on both
  // devices.  Greedy left-to-right scan; each comm action fuses at most once.
  std::vector<std::vector<int>> fuse_group(cfg.devices);
  for (int device = 0; device < cfg.devices; ++device) {
    fuse_group[device].assign(streams[device].size(), -1);
  }
  int next_group = 0;
  auto key_of = [](const Action& a) {
    bool fwd_payload = a.payload == static_cast<int>(Payload::Activation);
    bool sending = a.kind == ActionKind::Send;
    int low = fwd_payload ? (sending ? a.slice_index : a.slice_index - 1)
                          : (sending ? a.slice_index - 1 : a.slice_index);
    return MessageKey{a.payload, a.microbatch, low};
  };
  for (int device = 0; device < cfg.devices; ++device) {
    for (int i = 0; i + 1 < static_cast<int>(streams[device].size()); ++i) {
      const Action& a = streams[device][i];
      const Action& b = streams[device][i + 1];
      if (fuse_group[device][i] >= 0 || fuse_group[device][i + 1] >= 0) continue;
      bool opposing = (a.kind == ActionKind::Send && b.kind == ActionKind::Receive) ||
                      (a.kind == ActionKind::Receive && b.kind == ActionKind::Send);
      if (!opposing || a.peer != b.peer || a.peer < 0) continue;
      const Action& snd = a.kind == ActionKind::Send ? a : b;
      const Action& rcv = a.kind == ActionKind::Send ? b : a;
      CommRef peer_recv = recv_at.at(key_of(snd));
      CommRef peer_send = send_at.at(key_of(rcv));
      if (peer_recv.device != a.peer || peer_send.device != a.peer) continue;
      if (std::abs(peer_recv.position - peer_send.position) != 1) continue;
      if (fuse_group[a.peer][peer_recv.position] >= 0 ||
          fuse_group[a.peer][peer_send.position] >= 0) {
        continue;
      }
      int group = next_group++;
      fuse_group[device][i] = group;
      fuse_group[device][i + 1] = group;
      fuse_group[a.peer][peer_recv.position] = group;
      fuse_group[a.peer][peer_send.position] = group;
    }
  }

  // Rebuild streams: each fused send/receive pair collapses into one
  // BatchedExchange carrying the outgoing message, at the pair's first
  // position; append the flush step.
  ActionList out;
  out.config = cfg;
  out.placement = placement;
  out.per_device.resize(cfg.devices);
  for (int device = 0; device < cfg.devices; ++device) {
    for (int i = 0; i < static_cast<int>(streams[device].size()); ++i) {
      const Action& a = streams[device][i];
      int group = fuse_group[device][i];
      if (group < 0) {
        out.per_device[device].push_back(a);
        continue;
      }
      const Action& next = streams[device][i + 1];
      const Action& snd = a.kind == ActionKind::Send ? a : next;
      Action be = snd;
      be.kind = ActionKind::BatchedExchange;
      be.batch_group = group;
      out.per_device[device].push_back(be);
      ++i;  // the pair collapses into one action
    }
    Action opt;
    opt.kind = ActionKind::OptimizerStep;
    out.per_device[device].push_back(opt);
  }
  return out;
}

ActionList generate_schedule(const StagePlacement& placement,
                             const ScheduleConfig& cfg, const CostModel& cost) {
  if (placement.device_count() != cfg.devices) {
    throw ScheduleError("placement device count does not match config");
  }
  GreedyScheduler scheduler(cfg, placement, cost);
  std::vector<std::vector<Node>> streams = scheduler.run();

  ActionList compute_only;
  compute_only.config = cfg;
  compute_only.placement = placement;
  compute_only.per_device.resize(cfg.devices);
  std::vector<Chain> chains = build_chains(cfg, placement);
  for (int device = 0; device < cfg.devices; ++device) {
    for (const Node& n : streams[device]) {
      Action a;
      a.kind = n.backward ? ActionKind::Backward : ActionKind::Forward;
      a.microbatch = n.microbatch;
      a.slice_index = n.slice;
      a.local_module_rank = chains[n.microbatch].owner[n.slice].local_rank;
      compute_only.per_device[device].push_back(a);
    }
  }
  return insert_comm(compute_only);
}

}  // namespace wavepipe
