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

#include "wavepipe/validate.hpp"

#include <cstdlib>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "json.hpp"

namespace wavepipe {

namespace {

struct Loc {
  int device = -1;
  int position = -1;
};

// Identity of a point-to-point message: payload kind, microbatch, and the
// lower slice of the boundary it crosses.
struct MessageKey {
  int payload = -1;
  int microbatch = -1;
  int low_slice = -1;

  bool operator<(const MessageKey& o) const {
    return std::tie(payload, microbatch, low_slice) <
           std::tie(o.payload, o.microbatch, o.low_slice);
  }
};

// Key of the message carried by a Send, Receive, or BatchedExchange
// (a batched exchange is keyed by its outgoing message).
MessageKey message_key(const Action& a) {
  bool activation = a.payload == static_cast<int>(Payload::Activation);
  bool sending =
      a.kind == ActionKind::Send || a.kind == ActionKind::BatchedExchange;
  int low = activation ? (sending ? a.slice_index : a.slice_index - 1)
                       : (sending ? a.slice_index - 1 : a.slice_index);
  return MessageKey{a.payload, a.microbatch, low};
}

std::string message_desc(const MessageKey& k) {
  std::ostringstream os;
  os << (k.payload == static_cast<int>(Payload::Activation) ? "activation"
                                                            : "gradient")
     << " of microbatch " << k.microbatch << " across boundary "
     << k.low_slice << "/" << k.low_slice + 1;
  return os.str();
}

void add(ValidationReport* report, const std::string& check, int device,
         int position, const std::string& message) {
  report->diagnostics.push_back(
      Diagnostic{check, "error", device, position, message});
}

// Owner device/local-rank for each (microbatch, slice); device -1 when the
// placement does not cover the slice for that direction.
class OwnerMap {
 public:
  explicit OwnerMap(const ActionList& list) : list_(list) {
    table_[0].resize(list.config.stages);
    table_[1].resize(list.config.stages);
    for (int dir = 0; dir < 2; ++dir) {
      for (int s = 0; s < list.config.stages; ++s) {
        table_[dir][s] = slice_owner(list.config, list.placement, s,
                                     dir == 0 ? Direction::Down : Direction::Up);
      }
    }
  }

  SliceOwner owner(int microbatch, int slice) const {
    Direction d = microbatch_direction(list_.config, microbatch);
    return table_[d == Direction::Down ? 0 : 1][slice];
  }

 private:
  const ActionList& list_;
  std::vector<SliceOwner> table_[2];
};

bool compute_in_range(const ScheduleConfig& cfg, const Action& a) {
  return a.microbatch >= 0 && a.microbatch < cfg.microbatches &&
         a.slice_index >= 0 && a.slice_index < cfg.stages;
}

}  // namespace

ValidationReport check_completeness(const ActionList& list) {
  ValidationReport report;
  const ScheduleConfig& cfg = list.config;
  OwnerMap owners(list);

  // occurrence count per (microbatch, slice), forward and backward
  std::vector<std::vector<int>> fwd_count(
      cfg.microbatches, std::vector<int>(cfg.stages, 0));
  std::vector<std::vector<int>> bwd_count = fwd_count;

  for (int d = 0; d < static_cast<int>(list.per_device.size()); ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      const Action& a = list.per_device[d][i];
      if (!a.is_compute()) continue;
      if (!compute_in_range(cfg, a)) {
        add(&report, "completeness", d, i,
            "compute action out of range: " + describe_action(a));
        continue;
      }
      SliceOwner o = owners.owner(a.microbatch, a.slice_index);
      std::string phase = a.kind == ActionKind::Forward ? "forward" : "backward";
      if (o.device != d) {
        add(&report, "completeness", d, i,
            "misplaced " + phase + " (microbatch " +
                std::to_string(a.microbatch) + ", slice " +
                std::to_string(a.slice_index) + "): slice is owned by device " +
                std::to_string(o.device));
        continue;
      }
      int& count = a.kind == ActionKind::Forward
                       ? fwd_count[a.microbatch][a.slice_index]
                       : bwd_count[a.microbatch][a.slice_index];
      ++count;
      if (count > 1) {
        add(&report, "completeness", d, i,
            "duplicate " + phase + " (microbatch " +
                std::to_string(a.microbatch) + ", slice " +
                std::to_string(a.slice_index) + ")");
      }
    }
  }

  for (int b = 0; b < cfg.microbatches; ++b) {
    for (int s = 0; s < cfg.stages; ++s) {
      SliceOwner o = owners.owner(b, s);
      if (fwd_count[b][s] == 0) {
        add(&report, "completeness", o.device, -1,
            "missing forward (microbatch " + std::to_string(b) + ", slice " +
                std::to_string(s) + ")");
      }
      if (bwd_count[b][s] == 0) {
        add(&report, "completeness", o.device, -1,
            "missing backward (microbatch " + std::to_string(b) + ", slice " +
                std::to_string(s) + ")");
      }
    }
  }
  return report;
}

ValidationReport check_dependencies(const ActionList& list) {
  ValidationReport report;
  const ScheduleConfig& cfg = list.config;
  const int devices = static_cast<int>(list.per_device.size());

  // Flat node ids, one per action; batched-exchange pairs are contracted by
  // redirecting the higher-id member to the lower.
  std::vector<int> offset(devices + 1, 0);
  for (int d = 0; d < devices; ++d) {
    offset[d + 1] = offset[d] + static_cast<int>(list.per_device[d].size());
  }
  const int total = offset[devices];
  std::vector<int> redirect(total);
  for (int i = 0; i < total; ++i) redirect[i] = i;
  auto node_id = [&](int d, int i) { return offset[d] + i; };
  auto node_loc = [&](int id) {
    int d = 0;
    while (offset[d + 1] <= id) ++d;
    return Loc{d, id - offset[d]};
  };

  // Group batched exchanges.
  std::map<int, std::vector<Loc>> groups;
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      const Action& a = list.per_device[d][i];
      if (a.kind == ActionKind::BatchedExchange) {
        groups[a.batch_group].push_back(Loc{d, i});
      }
    }
  }
  for (const auto& [group, members] : groups) {
    if (members.size() != 2) {
      add(&report, "dependencies", members[0].device, members[0].position,
          "batch_group " + std::to_string(group) + " has " +
              std::to_string(members.size()) + " participants, expected 2");
      continue;
    }
    const Action& x = list.per_device[members[0].device][members[0].position];
    const Action& y = list.per_device[members[1].device][members[1].position];
    if (x.peer != members[1].device || y.peer != members[0].device) {
      add(&report, "dependencies", members[0].device, members[0].position,
          "batch_group " + std::to_string(group) +
              " participants are not mutual peers");
      continue;
    }
    int a = node_id(members[0].device, members[0].position);
    int b = node_id(members[1].device, members[1].position);
    redirect[std::max(a, b)] = std::min(a, b);
  }
  auto rep = [&](int id) { return redirect[id]; };

  // Match messages: one sender record and one receiver record per key.
  std::map<MessageKey, std::vector<Loc>> senders, receivers;
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      const Action& a = list.per_device[d][i];
      if (a.kind == ActionKind::Send) {
        senders[message_key(a)].push_back(Loc{d, i});
      } else if (a.kind == ActionKind::Receive) {
        receivers[message_key(a)].push_back(Loc{d, i});
      } else if (a.kind == ActionKind::BatchedExchange) {
        senders[message_key(a)].push_back(Loc{d, i});
        // The counterpart's outgoing message is received here; recorded when
        // the counterpart is visited, via its own sender entry plus this
        // pair's contraction.  For matching purposes, register the incoming
        // side explicitly from the counterpart's descriptor.
        auto it = groups.find(a.batch_group);
        if (it != groups.end() && it->second.size() == 2) {
          const Loc& other = it->second[0].device == d &&
                                     it->second[0].position == i
                                 ? it->second[1]
                                 : it->second[0];
          const Action& oa = list.per_device[other.device][other.position];
          receivers[message_key(oa)].push_back(Loc{d, i});
        }
      }
    }
  }

  for (const auto& [key, locs] : senders) {
    for (size_t k = 1; k < locs.size(); ++k) {
      add(&report, "dependencies", locs[k].device, locs[k].position,
          "duplicate send of " + message_desc(key));
    }
    if (receivers.find(key) == receivers.end()) {
      add(&report, "dependencies", locs[0].device, locs[0].position,
          "unmatched send of " + message_desc(key));
    }
  }
  for (const auto& [key, locs] : receivers) {
    for (size_t k = 1; k < locs.size(); ++k) {
      add(&report, "dependencies", locs[k].device, locs[k].position,
          "duplicate receive of " + message_desc(key));
    }
    if (senders.find(key) == senders.end()) {
      add(&report, "dependencies", locs[0].device, locs[0].position,
          "unmatched receive of " + message_desc(key));
    }
  }

  // Locate computes for dataflow edges.
  std::map<std::tuple<bool, int, int>, Loc> compute_at;
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      const Action& a = list.per_device[d][i];
      if (!a.is_compute() || !compute_in_range(cfg, a)) continue;
      auto key = std::make_tuple(a.kind == ActionKind::Backward, a.microbatch,
                                 a.slice_index);
      if (compute_at.find(key) == compute_at.end()) compute_at[key] = Loc{d, i};
    }
  }

  // Edges: program order + message edges + dataflow edges.
  std::vector<std::vector<int>> adj(total);
  std::vector<int> indeg(total, 0);
  auto add_edge = [&](int from, int to) {
    from = rep(from);
    to = rep(to);
    if (from == to) return;
    adj[from].push_back(to);
    ++indeg[to];
  };
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i + 1 < static_cast<int>(list.per_device[d].size()); ++i) {
      add_edge(node_id(d, i), node_id(d, i + 1));
    }
  }
  for (const auto& [key, locs] : senders) {
    auto it = receivers.find(key);
    if (it == receivers.end()) continue;
    add_edge(node_id(locs[0].device, locs[0].position),
             node_id(it->second[0].device, it->second[0].position));
  }

  // Dataflow realization.  producer/consumer are compute locations; the
  // message key describes the boundary when the edge crosses devices.
  auto realize = [&](const char* what, bool prod_bwd, int pb, int ps,
                     bool cons_bwd, int cb, int cs, MessageKey key) {
    auto pit = compute_at.find(std::make_tuple(prod_bwd, pb, ps));
    auto cit = compute_at.find(std::make_tuple(cons_bwd, cb, cs));
    if (pit == compute_at.end() || cit == compute_at.end()) return;  // completeness reports these
    const Loc& prod = pit->second;
    const Loc& cons = cit->second;
    add_edge(node_id(prod.device, prod.position),
             node_id(cons.device, cons.position));
    if (prod.device == cons.device) {
      if (prod.position >= cons.position) {
        add(&report, "dependencies", prod.device, prod.position,
            std::string(what) + " dependency of microbatch " +
                std::to_string(pb) + " not realized: producer at position " +
                std::to_string(prod.position) + " does not precede consumer " +
                "at position " + std::to_string(cons.position));
      }
      return;
    }
    auto sit = senders.find(key);
    auto rit = receivers.find(key);
    if (sit == senders.end() || rit == receivers.end()) {
      add(&report, "dependencies", prod.device, prod.position,
          std::string(what) + " dependency not realized: no matched "
          "send/receive pair carries the " + message_desc(key));
      return;
    }
    const Loc& snd = sit->second[0];
    const Loc& rcv = rit->second[0];
    if (snd.device != prod.device || snd.position < prod.position) {
      add(&report, "dependencies", snd.device, snd.position,
          "send of " + message_desc(key) + " does not follow its producer");
    }
    if (rcv.device != cons.device || rcv.position > cons.position) {
      add(&report, "dependencies", rcv.device, rcv.position,
          "receive of " + message_desc(key) + " does not precede its consumer");
    }
  };

  int act = static_cast<int>(Payload::Activation);
  int grad = static_cast<int>(Payload::Gradient);
  for (int b = 0; b < cfg.microbatches; ++b) {
    for (int s = 0; s + 1 < cfg.stages; ++s) {
      realize("forward", false, b, s, false, b, s + 1, MessageKey{act, b, s});
      realize("backward", true, b, s + 1, true, b, s, MessageKey{grad, b, s});
    }
    realize("loss-turnaround", false, b, cfg.stages - 1, true, b,
            cfg.stages - 1, MessageKey{-1, b, cfg.stages - 1});
  }

  // Cycle detection over the contracted graph.
  std::vector<int> order;
  std::queue<int> q;
  int live = 0;
  for (int i = 0; i < total; ++i) {
    if (rep(i) != i) continue;
    ++live;
    if (indeg[i] == 0) q.push(i);
  }
  int visited = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    ++visited;
    for (int v : adj[u]) {
      if (--indeg[v] == 0) q.push(v);
    }
  }
  if (visited != live) {
    std::ostringstream os;
    os << "dependency cycle detected; involved actions include:";
    int shown = 0;
    Loc first{-1, -1};
    for (int i = 0; i < total && shown < 4; ++i) {
      if (rep(i) != i || indeg[i] == 0) continue;
      Loc loc = node_loc(i);
      if (first.device < 0) first = loc;
      os << " [device " << loc.device << " pos " << loc.position << " "
         << describe_action(list.per_device[loc.device][loc.position]) << "]";
      ++shown;
    }
    add(&report, "dependencies", first.device, first.position, os.str());
  }
  return report;
}

ValidationReport check_deadlock_free(const ActionList& list) {
  ValidationReport report;
  const int devices = static_cast<int>(list.per_device.size());

  // Counterpart of each batched exchange, by batch_group.
  std::map<int, std::vector<Loc>> groups;
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      if (list.per_device[d][i].kind == ActionKind::BatchedExchange) {
        groups[list.per_device[d][i].batch_group].push_back(Loc{d, i});
      }
    }
  }

  // Certify that mutual exchanges sitting at adjacent positions on both
  // devices are batched rather than left as separate sends and receives.
  std::map<MessageKey, Loc> send_at, recv_at;
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i < static_cast<int>(list.per_device[d].size()); ++i) {
      const Action& a = list.per_device[d][i];
      if (a.kind == ActionKind::Send) send_at[message_key(a)] = Loc{d, i};
      if (a.kind == ActionKind::Receive) recv_at[message_key(a)] = Loc{d, i};
    }
  }
  for (int d = 0; d < devices; ++d) {
    for (int i = 0; i + 1 < static_cast<int>(list.per_device[d].size()); ++i) {
      const Action& a = list.per_device[d][i];
      const Action& b = list.per_device[d][i + 1];
      bool opposing =
          (a.kind == ActionKind::Send && b.kind == ActionKind::Receive) ||
          (a.kind == ActionKind::Receive && b.kind == ActionKind::Send);
      if (!opposing || a.peer != b.peer || a.peer < 0 || a.peer == d) continue;
      if (a.peer < d) continue;  // report each pair once
      const Action& snd = a.kind == ActionKind::Send ? a : b;
      const Action& rcv = a.kind == ActionKind::Send ? b : a;
      auto pr = recv_at.find(message_key(snd));
      auto ps = send_at.find(message_key(rcv));
      if (pr == recv_at.end() || ps == send_at.end()) continue;
      if (pr->second.device != a.peer || ps->second.device != a.peer) continue;
      if (std::abs(pr->second.position - ps->second.position) != 1) continue;
      add(&report, "deadlock_free", d, i,
          "mutual exchange with device " + std::to_string(a.peer) +
              " at adjacent positions on both devices must be fused into a "
              "batched exchange");
    }
  }

  // Buffered-send replay.  Sends complete as soon as they are issued (the
  // transport buffers the payload), a receive waits until its peer has
  // actually issued the matching send, and a batched exchange synchronizes
  // both participants.  A schedule deadlocks when progress stops with some
  // device parked on a receive whose send sits behind another blocked
  // receive, or on a batched exchange whose counterpart is never reached.
  std::vector<int> pc(devices, 0);
  std::map<std::pair<int, int>, std::set<MessageKey>> issued;  // (src,dst)
  bool changed = true;
  while (changed) {
    changed = false;
    for (int d = 0; d < devices; ++d) {
      while (pc[d] < static_cast<int>(list.per_device[d].size())) {
        const Action& a = list.per_device[d][pc[d]];
        if (a.is_compute() || a.kind == ActionKind::OptimizerStep) {
          ++pc[d];
          changed = true;
          continue;
        }
        if (a.kind == ActionKind::Send) {
          if (a.peer < 0 || a.peer >= devices || a.peer == d) break;
          issued[{d, a.peer}].insert(message_key(a));
          ++pc[d];
          changed = true;
          continue;
        }
        if (a.kind == ActionKind::BatchedExchange) {
          auto it = groups.find(a.batch_group);
          if (it == groups.end() || it->second.size() != 2) break;
          Loc other = it->second[0].device == d && it->second[0].position == pc[d]
                          ? it->second[1]
                          : it->second[0];
          if (other.device == d || pc[other.device] != other.position) break;
          const Action& oa = list.per_device[other.device][other.position];
          issued[{d, a.peer}].insert(message_key(a));
          issued[{other.device, oa.peer}].insert(message_key(oa));
          ++pc[d];
          ++pc[other.device];
          changed = true;
          continue;
        }
        // Receive: wait until the peer has issued the matching send.
        int peer = a.peer;
        if (peer < 0 || peer >= devices || peer == d) break;
        auto ch = issued.find({peer, d});
        if (ch == issued.end() || ch->second.count(message_key(a)) == 0) break;
        ++pc[d];
        changed = true;
      }
    }
  }
  for (int d = 0; d < devices; ++d) {
    if (pc[d] < static_cast<int>(list.per_device[d].size())) {
      add(&report, "deadlock_free", d, pc[d],
          "blocked at " + describe_action(list.per_device[d][pc[d]]) +
              "; its counterpart is never reached");
    }
  }
  return report;
}

ValidationReport check_flush(const ActionList& list) {
  ValidationReport report;
  for (int d = 0; d < static_cast<int>(list.per_device.size()); ++d) {
    const auto& stream = list.per_device[d];
    int first_opt = -1;
    int count = 0;
    for (int i = 0; i < static_cast<int>(stream.size()); ++i) {
      if (stream[i].kind == ActionKind::OptimizerStep) {
        ++count;
        if (first_opt < 0) {
          first_opt = i;
        } else {
          add(&report, "flush", d, i, "duplicate optimizer step");
        }
      }
    }
    if (count == 0) {
      add(&report, "flush", d, -1, "missing flush: no optimizer step");
      continue;
    }
    if (first_opt != static_cast<int>(stream.size()) - 1) {
      add(&report, "flush", d, first_opt,
          "premature optimizer step: " +
              std::to_string(static_cast<int>(stream.size()) - 1 - first_opt) +
              " action(s) follow the flush");
    }
  }
  return report;
}

ValidationReport validate_all(const ActionList& list) {
  ValidationReport report;
  report.merge(check_completeness(list));
  report.merge(check_dependencies(list));
  report.merge(check_deadlock_free(list));
  report.merge(check_flush(list));
  return report;
}

std::string render_diagnostics_text(const ValidationReport& report) {
  std::ostringstream os;
  for (const Diagnostic& d : report.diagnostics) {
    os << d.severity << " [" << d.check << "]";
    if (d.device >= 0) os << " device " << d.device;
    if (d.position >= 0) os << " pos " << d.position;
    os << ": " << d.message << "\n";
  }
  return os.str();
}

std::string render_diagnostics_json(const ValidationReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Diagnostic& d : report.diagnostics) {
    nlohmann::ordered_json o;
    o["check"] = d.check;
    o["severity"] = d.severity;
    if (d.device >= 0) {
      o["device"] = d.device;
    } else {
      o["device"] = nullptr;
    }
    if (d.position >= 0) {
      o["position"] = d.position;
    } else {
      o["position"] = nullptr;
    }
    o["message"] = d.message;
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

}  // namespace wavepipe
