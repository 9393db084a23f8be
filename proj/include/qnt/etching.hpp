// Copyright 2026 The qnt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * Progressive etching: identify the channels touching effective monitors with
 * generalized Mergecast, promote their far endpoints to effective monitors,
 * and repeat until every channel is known.
 */

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnt/protocols.hpp"
#include "qnt/topology.hpp"

namespace qnt {

class EtchingError : public std::runtime_error {
 public:
  EtchingError(EdgeId edge, const std::string& what)
      : std::runtime_error("edge " + edge + ": " + what),
        edge_(std::move(edge)) {}
  const EdgeId& edge() const { return edge_; }

 private:
  EdgeId edge_;
};

inline constexpr std::array<Basis, 3> kAllBases = {Basis::X, Basis::Y,
                                                   Basis::Z};

struct EtchingStep {
  EdgeId edge;
  /// 1-based round in which the edge was identified.
  int round = 0;
  MergecastBranches plan;
  /// Estimated channels divided out of the raw ratio.
  std::vector<EdgeId> root_access;
};

struct EtchingResult {
  EdgeMap<QEstimate> estimates;
  std::vector<EtchingStep> steps;
  EtchingState final_state;
  int rounds = 0;

  int round_of(const EdgeId& e) const {
    for (const auto& s : steps)
      if (s.edge == e) return s.round;
    throw std::out_of_range("edge " + e + " was not identified");
  }
};

struct SampleSizes {
  /// Shots of the protocol under study (Mergecast, spam-s, spam-m).
  std::uint64_t M = 10000;
  /// Shots of the unicast reference.
  std::uint64_t N = 10000;
};

/// Plans every round without sampling; useful for inspecting the order.
inline std::vector<EtchingStep> plan_progressive_etching(const Topology& t);

namespace detail {

inline std::vector<EdgeId> reversed(std::vector<EdgeId> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

/// Physical edge lists of one Mergecast run: the root's access path plus the
/// target, and each branch extended by its endpoint's access path.
struct PhysicalLayout {
  std::vector<EdgeId> target_path;
  std::vector<EdgeId> a2_path;
  std::vector<EdgeId> b_path;
};

inline PhysicalLayout physical_layout(const EtchingState& s,
                                      const EdgeId& target,
                                      const MergecastBranches& plan) {
  PhysicalLayout out;
  out.target_path = s.access_paths.at(plan.root);
  out.target_path.push_back(target);
  out.a2_path = s.access_paths.at(plan.end_a2);
  const auto a2 = reversed(plan.branch_a2);
  out.a2_path.insert(out.a2_path.end(), a2.begin(), a2.end());
  out.b_path = plan.branch_b;
  const auto b_access = reversed(s.access_paths.at(plan.end_b));
  out.b_path.insert(out.b_path.end(), b_access.begin(), b_access.end());
  return out;
}

/// Runs the round loop; `identify` fills the estimate for one edge.
template <class Identify>
EtchingResult etch_rounds(const Topology& t, Identify&& identify) {
  for (const auto& v : validate(t)) {
    throw TopologyError("invalid topology: " + v.message);
  }
  EtchingResult result;
  EtchingState& s = result.final_state;
  s = EtchingState::initial(t);
  int round = 0;
  while (s.identified.size() < t.edge_count()) {
    ++round;
    s.frontier = peripheral_edges(t, s);
    const EtchingState snapshot = s;
    std::vector<std::pair<NodeId, std::vector<EdgeId>>> promotions;
    std::size_t progress = 0;
    for (const auto& e : snapshot.frontier) {
      MergecastBranches plan;
      try {
        plan = select_mergecast_branches(t, snapshot, e);
      } catch (const BranchSelectionError&) {
        continue;  // retried in a later round
      }
      EtchingStep step{e, round, plan, snapshot.access_paths.at(plan.root)};
      QEstimate est = identify(snapshot, step);
      s.identified[e] = est;
      result.estimates[e] = est;
      result.steps.push_back(std::move(step));
      ++progress;
      if (!snapshot.effective_monitors.count(plan.center)) {
        auto path = snapshot.access_paths.at(plan.root);
        path.push_back(e);
        promotions.emplace_back(plan.center, std::move(path));
      }
    }
    if (progress == 0) {
      throw EtchingError(*snapshot.frontier.begin(),
                         "no frontier channel admits a Mergecast layout");
    }
    for (auto& [node, path] : promotions) {
      if (s.effective_monitors.insert(node).second)
        s.access_paths[node] = std::move(path);
    }
  }
  s.frontier.clear();
  result.rounds = round;
  return result;
}

}  // namespace detail

inline std::vector<EtchingStep> plan_progressive_etching(const Topology& t) {
  return detail::etch_rounds(
             t, [](const EtchingState&, const EtchingStep&) {
               return QEstimate{};
             })
      .steps;
}

/**
 * Estimates every channel of `t` in each basis of `bases`. Each estimate is
 * the Mergecast ratio divided by s and by the earlier estimates along the
 * root's access path. Estimates are raw and may leave [-1, 1].
 */
inline EtchingResult run_progressive_etching(
    const Topology& t, const SpamModel& spam, SampleSizes samples,
    RandomStream& stream, std::span<const Basis> bases = kAllBases) {
  spam.validate();
  EtchingResult result = detail::etch_rounds(
      t, [&](const EtchingState& snap, const EtchingStep& step) {
        const auto layout = detail::physical_layout(snap, step.edge, step.plan);
        const auto target = t.channels(layout.target_path);
        const auto a2 = t.channels(layout.a2_path);
        const auto b = t.channels(layout.b_path);
        std::vector<PauliChannel> uni = a2;
        uni.insert(uni.end(), b.begin(), b.end());
        QEstimate est;
        for (Basis basis : bases) {
          try {
            const double pm = mergecast_prob(target, a2, b, spam, basis);
            const double pu = unicast_prob(uni, spam, basis);
            const auto merge = sample_protocol(pm, samples.M, stream);
            const auto ref = sample_protocol(pu, samples.N, stream);
            double q = estimate_q_mergecast(merge, ref, spam.s);
            for (const auto& prior : step.root_access) {
              const double d = snap.identified.at(prior).get(basis);
              if (std::abs(d) < kDegenerateDenominator) {
                throw UnestimableError("earlier estimate of " + prior +
                                       " is degenerate");
              }
              q /= d;
            }
            est.set(basis, q);
          } catch (const std::exception& ex) {
            throw EtchingError(step.edge, std::string("basis ") +
                                              to_char(basis) + ": " +
                                              ex.what());
          }
        }
        return est;
      });
  return result;
}

/// Round index per edge, keyed by edge id.
inline EdgeMap<int> etching_rounds_by_edge(const EtchingResult& r) {
  EdgeMap<int> out;
  for (const auto& s : r.steps) out[s.edge] = s.round;
  return out;
}

// ---------------------------------------------------------------------------
// BypassUnicast over a topology
// ---------------------------------------------------------------------------

struct BypassRoute {
  EdgeId target;
  /// From the sending monitor up to the target.
  std::vector<EdgeId> before;
  /// From the target to the receiving monitor.
  std::vector<EdgeId> after;
};

namespace detail {

/// Shortest lexicographic path from `from` to a real monitor, avoiding the
/// listed edges and nodes. Empty when `from` is itself a monitor.
inline std::optional<std::vector<EdgeId>> path_to_monitor(
    const Topology& t, const NodeId& from, const EdgeSet& banned_edges,
    const NodeSet& banned_nodes) {
  if (t.is_monitor(from)) return std::vector<EdgeId>{};
  NodeMap<std::vector<EdgeId>> best;
  best[from] = {};
  std::vector<NodeId> layer{from};
  while (!layer.empty()) {
    NodeMap<std::vector<EdgeId>> next;
    for (const auto& u : layer)
      for (const auto& e : t.incident(u)) {
        if (banned_edges.count(e)) continue;
        const NodeId& v = t.edge(e).other(u);
        if (best.count(v) || banned_nodes.count(v)) continue;
        auto cand = best[u];
        cand.push_back(e);
        auto it = next.find(v);
        if (it == next.end() || path_less(cand, it->second)) next[v] = cand;
      }
    layer.clear();
    std::optional<std::vector<EdgeId>> hit;
    for (auto& [v, p] : next) {
      best[v] = p;
      if (t.is_monitor(v)) {
        if (!hit || path_less(p, *hit)) hit = p;
      } else {
        layer.push_back(v);
      }
    }
    if (hit) return hit;
  }
  return std::nullopt;
}

inline NodeSet path_nodes(const Topology& t, const NodeId& from,
                          const std::vector<EdgeId>& path) {
  NodeSet out{from};
  NodeId cur = from;
  for (const auto& e : path) {
    cur = t.edge(e).other(cur);
    out.insert(cur);
  }
  return out;
}

}  // namespace detail

/// Monitor-to-monitor simple path through `target`.
inline BypassRoute bypass_route(const Topology& t, const EdgeId& target) {
  const Edge& e = t.edge(target);
  auto side_a = detail::path_to_monitor(t, e.a, {target}, {e.b});
  if (!side_a) throw EtchingError(target, "no monitor reachable from " + e.a);
  auto used = detail::path_nodes(t, e.a, *side_a);
  EdgeSet banned(side_a->begin(), side_a->end());
  banned.insert(target);
  auto side_b = detail::path_to_monitor(t, e.b, banned, used);
  if (!side_b) throw EtchingError(target, "no monitor reachable from " + e.b);
  BypassRoute r;
  r.target = target;
  r.before = detail::reversed(*side_a);
  r.after = *side_b;
  return r;
}

/**
 * BypassUnicast estimates for `targets`: every other channel on the route is
 * neutralized, so a single frequency gives q_target * ms.
 */
inline EdgeMap<QEstimate> run_bypass_unicast(
    const Topology& t, const SpamModel& spam, std::uint64_t n,
    RandomStream& stream, const std::vector<EdgeId>& targets,
    std::span<const Basis> bases = kAllBases) {
  EdgeMap<QEstimate> out;
  for (const auto& target : targets) {
    const auto route = bypass_route(t, target);
    const auto before = t.channels(route.before);
    const auto after = t.channels(route.after);
    QEstimate est;
    for (Basis basis : bases) {
      try {
        const double p = bypass_unicast_prob(before, t.edge(target).channel,
                                             after, spam, basis);
        const auto o = sample_protocol(p, n, stream);
        est.set(basis, estimate_q_bypass(o.p_hat(), spam));
      } catch (const std::exception& ex) {
        throw EtchingError(target, ex.what());
      }
    }
    out[target] = est;
  }
  return out;
}

}  // namespace qnt
