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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnt/pauli.hpp"

namespace qnt {

using NodeId = std::string;
using EdgeId = std::string;

/// Orders embedded digit runs numerically, so "P2" < "P12".
struct NaturalLess {
  bool operator()(std::string_view a, std::string_view b) const {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
      const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
      if (da && db) {
        std::size_t ie = i, je = j;
        while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
        while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
        // Strip leading zeros, then compare by length and digits.
        std::size_t is = i, js = j;
        while (is + 1 < ie && a[is] == '0') ++is;
        while (js + 1 < je && b[js] == '0') ++js;
        if (ie - is != je - js) return ie - is < je - js;
        const auto cmp = a.substr(is, ie - is).compare(b.substr(js, je - js));
        if (cmp != 0) return cmp < 0;
        if (ie - i != je - j) return ie - i < je - j;
        i = ie;
        j = je;
      } else {
        if (a[i] != b[j]) return a[i] < b[j];
        ++i;
        ++j;
      }
    }
    return a.size() - i < b.size() - j;
  }
};

/// Lexicographic comparison of edge sequences under NaturalLess.
inline bool path_less(const std::vector<EdgeId>& a,
                      const std::vector<EdgeId>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      NaturalLess{});
}

template <class V>
using NodeMap = std::map<NodeId, V, NaturalLess>;
template <class V>
using EdgeMap = std::map<EdgeId, V, NaturalLess>;
using NodeSet = std::set<NodeId, NaturalLess>;
using EdgeSet = std::set<EdgeId, NaturalLess>;

enum class NodeKind { Monitor, Internal };

inline const char* to_string(NodeKind k) {
  return k == NodeKind::Monitor ? "monitor" : "internal";
}

struct Edge {
  EdgeId id;
  NodeId a;
  NodeId b;
  PauliChannel channel;

  bool touches(const NodeId& n) const { return a == n || b == n; }
  const NodeId& other(const NodeId& n) const {
    if (n == a) return b;
    if (n == b) return a;
    throw std::invalid_argument("edge " + id + " does not touch node " + n);
  }
};

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Undirected multigraph of monitor/internal nodes joined by Pauli channels.
 * Structural checks (connectivity, degrees) are reported by validate().
 */
class Topology {
 public:
  void add_node(const NodeId& id, NodeKind kind) {
    if (id.empty()) throw TopologyError("empty node id");
    if (!nodes_.emplace(id, kind).second) {
      throw TopologyError("duplicate node id " + id);
    }
    incident_[id];
  }

  void add_edge(const EdgeId& id, const NodeId& a, const NodeId& b,
                const PauliChannel& channel) {
    if (id.empty()) throw TopologyError("empty edge id");
    if (edges_.count(id)) throw TopologyError("duplicate edge id " + id);
    if (!nodes_.count(a)) throw TopologyError("edge " + id + ": unknown node " + a);
    if (!nodes_.count(b)) throw TopologyError("edge " + id + ": unknown node " + b);
    if (a == b) throw TopologyError("edge " + id + ": self-loop at " + a);
    edges_.emplace(id, Edge{id, a, b, channel});
    incident_[a].insert(id);
    incident_[b].insert(id);
  }

  bool has_node(const NodeId& n) const { return nodes_.count(n) != 0; }
  bool has_edge(const EdgeId& e) const { return edges_.count(e) != 0; }

  NodeKind kind(const NodeId& n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw TopologyError("unknown node " + n);
    return it->second;
  }
  bool is_monitor(const NodeId& n) const {
    return kind(n) == NodeKind::Monitor;
  }

  const Edge& edge(const EdgeId& e) const {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw TopologyError("unknown edge " + e);
    return it->second;
  }

  const EdgeSet& incident(const NodeId& n) const {
    auto it = incident_.find(n);
    if (it == incident_.end()) throw TopologyError("unknown node " + n);
    return it->second;
  }
  std::size_t degree(const NodeId& n) const { return incident(n).size(); }

  const NodeMap<NodeKind>& nodes() const { return nodes_; }
  const EdgeMap<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  NodeSet monitors() const {
    NodeSet out;
    for (const auto& [id, k] : nodes_)
      if (k == NodeKind::Monitor) out.insert(id);
    return out;
  }

  std::vector<PauliChannel> channels(const std::vector<EdgeId>& path) const {
    std::vector<PauliChannel> out;
    out.reserve(path.size());
    for (const auto& e : path) out.push_back(edge(e).channel);
    return out;
  }

 private:
  NodeMap<NodeKind> nodes_;
  EdgeMap<Edge> edges_;
  NodeMap<EdgeSet> incident_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string subject;
  std::string rule;
  std::string message;
};

/// Structural violations; `simplified` additionally demands internal
/// degree >= 3.
inline std::vector<Violation> validate(const Topology& t,
                                       bool simplified = false) {
  std::vector<Violation> out;
  if (t.node_count() == 0) {
    out.push_back({"", "non-empty", "topology has no nodes"});
    return out;
  }
  NodeSet seen;
  std::deque<NodeId> queue;
  NodeId start = t.nodes().begin()->first;
  for (const auto& [id, kind] : t.nodes())
    if (t.degree(id) > 0) {
      start = id;
      break;
    }
  seen.insert(start);
  queue.push_back(start);
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& e : t.incident(u)) {
      const NodeId& v = t.edge(e).other(u);
      if (seen.insert(v).second) queue.push_back(v);
    }
  }
  for (const auto& [id, kind] : t.nodes()) {
    if (!seen.count(id)) {
      out.push_back({id, "connectivity",
                     "node " + id + " is not reachable from " + start});
    }
    const std::size_t d = t.degree(id);
    if (d == 0) continue;
    if (kind == NodeKind::Monitor && d != 1) {
      out.push_back({id, "monitor-degree",
                     "monitor " + id + " has degree " + std::to_string(d) +
                         ", expected 1"});
    }
    if (kind == NodeKind::Internal) {
      const std::size_t need = simplified ? 3 : 2;
      if (d < need) {
        out.push_back({id, simplified ? "internal-degree-simplified"
                                      : "internal-degree",
                       "internal node " + id + " has degree " +
                           std::to_string(d) + ", expected >= " +
                           std::to_string(need)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degree-2 simplification
// ---------------------------------------------------------------------------

struct EquivalentChannel {
  EdgeId id;
  std::vector<EdgeId> edge_ids;
  NodeId a;
  NodeId b;
  PauliChannel composite;
};

struct SimplifiedTopology {
  Topology topology;
  std::vector<EquivalentChannel> equivalents;
};

inline std::string join_ids(const std::vector<EdgeId>& ids, char sep = '+') {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += sep;
    out += ids[i];
  }
  return out;
}

/**
 * Contracts every maximal path through internal degree-2 nodes into a single
 * edge whose channel is the composite of the path. Composite ids join the
 * member ids with '+'.
 */
inline SimplifiedTopology simplify_degree2(const Topology& t) {
  auto pass_through = [&](const NodeId& n) {
    return t.kind(n) == NodeKind::Internal && t.degree(n) == 2;
  };

  SimplifiedTopology out;
  for (const auto& [id, kind] : t.nodes())
    if (!pass_through(id)) out.topology.add_node(id, kind);

  EdgeSet visited;
  for (const auto& [start, kind] : t.nodes()) {
    if (pass_through(start)) continue;
    for (const auto& first : t.incident(start)) {
      if (visited.count(first)) continue;
      std::vector<EdgeId> path{first};
      visited.insert(first);
      NodeId cur = t.edge(first).other(start);
      EdgeId last = first;
      while (pass_through(cur)) {
        const auto& inc = t.incident(cur);
        const EdgeId next = *inc.begin() == last ? *inc.rbegin() : *inc.begin();
        if (visited.count(next)) {
          throw TopologyError("degree-2 path from " + start +
                              " closes on itself; unsupported");
        }
        visited.insert(next);
        path.push_back(next);
        last = next;
        cur = t.edge(next).other(cur);
      }
      if (path.size() == 1) {
        const Edge& e = t.edge(first);
        out.topology.add_edge(e.id, e.a, e.b, e.channel);
        continue;
      }
      if (cur == start) {
        throw TopologyError("degree-2 cycle through " + start +
                            " is unsupported");
      }
      NodeId a = start, b = cur;
      if (NaturalLess{}(path.back(), path.front())) {
        std::reverse(path.begin(), path.end());
        std::swap(a, b);
      }
      const auto chans = t.channels(path);
      EquivalentChannel eq{join_ids(path), path, a, b,
                           compose_channels(chans)};
      out.topology.add_edge(eq.id, a, b, eq.composite);
      out.equivalents.push_back(std::move(eq));
    }
  }
  if (visited.size() != t.edge_count()) {
    throw TopologyError(
        "topology contains a cycle made only of degree-2 nodes; unsupported");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Etching bookkeeping
// ---------------------------------------------------------------------------

/// Raw per-basis estimates of one channel; may fall outside the CP region.
struct QEstimate {
  double qx = std::numeric_limits<double>::quiet_NaN();
  double qy = std::numeric_limits<double>::quiet_NaN();
  double qz = std::numeric_limits<double>::quiet_NaN();

  double get(Basis b) const {
    return b == Basis::X ? qx : b == Basis::Y ? qy : qz;
  }
  void set(Basis b, double v) {
    (b == Basis::X ? qx : b == Basis::Y ? qy : qz) = v;
  }
};

struct EtchingState {
  /// Identified channels and their estimates.
  EdgeMap<QEstimate> identified;
  /// Monitors plus promoted internal nodes.
  NodeSet effective_monitors;
  /// Edges identifiable in the current round.
  EdgeSet frontier;
  /// Edge path from a real monitor to each effective monitor.
  NodeMap<std::vector<EdgeId>> access_paths;

  static EtchingState initial(const Topology& t);
};

/// Unidentified edges with at least one endpoint in the effective monitors.
inline EdgeSet peripheral_edges(const Topology& t, const EtchingState& s) {
  EdgeSet out;
  for (const auto& [id, e] : t.edges()) {
    if (s.identified.count(id)) continue;
    if (s.effective_monitors.count(e.a) || s.effective_monitors.count(e.b))
      out.insert(id);
  }
  return out;
}

inline EtchingState EtchingState::initial(const Topology& t) {
  EtchingState s;
  for (const auto& m : t.monitors()) {
    s.effective_monitors.insert(m);
    s.access_paths[m] = {};
  }
  s.frontier = peripheral_edges(t, s);
  return s;
}

struct MergecastBranches {
  /// Effective monitor sending through the target.
  NodeId root;
  /// Node where the two qubits merge.
  NodeId center;
  /// Center to the second sender (listed from the center outward).
  std::vector<EdgeId> branch_a2;
  /// Center to the receiver.
  std::vector<EdgeId> branch_b;
  NodeId end_a2;
  NodeId end_b;
};

class BranchSelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct BranchSearch {
  const Topology& t;
  const NodeSet& sinks;
  NodeId center;
  NodeId root;
  EdgeId target;

  bool blocked_node(const NodeId& n) const { return n == root; }
  bool is_sink(const NodeId& n) const { return n != center && sinks.count(n); }

  /// Lexicographically smallest shortest path from the center to a sink.
  std::optional<std::vector<EdgeId>> shortest(const EdgeSet& banned_edges,
                                              const NodeSet& banned_sinks,
                                              NodeId* end) const {
    NodeMap<std::vector<EdgeId>> best;
    best[center] = {};
    std::vector<NodeId> layer{center};
    while (!layer.empty()) {
      NodeMap<std::vector<EdgeId>> next;
      for (const auto& u : layer) {
        for (const auto& e : t.incident(u)) {
          if (e == target || banned_edges.count(e)) continue;
          const NodeId& v = t.edge(e).other(u);
          if (blocked_node(v) || best.count(v) || banned_sinks.count(v))
            continue;
          auto cand = best[u];
          cand.push_back(e);
          auto it = next.find(v);
          if (it == next.end() || path_less(cand, it->second))
            next[v] = std::move(cand);
        }
      }
      std::optional<std::pair<NodeId, std::vector<EdgeId>>> hit;
      layer.clear();
      for (auto& [v, p] : next) {
        if (is_sink(v)) {
          if (!hit || path_less(p, hit->second)) hit = {{v, p}};
        } else {
          layer.push_back(v);
        }
        best[v] = p;
      }
      if (hit) {
        *end = hit->first;
        return hit->second;
      }
    }
    return std::nullopt;
  }

  /// Two edge-disjoint center-to-sink paths with distinct sinks and minimal
  /// total length (successive shortest paths on a unit-capacity network).
  std::optional<std::pair<std::vector<EdgeId>, std::vector<EdgeId>>>
  min_cost_pair(NodeId* end1, NodeId* end2) const {
    std::vector<NodeId> names;
    NodeMap<int> index;
    for (const auto& [id, k] : t.nodes()) {
      if (blocked_node(id)) continue;
      index[id] = static_cast<int>(names.size());
      names.push_back(id);
    }
    const int sink = static_cast<int>(names.size());
    const int n = sink + 1;
    struct Arc {
      int to;
      int cap;
      int cost;
      int rev;
      bool original;
      EdgeId edge;
    };
    std::vector<std::vector<Arc>> g(static_cast<std::size_t>(n));
    auto add = [&](int u, int v, int cost, const EdgeId& e) {
      g[u].push_back({v, 1, cost, static_cast<int>(g[v].size()), true, e});
      g[v].push_back(
          {u, 0, -cost, static_cast<int>(g[u].size()) - 1, false, e});
    };
    for (const auto& [id, e] : t.edges()) {
      if (id == target || blocked_node(e.a) || blocked_node(e.b)) continue;
      const int a = index.at(e.a), b = index.at(e.b);
      if (!is_sink(e.a)) add(a, b, 1, id);
      if (!is_sink(e.b)) add(b, a, 1, id);
    }
    for (const auto& [id, i] : index)
      if (is_sink(id)) add(i, sink, 0, "");

    const int src = index.at(center);
    for (int flow = 0; flow < 2; ++flow) {
      std::vector<int> dist(n, std::numeric_limits<int>::max());
      std::vector<std::pair<int, int>> prev(n, {-1, -1});
      dist[src] = 0;
      for (int iter = 0; iter < n; ++iter) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
          if (dist[u] == std::numeric_limits<int>::max()) continue;
          for (int k = 0; k < static_cast<int>(g[u].size()); ++k) {
            const Arc& a = g[u][k];
            if (a.cap > 0 && dist[u] + a.cost < dist[a.to]) {
              dist[a.to] = dist[u] + a.cost;
              prev[a.to] = {u, k};
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (dist[sink] == std::numeric_limits<int>::max()) return std::nullopt;
      for (int v = sink; v != src; v = prev[v].first) {
        Arc& a = g[prev[v].first][prev[v].second];
        a.cap -= 1;
        g[a.to][a.rev].cap += 1;
      }
    }

    // Saturated original arcs, minus opposite pairs on the same edge.
    struct Step {
      int to;
      EdgeId edge;
      bool taken = false;
    };
    std::vector<std::vector<Step>> flow_arcs(static_cast<std::size_t>(n));
    auto saturated = [&](int u, int v, const EdgeId& e) {
      for (const auto& a : g[u])
        if (a.original && a.to == v && a.edge == e && a.cap == 0) return true;
      return false;
    };
    for (int u = 0; u < n; ++u)
      for (const auto& a : g[u]) {
        if (!a.original || a.cap != 0) continue;
        if (!a.edge.empty() && saturated(a.to, u, a.edge)) continue;
        flow_arcs[u].push_back({a.to, a.edge});
      }

    std::vector<std::vector<EdgeId>> paths;
    std::vector<NodeId> ends;
    for (int k = 0; k < 2; ++k) {
      std::vector<EdgeId> path;
      int u = src;
      while (u != sink) {
        auto it = std::find_if(flow_arcs[u].begin(), flow_arcs[u].end(),
                               [](const Step& st) { return !st.taken; });
        if (it == flow_arcs[u].end()) return std::nullopt;
        it->taken = true;
        if (it->to == sink) {
          ends.push_back(names[static_cast<std::size_t>(u)]);
        } else {
          path.push_back(it->edge);
        }
        u = it->to;
      }
      paths.push_back(std::move(path));
    }
    if (ends.size() != 2 || ends[0] == ends[1]) return std::nullopt;
    if (path_less(paths[1], paths[0])) {
      std::swap(paths[0], paths[1]);
      std::swap(ends[0], ends[1]);
    }
    *end1 = ends[0];
    *end2 = ends[1];
    return std::make_pair(paths[0], paths[1]);
  }
};

inline std::optional<MergecastBranches> try_orientation(
    const Topology& t, const EtchingState& s, const EdgeId& target,
    const NodeId& root, const NodeId& center) {
  if (t.is_monitor(center)) return std::nullopt;
  BranchSearch search{t, s.effective_monitors, center, root, target};
  MergecastBranches out;
  out.root = root;
  out.center = center;
  if (auto first = search.shortest({}, {}, &out.end_a2)) {
    EdgeSet banned(first->begin(), first->end());
    if (auto second = search.shortest(banned, {out.end_a2}, &out.end_b)) {
      out.branch_a2 = std::move(*first);
      out.branch_b = std::move(*second);
      return out;
    }
  }
  if (auto pair = search.min_cost_pair(&out.end_a2, &out.end_b)) {
    out.branch_a2 = std::move(pair->first);
    out.branch_b = std::move(pair->second);
    return out;
  }
  return std::nullopt;
}

}  // namespace detail

/**
 * Picks the Mergecast layout for `target`: the root is an endpoint already in
 * the effective monitors, and two edge-disjoint branches lead from the other
 * endpoint to two distinct effective monitors other than the root.
 *
 * When both endpoints qualify as root, the one with the shorter access path
 * goes first (ties by node id); the other orientation is tried on failure.
 */
inline MergecastBranches select_mergecast_branches(const Topology& t,
                                                   const EtchingState& s,
                                                   const EdgeId& target) {
  const Edge& e = t.edge(target);
  if (s.identified.count(target)) {
    throw BranchSelectionError("edge " + target + " is already identified");
  }
  std::vector<NodeId> roots;
  for (const NodeId& n : {e.a, e.b})
    if (s.effective_monitors.count(n)) roots.push_back(n);
  if (roots.empty()) {
    throw BranchSelectionError("edge " + target +
                               " has no endpoint among the effective monitors");
  }
  auto access_len = [&](const NodeId& n) {
    auto it = s.access_paths.find(n);
    return it == s.access_paths.end() ? std::size_t{0} : it->second.size();
  };
  std::sort(roots.begin(), roots.end(), [&](const NodeId& x, const NodeId& y) {
    if (access_len(x) != access_len(y)) return access_len(x) < access_len(y);
    return NaturalLess{}(x, y);
  });
  for (const auto& root : roots) {
    if (auto b = detail::try_orientation(t, s, target, root, e.other(root)))
      return *b;
  }
  throw BranchSelectionError("edge " + target +
                             ": no two edge-disjoint branches reach distinct "
                             "effective monitors");
}

// ---------------------------------------------------------------------------
// Built-in topologies
// ---------------------------------------------------------------------------

/// Three monitors joined to one internal node by edges P1, P2, P3.
inline Topology star_topology(const PauliChannel& c1, const PauliChannel& c2,
                              const PauliChannel& c3) {
  Topology t;
  t.add_node("A1", NodeKind::Monitor);
  t.add_node("A2", NodeKind::Monitor);
  t.add_node("B", NodeKind::Monitor);
  t.add_node("C", NodeKind::Internal);
  t.add_edge("P1", "A1", "C", c1);
  t.add_edge("P2", "A2", "C", c2);
  t.add_edge("P3", "C", "B", c3);
  return t;
}

/// The 19-edge, 8-monitor reference network with a uniform channel.
inline Topology mesh19_topology(const PauliChannel& ch) {
  Topology t;
  for (const char* n : {"A1", "A2", "B1", "B2", "B3", "B4", "C1", "C2", "C3",
                        "C4"})
    t.add_node(n, NodeKind::Internal);
  for (const char* n : {"D1", "D2", "D3", "D4", "E1", "E2", "E3", "E4"})
    t.add_node(n, NodeKind::Monitor);
  const std::pair<const char*, const char*> ends[] = {
      {"A1", "A2"}, {"A1", "B1"}, {"B1", "B2"}, {"B2", "B3"}, {"B3", "B4"},
      {"B4", "A2"}, {"C4", "A2"}, {"C3", "C4"}, {"C2", "C3"}, {"C1", "C2"},
      {"A1", "C1"}, {"B1", "D1"}, {"B2", "D2"}, {"B3", "D3"}, {"B4", "D4"},
      {"C4", "E4"}, {"C3", "E3"}, {"C2", "E2"}, {"C1", "E1"}};
  int k = 1;
  for (const auto& [a, b] : ends) t.add_edge("P" + std::to_string(k++), a, b, ch);
  return t;
}

}  // namespace qnt
