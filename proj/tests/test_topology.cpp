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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "qnt/density_oracle.hpp"
#include "qnt/topology.hpp"
#include "qnt/topology_io.hpp"
#include "support.hpp"

namespace qnt {
namespace {

const PauliChannel kBit = PauliChannel::bit_flip(0.1);

std::string data_file(const char* name) {
  return std::string(QNT_DATA_DIR) + "/" + name;
}

EdgeSet edge_range(int lo, int hi) {
  EdgeSet out;
  for (int k = lo; k <= hi; ++k) out.insert("P" + std::to_string(k));
  return out;
}

TEST(NaturalOrder, NumericSuffixes) {
  NaturalLess less;
  EXPECT_TRUE(less("P2", "P10"));
  EXPECT_FALSE(less("P10", "P2"));
  EXPECT_TRUE(less("A1", "B1"));
  EXPECT_TRUE(less("P1", "P1+P2"));
}

TEST(Validate, StarAndMesh19AreValid) {
  EXPECT_TRUE(validate(star_topology(kBit, kBit, kBit)).empty());
  EXPECT_TRUE(validate(mesh19_topology(kBit)).empty());
}

TEST(Validate, IsolatedNodeGivesOneConnectivityViolation) {
  Topology t = star_topology(kBit, kBit, kBit);
  t.add_node("Z", NodeKind::Internal);
  const auto v = validate(t);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "connectivity");
  EXPECT_EQ(v[0].subject, "Z");

  Topology u = star_topology(kBit, kBit, kBit);
  u.add_node("0", NodeKind::Monitor);  // sorts before every other id
  ASSERT_EQ(validate(u).size(), 1u);
}

TEST(Validate, DegreeRules) {
  Topology t;
  t.add_node("M1", NodeKind::Monitor);
  t.add_node("M2", NodeKind::Monitor);
  t.add_node("X", NodeKind::Internal);
  t.add_edge("E1", "M1", "X", kBit);
  t.add_edge("E2", "X", "M2", kBit);
  EXPECT_TRUE(validate(t).empty());
  const auto v = validate(t, true);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "internal-degree-simplified");

  t.add_edge("E3", "M1", "M2", kBit);
  bool monitor_rule = false;
  for (const auto& x : validate(t)) monitor_rule |= x.rule == "monitor-degree";
  EXPECT_TRUE(monitor_rule);
}

TEST(AddEdge, RejectsBadInput) {
  Topology t = star_topology(kBit, kBit, kBit);
  EXPECT_THROW(t.add_edge("P1", "A1", "C", kBit), TopologyError);
  EXPECT_THROW(t.add_edge("Q", "A1", "nowhere", kBit), TopologyError);
  EXPECT_THROW(t.add_edge("Q", "C", "C", kBit), TopologyError);
}

TEST(Simplify, ChainsContractsFourArms) {
  const Topology t = load_topology(data_file("chains.topo"));
  const auto s = simplify_degree2(t);
  std::set<std::string> ids;
  for (const auto& [id, e] : s.topology.edges()) ids.insert(id);
  EXPECT_EQ(ids, (std::set<std::string>{"P1+P2", "P3+P4", "P5", "P6+P7",
                                        "P8+P9"}));
  EXPECT_EQ(s.equivalents.size(), 4u);
  EXPECT_TRUE(validate(s.topology, true).empty());

  // Composite parameters against Kraus composition of the members.
  for (const auto& eq : s.equivalents) {
    auto kraus = oracle::pauli_channel_kraus(t.edge(eq.edge_ids[0]).channel);
    for (std::size_t i = 1; i < eq.edge_ids.size(); ++i)
      kraus = kraus.then(oracle::pauli_channel_kraus(t.edge(eq.edge_ids[i]).channel));
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const PauliVector1Q in{{1, p == Pauli::X ? 1.0 : 0.0,
                              p == Pauli::Y ? 1.0 : 0.0,
                              p == Pauli::Z ? 1.0 : 0.0}};
      const auto out = oracle::density_to_pauli_1q(
          oracle::evolve_kraus(oracle::pauli_to_density(in), kraus));
      EXPECT_NEAR(eq.composite.q(p), out[p], 1e-12) << eq.id;
    }
  }
}

TEST(Simplify, NoDegreeTwoIsUnchanged) {
  const Topology t = star_topology(kBit, PauliChannel(0.9, 0.8, 0.7), kBit);
  const auto s = simplify_degree2(t);
  EXPECT_TRUE(s.equivalents.empty());
  EXPECT_EQ(format_topology(s.topology), format_topology(t));
}

TEST(Simplify, ChainBecomesOneChannelOfLengthThree) {
  Topology t;
  t.add_node("M1", NodeKind::Monitor);
  t.add_node("M2", NodeKind::Monitor);
  t.add_node("A", NodeKind::Internal);
  t.add_node("B", NodeKind::Internal);
  const PauliChannel c1(0.9, 0.8, 0.7), c2(0.5, 0.6, 0.7), c3(0.8, 0.8, 0.9);
  t.add_edge("E1", "M1", "A", c1);
  t.add_edge("E2", "A", "B", c2);
  t.add_edge("E3", "B", "M2", c3);
  const auto s = simplify_degree2(t);
  ASSERT_EQ(s.equivalents.size(), 1u);
  EXPECT_EQ(s.equivalents[0].edge_ids, (std::vector<EdgeId>{"E1", "E2", "E3"}));
  EXPECT_NEAR(s.equivalents[0].composite.qx(), 0.9 * 0.5 * 0.8, 1e-15);
  EXPECT_NEAR(s.equivalents[0].composite.qz(), 0.7 * 0.7 * 0.9, 1e-15);
  EXPECT_EQ(s.topology.edge_count(), 1u);
}

TEST(Simplify, IdempotentAndConservesEdges) {
  for (const char* f : {"chains.topo", "mesh19.topo", "star.topo"}) {
    const Topology t = load_topology(data_file(f));
    const auto once = simplify_degree2(t);
    const auto twice = simplify_degree2(once.topology);
    EXPECT_TRUE(twice.equivalents.empty()) << f;
    EXPECT_EQ(format_topology(twice.topology), format_topology(once.topology));
    std::size_t simple = once.topology.edge_count(), members = 0;
    for (const auto& eq : once.equivalents) {
      members += eq.edge_ids.size();
      --simple;
    }
    EXPECT_EQ(simple + members, t.edge_count()) << f;
  }
}

TEST(Simplify, DegreeTwoCycleIsRejected) {
  Topology t;
  t.add_node("X", NodeKind::Internal);
  t.add_node("Y", NodeKind::Internal);
  t.add_node("Z", NodeKind::Internal);
  t.add_edge("E1", "X", "Y", kBit);
  t.add_edge("E2", "Y", "Z", kBit);
  t.add_edge("E3", "Z", "X", kBit);
  EXPECT_THROW(simplify_degree2(t), TopologyError);
}

TEST(Peripheral, Mesh19Layers) {
  const Topology t = mesh19_topology(kBit);
  EtchingState s = EtchingState::initial(t);
  EXPECT_EQ(s.frontier, edge_range(12, 19));
  for (const auto& e : edge_range(12, 19)) s.identified[e] = QEstimate{};
  for (const char* n : {"B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4"})
    s.effective_monitors.insert(n);
  EXPECT_EQ(peripheral_edges(t, s), edge_range(2, 11));
  for (const auto& e : edge_range(1, 19)) s.identified[e] = QEstimate{};
  EXPECT_TRUE(peripheral_edges(t, s).empty());
}

TEST(Branches, Mesh19TargetP12) {
  const Topology t = mesh19_topology(kBit);
  const auto s = EtchingState::initial(t);
  const auto b = select_mergecast_branches(t, s, "P12");
  EXPECT_EQ(b.root, "D1");
  EXPECT_EQ(b.center, "B1");
  std::set<std::vector<EdgeId>> got{b.branch_a2, b.branch_b};
  EXPECT_EQ(got, (std::set<std::vector<EdgeId>>{{"P3", "P13"},
                                                 {"P2", "P11", "P19"}}));
}

TEST(Branches, StarTargetP1) {
  const Topology t = star_topology(kBit, kBit, kBit);
  const auto b = select_mergecast_branches(t, EtchingState::initial(t), "P1");
  EXPECT_EQ(b.root, "A1");
  EXPECT_EQ(b.center, "C");
  EXPECT_EQ(b.branch_a2, (std::vector<EdgeId>{"P2"}));
  EXPECT_EQ(b.branch_b, (std::vector<EdgeId>{"P3"}));
}

TEST(Branches, BridgeTargetFails) {
  Topology t;
  for (const char* m : {"A", "B", "D"}) t.add_node(m, NodeKind::Monitor);
  t.add_node("X", NodeKind::Internal);
  t.add_node("Y", NodeKind::Internal);
  t.add_edge("E1", "A", "X", kBit);
  t.add_edge("E2", "X", "Y", kBit);
  t.add_edge("E3", "Y", "B", kBit);
  t.add_edge("E4", "Y", "D", kBit);
  EXPECT_THROW(select_mergecast_branches(t, EtchingState::initial(t), "E1"),
               BranchSelectionError);
}

TEST(Branches, DisjointAndInteriorFreeOfMonitorsOnMesh19) {
  const Topology t = mesh19_topology(kBit);
  const auto s = EtchingState::initial(t);
  for (const auto& target : s.frontier) {
    const auto b = select_mergecast_branches(t, s, target);
    EdgeSet used{target};
    for (const auto* path : {&b.branch_a2, &b.branch_b}) {
      NodeId cur = b.center;
      for (std::size_t i = 0; i < path->size(); ++i) {
        EXPECT_TRUE(used.insert((*path)[i]).second) << target;
        cur = t.edge((*path)[i]).other(cur);
        if (i + 1 < path->size()) {
          EXPECT_FALSE(s.effective_monitors.count(cur));
        }
      }
      EXPECT_TRUE(s.effective_monitors.count(cur));
    }
    EXPECT_NE(b.end_a2, b.end_b);
  }
}

TEST(Branches, SmallMeshYieldsDisjointBranches) {
  Topology t;
  for (const char* m : {"R", "M1", "M2"}) t.add_node(m, NodeKind::Monitor);
  for (const char* n : {"X", "U", "V", "W"}) t.add_node(n, NodeKind::Internal);
  t.add_edge("T", "R", "X", kBit);
  t.add_edge("a", "X", "U", kBit);
  t.add_edge("b", "U", "M1", kBit);
  t.add_edge("c", "X", "V", kBit);
  t.add_edge("d", "V", "U", kBit);
  t.add_edge("e", "V", "W", kBit);
  t.add_edge("f", "W", "M2", kBit);
  t.add_edge("g", "X", "W", kBit);
  ASSERT_TRUE(validate(t).empty());
  const auto b = select_mergecast_branches(t, EtchingState::initial(t), "T");
  EXPECT_NE(b.end_a2, b.end_b);
  EdgeSet used;
  for (const auto& e : b.branch_a2) EXPECT_TRUE(used.insert(e).second);
  for (const auto& e : b.branch_b) EXPECT_TRUE(used.insert(e).second);
}

}  // namespace
}  // namespace qnt
