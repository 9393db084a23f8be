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

#include <set>

#include "qnt/etching.hpp"

namespace qnt {
namespace {

const PauliChannel kBit = PauliChannel::bit_flip(0.1);
constexpr Basis kZOnly[] = {Basis::Z};

const EtchingStep& step_for(const std::vector<EtchingStep>& steps,
                            const EdgeId& e) {
  for (const auto& s : steps)
    if (s.edge == e) return s;
  throw std::out_of_range(e);
}

std::set<std::vector<EdgeId>> branches(const EtchingStep& s) {
  return {s.plan.branch_a2, s.plan.branch_b};
}

TEST(EtchingPlan, Mesh19ThreeRounds) {
  const auto steps = plan_progressive_etching(mesh19_topology(kBit));
  ASSERT_EQ(steps.size(), 19u);
  for (const auto& s : steps) {
    const int k = std::stoi(s.edge.substr(1));
    const int want = k >= 12 ? 1 : k >= 2 ? 2 : 3;
    EXPECT_EQ(s.round, want) << s.edge;
  }
  // Within a round the order is ascending edge id.
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].round == steps[i - 1].round) {
      EXPECT_TRUE(NaturalLess{}(steps[i - 1].edge, steps[i].edge));
    } else {
      EXPECT_EQ(steps[i].round, steps[i - 1].round + 1);
    }
  }
}

TEST(EtchingPlan, Mesh19Layouts) {
  const auto steps = plan_progressive_etching(mesh19_topology(kBit));
  const auto& p12 = step_for(steps, "P12");
  EXPECT_EQ(p12.plan.center, "B1");
  EXPECT_EQ(branches(p12), (std::set<std::vector<EdgeId>>{{"P3", "P13"},
                                                          {"P2", "P11", "P19"}}));
  EXPECT_TRUE(p12.root_access.empty());

  const auto& p2 = step_for(steps, "P2");
  EXPECT_EQ(p2.plan.root, "B1");
  EXPECT_EQ(p2.plan.center, "A1");
  EXPECT_EQ(branches(p2), (std::set<std::vector<EdgeId>>{{"P11"}, {"P1", "P6"}}));
  EXPECT_EQ(p2.root_access, (std::vector<EdgeId>{"P12"}));

  const auto& p1 = step_for(steps, "P1");
  EXPECT_EQ(p1.plan.root, "A1");
  EXPECT_EQ(p1.plan.center, "A2");
  EXPECT_EQ(p1.root_access, (std::vector<EdgeId>{"P12", "P2"}));
  EXPECT_EQ(branches(p1), (std::set<std::vector<EdgeId>>{{"P6"}, {"P7"}}));
}

TEST(Etching, Mesh19EstimatesAllEdgesNearTruth) {
  RandomStream stream(11, 0, 0);
  const auto r = run_progressive_etching(mesh19_topology(kBit), SpamModel{},
                                         {200000, 200000}, stream, kZOnly);
  ASSERT_EQ(r.estimates.size(), 19u);
  EXPECT_EQ(r.rounds, 3);
  for (const auto& [e, q] : r.estimates) {
    EXPECT_NEAR(q.qz, 0.8, 0.06) << e;
    EXPECT_TRUE(std::isnan(q.qx));
  }
}

TEST(Etching, AllBasesWithSpam) {
  const Topology t = star_topology(PauliChannel(0.9, 0.7, 0.8),
                                   PauliChannel(0.6, 0.8, 0.7),
                                   PauliChannel(0.8, 0.7, 0.6));
  RandomStream stream(12, 0, 0);
  const SpamModel spam{0.95, 0.9};
  const auto r = run_progressive_etching(t, spam, {400000, 400000}, stream);
  ASSERT_EQ(r.estimates.size(), 3u);
  EXPECT_EQ(r.rounds, 1);
  for (const auto& [e, q] : r.estimates)
    for (Basis b : kAllBases)
      EXPECT_NEAR(q.get(b), t.edge(e).channel.q(pauli_of(b)), 0.06) << e;
}

TEST(Etching, DeterministicForFixedSeed) {
  const Topology t = mesh19_topology(kBit);
  RandomStream a(13, 0, 0), b(13, 0, 0);
  const auto ra = run_progressive_etching(t, SpamModel{}, {1000, 1000}, a);
  const auto rb = run_progressive_etching(t, SpamModel{}, {1000, 1000}, b);
  for (const auto& [e, q] : ra.estimates) {
    const auto& o = rb.estimates.at(e);
    EXPECT_EQ(q.qx, o.qx);
    EXPECT_EQ(q.qy, o.qy);
    EXPECT_EQ(q.qz, o.qz);
  }
}

TEST(Etching, UnetchableEdgeReportsEdge) {
  Topology t;
  for (const char* m : {"A", "B", "D"}) t.add_node(m, NodeKind::Monitor);
  t.add_node("X", NodeKind::Internal);
  t.add_node("Y", NodeKind::Internal);
  t.add_edge("E1", "A", "X", kBit);
  t.add_edge("E2", "X", "Y", kBit);
  t.add_edge("E3", "Y", "B", kBit);
  t.add_edge("E4", "Y", "D", kBit);
  try {
    plan_progressive_etching(t);
    FAIL() << "expected EtchingError";
  } catch (const EtchingError& e) {
    EXPECT_EQ(e.edge(), "E1");
  }
}

TEST(Etching, DegenerateEstimateIsAttributed) {
  const Topology t = star_topology(PauliChannel(1, 0, 0), kBit, kBit);
  RandomStream stream(14, 0, 0);
  EXPECT_THROW(run_progressive_etching(t, SpamModel{}, {100, 100}, stream),
               EtchingError);
}

TEST(Bypass, RouteIsSimpleMonitorToMonitorPath) {
  const Topology t = mesh19_topology(kBit);
  for (const auto& [id, e] : t.edges()) {
    const auto r = bypass_route(t, id);
    std::vector<EdgeId> full = r.before;
    full.push_back(id);
    full.insert(full.end(), r.after.begin(), r.after.end());
    // Walk from whichever monitor the path starts at.
    NodeId start = t.edge(full.front()).a;
    if (!t.is_monitor(start)) start = t.edge(full.front()).b;
    ASSERT_TRUE(t.is_monitor(start)) << id;
    std::set<NodeId> seen{start};
    NodeId cur = start;
    for (const auto& x : full) {
      cur = t.edge(x).other(cur);
      EXPECT_TRUE(seen.insert(cur).second) << id;
    }
    EXPECT_TRUE(t.is_monitor(cur)) << id;
  }
}

TEST(Bypass, EstimatesNearTruth) {
  const Topology t = mesh19_topology(kBit);
  RandomStream stream(15, 0, 0);
  const auto est = run_bypass_unicast(t, SpamModel{}, 100000, stream,
                                      {"P1", "P5", "P12"}, kZOnly);
  for (const auto& [e, q] : est) EXPECT_NEAR(q.qz, 0.8, 0.02) << e;
}

}  // namespace
}  // namespace qnt
