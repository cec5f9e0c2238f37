// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "strigraph/graph_ops.hpp"
#include "strigraph/iso.hpp"
#include "support.hpp"

using namespace strigraph;
using strigraph::fixtures::add_box_with_ports;
using strigraph::fixtures::brute_force_isomorphic;
using strigraph::fixtures::random_graph;
using strigraph::fixtures::shuffled_copy;
using strigraph::fixtures::single_box;

namespace {

bool has_kind(const std::vector<Violation>& vs, std::string_view kind) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::vector<VertexId> add_chain(StringGraph& g, std::string_view type, int n) {
  std::vector<VertexId> out;
  for (int i = 0; i < n; ++i) out.push_back(g.add_wire(type));
  for (int i = 0; i + 1 < n; ++i) g.connect(out[i], out[i + 1]);
  return out;
}

StringGraph contract_randomly(StringGraph g, std::mt19937_64& rng) {
  for (auto sites = contraction_sites(g); !sites.empty(); sites = contraction_sites(g)) {
    g = contract_at(g, sites[rng() % sites.size()]);
  }
  return g;
}

}  // namespace

TEST(Validate, WireWithTwoOutEdges) {
  StringGraph g(strigraph::fixtures::sig_abc());
  VertexId a = g.add_wire("C");
  g.connect(a, g.add_wire("C"));
  g.connect(a, g.add_wire("C"));
  g.refresh_boundary_orders();
  EXPECT_TRUE(has_kind(validate(g), "WireOutDegree"));
}

TEST(Validate, BoxWithExactPorts) {
  StringGraph g = single_box(strigraph::fixtures::sig_abc(), "f");
  EXPECT_TRUE(validate(g).empty());
}

TEST(Validate, BoxMissingPort) {
  auto sig = strigraph::fixtures::sig_abc();
  StringGraph g(sig);
  VertexId f = g.add_box("f");
  g.connect(g.add_wire("A"), f, 0);
  g.connect(f, g.add_wire("C"), 0);
  g.refresh_boundary_orders();
  auto vs = validate(g);
  ASSERT_TRUE(has_kind(vs, "LocalIsoViolation"));
}

TEST(Validate, TagMismatchAndStaleOrder) {
  auto sig = strigraph::fixtures::sig_abc();
  StringGraph g(sig);
  VertexId a = g.add_wire("A");
  VertexId c = g.add_wire("C");
  g.add_edge(Edge{a, c, EdgeKind::kMid, sig->require_object("A"), 0});
  g.refresh_boundary_orders();
  EXPECT_TRUE(has_kind(validate(g), "TagMismatch"));

  StringGraph h(sig);
  VertexId x = h.add_wire("A");
  h.set_input_order({});
  h.set_output_order({x});
  EXPECT_TRUE(has_kind(validate(h), "InputOrderMismatch"));
  try {
    boundary(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStaleOrder);
  }
}

TEST(Boundary, Examples) {
  auto frob = strigraph::fixtures::sig_frob();
  StringGraph iso(frob);
  VertexId v = iso.add_wire("Q");
  iso.refresh_boundary_orders();
  auto b = boundary(iso);
  EXPECT_EQ(b.inputs, std::vector<VertexId>{v});
  EXPECT_EQ(b.outputs, std::vector<VertexId>{v});

  StringGraph eta = single_box(frob, "w_unit");
  b = boundary(eta);
  EXPECT_TRUE(b.inputs.empty());
  ASSERT_EQ(b.outputs.size(), 1u);

  StringGraph chain(frob);
  auto ws = add_chain(chain, "Q", 2);
  chain.refresh_boundary_orders();
  b = boundary(chain);
  EXPECT_EQ(b.inputs, std::vector<VertexId>{ws[0]});
  EXPECT_EQ(b.outputs, std::vector<VertexId>{ws[1]});
}

TEST(NormalizeWires, BoxToBoxWireCollapsesToOneVertex) {
  auto sig = strigraph::fixtures::sig_abc();
  StringGraph g(sig);
  VertexId f = g.add_box("f");
  VertexId h = g.add_box("g");
  g.connect(g.add_wire("A"), f, 0);
  g.connect(g.add_wire("B"), f, 1);
  auto chain = add_chain(g, "C", 3);
  g.connect(f, chain.front(), 0);
  g.connect(chain.back(), h, 0);
  g.connect(h, g.add_wire("C"), 0);
  g.refresh_boundary_orders();
  ASSERT_TRUE(validate(g).empty());
  StringGraph n = normalize_wires(g);
  EXPECT_TRUE(validate(n).empty());
  EXPECT_EQ(n.num_wires(), 4u);
  EXPECT_EQ(n.num_edges(), 5u);
  EXPECT_TRUE(is_minimal(n));
  EXPECT_FALSE(is_minimal(g));
}

TEST(NormalizeWires, CircleCollapsesToSelfLoop) {
  StringGraph g(strigraph::fixtures::sig_frob());
  auto c = add_chain(g, "Q", 4);
  g.connect(c.back(), c.front());
  g.refresh_boundary_orders();
  StringGraph n = normalize_wires(g);
  ASSERT_EQ(n.num_vertices(), 1u);
  ASSERT_EQ(n.num_edges(), 1u);
  const Edge& e = n.edges().begin()->second;
  EXPECT_EQ(e.src, e.tgt);
  EXPECT_TRUE(n.input_order().empty());
  EXPECT_TRUE(n.output_order().empty());
}

TEST(NormalizeWires, MinimalGraphIsFixpoint) {
  StringGraph g = single_box(strigraph::fixtures::sig_abc(), "f");
  EXPECT_TRUE(is_minimal(g));
  EXPECT_EQ(normalize_wires(g), g);
}

TEST(NormalizeWires, StrandKeepsTwoVerticesAndBoundaryIds) {
  StringGraph g(strigraph::fixtures::sig_frob());
  auto c = add_chain(g, "Q", 5);
  g.refresh_boundary_orders();
  StringGraph n = normalize_wires(g);
  EXPECT_EQ(n.num_vertices(), 2u);
  EXPECT_EQ(n.input_order(), std::vector<VertexId>{c.front()});
  EXPECT_EQ(n.output_order(), std::vector<VertexId>{c.back()});
}

TEST(WireHomeomorphic, Examples) {
  auto frob = strigraph::fixtures::sig_frob();
  StringGraph g = single_box(frob, "w_mul");
  StringGraph longer = expand_wire(g, g.edges().begin()->first, 3);
  EXPECT_TRUE(wire_homeomorphic(g, longer));

  StringGraph circle(frob);
  auto c = add_chain(circle, "Q", 2);
  circle.connect(c[1], c[0]);
  circle.refresh_boundary_orders();
  StringGraph strand(frob);
  add_chain(strand, "Q", 2);
  strand.refresh_boundary_orders();
  EXPECT_FALSE(wire_homeomorphic(circle, strand));

  EXPECT_FALSE(wire_homeomorphic(single_box(frob, "w_mul"), single_box(frob, "b_mul")));
  EXPECT_THROW(wire_homeomorphic(g, single_box(strigraph::fixtures::sig_abc(), "f")), Error);
}

TEST(Isomorphic, RelabeledCopyAndBoxCounts) {
  std::mt19937_64 rng(11);
  StringGraph g = random_graph(strigraph::fixtures::sig_frob(), rng);
  StringGraph h = shuffled_copy(g, rng);
  EXPECT_TRUE(isomorphic(g, h).has_value());
  StringGraph bigger = disjoint_union(g, single_box(g.signature(), "t"));
  EXPECT_FALSE(isomorphic(g, bigger).has_value());
}

TEST(Isomorphic, ThreeBoxGraphsDifferingInOneEdge) {
  // w_mul with both inputs fed by t boxes; variant b feeds the second t from
  // w_mul's output instead, which the bijection oracle also rejects.
  auto frob = strigraph::fixtures::sig_frob();
  auto build = [&](bool swap_ports) {
    StringGraph g(frob);
    auto m = add_box_with_ports(g, "w_mul");
    auto t1 = add_box_with_ports(g, "t");
    auto t2 = add_box_with_ports(g, "phase", Angle(1, 2));
    g = self_plug(g, t1.outs[0], swap_ports ? m.ins[1] : m.ins[0]);
    g = self_plug(g, t2.outs[0], swap_ports ? m.ins[0] : m.ins[1]);
    g.refresh_boundary_orders();
    return g;
  };
  StringGraph a = build(false);
  StringGraph b = build(true);
  EXPECT_FALSE(brute_force_isomorphic(a, b));
  EXPECT_FALSE(isomorphic(a, b).has_value());
  EXPECT_FALSE(isomorphic_unordered(a, b).has_value());
  EXPECT_TRUE(isomorphic(a, build(false)).has_value());
}

TEST(Isomorphic, AgreesWithBruteForceOnSmallRandomGraphs) {
  std::mt19937_64 rng(2024);
  auto frob = strigraph::fixtures::sig_frob();
  int agree_true = 0;
  for (int trial = 0; trial < 300; ++trial) {
    StringGraph g = normalize_wires(random_graph(frob, rng, 9, 2));
    StringGraph h = trial % 2 == 0 ? shuffled_copy(g, rng) : normalize_wires(random_graph(frob, rng, 9, 2));
    if (g.num_vertices() > 8 || h.num_vertices() > 8) continue;
    const bool oracle = brute_force_isomorphic(g, h);
    EXPECT_EQ(isomorphic(g, h).has_value(), oracle) << "trial " << trial;
    EXPECT_EQ(canonical_key(g) == canonical_key(h), oracle) << "trial " << trial;
    EXPECT_EQ(isomorphic_unordered(g, h).has_value(), brute_force_isomorphic(g, h, false)) << "trial " << trial;
    agree_true += oracle;
  }
  EXPECT_GT(agree_true, 50);
}

TEST(Isomorphic, ReturnedMapIsAnIsomorphism) {
  std::mt19937_64 rng(5);
  auto frob = strigraph::fixtures::sig_frob();
  for (int trial = 0; trial < 100; ++trial) {
    StringGraph g = random_graph(frob, rng);
    StringGraph h = shuffled_copy(g, rng);
    auto m = isomorphic(g, h);
    ASSERT_TRUE(m);
    ASSERT_EQ(m->vertices.size(), g.num_vertices());
    for (const auto& [gv, hv] : m->vertices) {
      EXPECT_EQ(g.vertex(gv).kind, h.vertex(hv).kind);
      EXPECT_EQ(g.vertex(gv).type, h.vertex(hv).type);
      EXPECT_EQ(g.vertex(gv).data, h.vertex(hv).data);
    }
    ASSERT_EQ(m->edges.size(), g.num_edges());
    for (const auto& [ge, he] : m->edges) {
      const Edge& a = g.edge(ge);
      const Edge& b = h.edge(he);
      EXPECT_EQ(m->vertices.at(a.src), b.src);
      EXPECT_EQ(m->vertices.at(a.tgt), b.tgt);
      EXPECT_EQ(a.kind, b.kind);
      EXPECT_EQ(a.port, b.port);
    }
    for (std::size_t i = 0; i < g.input_order().size(); ++i) {
      EXPECT_EQ(m->vertices.at(g.input_order()[i]), h.input_order()[i]);
    }
  }
}

TEST(Isomorphic, EquivalenceRelation) {
  std::mt19937_64 rng(77);
  auto frob = strigraph::fixtures::sig_frob();
  std::vector<StringGraph> pool;
  for (int i = 0; i < 12; ++i) {
    StringGraph g = random_graph(frob, rng, 14, 3);
    pool.push_back(g);
    pool.push_back(shuffled_copy(g, rng));
  }
  for (const auto& a : pool) {
    EXPECT_TRUE(isomorphic(a, a));
    for (const auto& b : pool) {
      const bool ab = isomorphic(a, b).has_value();
      EXPECT_EQ(ab, isomorphic(b, a).has_value());
      if (!ab) continue;
      for (const auto& c : pool) {
        if (isomorphic(b, c)) EXPECT_TRUE(isomorphic(a, c));
      }
    }
  }
}

TEST(Plug, UnitIntoCounitGivesScalar) {
  auto frob = strigraph::fixtures::sig_frob();
  StringGraph eta = single_box(frob, "w_unit");
  StringGraph eps = single_box(frob, "w_counit");
  StringGraph s = plug(eta, eps, {{eta.output_order()[0], eps.input_order()[0]}});
  EXPECT_TRUE(validate(s).empty());
  EXPECT_EQ(s.num_boxes(), 2u);
  EXPECT_EQ(s.num_wires(), 1u);
  EXPECT_TRUE(s.input_order().empty());
  EXPECT_TRUE(s.output_order().empty());
}

TEST(Plug, InputsPairedTogetherAreRejected) {
  auto frob = strigraph::fixtures::sig_frob();
  StringGraph a = single_box(frob, "t");
  StringGraph b = single_box(frob, "t");
  try {
    plug(a, b, {{a.input_order()[0], b.input_order()[0]}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotBoundaryCoherent);
  }
  StringGraph f = single_box(strigraph::fixtures::sig_abc(), "f");
  StringGraph g = single_box(f.signature(), "f");
  try {
    plug(f, g, {{f.output_order()[0], g.input_order()[0]}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTypeMismatch);
  }
}

TEST(Plug, PseudoIdentityStrandThenNormalize) {
  std::mt19937_64 rng(3);
  auto frob = strigraph::fixtures::sig_frob();
  for (int trial = 0; trial < 50; ++trial) {
    StringGraph g = normalize_wires(random_graph(frob, rng));
    // Isolated vertices would grow into two-vertex strands.
    if (std::any_of(g.vertices().begin(), g.vertices().end(), [&](const auto& kv) { return g.is_isolated(kv.first); })) {
      continue;
    }
    std::vector<std::pair<VertexId, VertexId>> pairs;
    StringGraph strands(frob);
    for (VertexId o : g.output_order()) {
      auto s = add_chain(strands, "Q", 2);
      pairs.emplace_back(o, s[0]);
    }
    strands.refresh_boundary_orders();
    StringGraph p = plug(g, strands, pairs);
    EXPECT_EQ(p.num_vertices(), g.num_vertices() + strands.num_vertices() - pairs.size());
    EXPECT_TRUE(validate(p).empty());
    EXPECT_TRUE(isomorphic(normalize_wires(p), g)) << "trial " << trial;
  }
}

TEST(DisjointUnion, Examples) {
  auto frob = strigraph::fixtures::sig_frob();
  StringGraph g = single_box(frob, "w_mul");
  StringGraph empty(frob);
  EXPECT_TRUE(isomorphic(disjoint_union(g, empty), g));
  StringGraph h = single_box(frob, "b_comul");
  GlueResult u = disjoint_union_with_maps(g, h);
  EXPECT_EQ(u.graph.num_vertices(), g.num_vertices() + h.num_vertices());
  std::vector<VertexId> expected_in;
  for (VertexId v : g.input_order()) expected_in.push_back(u.from_left.at(v));
  for (VertexId v : h.input_order()) expected_in.push_back(u.from_right.at(v));
  EXPECT_EQ(u.graph.input_order(), expected_in);
  EXPECT_THROW(disjoint_union(g, single_box(strigraph::fixtures::sig_abc(), "g")), Error);
}

TEST(ExpandWire, Examples) {
  auto sig = strigraph::fixtures::sig_abc();
  StringGraph g = single_box(sig, "g");
  EdgeId in_edge = *g.out_edge(g.input_order()[0]);
  StringGraph e1 = expand_wire(g, in_edge, 1);
  EXPECT_EQ(e1.num_vertices(), g.num_vertices() + 1);
  EXPECT_EQ(e1.num_edges(), g.num_edges() + 1);
  // The tagged edge still enters the box.
  VertexId box{};
  for (const auto& [id, rec] : e1.vertices()) {
    if (rec.vertex.is_box()) box = id;
  }
  const Edge& tagged = e1.edge(e1.in_edges(box).front());
  EXPECT_EQ(tagged.kind, EdgeKind::kIn);
  EXPECT_TRUE(e1.vertex(tagged.src).is_wire());
  EXPECT_NE(tagged.src, g.input_order()[0]);
  EXPECT_TRUE(isomorphic(normalize_wires(expand_wire(g, in_edge, 4)), g));

  StringGraph strand(sig);
  add_chain(strand, "A", 2);
  strand.refresh_boundary_orders();
  StringGraph s2 = expand_wire(strand, strand.edges().begin()->first, 1);
  EXPECT_EQ(s2.num_vertices(), 3u);
  EXPECT_EQ(s2.num_edges(), 2u);
  EXPECT_THROW(expand_wire(g, EdgeId{999}, 1), Error);
}

TEST(Properties, NormalizationOnRandomGraphs) {
  std::mt19937_64 rng(99);
  for (auto sig : {strigraph::fixtures::sig_frob(), strigraph::fixtures::sig_abc()}) {
    for (int trial = 0; trial < 200; ++trial) {
      StringGraph g = random_graph(sig, rng);
      ASSERT_TRUE(validate(g).empty()) << "trial " << trial;
      StringGraph n = normalize_wires(g);
      EXPECT_TRUE(validate(n).empty());
      EXPECT_EQ(normalize_wires(n), n);
      EXPECT_TRUE(is_minimal(n));
      EXPECT_EQ(input_types(n), input_types(g));
      EXPECT_EQ(output_types(n), output_types(g));
      EXPECT_EQ(n.input_order(), g.input_order());
      EXPECT_EQ(n.output_order(), g.output_order());
      EXPECT_TRUE(wire_homeomorphic(g, n));
    }
  }
}

TEST(Properties, ContractionOrdersAreConfluent) {
  std::mt19937_64 rng(123);
  auto frob = strigraph::fixtures::sig_frob();
  for (int trial = 0; trial < 60; ++trial) {
    StringGraph g = random_graph(frob, rng);
    StringGraph reference = normalize_wires(g);
    for (int order = 0; order < 5; ++order) {
      StringGraph r = contract_randomly(g, rng);
      EXPECT_TRUE(is_minimal(r));
      EXPECT_TRUE(isomorphic(r, reference)) << "trial " << trial;
    }
  }
}
