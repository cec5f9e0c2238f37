// SPDX-License-Identifier: Apache-2.0
// Shared fixtures for the test suites: small signatures, a random graph
// generator, and brute-force oracles that are independent of the library's
// canonical-form machinery.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "strigraph/graph_ops.hpp"
#include "strigraph/string_graph.hpp"
#include "strigraph/tensor_eval.hpp"

namespace strigraph::fixtures {

/// O = {A, B, C}; f : A (x) B -> C, g : C -> C.
inline SignaturePtr sig_abc() {
  return make_signature({{"A", 2}, {"B", 3}, {"C", 2}},
                        {{"f", {"A", "B"}, {"C"}, DataKind::kNone}, {"g", {"C"}, {"C"}, DataKind::kNone}});
}

/// One object Q with a white and a black Frobenius-shaped family.
inline SignaturePtr sig_frob(int dim = 2) {
  return make_signature({{"Q", dim}}, {{"w_mul", {"Q", "Q"}, {"Q"}, DataKind::kNone},
                                     {"w_unit", {}, {"Q"}, DataKind::kNone},
                                     {"w_comul", {"Q"}, {"Q", "Q"}, DataKind::kNone},
                                     {"w_counit", {"Q"}, {}, DataKind::kNone},
                                     {"b_mul", {"Q", "Q"}, {"Q"}, DataKind::kNone},
                                     {"b_unit", {}, {"Q"}, DataKind::kNone},
                                     {"b_comul", {"Q"}, {"Q", "Q"}, DataKind::kNone},
                                     {"b_counit", {"Q"}, {}, DataKind::kNone},
                                     {"t", {"Q"}, {"Q"}, DataKind::kNone},
                                     {"phase", {"Q"}, {"Q"}, DataKind::kAngle}});
}

/// Adds box `m` with a fresh wire-vertex on every port.
/// Returns {box, input wires, output wires}.
struct BoxPorts {
  VertexId box;
  std::vector<VertexId> ins;
  std::vector<VertexId> outs;
};

inline BoxPorts add_box_with_ports(StringGraph& g, std::string_view m, VertexData data = {}) {
  const auto& sig = g.sig();
  const auto mi = sig.require_morphism(m);
  BoxPorts p{g.add_box(mi, std::move(data)), {}, {}};
  for (std::uint32_t i = 0; i < sig.arity_in(mi); ++i) {
    VertexId w = g.add_wire(sig.dom_type(mi, i));
    g.connect(w, p.box, i);
    p.ins.push_back(w);
  }
  for (std::uint32_t j = 0; j < sig.arity_out(mi); ++j) {
    VertexId w = g.add_wire(sig.cod_type(mi, j));
    g.connect(p.box, w, j);
    p.outs.push_back(w);
  }
  return p;
}

/// Graph consisting of a single box with its port wire-vertices.
inline StringGraph single_box(const SignaturePtr& sig, std::string_view m, VertexData data = {}) {
  StringGraph g(sig);
  add_box_with_ports(g, m, std::move(data));
  g.refresh_boundary_orders();
  return g;
}

/// Random valid string graph with at most `max_vertices` vertices.
inline StringGraph random_graph(const SignaturePtr& sig, std::mt19937_64& rng, std::size_t max_vertices = 30,
                                int max_boxes = 4) {
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  StringGraph g(sig);
  const auto n_mor = static_cast<int>(sig->morphisms().size());
  const auto n_obj = static_cast<int>(sig->objects().size());
  const int boxes = uniform(0, max_boxes);
  for (int b = 0; b < boxes && g.num_vertices() + 8 < max_vertices; ++b) {
    const auto m = static_cast<std::uint32_t>(uniform(0, n_mor - 1));
    VertexData data;
    if (sig->morphism(m).data_kind == DataKind::kAngle) data = Angle(uniform(0, 7), 4);
    if (sig->morphism(m).data_kind == DataKind::kOpaque) data = std::string("tok");
    auto ports = add_box_with_ports(g, sig->morphism(m).name, data);
    for (EdgeId e : std::vector<EdgeId>(g.in_edges(ports.box))) {
      if (coin(0.3)) expand_wire_in_place(g, e, 1);
    }
  }
  if (n_obj > 0) {
    const int extras = uniform(0, 3);
    for (int i = 0; i < extras && g.num_vertices() + 4 < max_vertices; ++i) {
      const auto type = static_cast<std::uint32_t>(uniform(0, n_obj - 1));
      const int len = uniform(1, 4);
      std::vector<VertexId> chain;
      for (int k = 0; k < len; ++k) chain.push_back(g.add_wire(type));
      for (int k = 0; k + 1 < len; ++k) g.connect(chain[k], chain[k + 1]);
      if (coin(0.5)) g.add_edge(Edge{chain.back(), chain.front(), EdgeKind::kMid, type, 0});
    }
  }
  // Random feedback/plugging joins between outputs and inputs of equal type.
  g.refresh_boundary_orders();
  for (int round = 0; round < 4; ++round) {
    std::vector<VertexId> outs, ins;
    for (const auto& [id, rec] : g.vertices()) {
      if (g.is_output(id) && !g.is_input(id)) outs.push_back(id);
      if (g.is_input(id) && !g.is_output(id)) ins.push_back(id);
    }
    if (outs.empty() || ins.empty() || !coin(0.6)) break;
    VertexId o = outs[uniform(0, static_cast<int>(outs.size()) - 1)];
    VertexId i = ins[uniform(0, static_cast<int>(ins.size()) - 1)];
    if (o == i || g.vertex(o).type != g.vertex(i).type) continue;
    g = self_plug(g, o, i);
  }
  // Stretch a few wires.
  for (int k = uniform(0, 3); k > 0 && g.num_edges() > 0 && g.num_vertices() < max_vertices; --k) {
    auto it = g.edges().begin();
    std::advance(it, uniform(0, static_cast<int>(g.edges().size()) - 1));
    expand_wire_in_place(g, it->first, 1);
  }
  g.refresh_boundary_orders();
  auto ins = g.input_order();
  auto outs = g.output_order();
  std::shuffle(ins.begin(), ins.end(), rng);
  std::shuffle(outs.begin(), outs.end(), rng);
  g.set_input_order(ins);
  g.set_output_order(outs);
  return g;
}

/// Copy of g with ids permuted randomly (same structure, fresh ids).
inline StringGraph shuffled_copy(const StringGraph& g, std::mt19937_64& rng) {
  std::vector<VertexId> ids;
  for (const auto& [id, rec] : g.vertices()) ids.push_back(id);
  std::shuffle(ids.begin(), ids.end(), rng);
  StringGraph out(g.signature());
  std::map<VertexId, VertexId> m;
  std::uint64_t next = 1000;
  for (VertexId v : ids) {
    VertexId fresh{next};
    next += 3;
    out.insert_vertex(fresh, g.vertex(v));
    m.emplace(v, fresh);
  }
  std::vector<EdgeId> eids;
  for (const auto& [id, e] : g.edges()) eids.push_back(id);
  std::shuffle(eids.begin(), eids.end(), rng);
  for (EdgeId e : eids) {
    Edge copy = g.edge(e);
    copy.src = m.at(copy.src);
    copy.tgt = m.at(copy.tgt);
    out.insert_edge(EdgeId{next}, copy);
    next += 3;
  }
  std::vector<VertexId> ins, outs;
  for (VertexId v : g.input_order()) ins.push_back(m.at(v));
  for (VertexId v : g.output_order()) outs.push_back(m.at(v));
  out.set_input_order(ins);
  out.set_output_order(outs);
  return out;
}

/// Exhaustive bijection search: tries every kind/type/data-preserving vertex
/// bijection and checks edges and boundary orders directly.
inline bool brute_force_isomorphic(const StringGraph& g, const StringGraph& h, bool ordered_boundary = true) {
  if (g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges()) return false;
  std::vector<VertexId> gv, hv;
  for (const auto& [id, rec] : g.vertices()) gv.push_back(id);
  for (const auto& [id, rec] : h.vertices()) hv.push_back(id);
  using EKey = std::tuple<VertexId, VertexId, EdgeKind, std::uint32_t, std::uint32_t>;
  std::multiset<EKey> hedges;
  for (const auto& [id, e] : h.edges()) hedges.emplace(e.src, e.tgt, e.kind, e.type, e.port);
  std::map<VertexId, VertexId> m;
  std::set<VertexId> used;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == gv.size()) {
      std::multiset<EKey> mapped;
      for (const auto& [id, e] : g.edges()) mapped.emplace(m.at(e.src), m.at(e.tgt), e.kind, e.type, e.port);
      if (mapped != hedges) return false;
      if (ordered_boundary) {
        for (std::size_t k = 0; k < g.input_order().size(); ++k) {
          if (m.at(g.input_order()[k]) != h.input_order()[k]) return false;
        }
        for (std::size_t k = 0; k < g.output_order().size(); ++k) {
          if (m.at(g.output_order()[k]) != h.output_order()[k]) return false;
        }
      }
      return g.input_order().size() == h.input_order().size() && g.output_order().size() == h.output_order().size();
    }
    const Vertex& a = g.vertex(gv[i]);
    for (VertexId cand : hv) {
      if (used.count(cand)) continue;
      const Vertex& b = h.vertex(cand);
      if (a.kind != b.kind || a.type != b.type || a.data != b.data) continue;
      if (g.in_edges(gv[i]).size() != h.in_edges(cand).size()) continue;
      if (g.out_edges(gv[i]).size() != h.out_edges(cand).size()) continue;
      m[gv[i]] = cand;
      used.insert(cand);
      if (rec(i + 1)) return true;
      used.erase(cand);
      m.erase(gv[i]);
    }
    return false;
  };
  return rec(0);
}

/// Tensor with the given index types and uniform random complex entries.
inline Tensor random_tensor(IndexTypes upper, IndexTypes lower, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(std::move(upper), std::move(lower));
  for (Eigen::Index k = 0; k < t.entries().size(); ++k) t.entries()(k) = Complex(u(rng), u(rng));
  return t;
}

/// Random generic valuation; data-carrying generators get a tensor that
/// depends on the angle.
inline Valuation random_valuation(const SignaturePtr& sig, std::mt19937_64& rng) {
  Valuation v(sig);
  for (std::uint32_t m = 0; m < sig->morphisms().size(); ++m) {
    const auto& name = sig->morphism(m).name;
    Tensor base = random_tensor(v.cod_types(m), v.dom_types(m), rng);
    if (sig->morphism(m).data_kind == DataKind::kAngle) {
      v.set_data(name, [base](const VertexData& d) {
        const double a = std::holds_alternative<Angle>(d) ? std::get<Angle>(d).radians() : 0.0;
        return std::polar(1.0, a) * base;
      });
    } else if (sig->morphism(m).data_kind == DataKind::kOpaque) {
      v.set_data(name, [base](const VertexData&) { return base; });
    } else {
      v.set(name, base);
    }
  }
  return v;
}

}  // namespace strigraph::fixtures
