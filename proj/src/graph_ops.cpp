// SPDX-License-Identifier: Apache-2.0
#include "strigraph/graph_ops.hpp"

#include <set>

#include "strigraph/iso.hpp"

namespace strigraph {

namespace {

std::optional<VertexId> wire_pred(const StringGraph& g, VertexId v) {
  auto e = g.in_edge(v);
  if (!e) return std::nullopt;
  VertexId p = g.edge(*e).src;
  if (!g.vertex(p).is_wire()) return std::nullopt;
  return p;
}

std::optional<VertexId> wire_succ(const StringGraph& g, VertexId v) {
  auto e = g.out_edge(v);
  if (!e) return std::nullopt;
  VertexId s = g.edge(*e).tgt;
  if (!g.vertex(s).is_wire()) return std::nullopt;
  return s;
}

void require_same_signature(const StringGraph& g, const StringGraph& h) {
  if (g.signature() == h.signature()) return;
  if (g.signature() && h.signature() && g.sig() == h.sig()) return;
  throw Error(ErrorCode::kSignatureMismatch, "graphs are typed over different signatures");
}

}  // namespace

StringGraph normalize_wires(const StringGraph& g) {
  StringGraph out = g;
  std::set<VertexId> visited;
  for (const auto& [id, rec] : g.vertices()) {
    if (!rec.vertex.is_wire() || visited.count(id)) continue;

    VertexId start = id;
    bool cycle = false;
    while (auto p = wire_pred(g, start)) {
      if (*p == id) {
        cycle = true;
        start = id;
        break;
      }
      start = *p;
    }
    std::vector<VertexId> chain{start};
    for (VertexId cur = start;;) {
      auto s = wire_succ(g, cur);
      if (!s || *s == start) break;
      chain.push_back(*s);
      cur = *s;
    }
    visited.insert(chain.begin(), chain.end());

    const VertexId first = chain.front();
    const VertexId last = chain.back();
    const std::uint32_t type = g.vertex(first).type;
    if (cycle) {
      if (chain.size() == 1) continue;
      for (std::size_t i = 1; i < chain.size(); ++i) out.remove_vertex(chain[i]);
      out.add_edge(Edge{first, first, EdgeKind::kMid, type, 0});
      continue;
    }

    const auto in_e = g.in_edge(first);
    const auto out_e = g.out_edge(last);
    if (!in_e && !out_e) {
      if (chain.size() <= 2) continue;
      for (std::size_t i = 1; i + 1 < chain.size(); ++i) out.remove_vertex(chain[i]);
      out.add_edge(Edge{first, last, EdgeKind::kMid, type, 0});
    } else if (in_e && !out_e) {
      if (chain.size() == 1) continue;
      const Edge tag = g.edge(*in_e);
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) out.remove_vertex(chain[i]);
      out.add_edge(Edge{tag.src, last, EdgeKind::kOut, tag.type, tag.port});
    } else {
      if (chain.size() == 1) continue;
      const Edge tag = g.edge(*out_e);
      for (std::size_t i = 1; i < chain.size(); ++i) out.remove_vertex(chain[i]);
      out.add_edge(Edge{first, tag.tgt, EdgeKind::kIn, tag.type, tag.port});
    }
  }
  return out;
}

std::vector<VertexId> contraction_sites(const StringGraph& g) {
  std::vector<VertexId> out;
  for (const auto& [id, rec] : g.vertices()) {
    if (!rec.vertex.is_wire() || rec.in.empty() || rec.out.empty()) continue;
    const VertexId p = g.edge(rec.in.front()).src;
    const VertexId s = g.edge(rec.out.front()).tgt;
    if (p == id) continue;
    if (g.vertex(p).is_box() && g.vertex(s).is_box()) continue;
    out.push_back(id);
  }
  return out;
}

StringGraph contract_at(const StringGraph& g, VertexId v) {
  const auto& rec = g.record(v);
  if (!rec.vertex.is_wire() || rec.in.empty() || rec.out.empty()) {
    throw Error(ErrorCode::kNoSuchVertex, "not an interior wire-vertex");
  }
  const Edge in_e = g.edge(rec.in.front());
  const Edge out_e = g.edge(rec.out.front());
  const VertexId p = in_e.src;
  const VertexId s = out_e.tgt;
  const bool p_box = g.vertex(p).is_box();
  const bool s_box = g.vertex(s).is_box();
  if (p == v || (p_box && s_box)) throw Error(ErrorCode::kNoSuchVertex, "no contraction applies");
  StringGraph out = g;
  out.remove_vertex(v);
  if (!p_box && !s_box) {
    out.add_edge(Edge{p, s, EdgeKind::kMid, rec.vertex.type, 0});
  } else if (!p_box) {
    out.add_edge(Edge{p, s, EdgeKind::kIn, out_e.type, out_e.port});
  } else {
    out.add_edge(Edge{p, s, EdgeKind::kOut, in_e.type, in_e.port});
  }
  return out;
}

bool is_minimal(const StringGraph& g) { return contraction_sites(g).empty(); }

bool wire_homeomorphic(const StringGraph& g, const StringGraph& h) {
  require_same_signature(g, h);
  return isomorphic(normalize_wires(g), normalize_wires(h)).has_value();
}

std::vector<VertexId> expand_wire_in_place(StringGraph& g, EdgeId e, int k) {
  if (!g.has_edge(e)) throw Error(ErrorCode::kNoSuchEdge, "e" + std::to_string(raw(e)));
  if (k < 1) throw Error(ErrorCode::kNoSuchEdge, "expansion count must be positive");
  const Edge edge = g.edge(e);
  std::uint32_t type = edge.type;
  if (edge.kind == EdgeKind::kIn) type = g.vertex(edge.src).type;
  if (edge.kind == EdgeKind::kOut) type = g.vertex(edge.tgt).type;
  g.remove_edge(e);
  std::vector<VertexId> fresh;
  for (int i = 0; i < k; ++i) fresh.push_back(g.add_wire(type));
  // Chain: src -> fresh[0] -> ... -> fresh[k-1] -> tgt, box tags stay at the box.
  if (edge.kind == EdgeKind::kOut) {
    g.add_edge(Edge{edge.src, fresh.front(), EdgeKind::kOut, edge.type, edge.port});
  } else {
    g.add_edge(Edge{edge.src, fresh.front(), EdgeKind::kMid, type, 0});
  }
  for (int i = 0; i + 1 < k; ++i) g.add_edge(Edge{fresh[i], fresh[i + 1], EdgeKind::kMid, type, 0});
  if (edge.kind == EdgeKind::kIn) {
    g.add_edge(Edge{fresh.back(), edge.tgt, EdgeKind::kIn, edge.type, edge.port});
  } else {
    g.add_edge(Edge{fresh.back(), edge.tgt, EdgeKind::kMid, type, 0});
  }
  return fresh;
}

StringGraph expand_wire(const StringGraph& g, EdgeId e, int k) {
  StringGraph out = g;
  expand_wire_in_place(out, e, k);
  return out;
}

GlueResult glue(const StringGraph& g, const StringGraph& h,
                const std::vector<std::pair<VertexId, VertexId>>& pairs) {
  require_same_signature(g, h);
  std::map<VertexId, VertexId> right_to_left;
  std::set<VertexId> left_used;
  for (const auto& [u, v] : pairs) {
    if (!g.has_vertex(u) || !h.has_vertex(v)) throw Error(ErrorCode::kNoSuchVertex, "pairing endpoint");
    const Vertex& a = g.vertex(u);
    const Vertex& b = h.vertex(v);
    if (!a.is_wire() || !b.is_wire()) throw Error(ErrorCode::kNotBoundaryCoherent, "pairing a box-vertex");
    if (a.type != b.type) throw Error(ErrorCode::kTypeMismatch, "paired wire-vertices have different types");
    const bool forward = g.is_output(u) && h.is_input(v);
    const bool backward = g.is_input(u) && h.is_output(v);
    if (!forward && !backward) throw Error(ErrorCode::kNotBoundaryCoherent, "pairing does not join an output to an input");
    if (!left_used.insert(u).second || right_to_left.count(v)) {
      throw Error(ErrorCode::kNotBoundaryCoherent, "a boundary vertex is paired twice");
    }
    right_to_left.emplace(v, u);
  }

  GlueResult result{g, {}, {}};
  StringGraph& out = result.graph;
  for (const auto& [id, rec] : g.vertices()) result.from_left.emplace(id, id);
  for (const auto& [id, rec] : h.vertices()) {
    auto it = right_to_left.find(id);
    if (it != right_to_left.end()) {
      result.from_right.emplace(id, it->second);
    } else {
      VertexId fresh = rec.vertex.is_wire() ? out.add_wire(rec.vertex.type) : out.add_box(rec.vertex.type, rec.vertex.data);
      result.from_right.emplace(id, fresh);
    }
  }
  for (const auto& [id, e] : h.edges()) {
    Edge copy = e;
    copy.src = result.from_right.at(e.src);
    copy.tgt = result.from_right.at(e.tgt);
    out.add_edge(copy);
  }
  std::vector<VertexId> inputs = g.input_order();
  std::vector<VertexId> outputs = g.output_order();
  for (VertexId v : h.input_order()) inputs.push_back(result.from_right.at(v));
  for (VertexId v : h.output_order()) outputs.push_back(result.from_right.at(v));
  out.set_input_order(std::move(inputs));
  out.set_output_order(std::move(outputs));
  out.refresh_boundary_orders();
  return result;
}

GlueResult plug_with_maps(const StringGraph& g, const StringGraph& h,
                          const std::vector<std::pair<VertexId, VertexId>>& pairing) {
  for (const auto& [u, v] : pairing) {
    if (!g.has_vertex(u) || !h.has_vertex(v)) throw Error(ErrorCode::kNoSuchVertex, "pairing endpoint");
    if (!g.is_output(u) || !h.is_input(v)) {
      throw Error(ErrorCode::kNotBoundaryCoherent, "plugging must pair an output of g with an input of h");
    }
  }
  return glue(g, h, pairing);
}

StringGraph plug(const StringGraph& g, const StringGraph& h,
                 const std::vector<std::pair<VertexId, VertexId>>& pairing) {
  return plug_with_maps(g, h, pairing).graph;
}

StringGraph self_plug(const StringGraph& g, VertexId output, VertexId input) {
  if (!g.has_vertex(output) || !g.has_vertex(input)) throw Error(ErrorCode::kNoSuchVertex, "plugging endpoint");
  if (output == input || !g.is_output(output) || !g.is_input(input)) {
    throw Error(ErrorCode::kNotBoundaryCoherent, "self-plugging must join a distinct output and input");
  }
  if (g.vertex(output).type != g.vertex(input).type) throw Error(ErrorCode::kTypeMismatch, "plugged types differ");
  StringGraph out = g;
  std::vector<EdgeId> moving = out.out_edges(input);
  for (EdgeId e : moving) {
    Edge copy = out.edge(e);
    out.remove_edge(e);
    copy.src = output;
    out.add_edge(copy);
  }
  out.remove_vertex(input);
  out.refresh_boundary_orders();
  return out;
}

GlueResult disjoint_union_with_maps(const StringGraph& g, const StringGraph& h) { return glue(g, h, {}); }

StringGraph disjoint_union(const StringGraph& g, const StringGraph& h) { return glue(g, h, {}).graph; }

StringGraph relabel(const StringGraph& g, std::map<VertexId, VertexId>* vertex_map) {
  StringGraph out(g.signature());
  std::map<VertexId, VertexId> vmap;
  for (const auto& [id, rec] : g.vertices()) {
    vmap.emplace(id, rec.vertex.is_wire() ? out.add_wire(rec.vertex.type) : out.add_box(rec.vertex.type, rec.vertex.data));
  }
  for (const auto& [id, e] : g.edges()) {
    Edge copy = e;
    copy.src = vmap.at(e.src);
    copy.tgt = vmap.at(e.tgt);
    out.add_edge(copy);
  }
  std::vector<VertexId> inputs, outputs;
  for (VertexId v : g.input_order()) inputs.push_back(vmap.at(v));
  for (VertexId v : g.output_order()) outputs.push_back(vmap.at(v));
  out.set_input_order(std::move(inputs));
  out.set_output_order(std::move(outputs));
  if (vertex_map) *vertex_map = std::move(vmap);
  return out;
}

}  // namespace strigraph
