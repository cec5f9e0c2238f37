// SPDX-License-Identifier: Apache-2.0
#include "strigraph/iso.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace strigraph {

namespace {

struct Arc {
  int label;  // rank of the edge label within the component
  int dir;    // 0 outgoing, 1 incoming
  int nbr;
};

/// One weakly connected component with dense local indices.
struct Component {
  std::vector<VertexId> ids;
  std::vector<std::string> vlabels;
  std::vector<int> vcolor;  // initial colours
  std::vector<std::vector<Arc>> arcs;
  std::vector<std::tuple<int, int, std::string>> edges;  // (src, tgt, label)
};

std::string vertex_label(const StringGraph& g, VertexId id, const Vertex& v, BoundaryMode mode) {
  std::string s = v.is_wire() ? "w" : "b";
  s += std::to_string(v.type);
  if (v.is_box()) {
    s += data_to_string(v.data);
    return s;
  }
  if (mode == BoundaryMode::kUnordered) {
    if (g.is_input(id)) s += "i";
    if (g.is_output(id)) s += "o";
    return s;
  }
  const auto& ins = g.input_order();
  const auto& outs = g.output_order();
  if (auto it = std::find(ins.begin(), ins.end(), id); it != ins.end()) s += "i" + std::to_string(it - ins.begin());
  if (auto it = std::find(outs.begin(), outs.end(), id); it != outs.end()) s += "o" + std::to_string(it - outs.begin());
  return s;
}

std::string edge_label(const Edge& e) {
  return std::string(1, "mio"[static_cast<int>(e.kind)]) + std::to_string(e.type) + "." + std::to_string(e.port);
}

template <typename Key>
std::vector<int> rank_by(const std::vector<Key>& keys) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size());
  int r = -1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i == 0 || keys[idx[i - 1]] < keys[idx[i]]) ++r;
    rank[idx[i]] = r;
  }
  return rank;
}

int count_colours(const std::vector<int>& colours) {
  int m = -1;
  for (int c : colours) m = std::max(m, c);
  return m + 1;
}

void refine(const Component& comp, std::vector<int>& colours) {
  const std::size_t n = comp.ids.size();
  int current = count_colours(colours);
  for (;;) {
    std::vector<std::vector<int>> keys(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::tuple<int, int, int>> nb;
      nb.reserve(comp.arcs[v].size());
      for (const Arc& a : comp.arcs[v]) nb.emplace_back(a.dir, a.label, colours[a.nbr]);
      std::sort(nb.begin(), nb.end());
      auto& k = keys[v];
      k.reserve(1 + 3 * nb.size());
      k.push_back(colours[v]);
      for (const auto& [d, l, c] : nb) {
        k.push_back(d);
        k.push_back(l);
        k.push_back(c);
      }
    }
    colours = rank_by(keys);
    const int next = count_colours(colours);
    if (next == current) return;
    current = next;
  }
}

std::string serialize_leaf(const Component& comp, const std::vector<int>& pos) {
  const std::size_t n = comp.ids.size();
  std::vector<int> at(n);
  for (std::size_t v = 0; v < n; ++v) at[pos[v]] = static_cast<int>(v);
  std::string out;
  for (std::size_t p = 0; p < n; ++p) {
    out += comp.vlabels[at[p]];
    out += ';';
  }
  std::vector<std::tuple<int, int, const std::string*>> es;
  es.reserve(comp.edges.size());
  for (const auto& [s, t, l] : comp.edges) es.emplace_back(pos[s], pos[t], &l);
  std::sort(es.begin(), es.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return *std::get<2>(a) < *std::get<2>(b);
  });
  out += '/';
  for (const auto& [s, t, l] : es) {
    out += std::to_string(s);
    out += '>';
    out += std::to_string(t);
    out += ':';
    out += *l;
    out += ';';
  }
  return out;
}

void search(const Component& comp, std::vector<int> colours, std::string& best, std::vector<int>& best_pos,
            bool& have_best) {
  refine(comp, colours);
  const std::size_t n = comp.ids.size();
  if (count_colours(colours) == static_cast<int>(n)) {
    std::string leaf = serialize_leaf(comp, colours);
    if (!have_best || leaf < best) {
      best = std::move(leaf);
      best_pos = colours;
      have_best = true;
    }
    return;
  }
  std::vector<int> size(n, 0);
  for (int c : colours) ++size[c];
  int target = -1;
  for (std::size_t c = 0; c < n; ++c) {
    if (size[c] > 1) {
      target = static_cast<int>(c);
      break;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (colours[v] != target) continue;
    std::vector<std::pair<int, int>> keys(n);
    for (std::size_t u = 0; u < n; ++u) keys[u] = {colours[u], u == v ? 0 : 1};
    search(comp, rank_by(keys), best, best_pos, have_best);
  }
}

std::vector<Component> split_components(const StringGraph& g, BoundaryMode mode) {
  std::map<VertexId, int> index;
  std::vector<VertexId> ids;
  for (const auto& [id, rec] : g.vertices()) {
    index.emplace(id, static_cast<int>(ids.size()));
    ids.push_back(id);
  }
  std::vector<int> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [eid, e] : g.edges()) parent[find(index.at(e.src))] = find(index.at(e.tgt));

  std::map<int, int> comp_of_root;
  std::vector<Component> comps;
  std::vector<int> local(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int root = find(static_cast<int>(i));
    auto [it, fresh] = comp_of_root.emplace(root, static_cast<int>(comps.size()));
    if (fresh) comps.emplace_back();
    Component& c = comps[it->second];
    local[i] = static_cast<int>(c.ids.size());
    c.ids.push_back(ids[i]);
    c.vlabels.push_back(vertex_label(g, ids[i], g.vertex(ids[i]), mode));
  }
  for (auto& c : comps) {
    c.arcs.resize(c.ids.size());
    c.vcolor = rank_by(c.vlabels);
  }
  std::vector<std::vector<std::string>> elabels(comps.size());
  std::vector<std::vector<std::tuple<int, int, int>>> raw_edges(comps.size());
  for (const auto& [eid, e] : g.edges()) {
    const int ci = comp_of_root.at(find(index.at(e.src)));
    elabels[ci].push_back(edge_label(e));
    raw_edges[ci].emplace_back(local[index.at(e.src)], local[index.at(e.tgt)], static_cast<int>(elabels[ci].size()) - 1);
  }
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    const auto ranks = rank_by(elabels[ci]);
    for (const auto& [s, t, li] : raw_edges[ci]) {
      comps[ci].arcs[s].push_back({ranks[li], 0, t});
      comps[ci].arcs[t].push_back({ranks[li], 1, s});
      comps[ci].edges.emplace_back(s, t, elabels[ci][li]);
    }
  }
  return comps;
}

}  // namespace

CanonicalForm canonical_form(const StringGraph& g, BoundaryMode mode) {
  auto comps = split_components(g, mode);
  std::vector<std::pair<std::string, std::vector<VertexId>>> parts;
  parts.reserve(comps.size());
  for (const auto& comp : comps) {
    std::string best;
    std::vector<int> pos;
    bool have = false;
    search(comp, comp.vcolor, best, pos, have);
    std::vector<VertexId> order(comp.ids.size());
    for (std::size_t v = 0; v < comp.ids.size(); ++v) order[pos[v]] = comp.ids[v];
    parts.emplace_back(std::move(best), std::move(order));
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  CanonicalForm out;
  for (auto& [bytes, order] : parts) {
    out.bytes += bytes;
    out.bytes += '#';
    out.order.insert(out.order.end(), order.begin(), order.end());
  }
  return out;
}

std::string canonical_key(const StringGraph& g, BoundaryMode mode) { return canonical_form(g, mode).bytes; }

namespace {

std::optional<GraphMap> iso_impl(const StringGraph& g, const StringGraph& h, BoundaryMode mode) {
  if (g.num_vertices() != h.num_vertices() || g.num_edges() != h.num_edges()) return std::nullopt;
  if (g.input_order().size() != h.input_order().size() || g.output_order().size() != h.output_order().size()) {
    return std::nullopt;
  }
  const CanonicalForm a = canonical_form(g, mode);
  const CanonicalForm b = canonical_form(h, mode);
  if (a.bytes != b.bytes) return std::nullopt;
  GraphMap map;
  for (std::size_t i = 0; i < a.order.size(); ++i) map.vertices.emplace(a.order[i], b.order[i]);
  std::map<std::tuple<VertexId, VertexId, EdgeKind, std::uint32_t>, EdgeId> lookup;
  for (const auto& [id, e] : h.edges()) lookup.emplace(std::make_tuple(e.src, e.tgt, e.kind, e.port), id);
  for (const auto& [id, e] : g.edges()) {
    auto it = lookup.find(std::make_tuple(map.vertices.at(e.src), map.vertices.at(e.tgt), e.kind, e.port));
    if (it == lookup.end()) return std::nullopt;
    map.edges.emplace(id, it->second);
  }
  return map;
}

}  // namespace

std::optional<GraphMap> isomorphic(const StringGraph& g, const StringGraph& h) {
  return iso_impl(g, h, BoundaryMode::kOrdered);
}

std::optional<GraphMap> isomorphic_unordered(const StringGraph& g, const StringGraph& h) {
  return iso_impl(g, h, BoundaryMode::kUnordered);
}

}  // namespace strigraph
