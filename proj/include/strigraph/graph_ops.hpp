// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "strigraph/string_graph.hpp"

namespace strigraph {

/// Minimal wire form: one wire-vertex per circle and per wire ending at a
/// box, two per boundary-to-boundary strand. Boundary ids and orders are
/// kept; interior wire-vertices of each chain are dropped.
StringGraph normalize_wires(const StringGraph& g);
bool is_minimal(const StringGraph& g);

/// Interior wire-vertices that a single homeomorphism contraction can remove.
std::vector<VertexId> contraction_sites(const StringGraph& g);
/// Removes one interior wire-vertex `v` (one of h^L, h^W, h^I, h^O).
StringGraph contract_at(const StringGraph& g, VertexId v);

bool wire_homeomorphic(const StringGraph& g, const StringGraph& h);

/// Inserts k fresh wire-vertices into edge `e`. The tag at a box endpoint
/// stays on the edge touching the box.
StringGraph expand_wire(const StringGraph& g, EdgeId e, int k);
/// In-place variant returning the inserted vertices in chain order.
std::vector<VertexId> expand_wire_in_place(StringGraph& g, EdgeId e, int k);

/// Where each input vertex ended up after a gluing.
struct GlueResult {
  StringGraph graph;
  std::map<VertexId, VertexId> from_left;
  std::map<VertexId, VertexId> from_right;
};

/// Pushout of a boundary-coherent span over a point graph. Each pair
/// (u, v) identifies u in g with v in h; exactly one of them must be an
/// input and the other an output of its graph.
GlueResult glue(const StringGraph& g, const StringGraph& h,
                const std::vector<std::pair<VertexId, VertexId>>& pairs);

/// Plugging: each pair is (output of g, input of h).
StringGraph plug(const StringGraph& g, const StringGraph& h,
                 const std::vector<std::pair<VertexId, VertexId>>& pairing);
GlueResult plug_with_maps(const StringGraph& g, const StringGraph& h,
                          const std::vector<std::pair<VertexId, VertexId>>& pairing);

/// Identifies an output of g with an input of g (a feedback plugging).
StringGraph self_plug(const StringGraph& g, VertexId output, VertexId input);

GlueResult disjoint_union_with_maps(const StringGraph& g, const StringGraph& h);
StringGraph disjoint_union(const StringGraph& g, const StringGraph& h);

/// Copies g with fresh ids assigned in ascending order of the old ids.
StringGraph relabel(const StringGraph& g, std::map<VertexId, VertexId>* vertex_map = nullptr);

}  // namespace strigraph
