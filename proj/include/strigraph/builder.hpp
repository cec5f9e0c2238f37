// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include "strigraph/string_graph.hpp"

namespace strigraph {

/// Builds string graphs in circuit order: every box is fed by existing
/// wire-vertices and produces fresh ones, so each wire between two boxes is
/// a single wire-vertex.
class GraphBuilder {
 public:
  explicit GraphBuilder(SignaturePtr sig);

  VertexId input(std::string_view object);
  /// Adds a box fed by `ins` (one per input port, each still without an
  /// out-edge) and returns its output wire-vertices.
  std::vector<VertexId> box(std::string_view morphism, const std::vector<VertexId>& ins, VertexData data = {});
  /// As `box` for a generator with exactly one output.
  VertexId box1(std::string_view morphism, const std::vector<VertexId>& ins, VertexData data = {});
  /// Appends a wire-vertex after `w`.
  VertexId extend(VertexId w);

  /// Inputs in declaration order, outputs as given. Throws kMalformedGraph or
  /// kStaleOrder when the result is not a string graph with that boundary.
  StringGraph finish(const std::vector<VertexId>& outputs) const;

 private:
  StringGraph g_;
  std::vector<VertexId> inputs_;
};

}  // namespace strigraph
