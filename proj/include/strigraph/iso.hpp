// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strigraph/string_graph.hpp"

namespace strigraph {

/// kOrdered distinguishes boundary positions; kUnordered only records
/// whether a vertex is an input and/or an output.
enum class BoundaryMode { kOrdered, kUnordered };

struct CanonicalForm {
  std::string bytes;
  /// Vertices listed in canonical position order.
  std::vector<VertexId> order;
};

/// Colour refinement seeded by vertex labels, then individualization on the
/// first non-singleton cell, keeping the smallest serialization. Connected
/// components are canonized separately and concatenated in sorted order.
CanonicalForm canonical_form(const StringGraph& g, BoundaryMode mode = BoundaryMode::kOrdered);
std::string canonical_key(const StringGraph& g, BoundaryMode mode = BoundaryMode::kOrdered);

/// A bijection preserving kinds, types, data, tags and boundary orders.
std::optional<GraphMap> isomorphic(const StringGraph& g, const StringGraph& h);
/// As `isomorphic`, but boundary vertices may be permuted among themselves.
std::optional<GraphMap> isomorphic_unordered(const StringGraph& g, const StringGraph& h);

}  // namespace strigraph
