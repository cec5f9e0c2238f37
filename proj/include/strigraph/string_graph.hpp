// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strigraph/signature.hpp"

namespace strigraph {

enum class VertexId : std::uint64_t {};
enum class EdgeId : std::uint64_t {};

inline std::uint64_t raw(VertexId v) { return static_cast<std::uint64_t>(v); }
inline std::uint64_t raw(EdgeId e) { return static_cast<std::uint64_t>(e); }

enum class VertexKind : std::uint8_t { kWire, kBox };

/// A wire-vertex carries an object index; a box-vertex a morphism index.
struct Vertex {
  VertexKind kind = VertexKind::kWire;
  std::uint32_t type = 0;
  VertexData data;

  bool is_wire() const { return kind == VertexKind::kWire; }
  bool is_box() const { return kind == VertexKind::kBox; }
};

/// For kMid edges `type` is the object index; for kIn/kOut it is the
/// morphism index and `port` the port position.
struct Edge {
  VertexId src{};
  VertexId tgt{};
  EdgeKind kind = EdgeKind::kMid;
  std::uint32_t type = 0;
  std::uint32_t port = 0;
};

struct VertexRecord {
  Vertex vertex;
  std::vector<EdgeId> in;
  std::vector<EdgeId> out;
};

/// Typed graph of wire- and box-vertices over a monoidal signature.
///
/// Mutators keep incidence lists consistent but do not enforce the string
/// graph invariants; `validate` reports those. Boundary orders are stored
/// and checked against the recomputed boundary by `boundary`.
class StringGraph {
 public:
  StringGraph() = default;
  explicit StringGraph(SignaturePtr sig);

  const SignaturePtr& signature() const { return sig_; }
  const Signature& sig() const { return *sig_; }

  VertexId add_wire(std::uint32_t object);
  VertexId add_wire(std::string_view object);
  VertexId add_box(std::uint32_t morphism, VertexData data = {});
  VertexId add_box(std::string_view morphism, VertexData data = {});
  /// Inserts a vertex under a caller-chosen id (used by parsers and copies).
  void insert_vertex(VertexId id, Vertex vertex);

  EdgeId add_edge(const Edge& edge);
  void insert_edge(EdgeId id, const Edge& edge);
  /// Tag is inferred from endpoint kinds: wire->wire is mid, wire->box is in
  /// at `port`, box->wire is out at `port`.
  EdgeId connect(VertexId src, VertexId tgt, std::uint32_t port = 0);

  void remove_edge(EdgeId id);
  /// Removes the vertex together with its incident edges.
  void remove_vertex(VertexId id);

  bool has_vertex(VertexId id) const { return vertices_.count(id) != 0; }
  bool has_edge(EdgeId id) const { return edges_.count(id) != 0; }
  const Vertex& vertex(VertexId id) const;
  const Edge& edge(EdgeId id) const;
  const VertexRecord& record(VertexId id) const;
  const std::map<VertexId, VertexRecord>& vertices() const { return vertices_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_boxes() const;
  std::size_t num_wires() const;

  const std::vector<EdgeId>& in_edges(VertexId id) const { return record(id).in; }
  const std::vector<EdgeId>& out_edges(VertexId id) const { return record(id).out; }
  std::optional<EdgeId> in_edge(VertexId id) const;
  std::optional<EdgeId> out_edge(VertexId id) const;

  /// Recomputed boundary membership (ignores the stored orders).
  bool is_input(VertexId id) const;
  bool is_output(VertexId id) const;
  bool is_isolated(VertexId id) const;

  const std::vector<VertexId>& input_order() const { return inputs_; }
  const std::vector<VertexId>& output_order() const { return outputs_; }
  void set_input_order(std::vector<VertexId> order) { inputs_ = std::move(order); }
  void set_output_order(std::vector<VertexId> order) { outputs_ = std::move(order); }
  /// Drops entries that are no longer boundary, keeps the relative order of
  /// the rest, and appends newly exposed boundary vertices in id order.
  void refresh_boundary_orders();

  std::uint64_t next_id() const { return next_id_; }

  /// Id-level equality (same ids, payloads, and boundary orders).
  friend bool operator==(const StringGraph& a, const StringGraph& b);

 private:
  VertexRecord& mutable_record(VertexId id);

  SignaturePtr sig_;
  std::map<VertexId, VertexRecord> vertices_;
  std::map<EdgeId, Edge> edges_;
  std::vector<VertexId> inputs_;
  std::vector<VertexId> outputs_;
  std::uint64_t next_id_ = 0;
};

struct Boundary {
  std::vector<VertexId> inputs;
  std::vector<VertexId> outputs;
};

/// Vertex and edge correspondence between two graphs.
struct GraphMap {
  std::map<VertexId, VertexId> vertices;
  std::map<EdgeId, EdgeId> edges;
};

std::vector<Violation> validate(const StringGraph& g);
/// Throws kMalformedGraph listing every violation.
void require_valid(const StringGraph& g);

/// Throws kStaleOrder when the stored orders disagree with the recomputed
/// boundary sets.
Boundary boundary(const StringGraph& g);

/// Object indices of the inputs / outputs in boundary order.
std::vector<std::uint32_t> input_types(const StringGraph& g);
std::vector<std::uint32_t> output_types(const StringGraph& g);

}  // namespace strigraph
