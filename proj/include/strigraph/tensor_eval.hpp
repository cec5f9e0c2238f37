// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "strigraph/string_graph.hpp"
#include "strigraph/tensor.hpp"

namespace strigraph {

/// Assigns dimensions to objects and tensors to generators.
class Valuation {
 public:
  using DataFn = std::function<Tensor(const VertexData&)>;

  Valuation() = default;
  /// Object dimensions are taken from the signature where declared.
  explicit Valuation(SignaturePtr sig);

  const SignaturePtr& signature() const { return sig_; }

  void set_dim(std::string_view object, int dim);
  /// Throws kMissingValuation when the object has no dimension.
  int dim(std::uint32_t object) const;
  IndexType index_type(std::uint32_t object) const;

  /// Throws kShapeMismatch when the index types disagree with dom/cod.
  void set(std::string_view morphism, Tensor t);
  void set_data(std::string_view morphism, DataFn fn);
  /// Angle data: basis * diag(1, e^{i a}, ..., e^{i a}) * basis^-1 on a
  /// generator X -> X.
  void set_phase(std::string_view morphism, Tensor basis);
  /// Opaque data: the entry named by the vertex data.
  void set_table(std::string_view morphism, std::map<std::string, Tensor> table);

  /// The recorded phase basis or table, when the data tensor came from one.
  const Tensor* phase_basis(std::string_view morphism) const;
  const std::map<std::string, Tensor>* table(std::string_view morphism) const;

  bool has(std::uint32_t morphism) const;
  bool has_fixed(std::string_view morphism) const { return fixed_.count(std::string(morphism)) != 0; }
  const Tensor& fixed(std::string_view morphism) const;

  /// Tensor of a box-vertex: upper = cod, lower = dom.
  Tensor box_tensor(const Vertex& box) const;
  Tensor generator(std::string_view morphism, const VertexData& data = {}) const;

  IndexTypes dom_types(std::uint32_t morphism) const;
  IndexTypes cod_types(std::uint32_t morphism) const;

 private:
  SignaturePtr sig_;
  std::vector<std::optional<int>> dims_;
  std::map<std::string, Tensor, std::less<>> fixed_;
  std::map<std::string, DataFn, std::less<>> data_;
  std::map<std::string, Tensor, std::less<>> phases_;
  std::map<std::string, std::map<std::string, Tensor>, std::less<>> tables_;
};

/// One boundary appearance of a wire-vertex. An isolated vertex has both an
/// input and an output appearance.
struct Slot {
  VertexId vertex;
  bool as_input = true;
};

/// Value of g: upper indices are the outputs in output order, lower indices
/// the inputs in input order.
Tensor evaluate(const StringGraph& g, const Valuation& v);

/// Value of g with an explicit placement of boundary appearances. Every
/// appearance must be listed exactly once across both lists.
Tensor evaluate_slots(const StringGraph& g, const Valuation& v, const std::vector<Slot>& upper,
                      const std::vector<Slot>& lower);

/// Literal evaluation: the tensor product of one factor per vertex (the
/// generator tensor for a box, an identity for a wire-vertex) followed by one
/// contraction per edge. Exponential in the graph size; used as a reference.
Tensor evaluate_by_contractions(const StringGraph& g, const Valuation& v);

}  // namespace strigraph
