// SPDX-License-Identifier: Apache-2.0
#include "strigraph/builder.hpp"

namespace strigraph {

GraphBuilder::GraphBuilder(SignaturePtr sig) : g_(std::move(sig)) {}

VertexId GraphBuilder::input(std::string_view object) {
  VertexId v = g_.add_wire(object);
  inputs_.push_back(v);
  return v;
}

std::vector<VertexId> GraphBuilder::box(std::string_view morphism, const std::vector<VertexId>& ins, VertexData data) {
  const Signature& sig = g_.sig();
  const std::uint32_t m = sig.require_morphism(morphism);
  if (ins.size() != sig.arity_in(m)) {
    throw Error(ErrorCode::kMalformedGraph, std::string(morphism) + " fed the wrong number of wires");
  }
  for (std::uint32_t i = 0; i < ins.size(); ++i) {
    const VertexId w = ins[i];
    if (!g_.has_vertex(w) || !g_.vertex(w).is_wire() || g_.out_edge(w)) {
      throw Error(ErrorCode::kMalformedGraph, "input " + std::to_string(i) + " of " + std::string(morphism) + " is not a free wire end");
    }
    if (g_.vertex(w).type != sig.dom_type(m, i)) {
      throw Error(ErrorCode::kTypeMismatch, "input " + std::to_string(i) + " of " + std::string(morphism));
    }
  }
  const VertexId b = g_.add_box(m, std::move(data));
  for (std::uint32_t i = 0; i < ins.size(); ++i) g_.connect(ins[i], b, i);
  std::vector<VertexId> outs;
  for (std::uint32_t j = 0; j < sig.arity_out(m); ++j) {
    outs.push_back(g_.add_wire(sig.cod_type(m, j)));
    g_.connect(b, outs.back(), j);
  }
  return outs;
}

VertexId GraphBuilder::box1(std::string_view morphism, const std::vector<VertexId>& ins, VertexData data) {
  auto outs = box(morphism, ins, std::move(data));
  if (outs.size() != 1) throw Error(ErrorCode::kMalformedGraph, std::string(morphism) + " does not have one output");
  return outs[0];
}

VertexId GraphBuilder::extend(VertexId w) {
  if (!g_.has_vertex(w) || !g_.vertex(w).is_wire() || g_.out_edge(w)) {
    throw Error(ErrorCode::kMalformedGraph, "extended vertex is not a free wire end");
  }
  VertexId n = g_.add_wire(g_.vertex(w).type);
  g_.connect(w, n);
  return n;
}

StringGraph GraphBuilder::finish(const std::vector<VertexId>& outputs) const {
  StringGraph g = g_;
  g.set_input_order(inputs_);
  g.set_output_order(outputs);
  require_valid(g);
  boundary(g);
  return g;
}

}  // namespace strigraph
