// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "strigraph/rewrite.hpp"
#include "strigraph/string_graph.hpp"
#include "strigraph/tensor_eval.hpp"

namespace strigraph {

enum class Sign : std::uint8_t { kPlus, kMinus };

inline Sign flip(Sign s) { return s == Sign::kPlus ? Sign::kMinus : Sign::kPlus; }

struct FramePoint {
  std::uint32_t type = 0;
  Sign sign = Sign::kPlus;

  friend bool operator==(const FramePoint&, const FramePoint&) = default;
};

/// Totally ordered, signed set of boundary points.
struct Frame {
  std::vector<FramePoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool all_positive() const;

  static Frame positive(const std::vector<std::uint32_t>& types);

  friend bool operator==(const Frame&, const Frame&) = default;
};

using FramedPointGraph = Frame;

/// Frame with every sign flipped.
Frame dual(const Frame& x);
Frame concat(const Frame& a, const Frame& b);

/// A string graph with its boundary split into a domain and a codomain
/// frame. A positive dom point sits on an input of the graph, a negative
/// one on an output; for cod points it is the other way round.
struct FramedCospan {
  Frame dom;
  Frame cod;
  StringGraph graph;
  std::vector<VertexId> d;
  std::vector<VertexId> c;

  const SignaturePtr& signature() const { return graph.signature(); }
};

std::vector<Violation> validate_cospan(const FramedCospan& f);
/// Throws kFrameMismatch listing every violation.
void require_valid_cospan(const FramedCospan& f);

/// Validates and sets the graph's boundary orders from the frames: inputs are
/// positive dom points then negative cod points, outputs are positive cod
/// points then negative dom points.
FramedCospan make_cospan(StringGraph graph, Frame dom, Frame cod, std::vector<VertexId> d, std::vector<VertexId> c);

/// All inputs as positive dom points and all outputs as positive cod points,
/// in the graph's boundary order.
FramedCospan from_graph(const StringGraph& g);

/// f then g. Throws kFrameMismatch unless cod(f) = dom(g).
FramedCospan compose(const FramedCospan& f, const FramedCospan& g);
FramedCospan tensor(const FramedCospan& f, const FramedCospan& g);

FramedCospan pseudo_identity(const SignaturePtr& sig, const Frame& x);
/// X (x) Y -> Y (x) X.
FramedCospan symmetry(const SignaturePtr& sig, const Frame& x, const Frame& y);
/// I -> [p*, p] and [p, p*] -> I, one strand each.
FramedCospan unit(const SignaturePtr& sig, const FramePoint& p);
FramedCospan counit(const SignaturePtr& sig, const FramePoint& p);
/// I -> [(t,+), (t,-)], that is unit((t,-)).
FramedCospan cap(const SignaturePtr& sig, std::uint32_t type);
/// [(t,+), (t,-)] -> I, that is counit((t,+)).
FramedCospan cup(const SignaturePtr& sig, std::uint32_t type);

/// Traces out the last k dom and cod points, which must agree and be
/// positive: (B (x) d_X) . (f (x) X*) . (A (x) e'_X).
FramedCospan trace(const FramedCospan& f, std::size_t k);

/// Tensor with dom points as lower and cod points as upper indices, in frame
/// order. A negative point is read off the opposite side of its vertex.
Tensor evaluate(const FramedCospan& f, const Valuation& v);

/// Frames equal and graphs joinable under R (after wire normalization).
/// Throws kFrameMismatch on different frames.
bool equal_mod(const FramedCospan& f, const FramedCospan& g, const RewriteSystem& rs, const JoinLimits& limits = {});

/// A cospan standing for its class modulo a rewrite system.
struct CospanClass {
  FramedCospan rep;
  std::shared_ptr<const RewriteSystem> rules;

  CospanClass then(const CospanClass& next) const;
  CospanClass operator*(const CospanClass& other) const;
  bool equals(const CospanClass& other, const JoinLimits& limits = {}) const;
};

}  // namespace strigraph
