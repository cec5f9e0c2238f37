// SPDX-License-Identifier: Apache-2.0
#include "strigraph/cospan.hpp"

#include <set>

#include "strigraph/graph_ops.hpp"

namespace strigraph {

bool Frame::all_positive() const {
  for (const auto& p : points) {
    if (p.sign != Sign::kPlus) return false;
  }
  return true;
}

Frame Frame::positive(const std::vector<std::uint32_t>& types) {
  Frame x;
  for (std::uint32_t t : types) x.points.push_back({t, Sign::kPlus});
  return x;
}

Frame dual(const Frame& x) {
  Frame out = x;
  for (auto& p : out.points) p.sign = flip(p.sign);
  return out;
}

Frame concat(const Frame& a, const Frame& b) {
  Frame out = a;
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  return out;
}

namespace {

std::string vname(VertexId v) { return "v" + std::to_string(raw(v)); }

// Which side of its vertex a frame point sits on.
bool dom_point_is_input(const FramePoint& p) { return p.sign == Sign::kPlus; }
bool cod_point_is_input(const FramePoint& p) { return p.sign == Sign::kMinus; }

void set_orders(FramedCospan& f) {
  std::vector<VertexId> ins, outs;
  for (std::size_t k = 0; k < f.dom.size(); ++k) {
    if (dom_point_is_input(f.dom.points[k])) ins.push_back(f.d[k]);
  }
  for (std::size_t k = 0; k < f.cod.size(); ++k) {
    if (cod_point_is_input(f.cod.points[k])) ins.push_back(f.c[k]);
  }
  for (std::size_t k = 0; k < f.cod.size(); ++k) {
    if (!cod_point_is_input(f.cod.points[k])) outs.push_back(f.c[k]);
  }
  for (std::size_t k = 0; k < f.dom.size(); ++k) {
    if (!dom_point_is_input(f.dom.points[k])) outs.push_back(f.d[k]);
  }
  f.graph.set_input_order(std::move(ins));
  f.graph.set_output_order(std::move(outs));
}

struct Slot2 {
  bool cod;
  std::size_t index;
};

// Cospan made of bare strands, each joining two frame slots.
FramedCospan strands(const SignaturePtr& sig, Frame dom, Frame cod, const std::vector<std::pair<Slot2, Slot2>>& pairs) {
  StringGraph g(sig);
  std::vector<VertexId> d(dom.size()), c(cod.size());
  for (std::size_t k = 0; k < dom.size(); ++k) d[k] = g.add_wire(dom.points[k].type);
  for (std::size_t k = 0; k < cod.size(); ++k) c[k] = g.add_wire(cod.points[k].type);
  auto vertex = [&](const Slot2& s) { return s.cod ? c.at(s.index) : d.at(s.index); };
  auto is_input = [&](const Slot2& s) {
    return s.cod ? cod_point_is_input(cod.points.at(s.index)) : dom_point_is_input(dom.points.at(s.index));
  };
  for (const auto& [a, b] : pairs) {
    if (is_input(a) == is_input(b)) throw Error(ErrorCode::kFrameMismatch, "strand joins two points of equal polarity");
    if (is_input(a)) {
      g.connect(vertex(a), vertex(b));
    } else {
      g.connect(vertex(b), vertex(a));
    }
  }
  return make_cospan(std::move(g), std::move(dom), std::move(cod), std::move(d), std::move(c));
}

void require_same_frame(const Frame& a, const Frame& b, const char* what) {
  if (!(a == b)) throw Error(ErrorCode::kFrameMismatch, what);
}

}  // namespace

std::vector<Violation> validate_cospan(const FramedCospan& f) {
  std::vector<Violation> out;
  const StringGraph& g = f.graph;
  if (f.d.size() != f.dom.size()) out.push_back({"DomArity", std::to_string(f.d.size())});
  if (f.c.size() != f.cod.size()) out.push_back({"CodArity", std::to_string(f.c.size())});
  if (!out.empty()) return out;
  for (const auto& v : validate(g)) out.push_back({"MalformedGraph", v.str()});
  if (!out.empty()) return out;
  for (const auto& [id, rec] : g.vertices()) {
    if (g.is_isolated(id)) out.push_back({"IsolatedWireVertex", vname(id)});
  }
  std::set<VertexId> hit;
  auto check = [&](const Frame& frame, const std::vector<VertexId>& map, bool cod) {
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const VertexId v = map[k];
      const std::string where = std::string(cod ? "cod " : "dom ") + std::to_string(k);
      if (!g.has_vertex(v) || !g.vertex(v).is_wire()) {
        out.push_back({"NotBoundary", where});
        continue;
      }
      if (!hit.insert(v).second) out.push_back({"NotBijective", where});
      const FramePoint& p = frame.points[k];
      if (g.vertex(v).type != p.type) out.push_back({"TypeMismatch", where});
      const bool want_input = cod ? cod_point_is_input(p) : dom_point_is_input(p);
      if (want_input ? !g.is_input(v) : !g.is_output(v)) out.push_back({"SignMismatch", where});
    }
  };
  check(f.dom, f.d, false);
  check(f.cod, f.c, true);
  for (const auto& [id, rec] : g.vertices()) {
    if ((g.is_input(id) || g.is_output(id)) && !hit.count(id)) out.push_back({"NotBijective", vname(id)});
  }
  return out;
}

void require_valid_cospan(const FramedCospan& f) {
  auto vs = validate_cospan(f);
  if (vs.empty()) return;
  std::string detail;
  for (const auto& v : vs) detail += (detail.empty() ? "" : " ") + v.str();
  throw Error(ErrorCode::kFrameMismatch, detail);
}

FramedCospan make_cospan(StringGraph graph, Frame dom, Frame cod, std::vector<VertexId> d, std::vector<VertexId> c) {
  FramedCospan f{std::move(dom), std::move(cod), std::move(graph), std::move(d), std::move(c)};
  if (f.d.size() == f.dom.size() && f.c.size() == f.cod.size()) set_orders(f);
  require_valid_cospan(f);
  return f;
}

FramedCospan from_graph(const StringGraph& g) {
  Frame dom, cod;
  for (VertexId v : g.input_order()) dom.points.push_back({g.vertex(v).type, Sign::kPlus});
  for (VertexId v : g.output_order()) cod.points.push_back({g.vertex(v).type, Sign::kPlus});
  return make_cospan(g, std::move(dom), std::move(cod), g.input_order(), g.output_order());
}

FramedCospan compose(const FramedCospan& f, const FramedCospan& g) {
  require_same_frame(f.cod, g.dom, "codomain and domain frames differ");
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t k = 0; k < f.cod.size(); ++k) pairs.emplace_back(f.c[k], g.d[k]);
  GlueResult res = glue(f.graph, g.graph, pairs);
  std::vector<VertexId> d, c;
  for (VertexId v : f.d) d.push_back(res.from_left.at(v));
  for (VertexId v : g.c) c.push_back(res.from_right.at(v));
  return make_cospan(normalize_wires(res.graph), f.dom, g.cod, std::move(d), std::move(c));
}

FramedCospan tensor(const FramedCospan& f, const FramedCospan& g) {
  GlueResult res = disjoint_union_with_maps(f.graph, g.graph);
  std::vector<VertexId> d = f.d;
  std::vector<VertexId> c = f.c;
  for (VertexId v : g.d) d.push_back(res.from_right.at(v));
  for (VertexId v : g.c) c.push_back(res.from_right.at(v));
  return make_cospan(std::move(res.graph), concat(f.dom, g.dom), concat(f.cod, g.cod), std::move(d), std::move(c));
}

FramedCospan pseudo_identity(const SignaturePtr& sig, const Frame& x) {
  std::vector<std::pair<Slot2, Slot2>> pairs;
  for (std::size_t k = 0; k < x.size(); ++k) pairs.push_back({{false, k}, {true, k}});
  return strands(sig, x, x, pairs);
}

FramedCospan symmetry(const SignaturePtr& sig, const Frame& x, const Frame& y) {
  std::vector<std::pair<Slot2, Slot2>> pairs;
  for (std::size_t k = 0; k < x.size(); ++k) pairs.push_back({{false, k}, {true, y.size() + k}});
  for (std::size_t k = 0; k < y.size(); ++k) pairs.push_back({{false, x.size() + k}, {true, k}});
  return strands(sig, concat(x, y), concat(y, x), pairs);
}

FramedCospan unit(const SignaturePtr& sig, const FramePoint& p) {
  Frame cod{{{p.type, flip(p.sign)}, p}};
  return strands(sig, Frame{}, cod, {{{true, 0}, {true, 1}}});
}

FramedCospan counit(const SignaturePtr& sig, const FramePoint& p) {
  Frame dom{{p, {p.type, flip(p.sign)}}};
  return strands(sig, dom, Frame{}, {{{false, 0}, {false, 1}}});
}

FramedCospan cap(const SignaturePtr& sig, std::uint32_t type) { return unit(sig, {type, Sign::kMinus}); }

FramedCospan cup(const SignaturePtr& sig, std::uint32_t type) { return counit(sig, {type, Sign::kPlus}); }

FramedCospan trace(const FramedCospan& f, std::size_t k) {
  if (k > f.dom.size() || k > f.cod.size()) throw Error(ErrorCode::kFrameMismatch, "trace over more points than the frame has");
  const auto split = [k](const Frame& x) {
    Frame head, tail;
    head.points.assign(x.points.begin(), x.points.end() - static_cast<std::ptrdiff_t>(k));
    tail.points.assign(x.points.end() - static_cast<std::ptrdiff_t>(k), x.points.end());
    return std::make_pair(head, tail);
  };
  const auto [a, x] = split(f.dom);
  const auto [b, x2] = split(f.cod);
  if (!(x == x2) || !x.all_positive()) throw Error(ErrorCode::kFrameMismatch, "traced points must agree and be positive");
  const SignaturePtr& sig = f.signature();
  const Frame xs = dual(x);
  // e'_X : I -> X (x) X* and d_X : X (x) X* -> I, strand i joining x_i and x_i*.
  std::vector<std::pair<Slot2, Slot2>> e_pairs, d_pairs;
  for (std::size_t i = 0; i < k; ++i) {
    e_pairs.push_back({{true, i}, {true, k + i}});
    d_pairs.push_back({{false, i}, {false, k + i}});
  }
  const FramedCospan e_x = strands(sig, Frame{}, concat(x, xs), e_pairs);
  const FramedCospan d_x = strands(sig, concat(x, xs), Frame{}, d_pairs);
  const FramedCospan open = tensor(pseudo_identity(sig, a), e_x);
  const FramedCospan body = tensor(f, pseudo_identity(sig, xs));
  const FramedCospan close = tensor(pseudo_identity(sig, b), d_x);
  return compose(compose(open, body), close);
}

Tensor evaluate(const FramedCospan& f, const Valuation& v) {
  std::vector<Slot> upper, lower;
  for (std::size_t k = 0; k < f.cod.size(); ++k) upper.push_back({f.c[k], cod_point_is_input(f.cod.points[k])});
  for (std::size_t k = 0; k < f.dom.size(); ++k) lower.push_back({f.d[k], dom_point_is_input(f.dom.points[k])});
  return evaluate_slots(f.graph, v, upper, lower);
}

bool equal_mod(const FramedCospan& f, const FramedCospan& g, const RewriteSystem& rs, const JoinLimits& limits) {
  require_same_frame(f.dom, g.dom, "domain frames differ");
  require_same_frame(f.cod, g.cod, "codomain frames differ");
  return joinable(f.graph, g.graph, rs, limits);
}

CospanClass CospanClass::then(const CospanClass& next) const { return {compose(rep, next.rep), rules}; }

CospanClass CospanClass::operator*(const CospanClass& other) const { return {tensor(rep, other.rep), rules}; }

bool CospanClass::equals(const CospanClass& other, const JoinLimits& limits) const {
  return equal_mod(rep, other.rep, rules ? *rules : RewriteSystem{}, limits);
}

}  // namespace strigraph
