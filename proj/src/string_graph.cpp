// SPDX-License-Identifier: Apache-2.0
#include "strigraph/string_graph.hpp"

#include <algorithm>
#include <set>

namespace strigraph {

namespace {

std::string vname(VertexId v) { return "v" + std::to_string(raw(v)); }
std::string ename(EdgeId e) { return "e" + std::to_string(raw(e)); }

void erase_one(std::vector<EdgeId>& list, EdgeId id) {
  auto it = std::find(list.begin(), list.end(), id);
  if (it != list.end()) list.erase(it);
}

}  // namespace

StringGraph::StringGraph(SignaturePtr sig) : sig_(std::move(sig)) {}

VertexId StringGraph::add_wire(std::uint32_t object) {
  const VertexId id{next_id_};
  insert_vertex(id, Vertex{VertexKind::kWire, object, {}});
  return id;
}

VertexId StringGraph::add_wire(std::string_view object) { return add_wire(sig_->require_object(object)); }

VertexId StringGraph::add_box(std::uint32_t morphism, VertexData data) {
  const VertexId id{next_id_};
  insert_vertex(id, Vertex{VertexKind::kBox, morphism, std::move(data)});
  return id;
}

VertexId StringGraph::add_box(std::string_view morphism, VertexData data) {
  return add_box(sig_->require_morphism(morphism), std::move(data));
}

void StringGraph::insert_vertex(VertexId id, Vertex vertex) {
  if (vertices_.count(id) || edges_.count(EdgeId{raw(id)})) {
    throw Error(ErrorCode::kMalformedGraph, "duplicate id " + std::to_string(raw(id)));
  }
  vertices_.emplace(id, VertexRecord{std::move(vertex), {}, {}});
  next_id_ = std::max(next_id_, raw(id) + 1);
}

EdgeId StringGraph::add_edge(const Edge& edge) {
  const EdgeId id{next_id_};
  insert_edge(id, edge);
  return id;
}

void StringGraph::insert_edge(EdgeId id, const Edge& edge) {
  if (edges_.count(id) || vertices_.count(VertexId{raw(id)})) {
    throw Error(ErrorCode::kMalformedGraph, "duplicate id " + std::to_string(raw(id)));
  }
  auto src = vertices_.find(edge.src);
  auto tgt = vertices_.find(edge.tgt);
  if (src == vertices_.end()) throw Error(ErrorCode::kNoSuchVertex, vname(edge.src));
  if (tgt == vertices_.end()) throw Error(ErrorCode::kNoSuchVertex, vname(edge.tgt));
  edges_.emplace(id, edge);
  src->second.out.push_back(id);
  tgt->second.in.push_back(id);
  next_id_ = std::max(next_id_, raw(id) + 1);
}

EdgeId StringGraph::connect(VertexId src, VertexId tgt, std::uint32_t port) {
  const Vertex& s = vertex(src);
  const Vertex& t = vertex(tgt);
  Edge e{src, tgt, EdgeKind::kMid, s.type, 0};
  if (s.is_wire() && t.is_box()) {
    e.kind = EdgeKind::kIn;
    e.type = t.type;
    e.port = port;
  } else if (s.is_box() && t.is_wire()) {
    e.kind = EdgeKind::kOut;
    e.type = s.type;
    e.port = port;
  } else if (s.is_box() && t.is_box()) {
    throw Error(ErrorCode::kMalformedGraph, "box-to-box edge");
  }
  return add_edge(e);
}

void StringGraph::remove_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorCode::kNoSuchEdge, ename(id));
  erase_one(mutable_record(it->second.src).out, id);
  erase_one(mutable_record(it->second.tgt).in, id);
  edges_.erase(it);
}

void StringGraph::remove_vertex(VertexId id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw Error(ErrorCode::kNoSuchVertex, vname(id));
  std::vector<EdgeId> incident = it->second.in;
  incident.insert(incident.end(), it->second.out.begin(), it->second.out.end());
  std::sort(incident.begin(), incident.end());
  incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
  for (EdgeId e : incident) remove_edge(e);
  vertices_.erase(id);
  std::erase(inputs_, id);
  std::erase(outputs_, id);
}

const Vertex& StringGraph::vertex(VertexId id) const { return record(id).vertex; }

const Edge& StringGraph::edge(EdgeId id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorCode::kNoSuchEdge, ename(id));
  return it->second;
}

const VertexRecord& StringGraph::record(VertexId id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw Error(ErrorCode::kNoSuchVertex, vname(id));
  return it->second;
}

VertexRecord& StringGraph::mutable_record(VertexId id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw Error(ErrorCode::kNoSuchVertex, vname(id));
  return it->second;
}

std::size_t StringGraph::num_boxes() const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(), [](const auto& kv) { return kv.second.vertex.is_box(); }));
}

std::size_t StringGraph::num_wires() const { return vertices_.size() - num_boxes(); }

std::optional<EdgeId> StringGraph::in_edge(VertexId id) const {
  const auto& r = record(id);
  if (r.in.empty()) return std::nullopt;
  return r.in.front();
}

std::optional<EdgeId> StringGraph::out_edge(VertexId id) const {
  const auto& r = record(id);
  if (r.out.empty()) return std::nullopt;
  return r.out.front();
}

bool StringGraph::is_input(VertexId id) const {
  const auto& r = record(id);
  return r.vertex.is_wire() && r.in.empty();
}

bool StringGraph::is_output(VertexId id) const {
  const auto& r = record(id);
  return r.vertex.is_wire() && r.out.empty();
}

bool StringGraph::is_isolated(VertexId id) const {
  const auto& r = record(id);
  return r.vertex.is_wire() && r.in.empty() && r.out.empty();
}

void StringGraph::refresh_boundary_orders() {
  auto refresh = [&](std::vector<VertexId>& order, bool inputs) {
    std::vector<VertexId> next;
    std::set<VertexId> seen;
    for (VertexId v : order) {
      if (!has_vertex(v) || seen.count(v)) continue;
      if (inputs ? is_input(v) : is_output(v)) {
        next.push_back(v);
        seen.insert(v);
      }
    }
    for (const auto& [id, rec] : vertices_) {
      if (seen.count(id)) continue;
      if (inputs ? is_input(id) : is_output(id)) next.push_back(id);
    }
    order = std::move(next);
  };
  refresh(inputs_, true);
  refresh(outputs_, false);
}

bool operator==(const StringGraph& a, const StringGraph& b) {
  if (a.sig_ != b.sig_ && !(a.sig_ && b.sig_ && *a.sig_ == *b.sig_)) return false;
  if (a.inputs_ != b.inputs_ || a.outputs_ != b.outputs_) return false;
  if (a.vertices_.size() != b.vertices_.size() || a.edges_.size() != b.edges_.size()) return false;
  for (auto ia = a.vertices_.begin(), ib = b.vertices_.begin(); ia != a.vertices_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const auto& x = ia->second.vertex;
    const auto& y = ib->second.vertex;
    if (x.kind != y.kind || x.type != y.type || x.data != y.data) return false;
  }
  for (auto ia = a.edges_.begin(), ib = b.edges_.begin(); ia != a.edges_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const auto& x = ia->second;
    const auto& y = ib->second;
    if (x.src != y.src || x.tgt != y.tgt || x.kind != y.kind || x.type != y.type || x.port != y.port) return false;
  }
  return true;
}

std::vector<Violation> validate(const StringGraph& g) {
  std::vector<Violation> out;
  if (!g.signature()) {
    out.push_back({"MissingSignature", ""});
    return out;
  }
  const Signature& sig = g.sig();
  const auto n_obj = sig.objects().size();
  const auto n_mor = sig.morphisms().size();

  for (const auto& [id, rec] : g.vertices()) {
    const Vertex& v = rec.vertex;
    if (v.is_wire()) {
      if (v.type >= n_obj) {
        out.push_back({"UnknownType", vname(id)});
        continue;
      }
      if (!std::holds_alternative<std::monostate>(v.data)) out.push_back({"DataMismatch", vname(id)});
      if (rec.in.size() > 1) out.push_back({"WireInDegree", vname(id)});
      if (rec.out.size() > 1) out.push_back({"WireOutDegree", vname(id)});
      continue;
    }
    if (v.type >= n_mor) {
      out.push_back({"UnknownType", vname(id)});
      continue;
    }
    const auto kind = sig.morphism(v.type).data_kind;
    const bool data_ok = (kind == DataKind::kNone && std::holds_alternative<std::monostate>(v.data)) ||
                         (kind == DataKind::kAngle && std::holds_alternative<Angle>(v.data)) ||
                         (kind == DataKind::kOpaque && std::holds_alternative<std::string>(v.data));
    if (!data_ok) out.push_back({"DataMismatch", vname(id)});
    std::vector<int> in_ports(sig.arity_in(v.type), 0);
    std::vector<int> out_ports(sig.arity_out(v.type), 0);
    bool ok = true;
    for (EdgeId e : rec.in) {
      const Edge& edge = g.edge(e);
      if (edge.kind != EdgeKind::kIn || edge.type != v.type || edge.port >= in_ports.size()) {
        ok = false;
      } else {
        ++in_ports[edge.port];
      }
    }
    for (EdgeId e : rec.out) {
      const Edge& edge = g.edge(e);
      if (edge.kind != EdgeKind::kOut || edge.type != v.type || edge.port >= out_ports.size()) {
        ok = false;
      } else {
        ++out_ports[edge.port];
      }
    }
    for (int c : in_ports) ok = ok && c == 1;
    for (int c : out_ports) ok = ok && c == 1;
    if (!ok) out.push_back({"LocalIsoViolation", vname(id)});
  }

  for (const auto& [id, e] : g.edges()) {
    if (!g.has_vertex(e.src) || !g.has_vertex(e.tgt)) {
      out.push_back({"DanglingEdge", ename(id)});
      continue;
    }
    const Vertex& s = g.vertex(e.src);
    const Vertex& t = g.vertex(e.tgt);
    bool ok = true;
    switch (e.kind) {
      case EdgeKind::kMid:
        ok = s.is_wire() && t.is_wire() && s.type == e.type && t.type == e.type;
        break;
      case EdgeKind::kIn:
        ok = s.is_wire() && t.is_box() && t.type == e.type && e.type < n_mor && e.port < sig.arity_in(e.type) &&
             sig.dom_type(e.type, e.port) == s.type;
        break;
      case EdgeKind::kOut:
        ok = s.is_box() && t.is_wire() && s.type == e.type && e.type < n_mor && e.port < sig.arity_out(e.type) &&
             sig.cod_type(e.type, e.port) == t.type;
        break;
    }
    if (!ok) out.push_back({"TagMismatch", ename(id)});
  }

  auto check_order = [&](const std::vector<VertexId>& order, bool inputs) {
    std::set<VertexId> listed;
    bool ok = true;
    for (VertexId v : order) {
      if (!g.has_vertex(v) || !listed.insert(v).second) {
        ok = false;
        continue;
      }
      if (!(inputs ? g.is_input(v) : g.is_output(v))) ok = false;
    }
    for (const auto& [id, rec] : g.vertices()) {
      if ((inputs ? g.is_input(id) : g.is_output(id)) && !listed.count(id)) ok = false;
    }
    if (!ok) out.push_back({inputs ? "InputOrderMismatch" : "OutputOrderMismatch", ""});
  };
  check_order(g.input_order(), true);
  check_order(g.output_order(), false);
  return out;
}

void require_valid(const StringGraph& g) {
  auto violations = validate(g);
  if (violations.empty()) return;
  std::string detail;
  for (const auto& v : violations) detail += (detail.empty() ? "" : ", ") + v.str();
  throw Error(ErrorCode::kMalformedGraph, detail);
}

Boundary boundary(const StringGraph& g) {
  auto check = [&](const std::vector<VertexId>& order, bool inputs) {
    std::set<VertexId> listed;
    for (VertexId v : order) {
      if (!g.has_vertex(v) || !listed.insert(v).second || !(inputs ? g.is_input(v) : g.is_output(v))) {
        throw Error(ErrorCode::kStaleOrder, (inputs ? "input " : "output ") + vname(v));
      }
    }
    for (const auto& [id, rec] : g.vertices()) {
      if ((inputs ? g.is_input(id) : g.is_output(id)) && !listed.count(id)) {
        throw Error(ErrorCode::kStaleOrder, (inputs ? "unlisted input " : "unlisted output ") + vname(id));
      }
    }
  };
  check(g.input_order(), true);
  check(g.output_order(), false);
  return Boundary{g.input_order(), g.output_order()};
}

std::vector<std::uint32_t> input_types(const StringGraph& g) {
  std::vector<std::uint32_t> out;
  for (VertexId v : g.input_order()) out.push_back(g.vertex(v).type);
  return out;
}

std::vector<std::uint32_t> output_types(const StringGraph& g) {
  std::vector<std::uint32_t> out;
  for (VertexId v : g.output_order()) out.push_back(g.vertex(v).type);
  return out;
}

}  // namespace strigraph
