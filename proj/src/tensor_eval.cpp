// SPDX-License-Identifier: Apache-2.0
#include "strigraph/tensor_eval.hpp"

#include <algorithm>
#include <set>

namespace strigraph {

Valuation::Valuation(SignaturePtr sig) : sig_(std::move(sig)) {
  for (const auto& o : sig_->objects()) dims_.push_back(o.dim);
}

void Valuation::set_dim(std::string_view object, int dim) {
  if (dim < 1) throw Error(ErrorCode::kDimMismatch, "dimension must be positive");
  dims_.at(sig_->require_object(object)) = dim;
}

int Valuation::dim(std::uint32_t object) const {
  if (object >= dims_.size() || !dims_[object]) {
    throw Error(ErrorCode::kMissingValuation,
                "no dimension for object " + (object < dims_.size() ? sig_->object(object).name : std::string("?")));
  }
  return *dims_[object];
}

IndexType Valuation::index_type(std::uint32_t object) const { return {sig_->object(object).name, dim(object)}; }

IndexTypes Valuation::dom_types(std::uint32_t morphism) const {
  IndexTypes out;
  for (std::uint32_t i = 0; i < sig_->arity_in(morphism); ++i) out.push_back(index_type(sig_->dom_type(morphism, i)));
  return out;
}

IndexTypes Valuation::cod_types(std::uint32_t morphism) const {
  IndexTypes out;
  for (std::uint32_t j = 0; j < sig_->arity_out(morphism); ++j) out.push_back(index_type(sig_->cod_type(morphism, j)));
  return out;
}

void Valuation::set(std::string_view morphism, Tensor t) {
  const auto m = sig_->require_morphism(morphism);
  if (t.upper() != cod_types(m) || t.lower() != dom_types(m)) {
    throw Error(ErrorCode::kShapeMismatch, "tensor for " + std::string(morphism) + " does not match its type");
  }
  const std::string name(morphism);
  data_.erase(name);
  phases_.erase(name);
  tables_.erase(name);
  fixed_.insert_or_assign(name, std::move(t));
}

void Valuation::set_data(std::string_view morphism, DataFn fn) {
  sig_->require_morphism(morphism);
  const std::string name(morphism);
  fixed_.erase(name);
  phases_.erase(name);
  tables_.erase(name);
  data_.insert_or_assign(name, std::move(fn));
}

void Valuation::set_phase(std::string_view morphism, Tensor basis) {
  const auto m = sig_->require_morphism(morphism);
  const IndexTypes dom = dom_types(m);
  if (dom.size() != 1 || cod_types(m) != dom || basis.upper() != dom || basis.lower() != dom) {
    throw Error(ErrorCode::kShapeMismatch, "phase family " + std::string(morphism) + " needs X -> X and an X -> X basis");
  }
  using Mat = Tensor::Matrix;
  const Mat b = basis.matrix();
  Eigen::FullPivLU<Mat> lu(b);
  if (!lu.isInvertible()) throw Error(ErrorCode::kShapeMismatch, "phase basis is singular");
  const Mat inv = lu.inverse();
  set_data(morphism, [b, inv, dom](const VertexData& d) {
    const double a = std::holds_alternative<Angle>(d) ? std::get<Angle>(d).radians() : 0.0;
    Mat diag = Mat::Identity(b.rows(), b.cols());
    for (Eigen::Index k = 1; k < diag.rows(); ++k) diag(k, k) = std::polar(1.0, a);
    return Tensor::from_matrix(dom, dom, b * diag * inv);
  });
  phases_.insert_or_assign(std::string(morphism), std::move(basis));
}

void Valuation::set_table(std::string_view morphism, std::map<std::string, Tensor> table) {
  const auto m = sig_->require_morphism(morphism);
  for (const auto& [key, t] : table) {
    if (t.upper() != cod_types(m) || t.lower() != dom_types(m)) {
      throw Error(ErrorCode::kShapeMismatch, "table entry " + key + " of " + std::string(morphism) + " has the wrong type");
    }
  }
  set_data(morphism, [table, name = std::string(morphism)](const VertexData& d) {
    const std::string* key = std::get_if<std::string>(&d);
    auto it = key ? table.find(*key) : table.end();
    if (it == table.end()) throw Error(ErrorCode::kMissingValuation, "no " + name + " named " + data_to_string(d));
    return it->second;
  });
  tables_.insert_or_assign(std::string(morphism), std::move(table));
}

const Tensor* Valuation::phase_basis(std::string_view morphism) const {
  auto it = phases_.find(morphism);
  return it == phases_.end() ? nullptr : &it->second;
}

const std::map<std::string, Tensor>* Valuation::table(std::string_view morphism) const {
  auto it = tables_.find(morphism);
  return it == tables_.end() ? nullptr : &it->second;
}

bool Valuation::has(std::uint32_t morphism) const {
  const auto& name = sig_->morphism(morphism).name;
  return fixed_.count(name) != 0 || data_.count(name) != 0;
}

const Tensor& Valuation::fixed(std::string_view morphism) const {
  auto it = fixed_.find(morphism);
  if (it == fixed_.end()) throw Error(ErrorCode::kMissingValuation, "no tensor for " + std::string(morphism));
  return it->second;
}

Tensor Valuation::generator(std::string_view morphism, const VertexData& data) const {
  const auto m = sig_->require_morphism(morphism);
  if (auto it = data_.find(morphism); it != data_.end()) {
    Tensor t = it->second(data);
    if (t.upper() != cod_types(m) || t.lower() != dom_types(m)) {
      throw Error(ErrorCode::kShapeMismatch, "data tensor for " + std::string(morphism) + " has the wrong type");
    }
    return t;
  }
  return fixed(morphism);
}

Tensor Valuation::box_tensor(const Vertex& box) const { return generator(sig_->morphism(box.type).name, box.data); }

namespace {

/// A factor in the contraction network: axes labelled by variable ids.
struct Node {
  std::vector<int> vars;
  std::vector<int> dims;
  std::vector<Complex> data;
};

std::size_t node_volume(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

/// Sums out any variable that labels two axes of the same node.
Node self_trace(Node n) {
  for (;;) {
    std::size_t a = n.vars.size(), b = n.vars.size();
    for (std::size_t i = 0; i < n.vars.size() && a == n.vars.size(); ++i) {
      for (std::size_t j = i + 1; j < n.vars.size(); ++j) {
        if (n.vars[i] == n.vars[j]) {
          a = i;
          b = j;
          break;
        }
      }
    }
    if (a == n.vars.size()) return n;
    const auto strides = detail::strides_of(n.dims);
    Node out;
    std::vector<std::size_t> keep_strides;
    for (std::size_t p = 0; p < n.vars.size(); ++p) {
      if (p == a || p == b) continue;
      out.vars.push_back(n.vars[p]);
      out.dims.push_back(n.dims[p]);
      keep_strides.push_back(strides[p]);
    }
    out.data.assign(node_volume(out.dims), Complex{});
    std::vector<int> idx(out.dims.size(), 0);
    std::size_t k = 0;
    do {
      std::size_t base = 0;
      for (std::size_t p = 0; p < idx.size(); ++p) base += static_cast<std::size_t>(idx[p]) * keep_strides[p];
      Complex sum{};
      for (int x = 0; x < n.dims[a]; ++x) sum += n.data[base + static_cast<std::size_t>(x) * (strides[a] + strides[b])];
      out.data[k++] = sum;
    } while (!out.dims.empty() && detail::next_index(idx, out.dims));
    n = std::move(out);
  }
}

/// Pairwise contraction summing every shared variable.
Node contract_pair(const Node& x, const Node& y) {
  Node out;
  std::vector<std::size_t> x_strides_out, y_strides_out, x_strides_sum, y_strides_sum;
  std::vector<int> sum_dims;
  const auto xs = detail::strides_of(x.dims);
  const auto ys = detail::strides_of(y.dims);
  for (std::size_t p = 0; p < x.vars.size(); ++p) {
    auto it = std::find(y.vars.begin(), y.vars.end(), x.vars[p]);
    if (it == y.vars.end()) {
      out.vars.push_back(x.vars[p]);
      out.dims.push_back(x.dims[p]);
      x_strides_out.push_back(xs[p]);
      y_strides_out.push_back(0);
    } else {
      sum_dims.push_back(x.dims[p]);
      x_strides_sum.push_back(xs[p]);
      y_strides_sum.push_back(ys[static_cast<std::size_t>(it - y.vars.begin())]);
    }
  }
  for (std::size_t q = 0; q < y.vars.size(); ++q) {
    if (std::find(x.vars.begin(), x.vars.end(), y.vars[q]) != x.vars.end()) continue;
    out.vars.push_back(y.vars[q]);
    out.dims.push_back(y.dims[q]);
    x_strides_out.push_back(0);
    y_strides_out.push_back(ys[q]);
  }
  out.data.assign(node_volume(out.dims), Complex{});
  std::vector<int> idx(out.dims.size(), 0);
  std::size_t k = 0;
  do {
    std::size_t xb = 0, yb = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      xb += static_cast<std::size_t>(idx[p]) * x_strides_out[p];
      yb += static_cast<std::size_t>(idx[p]) * y_strides_out[p];
    }
    Complex sum{};
    std::vector<int> s(sum_dims.size(), 0);
    do {
      std::size_t xo = xb, yo = yb;
      for (std::size_t p = 0; p < s.size(); ++p) {
        xo += static_cast<std::size_t>(s[p]) * x_strides_sum[p];
        yo += static_cast<std::size_t>(s[p]) * y_strides_sum[p];
      }
      sum += x.data[xo] * y.data[yo];
    } while (!sum_dims.empty() && detail::next_index(s, sum_dims));
    out.data[k++] = sum;
  } while (!out.dims.empty() && detail::next_index(idx, out.dims));
  return out;
}

std::size_t result_volume(const Node& x, const Node& y, bool* shares) {
  std::size_t n = 1;
  *shares = false;
  for (std::size_t p = 0; p < x.vars.size(); ++p) {
    if (std::find(y.vars.begin(), y.vars.end(), x.vars[p]) == y.vars.end()) {
      n *= static_cast<std::size_t>(x.dims[p]);
    } else {
      *shares = true;
    }
  }
  for (std::size_t q = 0; q < y.vars.size(); ++q) {
    if (std::find(x.vars.begin(), x.vars.end(), y.vars[q]) == x.vars.end()) n *= static_cast<std::size_t>(y.dims[q]);
  }
  return n;
}

/// Greedy network contraction: repeatedly merges the connected pair with the
/// smallest result; disconnected factors are merged last by outer product.
Node contract_network(std::vector<Node> nodes) {
  if (nodes.empty()) return Node{{}, {}, {Complex(1.0)}};
  for (auto& n : nodes) n = self_trace(std::move(n));
  while (nodes.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    std::size_t best_vol = 0;
    bool best_shares = false;
    bool found = false;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      for (std::size_t b = a + 1; b < nodes.size(); ++b) {
        bool shares = false;
        const std::size_t vol = result_volume(nodes[a], nodes[b], &shares);
        const bool better = !found || (shares && !best_shares) || (shares == best_shares && vol < best_vol);
        if (better) {
          best_a = a;
          best_b = b;
          best_vol = vol;
          best_shares = shares;
          found = true;
        }
      }
    }
    Node merged = contract_pair(nodes[best_a], nodes[best_b]);
    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(best_b));
    nodes[best_a] = std::move(merged);
  }
  return std::move(nodes.front());
}

struct Chain {
  std::vector<VertexId> vertices;
  bool cycle = false;
};

std::vector<Chain> wire_chains(const StringGraph& g) {
  auto wire_pred = [&](VertexId v) -> std::optional<VertexId> {
    auto e = g.in_edge(v);
    if (!e || !g.vertex(g.edge(*e).src).is_wire()) return std::nullopt;
    return g.edge(*e).src;
  };
  auto wire_succ = [&](VertexId v) -> std::optional<VertexId> {
    auto e = g.out_edge(v);
    if (!e || !g.vertex(g.edge(*e).tgt).is_wire()) return std::nullopt;
    return g.edge(*e).tgt;
  };
  std::vector<Chain> out;
  std::set<VertexId> seen;
  for (const auto& [id, rec] : g.vertices()) {
    if (!rec.vertex.is_wire() || seen.count(id)) continue;
    Chain c;
    VertexId start = id;
    while (auto p = wire_pred(start)) {
      if (*p == id) {
        c.cycle = true;
        start = id;
        break;
      }
      start = *p;
    }
    c.vertices.push_back(start);
    for (VertexId cur = start;;) {
      auto s = wire_succ(cur);
      if (!s || *s == start) break;
      c.vertices.push_back(*s);
      cur = *s;
    }
    seen.insert(c.vertices.begin(), c.vertices.end());
    out.push_back(std::move(c));
  }
  return out;
}

using SlotKey = std::pair<VertexId, bool>;

}  // namespace

Tensor evaluate_slots(const StringGraph& g, const Valuation& v, const std::vector<Slot>& upper,
                      const std::vector<Slot>& lower) {
  int next_var = 0;
  std::map<int, IndexType> var_type;
  std::map<SlotKey, int> slot_var;
  // Box axis variables: key (box, is_output, port).
  std::map<std::tuple<VertexId, bool, std::uint32_t>, int> port_var;
  std::vector<Node> nodes;
  Complex scalar(1.0);

  for (const Chain& c : wire_chains(g)) {
    const IndexType type = v.index_type(g.vertex(c.vertices.front()).type);
    if (c.cycle) {
      scalar *= static_cast<double>(type.dim);
      continue;
    }
    const VertexId first = c.vertices.front();
    const VertexId last = c.vertices.back();
    const auto in_e = g.in_edge(first);
    const auto out_e = g.out_edge(last);
    const int var = next_var++;
    var_type.emplace(var, type);
    if (in_e) {
      const Edge& e = g.edge(*in_e);
      port_var.emplace(std::make_tuple(e.src, true, e.port), var);
    }
    if (out_e) {
      const Edge& e = g.edge(*out_e);
      port_var.emplace(std::make_tuple(e.tgt, false, e.port), var);
    }
    if (!in_e && !out_e) {
      // Boundary-to-boundary strand: an explicit identity between two slots.
      const int out_var = next_var++;
      var_type.emplace(out_var, type);
      slot_var.emplace(SlotKey{first, true}, var);
      slot_var.emplace(SlotKey{last, false}, out_var);
      Node id{{out_var, var}, {type.dim, type.dim}, std::vector<Complex>(static_cast<std::size_t>(type.dim * type.dim))};
      for (int k = 0; k < type.dim; ++k) id.data[static_cast<std::size_t>(k * type.dim + k)] = 1.0;
      nodes.push_back(std::move(id));
    } else if (!in_e) {
      slot_var.emplace(SlotKey{first, true}, var);
    } else if (!out_e) {
      slot_var.emplace(SlotKey{last, false}, var);
    }
  }

  for (const auto& [id, rec] : g.vertices()) {
    if (!rec.vertex.is_box()) continue;
    Tensor t = v.box_tensor(rec.vertex);
    Node n;
    const auto m = rec.vertex.type;
    for (std::uint32_t j = 0; j < g.sig().arity_out(m); ++j) {
      auto it = port_var.find({id, true, j});
      if (it == port_var.end()) throw Error(ErrorCode::kMalformedGraph, "box output port not connected");
      n.vars.push_back(it->second);
      n.dims.push_back(t.upper()[j].dim);
    }
    for (std::uint32_t i = 0; i < g.sig().arity_in(m); ++i) {
      auto it = port_var.find({id, false, i});
      if (it == port_var.end()) throw Error(ErrorCode::kMalformedGraph, "box input port not connected");
      n.vars.push_back(it->second);
      n.dims.push_back(t.lower()[i].dim);
    }
    n.data.assign(t.entries().data(), t.entries().data() + t.entries().size());
    nodes.push_back(std::move(n));
  }

  Node result = contract_network(std::move(nodes));

  IndexTypes up_types, lo_types;
  std::vector<std::size_t> src_axis;
  std::set<SlotKey> used;
  auto place = [&](const std::vector<Slot>& slots, IndexTypes& types) {
    for (const Slot& s : slots) {
      const SlotKey key{s.vertex, s.as_input};
      auto it = slot_var.find(key);
      if (it == slot_var.end() || !used.insert(key).second) {
        throw Error(ErrorCode::kShapeMismatch, "slot is not a free boundary appearance");
      }
      auto pos = std::find(result.vars.begin(), result.vars.end(), it->second);
      src_axis.push_back(static_cast<std::size_t>(pos - result.vars.begin()));
      types.push_back(var_type.at(it->second));
    }
  };
  place(upper, up_types);
  place(lower, lo_types);
  if (used.size() != slot_var.size()) throw Error(ErrorCode::kShapeMismatch, "boundary appearance left unplaced");

  Tensor out(up_types, lo_types);
  const auto strides = detail::strides_of(result.dims);
  const auto dst_dims = detail::dims_of(up_types, lo_types);
  std::vector<int> idx(dst_dims.size(), 0);
  std::size_t k = 0;
  do {
    std::size_t s = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) s += static_cast<std::size_t>(idx[p]) * strides[src_axis[p]];
    out[k++] = scalar * result.data[s];
  } while (!dst_dims.empty() && detail::next_index(idx, dst_dims));
  return out;
}

Tensor evaluate(const StringGraph& g, const Valuation& v) {
  std::vector<Slot> up, lo;
  for (VertexId w : g.output_order()) up.push_back({w, false});
  for (VertexId w : g.input_order()) lo.push_back({w, true});
  return evaluate_slots(g, v, up, lo);
}

Tensor evaluate_by_contractions(const StringGraph& g, const Valuation& v) {
  // Axis labels: (vertex, port) for upper and lower axes of the running tensor.
  using Label = std::pair<VertexId, std::uint32_t>;
  Tensor acc;
  std::vector<Label> up_labels, lo_labels;
  std::set<VertexId> present;
  std::vector<EdgeId> pending;
  for (const auto& [id, e] : g.edges()) pending.push_back(id);

  auto upper_slot = [&](const Edge& e) { return Label{e.src, e.kind == EdgeKind::kOut ? e.port : 0}; };
  auto lower_slot = [&](const Edge& e) { return Label{e.tgt, e.kind == EdgeKind::kIn ? e.port : 0}; };

  for (const auto& [id, rec] : g.vertices()) {
    Tensor factor = rec.vertex.is_box() ? v.box_tensor(rec.vertex) : identity_tensor(v.index_type(rec.vertex.type));
    acc = kron(acc, factor);
    for (std::uint32_t j = 0; j < factor.upper().size(); ++j) up_labels.push_back({id, j});
    for (std::uint32_t i = 0; i < factor.lower().size(); ++i) lo_labels.push_back({id, i});
    present.insert(id);
    for (auto it = pending.begin(); it != pending.end();) {
      const Edge& e = g.edge(*it);
      if (!present.count(e.src) || !present.count(e.tgt)) {
        ++it;
        continue;
      }
      const auto j = static_cast<std::size_t>(std::find(up_labels.begin(), up_labels.end(), upper_slot(e)) - up_labels.begin());
      const auto i = static_cast<std::size_t>(std::find(lo_labels.begin(), lo_labels.end(), lower_slot(e)) - lo_labels.begin());
      acc = contract(acc, i, j);
      up_labels.erase(up_labels.begin() + static_cast<std::ptrdiff_t>(j));
      lo_labels.erase(lo_labels.begin() + static_cast<std::ptrdiff_t>(i));
      it = pending.erase(it);
    }
  }
  std::vector<std::size_t> up_perm, lo_perm;
  for (VertexId w : g.output_order()) {
    up_perm.push_back(static_cast<std::size_t>(std::find(up_labels.begin(), up_labels.end(), Label{w, 0}) - up_labels.begin()));
  }
  for (VertexId w : g.input_order()) {
    lo_perm.push_back(static_cast<std::size_t>(std::find(lo_labels.begin(), lo_labels.end(), Label{w, 0}) - lo_labels.begin()));
  }
  return permute(acc, up_perm, lo_perm);
}

}  // namespace strigraph
