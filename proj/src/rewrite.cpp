// SPDX-License-Identifier: Apache-2.0
#include "strigraph/rewrite.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <unordered_map>

#include "strigraph/graph_ops.hpp"
#include "strigraph/iso.hpp"

namespace strigraph {

std::string_view to_string(MatchMode mode) {
  return mode == MatchMode::kLiteral ? "literal" : "homeomorphic";
}

std::string_view to_string(NormalizeStatus status) {
  return status == NormalizeStatus::kNormalForm ? "normal_form" : "step_limit";
}

namespace {

std::string vname(VertexId v) { return "v" + std::to_string(raw(v)); }

bool is_boundary(const StringGraph& g, VertexId v) { return g.is_input(v) || g.is_output(v); }

}  // namespace

std::vector<Violation> validate_rule(const RewriteRule& r) {
  std::vector<Violation> out;
  if (!r.lhs.signature() || !r.rhs.signature() ||
      !(r.lhs.signature() == r.rhs.signature() || r.lhs.sig() == r.rhs.sig())) {
    out.push_back({"SignatureMismatch", r.name});
    return out;
  }
  // A kept box is an anchor and may list only the ports the rule touches.
  std::set<std::string> anchors_l, anchors_r;
  for (const auto& [l, rv] : r.kept) {
    anchors_l.insert(vname(l));
    anchors_r.insert(vname(rv));
  }
  for (const auto& v : validate(r.lhs)) {
    if (v.kind != "LocalIsoViolation" || !anchors_l.count(v.subject)) out.push_back({"MalformedLhs", v.str()});
  }
  for (const auto& v : validate(r.rhs)) {
    if (v.kind != "LocalIsoViolation" || !anchors_r.count(v.subject)) out.push_back({"MalformedRhs", v.str()});
  }
  if (!out.empty()) return out;
  for (const auto* side : {&r.lhs, &r.rhs}) {
    for (const auto& [id, rec] : side->vertices()) {
      if (rec.vertex.is_wire() && side->is_isolated(id)) {
        out.push_back({"IsolatedWireVertex", std::string(side == &r.lhs ? "lhs " : "rhs ") + vname(id)});
      }
    }
  }
  std::set<VertexId> seen_l, seen_r;
  for (const auto& [l, rv] : r.iface) {
    if (!r.lhs.has_vertex(l) || !is_boundary(r.lhs, l) || !r.rhs.has_vertex(rv) || !is_boundary(r.rhs, rv)) {
      out.push_back({"IfaceNotBoundary", vname(l) + "~" + vname(rv)});
      continue;
    }
    if (!seen_l.insert(l).second || !seen_r.insert(rv).second) out.push_back({"IfaceNotBijective", vname(l)});
    if (r.lhs.is_input(l) != r.rhs.is_input(rv) || r.lhs.is_output(l) != r.rhs.is_output(rv)) {
      out.push_back({"PolarityMismatch", vname(l) + "~" + vname(rv)});
    }
    if (r.lhs.vertex(l).type != r.rhs.vertex(rv).type) out.push_back({"TypeMismatch", vname(l) + "~" + vname(rv)});
  }
  for (const auto& [id, rec] : r.lhs.vertices()) {
    if (rec.vertex.is_wire() && is_boundary(r.lhs, id) && !seen_l.count(id)) out.push_back({"IfaceNotBijective", "lhs " + vname(id)});
  }
  for (const auto& [id, rec] : r.rhs.vertices()) {
    if (rec.vertex.is_wire() && is_boundary(r.rhs, id) && !seen_r.count(id)) out.push_back({"IfaceNotBijective", "rhs " + vname(id)});
  }
  if (!r.kept.empty() && r.mode != MatchMode::kLiteral) out.push_back({"KeptBoxNeedsLiteral", r.name});
  std::set<VertexId> kept_l, kept_r;
  for (const auto& [l, rv] : r.kept) {
    if (!r.lhs.has_vertex(l) || !r.rhs.has_vertex(rv) || !r.lhs.vertex(l).is_box() || !r.rhs.vertex(rv).is_box() ||
        r.lhs.vertex(l).type != r.rhs.vertex(rv).type || !kept_l.insert(l).second || !kept_r.insert(rv).second) {
      out.push_back({"InvalidKeptBox", vname(l) + "~" + vname(rv)});
    }
  }
  return out;
}

void require_valid_rule(const RewriteRule& r) {
  auto vs = validate_rule(r);
  if (vs.empty()) return;
  std::string detail = r.name + ":";
  for (const auto& v : vs) detail += " " + v.str();
  throw Error(ErrorCode::kInvalidRule, detail);
}

RewriteRule make_rule(std::string name, StringGraph lhs, StringGraph rhs, MatchMode mode) {
  if (lhs.input_order().size() != rhs.input_order().size() || lhs.output_order().size() != rhs.output_order().size()) {
    throw Error(ErrorCode::kInvalidRule, name + ": boundary arities differ");
  }
  RewriteRule r{std::move(name), std::move(lhs), std::move(rhs), {}, mode, {}, std::nullopt, {}};
  for (std::size_t i = 0; i < r.lhs.input_order().size(); ++i) r.iface.emplace_back(r.lhs.input_order()[i], r.rhs.input_order()[i]);
  for (std::size_t i = 0; i < r.lhs.output_order().size(); ++i) {
    r.iface.emplace_back(r.lhs.output_order()[i], r.rhs.output_order()[i]);
  }
  return r;
}

RewriteRule reversed(const RewriteRule& r, std::string name) {
  RewriteRule out{std::move(name), r.rhs, r.lhs, {}, r.mode, {}, std::nullopt, r.tag};
  for (const auto& [l, rv] : r.iface) out.iface.emplace_back(rv, l);
  for (const auto& [l, rv] : r.kept) out.kept.emplace_back(rv, l);
  if (r.scalar && std::abs(*r.scalar) > 0.0) out.scalar = 1.0 / *r.scalar;
  return out;
}

std::pair<Tensor, Tensor> rule_tensors(const RewriteRule& r, const Valuation& v) {
  std::map<VertexId, VertexId> to_rhs(r.iface.begin(), r.iface.end());
  std::vector<Slot> up, lo;
  for (VertexId w : r.lhs.output_order()) up.push_back({to_rhs.at(w), false});
  for (VertexId w : r.lhs.input_order()) lo.push_back({to_rhs.at(w), true});
  return {evaluate(r.lhs, v), evaluate_slots(r.rhs, v, up, lo)};
}

std::optional<Complex> check_rule_sound(const RewriteRule& r, const Valuation& v, double tol) {
  auto [a, b] = rule_tensors(r, v);
  return equal_up_to_scalar(a, b, tol);
}

RewriteSystem::RewriteSystem(std::string name, std::vector<RewriteRule> rules) : name_(std::move(name)) {
  for (auto& r : rules) add(std::move(r));
}

void RewriteSystem::add(RewriteRule r) {
  require_valid_rule(r);
  if (find(r.name)) throw Error(ErrorCode::kInvalidRule, "duplicate rule name " + r.name);
  rules_.push_back(std::move(r));
}

const RewriteRule* RewriteSystem::find(std::string_view name) const {
  for (const auto& r : rules_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const RewriteRule& RewriteSystem::require(std::string_view name) const {
  if (const auto* r = find(name)) return *r;
  throw Error(ErrorCode::kUnknownRule, std::string(name));
}

std::uint64_t fingerprint(const StringGraph& g) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  auto mix_str = [&](const std::string& s) {
    mix(s.size());
    for (unsigned char c : s) mix(c);
  };
  for (const auto& [id, rec] : g.vertices()) {
    mix(raw(id));
    mix(static_cast<std::uint64_t>(rec.vertex.kind));
    mix(rec.vertex.type);
    mix_str(data_to_string(rec.vertex.data));
  }
  mix(0xabcdefull);
  for (const auto& [id, e] : g.edges()) {
    mix(raw(id));
    mix(raw(e.src));
    mix(raw(e.tgt));
    mix(static_cast<std::uint64_t>(e.kind));
    mix(e.type);
    mix(e.port);
  }
  mix(0x123456ull);
  for (VertexId v : g.input_order()) mix(raw(v));
  mix(0x654321ull);
  for (VertexId v : g.output_order()) mix(raw(v));
  return h;
}

namespace {

// ---------------------------------------------------------------------------
// Homeomorphic matching on minimal hosts.

enum class WireKind { kBoxBox, kInBox, kBoxOut, kStrand, kIsolated, kCircle };

using Port = std::pair<VertexId, std::uint32_t>;

struct HostWire {
  WireKind kind;
  std::uint32_t type;
  std::vector<VertexId> vertices;
  std::optional<Port> src;
  std::optional<Port> tgt;
  EdgeId expand_edge{};
};

struct HostIndex {
  std::vector<HostWire> wires;
  std::map<Port, std::size_t> out_wire;
  std::map<Port, std::size_t> in_wire;
  std::map<std::uint32_t, std::vector<VertexId>> boxes_by_type;
};

HostIndex index_host(const StringGraph& h) {
  HostIndex idx;
  for (const auto& [id, rec] : h.vertices()) {
    if (rec.vertex.is_box()) {
      idx.boxes_by_type[rec.vertex.type].push_back(id);
      continue;
    }
    const auto in_e = h.in_edge(id);
    const auto out_e = h.out_edge(id);
    HostWire w{WireKind::kIsolated, rec.vertex.type, {id}, std::nullopt, std::nullopt, EdgeId{}};
    const bool pred_box = in_e && h.vertex(h.edge(*in_e).src).is_box();
    const bool succ_box = out_e && h.vertex(h.edge(*out_e).tgt).is_box();
    const bool pred_wire = in_e && !pred_box;
    const bool succ_wire = out_e && !succ_box;
    if (pred_wire && h.edge(*in_e).src == id) {
      w.kind = WireKind::kCircle;
      w.expand_edge = *out_e;
    } else if (pred_wire) {
      continue;  // second vertex of a strand; indexed from its start
    } else if (succ_wire) {
      w.kind = WireKind::kStrand;
      w.vertices.push_back(h.edge(*out_e).tgt);
      w.expand_edge = *out_e;
    } else if (pred_box && succ_box) {
      w.kind = WireKind::kBoxBox;
      w.expand_edge = *out_e;
    } else if (succ_box) {
      w.kind = WireKind::kInBox;
      w.expand_edge = *out_e;
    } else if (pred_box) {
      w.kind = WireKind::kBoxOut;
      w.expand_edge = *in_e;
    }
    if (pred_box) w.src = Port{h.edge(*in_e).src, h.edge(*in_e).port};
    if (succ_box) w.tgt = Port{h.edge(*out_e).tgt, h.edge(*out_e).port};
    const std::size_t n = idx.wires.size();
    if (w.src) idx.out_wire.emplace(*w.src, n);
    if (w.tgt) idx.in_wire.emplace(*w.tgt, n);
    idx.wires.push_back(std::move(w));
  }
  return idx;
}

struct PortLink {
  bool to_box = false;
  VertexId wire{};
  std::size_t other = 0;  // pattern box index when to_box
  std::uint32_t other_port = 0;
};

struct PatternBox {
  VertexId id;
  std::uint32_t type;
  VertexData data;
  std::vector<PortLink> outs;
  std::vector<PortLink> ins;
};

struct Pattern {
  std::vector<PatternBox> boxes;
  std::vector<std::size_t> order;
  std::vector<VertexId> circles;
  std::vector<std::pair<VertexId, VertexId>> strands;
};

Pattern index_pattern(const StringGraph& l) {
  Pattern p;
  std::map<VertexId, std::size_t> box_index;
  for (const auto& [id, rec] : l.vertices()) {
    if (!rec.vertex.is_box()) continue;
    box_index.emplace(id, p.boxes.size());
    p.boxes.push_back({id, rec.vertex.type, rec.vertex.data, {}, {}});
  }
  const auto& sig = l.sig();
  for (auto& b : p.boxes) {
    b.outs.resize(sig.arity_out(b.type));
    b.ins.resize(sig.arity_in(b.type));
    for (EdgeId e : l.out_edges(b.id)) {
      const Edge& edge = l.edge(e);
      PortLink link;
      link.wire = edge.tgt;
      if (auto nxt = l.out_edge(edge.tgt)) {
        const Edge& n = l.edge(*nxt);
        link.to_box = true;
        link.other = box_index.at(n.tgt);
        link.other_port = n.port;
      }
      b.outs.at(edge.port) = link;
    }
    for (EdgeId e : l.in_edges(b.id)) {
      const Edge& edge = l.edge(e);
      PortLink link;
      link.wire = edge.src;
      if (auto prv = l.in_edge(edge.src)) {
        const Edge& n = l.edge(*prv);
        link.to_box = true;
        link.other = box_index.at(n.src);
        link.other_port = n.port;
      }
      b.ins.at(edge.port) = link;
    }
  }
  // Breadth-first order along box-box wires so later boxes are pinned.
  std::vector<bool> seen(p.boxes.size(), false);
  for (std::size_t s = 0; s < p.boxes.size(); ++s) {
    if (seen[s]) continue;
    std::deque<std::size_t> q{s};
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t k = q.front();
      q.pop_front();
      p.order.push_back(k);
      for (const auto* links : {&p.boxes[k].outs, &p.boxes[k].ins}) {
        for (const auto& link : *links) {
          if (link.to_box && !seen[link.other]) {
            seen[link.other] = true;
            q.push_back(link.other);
          }
        }
      }
    }
  }
  for (const auto& [id, rec] : l.vertices()) {
    if (!rec.vertex.is_wire()) continue;
    const auto in_e = l.in_edge(id);
    const auto out_e = l.out_edge(id);
    if (in_e && l.edge(*in_e).src == id) {
      p.circles.push_back(id);
    } else if (!in_e && out_e && l.vertex(l.edge(*out_e).tgt).is_wire()) {
      p.strands.emplace_back(id, l.edge(*out_e).tgt);
    }
  }
  return p;
}

struct WireItems {
  std::optional<VertexId> s;
  std::optional<VertexId> e;
  std::vector<std::size_t> strands;  // pattern strand indices in layout order
  bool exclusive = false;
};

class HomeoMatcher {
 public:
  HomeoMatcher(std::shared_ptr<const RewriteRule> rule, StringGraph host, std::uint64_t source_fp)
      : rule_(std::move(rule)),
        host_(std::move(host)),
        source_fp_(source_fp),
        pattern_graph_(normalize_wires(rule_->lhs)),
        pattern_(index_pattern(pattern_graph_)),
        index_(index_host(host_)) {}

  void run(const std::function<bool(Match&&)>& visit) {
    visit_ = &visit;
    stop_ = false;
    image_.assign(pattern_.boxes.size(), VertexId{});
    assigned_.assign(pattern_.boxes.size(), false);
    // Cheap rejection: enough host boxes of every pattern type.
    std::map<std::uint32_t, std::size_t> need;
    for (const auto& b : pattern_.boxes) ++need[b.type];
    for (const auto& [t, n] : need) {
      auto it = index_.boxes_by_type.find(t);
      if (it == index_.boxes_by_type.end() || it->second.size() < n) return;
    }
    assign_box(0);
  }

 private:
  std::optional<Port> host_port_wire_src(std::size_t wire) const { return index_.wires[wire].src; }

  bool consistent(std::size_t k, VertexId c) const {
    const PatternBox& b = pattern_.boxes[k];
    auto img = [&](std::size_t other) -> std::optional<VertexId> {
      if (other == k) return c;
      if (assigned_[other]) return image_[other];
      return std::nullopt;
    };
    for (std::uint32_t j = 0; j < b.outs.size(); ++j) {
      const PortLink& link = b.outs[j];
      if (!link.to_box) continue;
      auto target = img(link.other);
      if (!target) continue;
      auto it = index_.out_wire.find({c, j});
      if (it == index_.out_wire.end()) return false;
      const HostWire& w = index_.wires[it->second];
      if (w.kind != WireKind::kBoxBox || *w.tgt != Port{*target, link.other_port}) return false;
    }
    for (std::uint32_t i = 0; i < b.ins.size(); ++i) {
      const PortLink& link = b.ins[i];
      if (!link.to_box) continue;
      auto source = img(link.other);
      if (!source) continue;
      auto it = index_.in_wire.find({c, i});
      if (it == index_.in_wire.end()) return false;
      const HostWire& w = index_.wires[it->second];
      if (w.kind != WireKind::kBoxBox || *w.src != Port{*source, link.other_port}) return false;
    }
    return true;
  }

  std::vector<VertexId> candidates(std::size_t k) const {
    const PatternBox& b = pattern_.boxes[k];
    for (std::uint32_t j = 0; j < b.outs.size(); ++j) {
      const PortLink& link = b.outs[j];
      if (!link.to_box || link.other == k || !assigned_[link.other]) continue;
      auto it = index_.in_wire.find({image_[link.other], link.other_port});
      if (it == index_.in_wire.end() || !index_.wires[it->second].src) return {};
      return {index_.wires[it->second].src->first};
    }
    for (std::uint32_t i = 0; i < b.ins.size(); ++i) {
      const PortLink& link = b.ins[i];
      if (!link.to_box || link.other == k || !assigned_[link.other]) continue;
      auto it = index_.out_wire.find({image_[link.other], link.other_port});
      if (it == index_.out_wire.end() || !index_.wires[it->second].tgt) return {};
      return {index_.wires[it->second].tgt->first};
    }
    auto it = index_.boxes_by_type.find(b.type);
    if (it == index_.boxes_by_type.end()) return {};
    return it->second;
  }

  void assign_box(std::size_t pos) {
    if (stop_) return;
    if (pos == pattern_.order.size()) {
      route_wires();
      return;
    }
    const std::size_t k = pattern_.order[pos];
    const PatternBox& b = pattern_.boxes[k];
    for (VertexId c : candidates(k)) {
      if (used_.count(c)) continue;
      const Vertex& hv = host_.vertex(c);
      if (!hv.is_box() || hv.type != b.type || hv.data != b.data) continue;
      if (!consistent(k, c)) continue;
      image_[k] = c;
      assigned_[k] = true;
      used_.insert(c);
      assign_box(pos + 1);
      used_.erase(c);
      assigned_[k] = false;
      if (stop_) return;
    }
  }

  void route_wires() {
    items_.clear();
    for (std::size_t k = 0; k < pattern_.boxes.size(); ++k) {
      const PatternBox& b = pattern_.boxes[k];
      for (std::uint32_t j = 0; j < b.outs.size(); ++j) {
        const std::size_t w = index_.out_wire.at({image_[k], j});
        if (b.outs[j].to_box) {
          items_[w].exclusive = true;
        } else {
          items_[w].s = b.outs[j].wire;
        }
      }
      for (std::uint32_t i = 0; i < b.ins.size(); ++i) {
        if (b.ins[i].to_box) continue;
        items_[index_.in_wire.at({image_[k], i})].e = b.ins[i].wire;
      }
    }
    circle_images_.assign(pattern_.circles.size(), 0);
    assign_circle(0, 0);
  }

  void assign_circle(std::size_t ci, std::size_t min_wire) {
    if (stop_) return;
    if (ci == pattern_.circles.size()) {
      strand_wires_.assign(pattern_.strands.size(), 0);
      assign_strand(0);
      return;
    }
    const std::uint32_t type = pattern_graph_.vertex(pattern_.circles[ci]).type;
    // Circles of equal type are interchangeable: assign in increasing order.
    std::size_t start = 0;
    if (ci > 0 && pattern_graph_.vertex(pattern_.circles[ci - 1]).type == type) start = min_wire;
    for (std::size_t w = start; w < index_.wires.size(); ++w) {
      const HostWire& hw = index_.wires[w];
      if (hw.kind != WireKind::kCircle || hw.type != type || items_[w].exclusive) continue;
      items_[w].exclusive = true;
      circle_images_[ci] = w;
      assign_circle(ci + 1, w + 1);
      items_[w].exclusive = false;
      if (stop_) return;
    }
  }

  void assign_strand(std::size_t si) {
    if (stop_) return;
    if (si == pattern_.strands.size()) {
      layout_and_emit();
      return;
    }
    const std::uint32_t type = pattern_graph_.vertex(pattern_.strands[si].first).type;
    for (std::size_t w = 0; w < index_.wires.size(); ++w) {
      const HostWire& hw = index_.wires[w];
      if (hw.type != type || hw.kind == WireKind::kIsolated) continue;
      auto it = items_.find(w);
      if (it != items_.end() && it->second.exclusive) continue;
      strand_wires_[si] = w;
      assign_strand(si + 1);
      if (stop_) return;
    }
  }

  void layout_and_emit() {
    std::map<std::size_t, std::vector<std::size_t>> per_wire;
    for (std::size_t si = 0; si < strand_wires_.size(); ++si) per_wire[strand_wires_[si]].push_back(si);
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> groups(per_wire.begin(), per_wire.end());
    permute_groups(groups, 0);
  }

  void permute_groups(std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& groups, std::size_t gi) {
    if (stop_) return;
    if (gi == groups.size()) {
      emit(groups);
      return;
    }
    auto& seq = groups[gi].second;
    std::sort(seq.begin(), seq.end());
    const HostWire& hw = index_.wires[groups[gi].first];
    const auto it = items_.find(groups[gi].first);
    const bool rotational = hw.kind == WireKind::kCircle && (it == items_.end() || (!it->second.s && !it->second.e));
    do {
      // On a bare host circle, rotations of one layout are the same match.
      if (rotational && seq.front() != *std::min_element(seq.begin(), seq.end())) continue;
      permute_groups(groups, gi + 1);
      if (stop_) return;
    } while (std::next_permutation(seq.begin(), seq.end()));
  }

  void emit(const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& groups) {
    Match m;
    m.rule = rule_;
    m.host = host_;
    m.source_fingerprint = source_fp_;
    m.pattern = pattern_graph_;
    StringGraph x = host_;
    GraphMap& emb = m.embedding;
    std::set<VertexId> anchor_v;
    std::set<EdgeId> anchor_e;
    auto anchor_wire = [&](const HostWire& hw) {
      for (VertexId v : hw.vertices) {
        anchor_v.insert(v);
        if (auto e = host_.in_edge(v)) anchor_e.insert(*e);
        if (auto e = host_.out_edge(v)) anchor_e.insert(*e);
      }
    };

    for (std::size_t k = 0; k < pattern_.boxes.size(); ++k) {
      emb.vertices.emplace(pattern_.boxes[k].id, image_[k]);
      m.box_images.push_back(image_[k]);
      m.key.push_back(raw(image_[k]));
      anchor_v.insert(image_[k]);
    }
    // Pattern box-box wires occupy their host wire without expansion.
    for (std::size_t k = 0; k < pattern_.boxes.size(); ++k) {
      const PatternBox& b = pattern_.boxes[k];
      for (std::uint32_t j = 0; j < b.outs.size(); ++j) {
        if (!b.outs[j].to_box) continue;
        const HostWire& hw = index_.wires[index_.out_wire.at({image_[k], j})];
        const VertexId w = hw.vertices.front();
        emb.vertices.emplace(b.outs[j].wire, w);
        emb.edges.emplace(*pattern_graph_.in_edge(b.outs[j].wire), *host_.in_edge(w));
        emb.edges.emplace(*pattern_graph_.out_edge(b.outs[j].wire), *host_.out_edge(w));
        anchor_wire(hw);
      }
    }
    for (std::size_t ci = 0; ci < pattern_.circles.size(); ++ci) {
      const HostWire& hw = index_.wires[circle_images_[ci]];
      const VertexId c = hw.vertices.front();
      emb.vertices.emplace(pattern_.circles[ci], c);
      emb.edges.emplace(*pattern_graph_.out_edge(pattern_.circles[ci]), *host_.out_edge(c));
      m.key.push_back(raw(c));
      anchor_wire(hw);
    }
    std::map<std::size_t, const std::vector<std::size_t>*> strands_on;
    for (const auto& [w, seq] : groups) strands_on.emplace(w, &seq);
    std::set<std::size_t> touched;
    for (const auto& [w, it] : items_) {
      if (!it.exclusive && (it.s || it.e)) touched.insert(w);
    }
    for (const auto& [w, seq] : groups) touched.insert(w);
    std::vector<std::uint64_t> strand_key(2 * pattern_.strands.size(), 0);

    for (std::size_t w : touched) {
      const HostWire& hw = index_.wires[w];
      anchor_wire(hw);
      const WireItems empty_items;
      const auto found = items_.find(w);
      const WireItems& it = found == items_.end() ? empty_items : found->second;
      const std::vector<std::size_t>* seq = strands_on.count(w) ? strands_on.at(w) : nullptr;
      const std::size_t n_strands = seq ? seq->size() : 0;
      const std::size_t needed = (it.s ? 1 : 0) + 2 * n_strands + (it.e ? 1 : 0);
      const std::size_t have = hw.vertices.size();
      std::vector<VertexId> inserted;
      if (needed > have) {
        const int k = static_cast<int>(needed - have);
        inserted = expand_wire_in_place(x, hw.expand_edge, k);
        m.expansions.emplace_back(hw.expand_edge, k);
      }
      std::vector<VertexId> chain;
      switch (hw.kind) {
        case WireKind::kBoxOut:
          chain = inserted;
          chain.push_back(hw.vertices.front());
          break;
        case WireKind::kStrand:
          chain = {hw.vertices.front()};
          chain.insert(chain.end(), inserted.begin(), inserted.end());
          chain.push_back(hw.vertices.back());
          break;
        default:
          chain = {hw.vertices.front()};
          chain.insert(chain.end(), inserted.begin(), inserted.end());
          break;
      }
      std::size_t pos = 0;
      if (it.s) {
        emb.vertices.emplace(*it.s, chain[0]);
        emb.edges.emplace(*pattern_graph_.in_edge(*it.s), *x.in_edge(chain[0]));
        pos = 1;
      }
      if (seq) {
        for (std::size_t si : *seq) {
          const auto& [a, b] = pattern_.strands[si];
          emb.vertices.emplace(a, chain[pos]);
          emb.vertices.emplace(b, chain[pos + 1]);
          emb.edges.emplace(*pattern_graph_.out_edge(a), *x.out_edge(chain[pos]));
          strand_key[2 * si] = raw(hw.vertices.front());
          strand_key[2 * si + 1] = pos;
          pos += 2;
        }
      }
      if (it.e) {
        emb.vertices.emplace(*it.e, chain.back());
        emb.edges.emplace(*pattern_graph_.out_edge(*it.e), *x.out_edge(chain.back()));
      }
    }
    m.key.insert(m.key.end(), strand_key.begin(), strand_key.end());
    m.expanded = std::move(x);
    m.anchor_vertices.assign(anchor_v.begin(), anchor_v.end());
    m.anchor_edges.assign(anchor_e.begin(), anchor_e.end());
    if (!(*visit_)(std::move(m))) stop_ = true;
  }

  std::shared_ptr<const RewriteRule> rule_;
  StringGraph host_;
  std::uint64_t source_fp_;
  StringGraph pattern_graph_;
  Pattern pattern_;
  HostIndex index_;
  const std::function<bool(Match&&)>* visit_ = nullptr;
  bool stop_ = false;
  std::vector<VertexId> image_;
  std::vector<bool> assigned_;
  std::set<VertexId> used_;
  std::map<std::size_t, WireItems> items_;
  std::vector<std::size_t> circle_images_;
  std::vector<std::size_t> strand_wires_;
};

// ---------------------------------------------------------------------------
// Literal matching: injective typed homomorphism of the lhs into the host.

class LiteralMatcher {
 public:
  LiteralMatcher(std::shared_ptr<const RewriteRule> rule, StringGraph host, std::uint64_t source_fp)
      : rule_(std::move(rule)), host_(std::move(host)), source_fp_(source_fp) {
    const StringGraph& l = rule_->lhs;
    for (const auto& [l_box, r_box] : rule_->kept) kept_.insert(l_box);
    // Breadth-first vertex order so every later vertex has a mapped neighbour.
    std::set<VertexId> seen;
    for (const auto& [id, rec] : l.vertices()) {
      if (seen.count(id)) continue;
      std::deque<VertexId> q{id};
      seen.insert(id);
      while (!q.empty()) {
        VertexId v = q.front();
        q.pop_front();
        order_.push_back(v);
        for (EdgeId e : l.in_edges(v)) {
          if (seen.insert(l.edge(e).src).second) q.push_back(l.edge(e).src);
        }
        for (EdgeId e : l.out_edges(v)) {
          if (seen.insert(l.edge(e).tgt).second) q.push_back(l.edge(e).tgt);
        }
      }
    }
  }

  void run(const std::function<bool(Match&&)>& visit) {
    visit_ = &visit;
    extend(0);
  }

 private:
  bool vertex_ok(VertexId p, VertexId h) const {
    const Vertex& a = rule_->lhs.vertex(p);
    const Vertex& b = host_.vertex(h);
    if (a.kind != b.kind || a.type != b.type) return false;
    if (a.is_box() && !kept_.count(p) && a.data != b.data) return false;
    return true;
  }

  std::optional<EdgeId> host_edge(const Edge& pe) const {
    const VertexId s = map_.at(pe.src);
    const VertexId t = map_.at(pe.tgt);
    for (EdgeId he : host_.out_edges(s)) {
      const Edge& e = host_.edge(he);
      if (e.tgt == t && e.kind == pe.kind && e.type == pe.type && e.port == pe.port) return he;
    }
    return std::nullopt;
  }

  bool edges_ok(VertexId p) const {
    const StringGraph& l = rule_->lhs;
    for (const auto* list : {&l.in_edges(p), &l.out_edges(p)}) {
      for (EdgeId e : *list) {
        const Edge& pe = l.edge(e);
        if (!map_.count(pe.src) || !map_.count(pe.tgt)) continue;
        if (!host_edge(pe)) return false;
      }
    }
    // Interior vertices may not have host edges outside the image.
    if (!is_boundary(l, p) && !kept_.count(p)) {
      const VertexId h = map_.at(p);
      if (host_.in_edges(h).size() != l.in_edges(p).size() || host_.out_edges(h).size() != l.out_edges(p).size()) {
        return false;
      }
    }
    return true;
  }

  std::vector<VertexId> candidates(VertexId p) const {
    const StringGraph& l = rule_->lhs;
    for (EdgeId e : l.in_edges(p)) {
      const Edge& pe = l.edge(e);
      if (!map_.count(pe.src)) continue;
      std::vector<VertexId> out;
      for (EdgeId he : host_.out_edges(map_.at(pe.src))) {
        const Edge& h = host_.edge(he);
        if (h.kind == pe.kind && h.port == pe.port && h.type == pe.type) out.push_back(h.tgt);
      }
      return out;
    }
    for (EdgeId e : l.out_edges(p)) {
      const Edge& pe = l.edge(e);
      if (!map_.count(pe.tgt)) continue;
      std::vector<VertexId> out;
      for (EdgeId he : host_.in_edges(map_.at(pe.tgt))) {
        const Edge& h = host_.edge(he);
        if (h.kind == pe.kind && h.port == pe.port && h.type == pe.type) out.push_back(h.src);
      }
      return out;
    }
    std::vector<VertexId> out;
    for (const auto& [id, rec] : host_.vertices()) out.push_back(id);
    return out;
  }

  void extend(std::size_t k) {
    if (stop_) return;
    if (k == order_.size()) {
      emit();
      return;
    }
    const VertexId p = order_[k];
    for (VertexId h : candidates(p)) {
      if (used_.count(h) || !vertex_ok(p, h)) continue;
      map_[p] = h;
      used_.insert(h);
      if (edges_ok(p)) extend(k + 1);
      used_.erase(h);
      map_.erase(p);
      if (stop_) return;
    }
  }

  void emit() {
    Match m;
    m.rule = rule_;
    m.host = host_;
    m.expanded = host_;
    m.pattern = rule_->lhs;
    m.source_fingerprint = source_fp_;
    for (const auto& [p, h] : map_) {
      m.embedding.vertices.emplace(p, h);
      m.key.push_back(raw(h));
      m.anchor_vertices.push_back(h);
      if (rule_->lhs.vertex(p).is_box()) m.box_images.push_back(h);
    }
    for (const auto& [id, e] : rule_->lhs.edges()) {
      const EdgeId he = *host_edge(e);
      m.embedding.edges.emplace(id, he);
      m.anchor_edges.push_back(he);
    }
    std::sort(m.anchor_vertices.begin(), m.anchor_vertices.end());
    std::sort(m.anchor_edges.begin(), m.anchor_edges.end());
    if (!(*visit_)(std::move(m))) stop_ = true;
  }

  std::shared_ptr<const RewriteRule> rule_;
  StringGraph host_;
  std::uint64_t source_fp_;
  std::set<VertexId> kept_;
  std::vector<VertexId> order_;
  std::map<VertexId, VertexId> map_;
  std::set<VertexId> used_;
  const std::function<bool(Match&&)>* visit_ = nullptr;
  bool stop_ = false;
};

void run_matcher(std::shared_ptr<const RewriteRule> rule, const StringGraph& host,
                 const std::function<bool(Match&&)>& visit) {
  if (rule->lhs.signature() != host.signature() && !(rule->lhs.sig() == host.sig())) {
    throw Error(ErrorCode::kSignatureMismatch, "rule and host are typed over different signatures");
  }
  const std::uint64_t fp = fingerprint(host);
  if (rule->mode == MatchMode::kLiteral) {
    LiteralMatcher(std::move(rule), host, fp).run(visit);
    return;
  }
  StringGraph minimal = is_minimal(host) ? host : normalize_wires(host);
  HomeoMatcher(std::move(rule), std::move(minimal), fp).run(visit);
}

}  // namespace

void for_each_match(const RewriteRule& r, const StringGraph& host, const std::function<bool(Match&&)>& visit) {
  run_matcher(std::make_shared<const RewriteRule>(r), host, visit);
}

std::vector<Match> find_matches(const RewriteRule& r, const StringGraph& host) {
  std::vector<Match> out;
  run_matcher(std::make_shared<const RewriteRule>(r), host, [&](Match&& m) {
    out.push_back(std::move(m));
    return true;
  });
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) { return a.key < b.key; });
  return out;
}

bool has_match(const RewriteRule& r, const StringGraph& host) {
  bool found = false;
  for_each_match(r, host, [&](Match&&) {
    found = true;
    return false;
  });
  return found;
}

StringGraph apply(const Match& m) {
  const RewriteRule& rule = *m.rule;
  const StringGraph& lhs = m.pattern;
  StringGraph out = m.expanded;

  // Pushout complement: remove edge images, then interior vertex images.
  std::map<VertexId, VertexId> kept;
  for (const auto& [l, r] : rule.kept) kept.emplace(l, r);
  for (const auto& [pe, he] : m.embedding.edges) {
    if (out.has_edge(he)) out.remove_edge(he);
  }
  for (const auto& [pv, hv] : m.embedding.vertices) {
    if (kept.count(pv) || is_boundary(lhs, pv)) continue;
    out.remove_vertex(hv);
  }

  // Pushout along the interface: rhs boundary and kept boxes land on their
  // host images, everything else is fresh.
  std::map<VertexId, VertexId> rmap;
  for (const auto& [l, r] : rule.iface) rmap.emplace(r, m.embedding.vertices.at(l));
  for (const auto& [l, r] : rule.kept) rmap.emplace(r, m.embedding.vertices.at(l));
  for (const auto& [id, rec] : rule.rhs.vertices()) {
    if (rmap.count(id)) continue;
    rmap.emplace(id, rec.vertex.is_wire() ? out.add_wire(rec.vertex.type) : out.add_box(rec.vertex.type, rec.vertex.data));
  }
  for (const auto& [id, e] : rule.rhs.edges()) {
    Edge copy = e;
    copy.src = rmap.at(e.src);
    copy.tgt = rmap.at(e.tgt);
    out.add_edge(copy);
  }
  if (rule.mode == MatchMode::kHomeomorphic) out = normalize_wires(out);
  out.set_input_order(m.host.input_order());
  out.set_output_order(m.host.output_order());
  return out;
}

StringGraph apply(const Match& m, const StringGraph& host) {
  if (fingerprint(host) != m.source_fingerprint) {
    throw Error(ErrorCode::kStaleMatch, "host changed since the match was found");
  }
  return apply(m);
}

NormalizeResult normalize(const StringGraph& g, const RewriteSystem& rs, const NormalizeOptions& opts) {
  NormalizeResult res{g, {}, NormalizeStatus::kNormalForm};
  std::mt19937_64 rng(opts.seed);
  for (;;) {
    std::optional<std::pair<const RewriteRule*, std::size_t>> pick;
    std::vector<Match> chosen_matches;
    if (opts.strategy == Strategy::kFirstMatch) {
      for (const auto& r : rs.rules()) {
        auto ms = find_matches(r, res.graph);
        if (!ms.empty()) {
          pick = std::make_pair(&r, std::size_t{0});
          chosen_matches = std::move(ms);
          break;
        }
      }
    } else {
      std::vector<std::pair<const RewriteRule*, std::size_t>> all;
      std::vector<std::vector<Match>> per_rule;
      for (const auto& r : rs.rules()) {
        per_rule.push_back(find_matches(r, res.graph));
        for (std::size_t i = 0; i < per_rule.back().size(); ++i) all.emplace_back(&r, i);
      }
      if (!all.empty()) {
        pick = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
        chosen_matches = std::move(per_rule[static_cast<std::size_t>(pick->first - rs.rules().data())]);
      }
    }
    if (!pick) {
      res.status = NormalizeStatus::kNormalForm;
      return res;
    }
    if (res.trace.size() >= opts.max_steps) {
      res.status = NormalizeStatus::kStepLimit;
      return res;
    }
    const Match& m = chosen_matches[pick->second];
    res.trace.push_back({pick->first->name, pick->second, m.box_images});
    res.graph = apply(m);
  }
}

StringGraph replay(const StringGraph& g, const RewriteSystem& rs, const std::vector<TraceEntry>& trace) {
  StringGraph cur = g;
  for (const auto& step : trace) {
    auto ms = find_matches(rs.require(step.rule), cur);
    if (step.match_index >= ms.size()) throw Error(ErrorCode::kStaleMatch, "trace step does not fit the graph");
    cur = apply(ms[step.match_index]);
  }
  return cur;
}

std::optional<NormalizeResult> derive(const StringGraph& g, const RewriteSystem& rs,
                                      const std::vector<std::string>& script,
                                      const std::function<bool(const StringGraph&)>& goal, std::size_t max_visits) {
  std::vector<const RewriteRule*> rules;
  for (const auto& name : script) rules.push_back(&rs.require(name));
  NormalizeResult res{g, {}, NormalizeStatus::kNormalForm};
  std::size_t visits = 0;
  std::function<bool(const StringGraph&, std::size_t)> step = [&](const StringGraph& cur, std::size_t k) {
    if (k == rules.size()) {
      if (!goal(cur)) return false;
      res.graph = cur;
      return true;
    }
    auto ms = find_matches(*rules[k], cur);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (++visits > max_visits) return false;
      res.trace.push_back({rules[k]->name, i, ms[i].box_images});
      if (step(apply(ms[i]), k + 1)) return true;
      res.trace.pop_back();
    }
    return false;
  };
  if (!step(g, 0)) return std::nullopt;
  return res;
}

bool joinable(const StringGraph& g, const StringGraph& h, const RewriteSystem& rs, const JoinLimits& limits) {
  auto key = [](const StringGraph& x) { return canonical_key(normalize_wires(x)); };
  std::unordered_map<std::string, int> reached;  // bit 1: from g, bit 2: from h
  std::vector<std::pair<StringGraph, int>> frontier{{g, 1}, {h, 2}};
  for (const auto& [x, side] : frontier) {
    int& bits = reached[key(x)];
    bits |= side;
    if (bits == 3) return true;
  }
  for (std::size_t depth = 0; depth < limits.max_depth && !frontier.empty(); ++depth) {
    std::vector<std::pair<StringGraph, int>> next;
    for (const auto& [x, side] : frontier) {
      for (const auto& r : rs.rules()) {
        for (const Match& m : find_matches(r, x)) {
          StringGraph y = apply(m);
          const std::string k = key(y);
          auto [it, fresh] = reached.emplace(k, 0);
          const bool new_for_side = (it->second & side) == 0;
          it->second |= side;
          if (it->second == 3) return true;
          if (new_for_side) next.emplace_back(std::move(y), side);
          if (reached.size() > limits.max_states) return false;
        }
      }
    }
    frontier = std::move(next);
  }
  return false;
}

RewriteSystem homeomorphism_rules(const SignaturePtr& sig) {
  RewriteSystem rs("homeomorphism");
  for (std::uint32_t x = 0; x < sig->objects().size(); ++x) {
    const std::string& name = sig->object(x).name;
    {
      StringGraph lhs(sig);
      VertexId a = lhs.add_wire(x);
      VertexId b = lhs.add_wire(x);
      lhs.connect(a, b);
      lhs.connect(b, a);
      StringGraph rhs(sig);
      VertexId c = rhs.add_wire(x);
      rhs.connect(c, c);
      rs.add(make_rule("hL_" + name, lhs, rhs, MatchMode::kLiteral));
    }
    {
      StringGraph lhs(sig);
      VertexId a = lhs.add_wire(x);
      VertexId mid = lhs.add_wire(x);
      VertexId b = lhs.add_wire(x);
      lhs.connect(a, mid);
      lhs.connect(mid, b);
      lhs.refresh_boundary_orders();
      StringGraph rhs(sig);
      VertexId c = rhs.add_wire(x);
      VertexId d = rhs.add_wire(x);
      rhs.connect(c, d);
      rhs.refresh_boundary_orders();
      rs.add(make_rule("hW_" + name, lhs, rhs, MatchMode::kLiteral));
    }
  }
  for (std::uint32_t f = 0; f < sig->morphisms().size(); ++f) {
    const auto& mt = sig->morphism(f);
    VertexData data;
    if (mt.data_kind == DataKind::kAngle) data = Angle(0, 1);
    if (mt.data_kind == DataKind::kOpaque) data = std::string("any");
    // The kept box anchors a single port; `extra` inserts the vertex that the
    // contraction removes.
    auto build = [&](bool input, std::uint32_t port, bool extra, VertexId* box) {
      StringGraph g(sig);
      *box = g.add_box(f, data);
      const std::uint32_t type = input ? sig->dom_type(f, port) : sig->cod_type(f, port);
      VertexId end = g.add_wire(type);
      VertexId near = end;
      if (extra) {
        near = g.add_wire(type);
        if (input) {
          g.connect(end, near);
        } else {
          g.connect(near, end);
        }
      }
      if (input) {
        g.connect(near, *box, port);
      } else {
        g.connect(*box, near, port);
      }
      g.refresh_boundary_orders();
      return g;
    };
    auto add = [&](std::string name, bool input, std::uint32_t port) {
      VertexId lb{}, rb{};
      StringGraph lhs = build(input, port, true, &lb);
      StringGraph rhs = build(input, port, false, &rb);
      RewriteRule r = make_rule(std::move(name), std::move(lhs), std::move(rhs), MatchMode::kLiteral);
      r.kept.emplace_back(lb, rb);
      rs.add(std::move(r));
    };
    for (std::uint32_t i = 0; i < sig->arity_in(f); ++i) add("hI_" + mt.name + "_" + std::to_string(i), true, i);
    for (std::uint32_t j = 0; j < sig->arity_out(f); ++j) add("hO_" + mt.name + "_" + std::to_string(j), false, j);
  }
  return rs;
}

}  // namespace strigraph
