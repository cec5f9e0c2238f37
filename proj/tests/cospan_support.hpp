// SPDX-License-Identifier: Apache-2.0
// Random framed cospans over sig_frob and index-loop oracles for the tensor
// operations, shared by the cospan tests and the acceptance run.
#pragma once

#include <optional>
#include <random>

#include "strigraph/cospan.hpp"
#include "strigraph/graph_ops.hpp"
#include "support.hpp"

namespace strigraph::fixtures {

inline const FramePoint kQp{0, Sign::kPlus};
inline const FramePoint kQm{0, Sign::kMinus};

inline Frame frame(std::initializer_list<FramePoint> ps) { return Frame{std::vector<FramePoint>(ps)}; }

inline Frame random_frame(std::mt19937_64& rng, std::size_t max_len, bool positive_only = false) {
  Frame x;
  const std::size_t n = rng() % (max_len + 1);
  for (std::size_t k = 0; k < n; ++k) x.points.push_back((positive_only || rng() % 3 != 0) ? kQp : kQm);
  return x;
}

/// Random cospan over sig_frob (one object Q). Fixed frames are honoured
/// exactly; leftover boundary goes to a free side or is capped off with a
/// unit / counit box.
inline FramedCospan random_cospan(const SignaturePtr& sig, std::mt19937_64& rng, std::optional<Frame> dom,
                           std::optional<Frame> cod) {
  StringGraph g = random_graph(sig, rng, 14, 3);
  for (auto it = g.vertices().begin(); it != g.vertices().end();) {
    const VertexId id = it->first;
    ++it;
    if (g.is_isolated(id)) g.remove_vertex(id);
  }
  g.refresh_boundary_orders();
  std::vector<VertexId> ins, outs;
  for (VertexId v : g.input_order()) ins.push_back(v);
  for (VertexId v : g.output_order()) outs.push_back(v);
  std::shuffle(ins.begin(), ins.end(), rng);
  std::shuffle(outs.begin(), outs.end(), rng);
  auto take = [&](bool want_input) {
    auto& pool = want_input ? ins : outs;
    if (!pool.empty() && rng() % 4 != 0) {
      VertexId v = pool.back();
      pool.pop_back();
      return v;
    }
    VertexId a = g.add_wire(0u);
    VertexId b = g.add_wire(0u);
    g.connect(a, b);
    (want_input ? outs : ins).push_back(want_input ? b : a);
    return want_input ? a : b;
  };
  std::vector<VertexId> d, c;
  if (dom) {
    for (const auto& p : dom->points) d.push_back(take(p.sign == Sign::kPlus));
  }
  if (cod) {
    for (const auto& p : cod->points) c.push_back(take(p.sign == Sign::kMinus));
  }
  Frame dom_f = dom.value_or(Frame{});
  Frame cod_f = cod.value_or(Frame{});
  std::vector<std::pair<VertexId, bool>> left;
  for (VertexId v : ins) left.emplace_back(v, true);
  for (VertexId v : outs) left.emplace_back(v, false);
  std::shuffle(left.begin(), left.end(), rng);
  for (const auto& [v, is_input] : left) {
    const bool dom_free = !dom.has_value();
    const bool cod_free = !cod.has_value();
    if (!dom_free && !cod_free) {
      if (is_input) {
        VertexId u = g.add_box("w_unit");
        g.connect(u, v, 0);
      } else {
        VertexId u = g.add_box("w_counit");
        g.connect(v, u, 0);
      }
      continue;
    }
    const bool to_dom = dom_free && (!cod_free || rng() % 2 == 0);
    if (to_dom) {
      dom_f.points.push_back(is_input ? kQp : kQm);
      d.push_back(v);
    } else {
      cod_f.points.push_back(is_input ? kQm : kQp);
      c.push_back(v);
    }
  }
  return make_cospan(std::move(g), dom_f, cod_f, d, c);
}

inline bool equiv(const FramedCospan& f, const FramedCospan& g) {
  return f.dom == g.dom && f.cod == g.cod && equal_mod(f, g, RewriteSystem{}, {0, 1});
}

/// Second route for the trace: plug each traced output straight back into
/// its input.
inline FramedCospan trace_by_self_plug(const FramedCospan& f, std::size_t k) {
  StringGraph g = f.graph;
  for (std::size_t i = 0; i < k; ++i) {
    g = self_plug(g, f.c[f.c.size() - 1 - i], f.d[f.d.size() - 1 - i]);
  }
  Frame dom, cod;
  dom.points.assign(f.dom.points.begin(), f.dom.points.end() - static_cast<long>(k));
  cod.points.assign(f.cod.points.begin(), f.cod.points.end() - static_cast<long>(k));
  std::vector<VertexId> d(f.d.begin(), f.d.end() - static_cast<long>(k));
  std::vector<VertexId> c(f.c.begin(), f.c.end() - static_cast<long>(k));
  return make_cospan(normalize_wires(g), dom, cod, d, c);
}

inline Tensor kron_oracle(const Tensor& a, const Tensor& b) {
  IndexTypes up = a.upper(), lo = a.lower();
  up.insert(up.end(), b.upper().begin(), b.upper().end());
  lo.insert(lo.end(), b.lower().begin(), b.lower().end());
  Tensor out(up, lo);
  const auto ad = detail::dims_of(a.upper(), a.lower());
  const auto bd = detail::dims_of(b.upper(), b.lower());
  std::vector<int> ai(ad.size(), 0);
  do {
    std::vector<int> bi(bd.size(), 0);
    do {
      std::vector<int> u(ai.begin(), ai.begin() + static_cast<long>(a.upper().size()));
      std::vector<int> l(ai.begin() + static_cast<long>(a.upper().size()), ai.end());
      u.insert(u.end(), bi.begin(), bi.begin() + static_cast<long>(b.upper().size()));
      l.insert(l.end(), bi.begin() + static_cast<long>(b.upper().size()), bi.end());
      std::size_t k = 0;
      for (std::size_t i = 0; i < up.size(); ++i) k = k * static_cast<std::size_t>(up[i].dim) + static_cast<std::size_t>(u[i]);
      for (std::size_t i = 0; i < lo.size(); ++i) k = k * static_cast<std::size_t>(lo[i].dim) + static_cast<std::size_t>(l[i]);
      std::vector<int> au(ai.begin(), ai.begin() + static_cast<long>(a.upper().size()));
      std::vector<int> al(ai.begin() + static_cast<long>(a.upper().size()), ai.end());
      std::vector<int> bu(bi.begin(), bi.begin() + static_cast<long>(b.upper().size()));
      std::vector<int> bl(bi.begin() + static_cast<long>(b.upper().size()), bi.end());
      out[k] = a.at(au, al) * b.at(bu, bl);
    } while (detail::next_index(bi, bd));
  } while (detail::next_index(ai, ad));
  return out;
}

/// Sum over the last k upper and last k lower indices set equal.
inline Tensor partial_trace_oracle(const Tensor& t, std::size_t k) {
  IndexTypes up(t.upper().begin(), t.upper().end() - static_cast<long>(k));
  IndexTypes lo(t.lower().begin(), t.lower().end() - static_cast<long>(k));
  IndexTypes xs(t.upper().end() - static_cast<long>(k), t.upper().end());
  Tensor out(up, lo);
  const auto od = detail::dims_of(up, lo);
  std::vector<int> xd;
  for (const auto& x : xs) xd.push_back(x.dim);
  std::vector<int> oi(od.size(), 0);
  std::size_t flat = 0;
  do {
    Complex sum = 0;
    std::vector<int> xi(xd.size(), 0);
    do {
      std::vector<int> u(oi.begin(), oi.begin() + static_cast<long>(up.size()));
      std::vector<int> l(oi.begin() + static_cast<long>(up.size()), oi.end());
      u.insert(u.end(), xi.begin(), xi.end());
      l.insert(l.end(), xi.begin(), xi.end());
      sum += t.at(u, l);
    } while (detail::next_index(xi, xd));
    out[flat++] = sum;
  } while (detail::next_index(oi, od));
  return out;
}

}  // namespace strigraph::fixtures
