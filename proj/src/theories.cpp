// SPDX-License-Identifier: Apache-2.0
#include "strigraph/theories.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "strigraph/builder.hpp"
#include "strigraph/graph_ops.hpp"
#include "strigraph/iso.hpp"

namespace strigraph {

namespace {

using Mat = Eigen::MatrixXcd;
using Wires = std::vector<VertexId>;
using BuildFn = std::function<Wires(GraphBuilder&, const Wires&)>;

const double kSqrt2 = std::sqrt(2.0);

Mat hadamard() {
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  return h / kSqrt2;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  }
  return out;
}

/// Swap of two d-dimensional factors.
Mat swap_of(int d) {
  Mat s = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1;
  }
  return s;
}

Mat dense(const Tensor& t) { return t.matrix(); }

Tensor tensor_for(const Valuation& v, const std::string& m, const Mat& mat) {
  const std::uint32_t idx = v.signature()->require_morphism(m);
  return Tensor::from_matrix(v.cod_types(idx), v.dom_types(idx), mat);
}

/// Graph over object "q" with `inputs` inputs. Outputs that are bare inputs
/// get a second wire-vertex so every identity strand has two.
StringGraph build(const SignaturePtr& sig, int inputs, const BuildFn& f) {
  GraphBuilder b(sig);
  Wires ins;
  for (int i = 0; i < inputs; ++i) ins.push_back(b.input("q"));
  Wires outs = f(b, ins);
  for (auto& o : outs) {
    if (std::find(ins.begin(), ins.end(), o) != ins.end()) o = b.extend(o);
  }
  return b.finish(outs);
}

void add_rule(std::vector<RewriteRule>& out, const std::string& name, const std::string& tag, StringGraph lhs,
              StringGraph rhs) {
  RewriteRule r = make_rule(name, std::move(lhs), std::move(rhs));
  r.tag = tag;
  out.push_back(std::move(r));
}

void add_reversed(std::vector<RewriteRule>& out, const std::string& of, const std::string& name) {
  for (const auto& r : out) {
    if (r.name == of) {
      RewriteRule rev = reversed(r, name);
      rev.tag = r.tag;
      out.push_back(std::move(rev));
      return;
    }
  }
}

/// Monoid, comonoid, commutativity and Frobenius laws of one algebra.
void frobenius_rules(std::vector<RewriteRule>& out, const SignaturePtr& sig, const std::string& p) {
  const std::string M = p + "_mul", U = p + "_unit", C = p + "_comul", E = p + "_counit";
  auto rule = [&](const std::string& suffix, int n, const BuildFn& lhs, const BuildFn& rhs) {
    add_rule(out, p + "_" + suffix, "spider", build(sig, n, lhs), build(sig, n, rhs));
  };
  rule(
      "assoc", 3, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(M, {b.box1(M, {x[0], x[1]}), x[2]})}; },
      [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(M, {x[0], b.box1(M, {x[1], x[2]})})}; });
  add_reversed(out, p + "_assoc", p + "_assoc_r");
  rule(
      "coassoc", 1,
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[0]});
        auto o = b.box(C, {uv[0]});
        return Wires{o[0], o[1], uv[1]};
      },
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[0]});
        auto o = b.box(C, {uv[1]});
        return Wires{uv[0], o[0], o[1]};
      });
  add_reversed(out, p + "_coassoc", p + "_coassoc_r");
  rule(
      "comm", 2, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(M, {x[1], x[0]})}; },
      [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(M, {x[0], x[1]})}; });
  rule(
      "cocomm", 1,
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[0]});
        return Wires{uv[1], uv[0]};
      },
      [&](GraphBuilder& b, const Wires& x) { return b.box(C, {x[0]}); });
  rule(
      "unit_l", 1, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(M, {b.box1(U, {}), x[0]})}; },
      [&](GraphBuilder&, const Wires& x) { return x; });
  rule(
      "unit_r", 1, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(M, {x[0], b.box1(U, {})})}; },
      [&](GraphBuilder&, const Wires& x) { return x; });
  rule(
      "counit_l", 1,
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[0]});
        b.box(E, {uv[0]});
        return Wires{uv[1]};
      },
      [&](GraphBuilder&, const Wires& x) { return x; });
  rule(
      "counit_r", 1,
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[0]});
        b.box(E, {uv[1]});
        return Wires{uv[0]};
      },
      [&](GraphBuilder&, const Wires& x) { return x; });
  const BuildFn merged = [&](GraphBuilder& b, const Wires& x) { return b.box(C, {b.box1(M, {x[0], x[1]})}); };
  rule(
      "frob_l", 2,
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[1]});
        return Wires{b.box1(M, {x[0], uv[0]}), uv[1]};
      },
      merged);
  rule(
      "frob_r", 2,
      [&](GraphBuilder& b, const Wires& x) {
        auto uv = b.box(C, {x[0]});
        return Wires{uv[0], b.box1(M, {uv[1], x[1]})};
      },
      merged);
}

/// (mu_m (x) mu_m)(1 (x) swap (x) 1)(delta_c (x) delta_c) on two inputs.
Wires bialgebra_side(GraphBuilder& b, const Wires& x, const std::string& m, const std::string& c) {
  auto p = b.box(c, {x[0]});
  auto q = b.box(c, {x[1]});
  return Wires{b.box1(m, {p[0], q[0]}), b.box1(m, {p[1], q[1]})};
}

SignaturePtr zx_signature() {
  std::vector<MorphismType> ms;
  for (const std::string p : {"z", "x"}) {
    ms.push_back({p + "_mul", {"q", "q"}, {"q"}, DataKind::kNone});
    ms.push_back({p + "_unit", {}, {"q"}, DataKind::kNone});
    ms.push_back({p + "_comul", {"q"}, {"q", "q"}, DataKind::kNone});
    ms.push_back({p + "_counit", {"q"}, {}, DataKind::kNone});
  }
  ms.push_back({"z_phase", {"q"}, {"q"}, DataKind::kAngle});
  ms.push_back({"x_phase", {"q"}, {"q"}, DataKind::kAngle});
  ms.push_back({"h", {"q"}, {"q"}, DataKind::kNone});
  return make_signature({{"q", 2}}, std::move(ms));
}

SignaturePtr gw_signature() {
  std::vector<MorphismType> ms;
  for (const std::string p : {"g", "w"}) {
    ms.push_back({p + "_mul", {"q", "q"}, {"q"}, DataKind::kNone});
    ms.push_back({p + "_unit", {}, {"q"}, DataKind::kNone});
    ms.push_back({p + "_comul", {"q"}, {"q", "q"}, DataKind::kNone});
    ms.push_back({p + "_counit", {"q"}, {}, DataKind::kNone});
  }
  ms.push_back({"tick", {"q"}, {"q"}, DataKind::kNone});
  return make_signature({{"q", 2}}, std::move(ms));
}

void set_algebra(Valuation& v, const std::string& p, const Mat& mul, const Mat& unit, const Mat& comul,
                 const Mat& counit) {
  v.set(p + "_mul", tensor_for(v, p + "_mul", mul));
  v.set(p + "_unit", tensor_for(v, p + "_unit", unit));
  v.set(p + "_comul", tensor_for(v, p + "_comul", comul));
  v.set(p + "_counit", tensor_for(v, p + "_counit", counit));
}

Valuation zx_valuation(const SignaturePtr& sig) {
  Valuation v(sig);
  Mat dz = Mat::Zero(4, 2);
  dz(0, 0) = 1;
  dz(3, 1) = 1;
  Mat ez = Mat::Ones(1, 2);
  const Mat h = hadamard();
  const Mat hh = kron(h, h);
  set_algebra(v, "z", dz.adjoint(), ez.adjoint(), dz, ez);
  const Mat dx = hh * dz * h;
  const Mat ex = ez * h;
  set_algebra(v, "x", dx.adjoint(), ex.adjoint(), dx, ex);
  v.set("h", tensor_for(v, "h", h));
  const IndexType q{"q", 2};
  v.set_phase("z_phase", Tensor::from_matrix({q}, {q}, Mat::Identity(2, 2)));
  v.set_phase("x_phase", Tensor::from_matrix({q}, {q}, h));
  return v;
}

Mat gw_g_mul() {
  Mat m = Mat::Zero(2, 4);
  m(0, 0) = 1;
  m(1, 3) = 1;
  return m;
}

Mat gw_w_mul() {
  Mat m = Mat::Zero(2, 4);
  m(1, 3) = 1;
  m(0, 1) = 1;
  m(0, 2) = 1;
  return m;
}

Mat gw_w_comul() {
  Mat m = Mat::Zero(4, 2);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 1) = 1;
  return m;
}

Mat not_gate() {
  Mat t = Mat::Zero(2, 2);
  t(0, 1) = 1;
  t(1, 0) = 1;
  return t;
}

Valuation gw_valuation(const SignaturePtr& sig) {
  Valuation v(sig);
  set_algebra(v, "g", gw_g_mul(), Mat::Ones(2, 1), gw_g_mul().adjoint(), Mat::Ones(1, 2));
  Mat wu = Mat::Zero(2, 1);
  wu(1, 0) = 1;
  Mat we = Mat::Zero(1, 2);
  we(0, 0) = 1;
  set_algebra(v, "w", gw_w_mul(), wu, gw_w_comul(), we);
  v.set("tick", tensor_for(v, "tick", not_gate()));
  return v;
}

RewriteSystem certified(const std::string& name, std::vector<RewriteRule> rules, const Valuation& v, double tol) {
  for (auto& r : rules) {
    if (!r.kept.empty()) continue;
    auto s = check_rule_sound(r, v, tol);
    if (!s) throw Error(ErrorCode::kInvalidRule, r.name + " is not sound under the valuation");
    if (r.scalar && std::abs(*r.scalar - *s) > tol * std::max(1.0, std::abs(*s))) {
      throw Error(ErrorCode::kInvalidRule, r.name + " has a recorded scalar that disagrees with evaluation");
    }
    r.scalar = *s;
  }
  return RewriteSystem(name, std::move(rules));
}

StringGraph rebase(const StringGraph& g, const SignaturePtr& sig) {
  StringGraph out(sig);
  for (const auto& [id, rec] : g.vertices()) out.insert_vertex(id, rec.vertex);
  for (const auto& [id, e] : g.edges()) out.insert_edge(id, e);
  out.set_input_order(g.input_order());
  out.set_output_order(g.output_order());
  return out;
}

}  // namespace

std::map<std::string, std::string> Theory::tags() const {
  std::map<std::string, std::string> out;
  for (const auto& r : rules.rules()) out.emplace(r.name, r.tag);
  return out;
}

void certify(Theory& t, double tol) { t.rules = certified(t.rules.name(), t.rules.rules(), t.valuation, tol); }

Theory zx_theory() {
  const SignaturePtr sig = zx_signature();
  std::vector<RewriteRule> rules;
  for (const std::string p : {"z", "x"}) {
    const std::string o = p == "z" ? "x" : "z";
    frobenius_rules(rules, sig, p);
    add_rule(rules, p + "_special", "special",
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(p + "_mul", b.box(p + "_comul", x))}; }),
             build(sig, 1, [](GraphBuilder&, const Wires& x) { return x; }));
    const std::string ph = p + "_phase";
    auto phase_chain = [&](std::vector<Angle> as) {
      return build(sig, 1, [&, as](GraphBuilder& b, const Wires& x) {
        VertexId w = x[0];
        for (const Angle& a : as) w = b.box1(ph, {w}, a);
        return Wires{w};
      });
    };
    add_rule(rules, ph + "_zero", "phase", phase_chain({Angle(0, 1)}), phase_chain({}));
    add_rule(rules, ph + "_pi_pi", "phase", phase_chain({Angle(1, 1), Angle(1, 1)}), phase_chain({}));
    add_rule(rules, ph + "_half_half", "phase", phase_chain({Angle(1, 2), Angle(1, 2)}), phase_chain({Angle(1, 1)}));
    // delta_p . mu_o => bialgebra square.
    add_rule(rules, o + p + "_bialg", "bialgebra",
             build(sig, 2, [&](GraphBuilder& b, const Wires& x) { return b.box(p + "_comul", {b.box1(o + "_mul", x)}); }),
             build(sig, 2, [&](GraphBuilder& b, const Wires& x) { return bialgebra_side(b, x, o + "_mul", p + "_comul"); }));
    // mu_o . delta_p => eta_o . epsilon_p.
    add_rule(rules, o + p + "_hopf", "hopf",
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1(o + "_mul", b.box(p + "_comul", x))}; }),
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
               b.box(p + "_counit", x);
               return Wires{b.box1(o + "_unit", {})};
             }));
    add_rule(rules, p + "_copy_" + o + "_unit", "copy",
             build(sig, 0, [&](GraphBuilder& b, const Wires&) { return b.box(p + "_comul", {b.box1(o + "_unit", {})}); }),
             build(sig, 0, [&](GraphBuilder& b, const Wires&) {
               return Wires{b.box1(o + "_unit", {}), b.box1(o + "_unit", {})};
             }));
    add_rule(rules, p + "_delete_" + o + "_mul", "copy",
             build(sig, 2, [&](GraphBuilder& b, const Wires& x) {
               b.box(p + "_counit", {b.box1(o + "_mul", x)});
               return Wires{};
             }),
             build(sig, 2, [&](GraphBuilder& b, const Wires& x) {
               b.box(p + "_counit", {x[0]});
               b.box(p + "_counit", {x[1]});
               return Wires{};
             }));
    add_rule(rules, p + "_counit_" + o + "_unit", "scalar",
             build(sig, 0, [&](GraphBuilder& b, const Wires&) {
               b.box(p + "_counit", {b.box1(o + "_unit", {})});
               return Wires{};
             }),
             build(sig, 0, [](GraphBuilder&, const Wires&) { return Wires{}; }));
    // delta_p copies the o-phase pi.
    add_rule(rules, p + "_copy_" + o + "_pi", "copy",
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
               return b.box(p + "_comul", {b.box1(o + "_phase", x, Angle(1, 1))});
             }),
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
               auto uv = b.box(p + "_comul", x);
               return Wires{b.box1(o + "_phase", {uv[0]}, Angle(1, 1)), b.box1(o + "_phase", {uv[1]}, Angle(1, 1))};
             }));
  }
  auto hs = [](GraphBuilder& b, Wires x) {
    for (auto& w : x) w = b.box1("h", {w});
    return x;
  };
  add_rule(rules, "colour_mul", "colour",
           build(sig, 2, [&](GraphBuilder& b, const Wires& x) { return hs(b, {b.box1("z_mul", hs(b, x))}); }),
           build(sig, 2, [](GraphBuilder& b, const Wires& x) { return Wires{b.box1("x_mul", x)}; }));
  add_rule(rules, "colour_unit", "colour",
           build(sig, 0, [&](GraphBuilder& b, const Wires&) { return hs(b, {b.box1("z_unit", {})}); }),
           build(sig, 0, [](GraphBuilder& b, const Wires&) { return Wires{b.box1("x_unit", {})}; }));
  add_rule(rules, "colour_comul", "colour",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return hs(b, b.box("z_comul", hs(b, x))); }),
           build(sig, 1, [](GraphBuilder& b, const Wires& x) { return b.box("x_comul", x); }));
  add_rule(rules, "colour_counit", "colour",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             b.box("z_counit", hs(b, x));
             return Wires{};
           }),
           build(sig, 1, [](GraphBuilder& b, const Wires& x) {
             b.box("x_counit", x);
             return Wires{};
           }));
  for (const auto& [suffix, a] : std::vector<std::pair<std::string, Angle>>{{"half", Angle(1, 2)}, {"pi", Angle(1, 1)}}) {
    const Angle angle = a;
    add_rule(rules, "colour_phase_" + suffix, "colour",
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return hs(b, {b.box1("z_phase", hs(b, x), angle)}); }),
             build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1("x_phase", x, angle)}; }));
  }
  add_rule(rules, "h_h", "colour", build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return hs(b, hs(b, x)); }),
           build(sig, 1, [](GraphBuilder&, const Wires& x) { return x; }));
  Valuation v = zx_valuation(sig);
  return Theory{"zx", sig, v, certified("zx", std::move(rules), v, 1e-9)};
}

Theory gw_theory() {
  const SignaturePtr sig = gw_signature();
  std::vector<RewriteRule> rules;
  frobenius_rules(rules, sig, "g");
  frobenius_rules(rules, sig, "w");
  const BuildFn identity = [](GraphBuilder&, const Wires& x) { return x; };
  const BuildFn nothing = [](GraphBuilder&, const Wires&) { return Wires{}; };
  auto tick = [](GraphBuilder& b, VertexId w) { return b.box1("tick", {w}); };
  auto loop = [](GraphBuilder& b, const std::string& p, VertexId w) { return b.box1(p + "_mul", b.box(p + "_comul", {w})); };
  add_rule(rules, "g_special", "special", build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{loop(b, "g", x[0])}; }),
           build(sig, 1, identity));
  add_rule(rules, "w_antispecial", "antispecial",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             b.box("w_counit", {loop(b, "w", x[0])});
             return Wires{loop(b, "w", b.box1("w_unit", {}))};
           }),
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{loop(b, "w", x[0])}; }));
  add_rule(rules, "w_lolli", "antispecial",
           build(sig, 0, [&](GraphBuilder& b, const Wires&) { return Wires{loop(b, "w", b.box1("w_unit", {}))}; }),
           build(sig, 0, [&](GraphBuilder& b, const Wires&) { return Wires{tick(b, b.box1("w_unit", {}))}; }));
  add_rule(rules, "w_cololli", "antispecial",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             b.box("w_counit", {loop(b, "w", x[0])});
             return Wires{};
           }),
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             b.box("w_counit", {tick(b, x[0])});
             return Wires{};
           }));
  add_rule(rules, "gw_closure", "closure",
           build(sig, 2, [](GraphBuilder& b, const Wires& x) { return bialgebra_side(b, x, "w_mul", "g_comul"); }),
           build(sig, 2, [](GraphBuilder& b, const Wires& x) { return b.box("g_comul", {b.box1("w_mul", x)}); }));
  add_rule(rules, "wg_closure", "closure",
           build(sig, 2, [](GraphBuilder& b, const Wires& x) { return bialgebra_side(b, x, "g_mul", "w_comul"); }),
           build(sig, 2, [](GraphBuilder& b, const Wires& x) { return b.box("w_comul", {b.box1("g_mul", x)}); }));
  add_rule(rules, "g_copy_w_unit", "closure",
           build(sig, 0, [](GraphBuilder& b, const Wires&) { return b.box("g_comul", {b.box1("w_unit", {})}); }),
           build(sig, 0, [](GraphBuilder& b, const Wires&) { return Wires{b.box1("w_unit", {}), b.box1("w_unit", {})}; }));
  add_rule(rules, "w_counit_copy_g", "closure",
           build(sig, 2, [](GraphBuilder& b, const Wires& x) {
             b.box("w_counit", {b.box1("g_mul", x)});
             return Wires{};
           }),
           build(sig, 2, [](GraphBuilder& b, const Wires& x) {
             b.box("w_counit", {x[0]});
             b.box("w_counit", {x[1]});
             return Wires{};
           }));
  add_rule(rules, "g_delete_w_unit", "closure",
           build(sig, 0, [](GraphBuilder& b, const Wires&) {
             b.box("g_counit", {b.box1("w_unit", {})});
             return Wires{};
           }),
           build(sig, 0, nothing));
  add_rule(rules, "w_counit_g_unit", "closure",
           build(sig, 0, [](GraphBuilder& b, const Wires&) {
             b.box("w_counit", {b.box1("g_unit", {})});
             return Wires{};
           }),
           build(sig, 0, nothing));
  add_rule(rules, "tick_tick", "tick", build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{tick(b, tick(b, x[0]))}; }),
           build(sig, 1, identity));
  // (1 (x) cup_G)(cap_W (x) 1) is the dualiser.
  add_rule(rules, "tick_def", "tick",
           build(sig, 1, [](GraphBuilder& b, const Wires& x) {
             auto ab = b.box("w_comul", {b.box1("w_unit", {})});
             b.box("g_counit", {b.box1("g_mul", {ab[1], x[0]})});
             return Wires{ab[0]};
           }),
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return Wires{tick(b, x[0])}; }));
  add_rule(rules, "g_copy_tick_unit", "tick",
           build(sig, 0, [&](GraphBuilder& b, const Wires&) { return b.box("g_comul", {tick(b, b.box1("w_unit", {}))}); }),
           build(sig, 0, [&](GraphBuilder& b, const Wires&) {
             return Wires{tick(b, b.box1("w_unit", {})), tick(b, b.box1("w_unit", {}))};
           }));
  add_rule(rules, "g_counit_tick", "tick",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             b.box("g_counit", {tick(b, x[0])});
             return Wires{};
           }),
           build(sig, 1, [](GraphBuilder& b, const Wires& x) {
             b.box("g_counit", x);
             return Wires{};
           }));
  add_rule(rules, "g_mul_tick", "tick",
           build(sig, 2, [&](GraphBuilder& b, const Wires& x) { return Wires{b.box1("g_mul", {tick(b, x[0]), tick(b, x[1])})}; }),
           build(sig, 2, [&](GraphBuilder& b, const Wires& x) { return Wires{tick(b, b.box1("g_mul", x))}; }));
  add_rule(rules, "g_comul_tick", "tick",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             auto uv = b.box("g_comul", x);
             return Wires{tick(b, uv[0]), tick(b, uv[1])};
           }),
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) { return b.box("g_comul", {tick(b, x[0])}); }));
  // mu_W . (1 (x) tick) . delta_W = 1.
  add_rule(rules, "w_tick_loop", "tick",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             auto pq = b.box("w_comul", x);
             return Wires{b.box1("w_mul", {pq[0], tick(b, pq[1])})};
           }),
           build(sig, 1, identity));
  // The anti-unit absorbs: mu_W(x, tick eta_W) = tick eta_W * epsilon_W(tick x).
  add_rule(rules, "tick_absorb", "tick",
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             return Wires{b.box1("w_mul", {x[0], tick(b, b.box1("w_unit", {}))})};
           }),
           build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
             b.box("w_counit", {tick(b, x[0])});
             return Wires{tick(b, b.box1("w_unit", {}))};
           }));
  Valuation v = gw_valuation(sig);
  return Theory{"gw", sig, v, certified("gw", std::move(rules), v, 1e-9)};
}

Theory with_states(const Theory& t, const std::string& object, std::map<std::string, Tensor> states) {
  std::vector<ObjectType> objects = t.signature->objects();
  std::vector<MorphismType> morphisms = t.signature->morphisms();
  morphisms.push_back({"state", {}, {object}, DataKind::kOpaque});
  SignaturePtr sig = make_signature(std::move(objects), std::move(morphisms));
  Valuation v(sig);
  const Valuation old = t.valuation;
  for (const auto& m : t.signature->morphisms()) {
    if (old.has_fixed(m.name)) {
      v.set(m.name, old.fixed(m.name));
    } else {
      const std::string name = m.name;
      if (const Tensor* b = old.phase_basis(name)) {
        v.set_phase(name, *b);
      } else if (const auto* tab = old.table(name)) {
        v.set_table(name, *tab);
      } else {
        v.set_data(name, [old, name](const VertexData& d) { return old.generator(name, d); });
      }
    }
  }
  v.set_table("state", std::move(states));
  std::vector<RewriteRule> rules;
  for (const auto& r : t.rules.rules()) {
    RewriteRule c = r;
    c.lhs = rebase(r.lhs, sig);
    c.rhs = rebase(r.rhs, sig);
    rules.push_back(std::move(c));
  }
  return Theory{t.name + "_states", sig, std::move(v), RewriteSystem(t.rules.name(), std::move(rules))};
}

// ---------------------------------------------------------------------------
// Frobenius algebra checks

int FrobeniusTensors::dim() const { return unit.upper().empty() ? 0 : unit.upper()[0].dim; }

FrobeniusTensors algebra(const Valuation& v, const std::string& prefix) {
  FrobeniusTensors a{v.fixed(prefix + "_mul"), v.fixed(prefix + "_unit"), v.fixed(prefix + "_comul"),
                     v.fixed(prefix + "_counit")};
  require_algebra_shapes(a);
  return a;
}

void require_algebra_shapes(const FrobeniusTensors& a) {
  const auto ok = [](const Tensor& t, std::size_t up, std::size_t lo) {
    if (t.upper().size() != up || t.lower().size() != lo) return false;
    return true;
  };
  if (!ok(a.mul, 1, 2) || !ok(a.unit, 1, 0) || !ok(a.comul, 2, 1) || !ok(a.counit, 0, 1)) {
    throw Error(ErrorCode::kShapeMismatch, "algebra maps have the wrong number of legs");
  }
  const IndexType x = a.unit.upper()[0];
  const IndexTypes one{x}, two{x, x};
  if (a.mul.upper() != one || a.mul.lower() != two || a.comul.upper() != two || a.comul.lower() != one ||
      a.counit.lower() != one) {
    throw Error(ErrorCode::kShapeMismatch, "algebra maps act on different spaces");
  }
}

namespace {

bool close(const Mat& a, const Mat& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1.0});
  return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace

bool check_frobenius_algebra(const FrobeniusTensors& a, double tol) {
  require_algebra_shapes(a);
  const int d = a.dim();
  const Mat I = Mat::Identity(d, d);
  const Mat mu = dense(a.mul), eta = dense(a.unit), delta = dense(a.comul), eps = dense(a.counit);
  const Mat sw = swap_of(d);
  return close(mu * kron(mu, I), mu * kron(I, mu), tol) && close(mu * kron(eta, I), I, tol) &&
         close(mu * kron(I, eta), I, tol) && close(mu * sw, mu, tol) &&
         close(kron(delta, I) * delta, kron(I, delta) * delta, tol) && close(kron(eps, I) * delta, I, tol) &&
         close(kron(I, eps) * delta, I, tol) && close(sw * delta, delta, tol) &&
         close(kron(mu, I) * kron(I, delta), delta * mu, tol) && close(kron(I, mu) * kron(delta, I), delta * mu, tol);
}

bool check_special(const FrobeniusTensors& a, double tol) {
  require_algebra_shapes(a);
  return close(dense(a.mul) * dense(a.comul), Mat::Identity(a.dim(), a.dim()), tol);
}

Eigen::VectorXcd lolli(const FrobeniusTensors& a) {
  require_algebra_shapes(a);
  return dense(a.mul) * dense(a.comul) * dense(a.unit);
}

Eigen::RowVectorXcd cololli(const FrobeniusTensors& a) {
  require_algebra_shapes(a);
  return dense(a.counit) * dense(a.mul) * dense(a.comul);
}

Complex circle(const FrobeniusTensors& a) {
  require_algebra_shapes(a);
  return (dense(a.counit) * dense(a.mul) * dense(a.comul) * dense(a.unit))(0, 0);
}

bool check_antispecial(const FrobeniusTensors& a, double tol) {
  const Mat loop = dense(a.mul) * dense(a.comul);
  const Mat lhs = circle(a) * loop;
  const Mat rhs = lolli(a) * cololli(a);
  return close(lhs, rhs, tol);
}

std::pair<FrobeniusTensors, FrobeniusTensors> group_pair(const std::vector<int>& factors) {
  if (factors.empty()) throw Error(ErrorCode::kShapeMismatch, "group_pair needs at least one factor");
  int d = 1;
  for (int f : factors) {
    if (f < 1) throw Error(ErrorCode::kShapeMismatch, "cyclic factors must be positive");
    d *= f;
  }
  // Mixed-radix digits, first factor most significant.
  auto digits = [&](int g) {
    std::vector<int> out(factors.size());
    for (std::size_t k = factors.size(); k-- > 0;) {
      out[k] = g % factors[k];
      g /= factors[k];
    }
    return out;
  };
  auto index = [&](const std::vector<int>& ds) {
    int g = 0;
    for (std::size_t k = 0; k < factors.size(); ++k) g = g * factors[k] + ds[k];
    return g;
  };
  auto product = [&](int g, int h) {
    auto a = digits(g), b = digits(h);
    for (std::size_t k = 0; k < factors.size(); ++k) a[k] = (a[k] + b[k]) % factors[k];
    return index(a);
  };
  const IndexType x{"G", d};
  const double rd = std::sqrt(static_cast<double>(d));
  Mat copy = Mat::Zero(d * d, d), group = Mat::Zero(d, d * d);
  for (int g = 0; g < d; ++g) {
    copy(g * d + g, g) = 1;
    for (int h = 0; h < d; ++h) group(product(g, h), g * d + h) = 1.0 / rd;
  }
  Mat ones = Mat::Ones(d, 1);
  Mat e = Mat::Zero(d, 1);
  e(0, 0) = rd;
  auto make = [&](const Mat& mul, const Mat& unit) {
    return FrobeniusTensors{Tensor::from_matrix({x}, {x, x}, mul), Tensor::from_matrix({x}, {}, unit),
                            Tensor::from_matrix({x, x}, {x}, mul.adjoint()),
                            Tensor::from_matrix({}, {x}, unit.adjoint())};
  };
  return {make(copy.adjoint(), ones), make(group, e)};
}

namespace {

/// Signature with algebras o_ and p_ on one object, valued by the inputs.
std::pair<SignaturePtr, Valuation> pair_setting(const FrobeniusTensors& o, const FrobeniusTensors& p) {
  require_algebra_shapes(o);
  require_algebra_shapes(p);
  if (o.unit.upper() != p.unit.upper()) throw Error(ErrorCode::kShapeMismatch, "algebras act on different spaces");
  const IndexType x = o.unit.upper()[0];
  std::vector<MorphismType> ms;
  for (const std::string n : {"o", "p"}) {
    ms.push_back({n + "_mul", {"q", "q"}, {"q"}, DataKind::kNone});
    ms.push_back({n + "_unit", {}, {"q"}, DataKind::kNone});
    ms.push_back({n + "_comul", {"q"}, {"q", "q"}, DataKind::kNone});
    ms.push_back({n + "_counit", {"q"}, {}, DataKind::kNone});
  }
  SignaturePtr sig = make_signature({{"q", x.dim}}, std::move(ms));
  Valuation v(sig);
  for (const auto& [n, a] : {std::pair<std::string, const FrobeniusTensors*>{"o", &o}, {"p", &p}}) {
    v.set(n + "_mul", tensor_for(v, n + "_mul", dense(a->mul)));
    v.set(n + "_unit", tensor_for(v, n + "_unit", dense(a->unit)));
    v.set(n + "_comul", tensor_for(v, n + "_comul", dense(a->comul)));
    v.set(n + "_counit", tensor_for(v, n + "_counit", dense(a->counit)));
  }
  return {sig, std::move(v)};
}

LawCheck law(const std::string& name, const SignaturePtr& sig, const Valuation& v, int inputs, const BuildFn& lhs,
             const BuildFn& rhs, double tol) {
  RewriteRule r = make_rule(name, build(sig, inputs, lhs), build(sig, inputs, rhs));
  return {name, check_rule_sound(r, v, tol)};
}

bool all_hold(const std::vector<LawCheck>& laws) {
  return std::all_of(laws.begin(), laws.end(), [](const LawCheck& l) { return l.scalar.has_value(); });
}

}  // namespace

std::vector<LawCheck> strong_complementarity_laws(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol) {
  auto [sig, v] = pair_setting(o, p);
  std::vector<LawCheck> out;
  for (const auto& [m, c] : {std::pair<std::string, std::string>{"o", "p"}, {"p", "o"}}) {
    const std::string tag = m + c;
    out.push_back(law(
        "bialgebra_" + tag, sig, v, 2, [&](GraphBuilder& b, const Wires& x) { return b.box(c + "_comul", {b.box1(m + "_mul", x)}); },
        [&](GraphBuilder& b, const Wires& x) { return bialgebra_side(b, x, m + "_mul", c + "_comul"); }, tol));
    out.push_back(law(
        "unit_copy_" + tag, sig, v, 0,
        [&](GraphBuilder& b, const Wires&) { return b.box(c + "_comul", {b.box1(m + "_unit", {})}); },
        [&](GraphBuilder& b, const Wires&) { return Wires{b.box1(m + "_unit", {}), b.box1(m + "_unit", {})}; }, tol));
    out.push_back(law(
        "counit_copy_" + tag, sig, v, 2,
        [&](GraphBuilder& b, const Wires& x) {
          b.box(c + "_counit", {b.box1(m + "_mul", x)});
          return Wires{};
        },
        [&](GraphBuilder& b, const Wires& x) {
          b.box(c + "_counit", {x[0]});
          b.box(c + "_counit", {x[1]});
          return Wires{};
        },
        tol));
    // epsilon_c . eta_m must be a nonzero scalar.
    RewriteRule s = make_rule("scalar_" + tag, build(sig, 0, [&](GraphBuilder& b, const Wires&) {
                                b.box(c + "_counit", {b.box1(m + "_unit", {})});
                                return Wires{};
                              }),
                              build(sig, 0, [](GraphBuilder&, const Wires&) { return Wires{}; }));
    out.push_back({s.name, check_rule_sound(s, v, tol)});
  }
  return out;
}

bool check_strong_complementarity(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol) {
  return all_hold(strong_complementarity_laws(o, p, tol));
}

std::vector<LawCheck> hopf_laws(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol) {
  auto [sig, v] = pair_setting(o, p);
  std::vector<LawCheck> out;
  for (const auto& [m, c] : {std::pair<std::string, std::string>{"p", "o"}, {"o", "p"}}) {
    // S = (1 (x) cup_c)(cap_m (x) 1).
    auto antipode = [m = m, c = c](GraphBuilder& b, VertexId w) {
      auto ab = b.box(m + "_comul", {b.box1(m + "_unit", {})});
      b.box(c + "_counit", {b.box1(c + "_mul", {ab[1], w})});
      return ab[0];
    };
    out.push_back(law(
        "hopf_" + m + c, sig, v, 1,
        [&](GraphBuilder& b, const Wires& x) {
          auto uv = b.box(c + "_comul", x);
          return Wires{b.box1(m + "_mul", {uv[0], antipode(b, uv[1])})};
        },
        [&](GraphBuilder& b, const Wires& x) {
          b.box(c + "_counit", x);
          return Wires{b.box1(m + "_unit", {})};
        },
        tol));
  }
  return out;
}

bool check_hopf(const FrobeniusTensors& o, const FrobeniusTensors& p, double tol) {
  return all_hold(hopf_laws(o, p, tol));
}

// ---------------------------------------------------------------------------
// CP1 arithmetic

std::string to_string(const CP1Point& p) {
  switch (p.kind) {
    case CP1Point::Kind::kInfinity: return "inf";
    case CP1Point::Kind::kUndefined: return "bot";
    case CP1Point::Kind::kFinite: break;
  }
  std::string s = std::to_string(p.value.real());
  if (p.value.imag() != 0.0) s += (p.value.imag() < 0 ? "-" : "+") + std::to_string(std::abs(p.value.imag())) + "i";
  return s;
}

bool approx_equal(const CP1Point& a, const CP1Point& b, double tol) {
  if (a.kind != b.kind) return false;
  if (a.kind != CP1Point::Kind::kFinite) return true;
  return std::abs(a.value - b.value) <= tol * std::max(1.0, std::abs(b.value));
}

Eigen::Vector2cd numket(const CP1Point& p) {
  switch (p.kind) {
    case CP1Point::Kind::kFinite: return Eigen::Vector2cd(1.0, p.value);
    case CP1Point::Kind::kInfinity: return Eigen::Vector2cd(0.0, 1.0);
    case CP1Point::Kind::kUndefined: break;
  }
  return Eigen::Vector2cd::Zero();
}

CP1Point decode(const Eigen::Vector2cd& v, double zero) {
  const double n = v.norm();
  if (n <= zero) return CP1Point::undefined();
  if (std::abs(v(0)) <= 1e-12 * n) return CP1Point::infinity();
  return CP1Point::finite(v(1) / v(0));
}

namespace {

CP1Point apply_product(const Mat& mul, const CP1Point& a, const CP1Point& b) {
  const Eigen::Vector2cd x = numket(a), y = numket(b);
  Eigen::Vector4cd xy;
  xy << x(0) * y(0), x(0) * y(1), x(1) * y(0), x(1) * y(1);
  const Eigen::Vector2cd r = mul * xy;
  return decode(r, 1e-12 * std::max(1.0, x.norm() * y.norm()));
}

const Valuation& gw_reference() {
  static const Valuation v = gw_valuation(gw_signature());
  return v;
}

}  // namespace

CP1Point cp1_mul(const CP1Point& a, const CP1Point& b) { return apply_product(dense(gw_reference().fixed("g_mul")), a, b); }

CP1Point cp1_add(const CP1Point& a, const CP1Point& b) {
  const Mat t = dense(gw_reference().fixed("tick"));
  const Mat mul = t * dense(gw_reference().fixed("w_mul")) * kron(t, t);
  return apply_product(mul, a, b);
}

// ---------------------------------------------------------------------------
// Frobenius states

namespace {

struct StateShapes {
  int d;
};

StateShapes require_state_shapes(const Tensor& psi, const Tensor* phi, const Tensor& xi) {
  if (psi.upper().size() != 3 || !psi.lower().empty()) throw Error(ErrorCode::kShapeMismatch, "psi must be a tripartite state");
  const IndexType x = psi.upper()[0];
  if (psi.upper()[1] != x || psi.upper()[2] != x) throw Error(ErrorCode::kShapeMismatch, "psi legs differ");
  if (!xi.upper().empty() || xi.lower() != IndexTypes{x}) throw Error(ErrorCode::kShapeMismatch, "xi must be an effect on one leg");
  if (phi && (!phi->upper().empty() || phi->lower() != IndexTypes{x, x})) {
    throw Error(ErrorCode::kShapeMismatch, "phi must be an effect on two legs");
  }
  return {x.dim};
}

/// Snake map j <- x: sum_{i,k} xi_i psi_{ijk} phi_{kx}.
Mat snake(const Tensor& psi, const Tensor& phi, const Tensor& xi, int d) {
  Mat m = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int x = 0; x < d; ++x) m(j, x) += xi[i] * psi[(i * d + j) * d + k] * phi[k * d + x];
      }
    }
  }
  return m;
}

}  // namespace

bool check_frobenius_state(const Tensor& psi, const Tensor& phi, const Tensor& xi, double tol) {
  const int d = require_state_shapes(psi, &phi, xi).d;
  const std::size_t ud = static_cast<std::size_t>(d);
  // Symmetry of psi under the transpositions (01) and (12).
  for (const auto& perm : {std::vector<std::size_t>{1, 0, 2}, std::vector<std::size_t>{0, 2, 1}}) {
    if (!approx_equal(permute(psi, perm, {}), psi, tol)) return false;
  }
  if (!close(snake(psi, phi, xi, d), Mat::Identity(d, d), tol)) return false;
  // Gluing two copies of psi along phi gives a symmetric four-leg state.
  Tensor glued(IndexTypes(4, psi.upper()[0]), {});
  for (std::size_t a = 0; a < ud; ++a) {
    for (std::size_t b = 0; b < ud; ++b) {
      for (std::size_t c = 0; c < ud; ++c) {
        for (std::size_t e = 0; e < ud; ++e) {
          Complex s = 0;
          for (std::size_t k = 0; k < ud; ++k) {
            for (std::size_t l = 0; l < ud; ++l) s += psi[(a * ud + b) * ud + k] * phi[k * ud + l] * psi[(l * ud + c) * ud + e];
          }
          glued[((a * ud + b) * ud + c) * ud + e] = s;
        }
      }
    }
  }
  for (const auto& perm : {std::vector<std::size_t>{1, 0, 2, 3}, std::vector<std::size_t>{0, 2, 1, 3},
                           std::vector<std::size_t>{0, 1, 3, 2}}) {
    if (!approx_equal(permute(glued, perm, {}), glued, tol)) return false;
  }
  return true;
}

std::optional<Tensor> frobenius_effect(const Tensor& psi, const Tensor& xi, double tol) {
  const int d = require_state_shapes(psi, nullptr, xi).d;
  // The snake is linear in phi: solve A vec(phi) = vec(1).
  Mat a = Mat::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k) {
    for (int x = 0; x < d; ++x) {
      Tensor unit({}, {psi.upper()[0], psi.upper()[0]});
      unit[static_cast<std::size_t>(k * d + x)] = 1;
      const Mat s = snake(psi, unit, xi, d);
      for (int j = 0; j < d; ++j) {
        for (int y = 0; y < d; ++y) a(j * d + y, k * d + x) = s(j, y);
      }
    }
  }
  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(d * d);
  for (int j = 0; j < d; ++j) target(j * d + j) = 1;
  const Eigen::VectorXcd sol = a.completeOrthogonalDecomposition().solve(target);
  if ((a * sol - target).cwiseAbs().maxCoeff() > tol * std::max(1.0, sol.cwiseAbs().maxCoeff())) return std::nullopt;
  Tensor phi({}, {psi.upper()[0], psi.upper()[0]});
  for (int k = 0; k < d * d; ++k) phi[static_cast<std::size_t>(k)] = sol(k);
  return phi;
}

FrobeniusTensors algebra_from_state(const Tensor& psi, const Tensor& phi, const Tensor& xi) {
  const int d = require_state_shapes(psi, &phi, xi).d;
  const IndexType x = psi.upper()[0];
  Tensor delta({x, x}, {x}), mu({x}, {x, x}), eta({x}, {});
  auto P = [&](int i, int j, int k) { return psi[static_cast<std::size_t>((i * d + j) * d + k)]; };
  auto F = [&](int i, int j) { return phi[static_cast<std::size_t>(i * d + j)]; };
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int y = 0; y < d; ++y) {
        Complex s = 0;
        for (int k = 0; k < d; ++k) s += P(a, b, k) * F(k, y);
        delta[static_cast<std::size_t>((a * d + b) * d + y)] = s;
      }
    }
  }
  auto D = [&](int a, int b, int y) { return delta[static_cast<std::size_t>((a * d + b) * d + y)]; };
  for (int c = 0; c < d; ++c) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        Complex s = 0;
        for (int k = 0; k < d; ++k) s += F(a, k) * D(k, c, b);
        mu[static_cast<std::size_t>((c * d + a) * d + b)] = s;
      }
    }
    Complex s = 0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) s += xi[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(b)] * P(a, b, c);
    }
    eta[static_cast<std::size_t>(c)] = s;
  }
  return {mu, eta, delta, xi};
}

Tensor ghz_state() {
  const IndexType q{"q", 2};
  Tensor t({q, q, q}, {});
  t[0] = 1;
  t[7] = 1;
  return t;
}

Tensor w_state() {
  const IndexType q{"q", 2};
  Tensor t({q, q, q}, {});
  t[4] = 1;
  t[2] = 1;
  t[1] = 1;
  return t;
}

// ---------------------------------------------------------------------------
// Witnesses

Tensor hadamard_matrix() {
  const IndexType q{"q", 2};
  return Tensor::from_matrix({q}, {q}, hadamard());
}

Tensor cnot_matrix() {
  const IndexType q{"q", 2};
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(3, 2) = 1;
  m(2, 3) = 1;
  return Tensor::from_matrix({q, q}, {q, q}, m);
}

Tensor swap_matrix() {
  const IndexType q{"q", 2};
  return Tensor::from_matrix({q, q}, {q, q}, swap_of(2));
}

StringGraph swap_graph(const SignaturePtr& sig) {
  return build(sig, 2, [](GraphBuilder&, const Wires& x) { return Wires{x[1], x[0]}; });
}

namespace {

Wires cnot_gadget(GraphBuilder& b, VertexId control, VertexId target) {
  auto c = b.box("z_comul", {control});
  return {c[0], b.box1("x_mul", {c[1], target})};
}

}  // namespace

StringGraph zx_cnot(const SignaturePtr& sig) {
  return build(sig, 2, [](GraphBuilder& b, const Wires& x) { return cnot_gadget(b, x[0], x[1]); });
}

StringGraph zx_cnot3(const SignaturePtr& sig) {
  return build(sig, 2, [](GraphBuilder& b, const Wires& x) {
    auto s1 = cnot_gadget(b, x[0], x[1]);
    auto s2 = cnot_gadget(b, s1[1], s1[0]);
    auto s3 = cnot_gadget(b, s2[1], s2[0]);
    return s3;
  });
}

StringGraph zx_euler(const SignaturePtr& sig, Angle first, Angle second, Angle third) {
  return build(sig, 1, [&](GraphBuilder& b, const Wires& x) {
    VertexId w = b.box1("z_phase", {x[0]}, first);
    w = b.box1("x_phase", {w}, second);
    return Wires{b.box1("z_phase", {w}, third)};
  });
}

std::vector<std::string> cnot3_swap_script() {
  return {"xz_bialg", "z_cocomm", "z_coassoc_r", "x_comm",    "x_assoc", "x_comm",
          "xz_hopf",  "z_counit_l", "x_unit_r",  "z_cocomm",  "z_coassoc_r", "x_comm",
          "x_assoc_r", "x_comm",  "xz_hopf",     "z_counit_l", "x_unit_l"};
}

namespace {

std::function<bool(const StringGraph&)> reaches(const StringGraph& target) {
  const StringGraph t = normalize_wires(target);
  return [t](const StringGraph& g) { return isomorphic(normalize_wires(g), t).has_value(); };
}

}  // namespace

std::optional<NormalizeResult> cnot3_swap_derivation(const Theory& zx) {
  return derive(zx_cnot3(zx.signature), zx.rules, cnot3_swap_script(), reaches(swap_graph(zx.signature)));
}

namespace {

Wires gw_cnot_gadget(GraphBuilder& b, VertexId control, VertexId target) {
  auto c = b.box("g_comul", {control});
  auto pq = b.box("w_comul", {b.box1("tick", {target})});
  VertexId r = b.box1("w_mul", {b.box1("tick", {pq[0]}), c[1]});
  VertexId s = b.box1("w_mul", {b.box1("tick", {pq[1]}), b.box1("tick", {r})});
  return {c[0], s};
}

VertexId control_point(GraphBuilder& b, bool control) {
  VertexId u = b.box1("w_unit", {});
  return control ? u : b.box1("tick", {u});
}

}  // namespace

StringGraph gw_cnot(const SignaturePtr& sig) {
  return build(sig, 2, [](GraphBuilder& b, const Wires& x) { return gw_cnot_gadget(b, x[0], x[1]); });
}

StringGraph gw_cnot_on(const SignaturePtr& sig, bool control) {
  return build(sig, 1, [control](GraphBuilder& b, const Wires& x) { return gw_cnot_gadget(b, control_point(b, control), x[0]); });
}

StringGraph gw_cnot_expected(const SignaturePtr& sig, bool control) {
  return build(sig, 1, [control](GraphBuilder& b, const Wires& x) {
    VertexId c = control_point(b, control);
    return Wires{c, control ? b.box1("tick", {x[0]}) : x[0]};
  });
}

std::vector<std::string> gw_cnot_script(bool control) {
  if (control) return {"g_copy_w_unit", "w_unit_r", "tick_tick", "w_comm", "w_tick_loop"};
  return {"g_copy_tick_unit", "tick_absorb", "tick_tick", "tick_tick", "w_unit_r", "w_counit_l", "tick_tick"};
}

std::optional<NormalizeResult> gw_cnot_derivation(const Theory& gw, bool control) {
  return derive(gw_cnot_on(gw.signature, control), gw.rules, gw_cnot_script(control),
                reaches(gw_cnot_expected(gw.signature, control)));
}

namespace {

Tensor qubit_state(Complex a, Complex b) {
  Tensor t({IndexType{"q", 2}}, {});
  t[0] = a;
  t[1] = b;
  return t;
}

/// Right multiplication by the named state: mul(x, state).
VertexId phase(GraphBuilder& b, const std::string& mul, VertexId x, const std::string& state) {
  return b.box1(mul, {x, b.box1("state", {}, state)});
}

}  // namespace

Construction gw_diagonal(Complex a, Complex b) {
  Theory t = with_states(gw_theory(), "q", {{"psi1", qubit_state(a, b)}});
  StringGraph g = build(t.signature, 1, [](GraphBuilder& bb, const Wires& x) { return Wires{phase(bb, "g_mul", x[0], "psi1")}; });
  return {std::move(t), std::move(g)};
}

Construction gw_upper(Complex c) {
  Theory t = with_states(gw_theory(), "q", {{"psi2", qubit_state(c, 1.0)}});
  StringGraph g = build(t.signature, 1, [](GraphBuilder& bb, const Wires& x) { return Wires{phase(bb, "w_mul", x[0], "psi2")}; });
  return {std::move(t), std::move(g)};
}

Construction gw_lower(Complex d) {
  Theory t = with_states(gw_theory(), "q", {{"psi3", qubit_state(d, 1.0)}});
  StringGraph g = build(t.signature, 1, [](GraphBuilder& bb, const Wires& x) {
    VertexId w = bb.box1("tick", {x[0]});
    w = phase(bb, "w_mul", w, "psi3");
    return Wires{bb.box1("tick", {w})};
  });
  return {std::move(t), std::move(g)};
}

Construction gw_single_qubit(const Eigen::Matrix2cd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  auto zero = [scale](Complex z) { return std::abs(z) <= 1e-12 * scale; };
  bool permuted = false;
  Eigen::Matrix2cd a = m;
  auto swap_rows = [&] {
    permuted = true;
    a.row(0).swap(a.row(1));
  };
  if (zero(a(0, 0)) && !zero(a(1, 0))) swap_rows();
  if (zero(a(0, 0)) && !zero(a(0, 1))) {
    if (!zero(a(1, 1))) throw Error(ErrorCode::kShapeMismatch, "matrix with zero first column and full second column has no PLDU form");
    swap_rows();
  }
  Complex l = 0, u = 0, d0 = 0, d1 = a(1, 1);
  if (!zero(a(0, 0))) {
    d0 = a(0, 0);
    l = a(1, 0) / d0;
    u = a(0, 1) / d0;
    d1 = a(1, 1) - l * a(0, 1);
  }
  Theory t = with_states(gw_theory(), "q",
                         {{"u", qubit_state(u, 1.0)}, {"d", qubit_state(d0, d1)}, {"l", qubit_state(l, 1.0)}});
  StringGraph g = build(t.signature, 1, [permuted](GraphBuilder& bb, const Wires& x) {
    VertexId w = phase(bb, "w_mul", x[0], "u");
    w = phase(bb, "g_mul", w, "d");
    w = bb.box1("tick", {w});
    w = phase(bb, "w_mul", w, "l");
    w = bb.box1("tick", {w});
    if (permuted) w = bb.box1("tick", {w});
    return Wires{w};
  });
  return {std::move(t), std::move(g)};
}

bool check_distributivity(const Eigen::Vector2cd& a, double tol) {
  Theory t = with_states(gw_theory(), "q", {{"a", qubit_state(a(0), a(1))}});
  StringGraph lhs = build(t.signature, 2, [](GraphBuilder& b, const Wires& x) {
    return Wires{b.box1("w_mul", {phase(b, "g_mul", x[0], "a"), phase(b, "g_mul", x[1], "a")})};
  });
  StringGraph rhs = build(t.signature, 2, [](GraphBuilder& b, const Wires& x) {
    b.box("w_counit", {b.box1("tick", {b.box1("state", {}, std::string("a"))})});
    return Wires{phase(b, "g_mul", b.box1("w_mul", x), "a")};
  });
  return approx_equal(evaluate(lhs, t.valuation), evaluate(rhs, t.valuation), tol);
}

}  // namespace strigraph
