// SPDX-License-Identifier: Apache-2.0
#include "strigraph/synth.hpp"

#include <gtest/gtest.h>

#include <set>

#include "strigraph/builder.hpp"
#include "strigraph/graph_ops.hpp"
#include "strigraph/iso.hpp"
#include "strigraph/theories.hpp"

namespace strigraph {
namespace {

const Theory& gw() {
  static const Theory t = gw_theory();
  return t;
}

const std::vector<std::string> kPair = {"g_mul", "g_unit", "g_comul", "g_counit",
                                        "w_mul", "w_unit", "w_comul", "w_counit"};

SynthParams small_params(bool naive) {
  SynthParams p;
  p.M = 2;
  p.N = 2;
  p.max_boundary = 2;
  p.B = 2;
  p.P = 2;
  p.naive = naive;
  p.generators = kPair;
  return p;
}

const RewriteSystem& spider() {
  static const RewriteSystem rs = spider_merge_rules(gw().valuation, kPair);
  return rs;
}

const SynthReport& small_run(bool naive) {
  static const SynthReport filtered = run_synthesis(gw().valuation, small_params(false), spider(), 7);
  static const SynthReport plain = run_synthesis(gw().valuation, small_params(true), spider(), 7);
  return naive ? plain : filtered;
}

StringGraph chain(const std::vector<std::string>& boxes) {
  GraphBuilder b(gw().signature);
  VertexId x = b.input("q");
  for (const auto& m : boxes) x = b.box1(m, {x});
  return b.finish({b.extend(x)});
}

/// w_mul with g_unit on input `port`.
StringGraph w_mul_with_unit(int port) {
  GraphBuilder b(gw().signature);
  const VertexId x = b.input("q");
  const VertexId u = b.box1("g_unit", {});
  const VertexId y = port == 0 ? b.box1("w_mul", {u, x}) : b.box1("w_mul", {x, u});
  return b.finish({y});
}

std::size_t count_boxes(const StringGraph& g, const std::string& name) {
  std::size_t n = 0;
  const auto idx = g.sig().require_morphism(name);
  for (const auto& [id, rec] : g.vertices()) n += rec.vertex.is_box() && rec.vertex.type == idx;
  return n;
}

TEST(Disconnected, CountsMatchHandEnumeration) {
  // One object; a box fits (m, n) when m - in = n - out >= 0, padded with strands.
  const std::map<std::pair<int, int>, std::size_t> expected = {
      {{1, 1}, 2}, {{1, 2}, 4}, {{2, 1}, 4}, {{2, 2}, 2}, {{0, 2}, 0}, {{2, 0}, 0}, {{0, 1}, 2}, {{1, 0}, 2}};
  for (const auto& [mn, n] : expected) {
    auto gs = enumerate_disconnected(gw().signature, mn.first, mn.second, 1);
    EXPECT_EQ(gs.size(), n) << mn.first << "," << mn.second;
    std::set<std::string> keys;
    for (const auto& g : gs) {
      EXPECT_EQ(static_cast<int>(g.input_order().size()), mn.first);
      EXPECT_EQ(static_cast<int>(g.output_order().size()), mn.second);
      EXPECT_LE(g.num_boxes(), 1u);
      keys.insert(canonical_key(g, BoundaryMode::kUnordered));
    }
    EXPECT_EQ(keys.size(), gs.size());
  }
}

TEST(Disconnected, GeneratorRestriction) {
  auto gs = enumerate_disconnected(gw().signature, 1, 1, 1, {"g_mul"});
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_EQ(gs[0].num_boxes(), 0u);
  EXPECT_THROW(enumerate_disconnected(gw().signature, 1, 1, 1, {"nope"}), Error);
}

TEST(Pluggings, ZeroPluggingsReturnsTheSeed) {
  auto seeds = enumerate_disconnected(gw().signature, 2, 1, 1, kPair);
  for (const auto& s : seeds) {
    auto out = enumerate_pluggings(s, 0, RewriteSystem());
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(isomorphic(out[0], normalize_wires(s)));
  }
}

TEST(Pluggings, UnitIntoCounitIsOneScalar) {
  auto seeds = enumerate_disconnected(gw().signature, 1, 1, 2, {"g_unit", "g_counit"});
  std::vector<StringGraph> pair;
  for (auto& s : seeds) {
    if (count_boxes(s, "g_unit") == 1 && count_boxes(s, "g_counit") == 1) pair.push_back(s);
  }
  ASSERT_EQ(pair.size(), 1u);
  auto out = enumerate_pluggings(pair[0], 1, RewriteSystem());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].input_order().empty());
  EXPECT_TRUE(out[0].output_order().empty());
  EXPECT_EQ(out[0].num_boxes(), 2u);
}

TEST(Pluggings, RedexesOnlyRemoveGraphs) {
  const RewriteSystem rs("one", {make_rule("tt", chain({"tick", "tick"}), chain({}))});
  for (const auto& s : enumerate_disconnected(gw().signature, 2, 2, 2, {"tick"})) {
    const auto all = enumerate_pluggings(s, 1, RewriteSystem());
    std::size_t pruned = 0;
    const auto kept = enumerate_pluggings(s, 1, rs, &pruned);
    EXPECT_EQ(kept.size() + pruned, all.size());
    for (const auto& g : kept) EXPECT_FALSE(has_match(rs.rules()[0], g));
  }
}

TEST(Omega, OrdersBySizeThenBytes) {
  const OmegaKey a = omega(chain({"tick"}));
  const OmegaKey b = omega(chain({"tick", "tick"}));
  EXPECT_TRUE(omega_less(a, b, false));
  EXPECT_TRUE(omega_less(a, b, true));
  const OmegaKey l = omega(w_mul_with_unit(0));
  const OmegaKey r = omega(w_mul_with_unit(1));
  EXPECT_NE(l, r);
  EXPECT_TRUE(omega_less(l, r, false) != omega_less(r, l, false));
  EXPECT_FALSE(omega_less(l, r, true));
  EXPECT_FALSE(omega_less(r, l, true));
  EXPECT_EQ(omega(chain({"tick"})), omega(normalize_wires(chain({"tick"}))));
}

TEST(Classify, GroupsByValue) {
  const auto classes =
      classify({chain({"tick", "tick"}), chain({}), chain({"tick"}), chain({"tick", "tick"})}, gw().valuation);
  ASSERT_EQ(classes.size(), 2u);
  EXPECT_EQ(classes[0].members.size(), 2u);
  EXPECT_EQ(classes[1].members.size(), 1u);
}

TEST(GenerateRules, SingletonGivesNothing) {
  auto batch = generate_rules(classify({chain({"tick"})}, gw().valuation), gw().valuation, false, 1);
  EXPECT_TRUE(batch.rules.empty());
  EXPECT_TRUE(batch.congruences.empty());
}

TEST(GenerateRules, StrictPairIsOriented) {
  auto batch = generate_rules(classify({chain({"tick", "tick"}), chain({})}, gw().valuation), gw().valuation, false, 1);
  ASSERT_EQ(batch.rules.size(), 1u);
  EXPECT_EQ(batch.rules[0].name, "syn_0001");
  EXPECT_EQ(batch.rules[0].lhs.num_boxes(), 2u);
  EXPECT_EQ(batch.rules[0].rhs.num_boxes(), 0u);
  EXPECT_TRUE(batch.congruences.empty());
}

TEST(GenerateRules, EqualSizeMembersAreCongruentUnderSizeOnly) {
  const auto classes = classify({w_mul_with_unit(0), w_mul_with_unit(1)}, gw().valuation);
  ASSERT_EQ(classes.size(), 1u);
  ASSERT_EQ(classes[0].members.size(), 2u);
  auto loose = generate_rules(classes, gw().valuation, true, 3);
  EXPECT_TRUE(loose.rules.empty());
  EXPECT_EQ(loose.congruences.size(), 1u);
  auto strict = generate_rules(classes, gw().valuation, false, 3);
  EXPECT_EQ(strict.rules.size(), 1u);
  EXPECT_TRUE(strict.congruences.empty());
}

TEST(OrientedRule, PermutesTheTargetBoundary) {
  GraphBuilder b(gw().signature);
  const VertexId x = b.input("q");
  const VertexId y = b.input("q");
  const VertexId t = b.box1("tick", {x});
  const StringGraph lhs = b.finish({b.extend(y), t});  // (x, y) -> (y, tick x)
  GraphBuilder c(gw().signature);
  const VertexId p = c.input("q");
  const VertexId q = c.input("q");
  const StringGraph target = c.finish({c.box1("tick", {p}), c.extend(q)});  // (p, q) -> (tick p, q)
  const RewriteRule r = oriented_rule("perm", lhs, target, gw().valuation);
  auto s = check_rule_sound(r, gw().valuation);
  ASSERT_TRUE(s);
  EXPECT_NEAR(std::abs(*s - Complex(1.0)), 0.0, 1e-12);
  EXPECT_THROW(oriented_rule("bad", chain({"tick"}), chain({}), gw().valuation), Error);
}

TEST(SpiderMerge, TwentySoundRulesForThePair) {
  EXPECT_EQ(spider().size(), 20u);
  for (const auto& r : spider().rules()) {
    auto s = check_rule_sound(r, gw().valuation);
    ASSERT_TRUE(s) << r.name;
    EXPECT_NEAR(std::abs(*s - r.scalar.value()), 0.0, 1e-9) << r.name;
    EXPECT_FALSE(omega_less(omega(r.lhs), omega(r.rhs), false)) << r.name;
  }
}

TEST(Synthesis, EveryRuleIsSoundWithItsScalar) {
  for (bool naive : {false, true}) {
    for (const auto& r : small_run(naive).rules.rules()) {
      auto s = check_rule_sound(r, gw().valuation);
      ASSERT_TRUE(s) << r.name;
      EXPECT_NEAR(std::abs(*s - r.scalar.value()), 0.0, 1e-9) << r.name;
    }
  }
}

TEST(Synthesis, EveryRuleDecreasesOmega) {
  for (bool naive : {false, true}) {
    for (const auto& r : small_run(naive).rules.rules()) {
      EXPECT_TRUE(omega_less(omega(r.rhs), omega(r.lhs), false)) << r.name;
    }
  }
}

TEST(Synthesis, FilteringNeverAddsRules) {
  const auto& f = small_run(false);
  const auto& n = small_run(true);
  EXPECT_LE(f.counts.rules, n.counts.rules);
  EXPECT_LE(f.counts.enumerated, n.counts.enumerated);
  EXPECT_GT(f.counts.filtered_by_redex, 0u);
  EXPECT_EQ(n.counts.filtered_by_redex, 0u);
  EXPECT_EQ(f.counts.classes, n.counts.classes);
}

TEST(Synthesis, FrozenSmallCounts) {
  EXPECT_EQ(small_run(false).counts.classes, 38u);
  EXPECT_EQ(small_run(false).counts.rules, 68u);
  EXPECT_EQ(small_run(true).counts.rules, 314u);
}

TEST(Synthesis, FilteredRulesPlusPreloadReachEveryNaiveEquality) {
  const auto& f = small_run(false);
  const auto& n = small_run(true);
  std::vector<RewriteRule> all = spider().rules();
  all.insert(all.end(), f.rules.rules().begin(), f.rules.rules().end());
  const RewriteSystem closure("closure", all);
  std::map<std::string, const StringGraph*> rep;
  for (const auto& g : f.representatives) rep[boundary_permutation_class(evaluate(g, gw().valuation))] = &g;
  std::set<std::string> naive_keys;
  auto check = [&](const StringGraph& g) {
    const std::string key = boundary_permutation_class(evaluate(g, gw().valuation));
    naive_keys.insert(key);
    auto it = rep.find(key);
    ASSERT_NE(it, rep.end());
    auto nf = normalize(g, closure, {.max_steps = 50});
    EXPECT_TRUE(isomorphic_unordered(nf.graph, *it->second) || joinable(g, *it->second, closure));
  };
  for (const auto& r : n.rules.rules()) {
    check(r.lhs);
    check(r.rhs);
  }
  for (const auto& g : n.representatives) check(g);
  EXPECT_EQ(naive_keys.size(), rep.size());
}

TEST(Synthesis, DeterministicPerSeed) {
  const auto again = run_synthesis(gw().valuation, small_params(false), spider(), 7);
  const auto& first = small_run(false);
  ASSERT_EQ(again.rules.size(), first.rules.size());
  for (std::size_t i = 0; i < again.rules.size(); ++i) {
    EXPECT_EQ(again.rules.rules()[i].name, first.rules.rules()[i].name);
    EXPECT_EQ(canonical_key(again.rules.rules()[i].lhs), canonical_key(first.rules.rules()[i].lhs));
    EXPECT_EQ(canonical_key(again.rules.rules()[i].rhs), canonical_key(first.rules.rules()[i].rhs));
  }
}

TEST(Synthesis, LoneStateHasNoRules) {
  auto sig = make_signature({{"q", 2}}, {{"state", {}, {"q"}, DataKind::kNone}});
  Valuation v(sig);
  Eigen::MatrixXcd m(2, 1);
  m << Complex(0.3, 0.1), Complex(-0.7, 0.4);
  v.set("state", Tensor::from_matrix(v.cod_types(0), v.dom_types(0), m));
  SynthParams p;
  p.M = 0;
  p.N = 2;
  p.B = 2;
  const auto report = run_synthesis(v, p, RewriteSystem(), 1);
  EXPECT_EQ(report.counts.rules, 0u);
  EXPECT_GT(report.counts.classes, 0u);
}

TEST(Synthesis, RejectsBadParameters) {
  SynthParams p;
  p.B = -1;
  EXPECT_THROW(run_synthesis(gw().valuation, p, RewriteSystem(), 0), Error);
}

}  // namespace
}  // namespace strigraph
