// SPDX-License-Identifier: Apache-2.0
#include "strigraph/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "strigraph/builder.hpp"
#include "strigraph/iso.hpp"

namespace strigraph {
namespace {

namespace fs = std::filesystem;

const Theory& zx() {
  static const Theory t = zx_theory();
  return t;
}

const Theory& gw() {
  static const Theory t = gw_theory();
  return t;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("strigraph_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// emit -> parse -> emit must reproduce the first text exactly.
void expect_graph_round_trip(const StringGraph& g, const std::string& theory) {
  const std::string first = dump(graph_to_json(g, theory));
  const StringGraph back = graph_from_json(parse_json(first), g.signature());
  EXPECT_TRUE(back == g);
  EXPECT_EQ(dump(graph_to_json(back, theory)), first);
}

TEST(TensorIo, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  const IndexTypes up{{"a", 2}, {"b", 3}}, lo{{"c", 2}};
  Tensor::Vector v(12);
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = {n(rng) * 1e-7, n(rng) * 1e9};
  v(0) = {-0.0, 1.0 / 3.0};
  v(1) = {5e-324, -1.7976931348623157e308};
  const Tensor t(up, lo, v);
  const std::string text = dump(tensor_to_json(t));
  const Tensor back = tensor_from_json(parse_json(text));
  EXPECT_EQ(back.upper(), t.upper());
  EXPECT_EQ(back.lower(), t.lower());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    EXPECT_EQ(std::memcmp(&back.entries()(k), &v(k), sizeof(Complex)), 0) << k;
  }
  EXPECT_EQ(dump(tensor_to_json(back)), text);
}

TEST(TensorIo, LayoutIsUpperThenLower) {
  const Tensor t = Tensor::from_matrix({{"q", 2}}, {{"q", 2}}, swap_matrix().matrix().topLeftCorner(2, 2));
  const Json j = tensor_to_json(t);
  EXPECT_EQ(j["entries"].size(), 4u);
  EXPECT_EQ(j["entries"][1][0].get<double>(), t.matrix()(0, 1).real());
}

TEST(TensorIo, RejectsWrongEntryCount) {
  Json j = tensor_to_json(hadamard_matrix());
  j["entries"].erase(0);
  EXPECT_THROW(tensor_from_json(j), Error);
}

TEST(GraphIo, WitnessGraphsRoundTrip) {
  expect_graph_round_trip(zx_cnot3(zx().signature), "zx");
  expect_graph_round_trip(zx_euler(zx().signature, Angle(1, 2), Angle(-1, 4), Angle(7, 6)), "zx");
  expect_graph_round_trip(gw_cnot(gw().signature), "gw");
  expect_graph_round_trip(swap_graph(gw().signature), "gw");
}

TEST(GraphIo, DocumentShape) {
  const Json j = graph_to_json(gw_cnot_on(gw().signature, true), "gw");
  EXPECT_EQ(j["theory"], "gw");
  for (const auto& v : j["vertices"]) EXPECT_EQ(v["id"].get<std::string>()[0], 'v');
  for (const auto& e : j["edges"]) {
    EXPECT_EQ(e["id"].get<std::string>()[0], 'e');
    if (e["tag"]["kind"] != "mid") {
      EXPECT_TRUE(e["tag"].contains("morphism"));
      EXPECT_TRUE(e["tag"].contains("port"));
    }
  }
}

TEST(GraphIo, ForeignIdsAreRenumbered) {
  const Json doc = parse_json(R"({
    "theory": "gw",
    "vertices": [{"id": "in", "kind": "wire", "type": "q"},
                 {"id": "t", "kind": "box", "type": "tick"},
                 {"id": "v7", "kind": "wire", "type": "q"}],
    "edges": [{"id": "x", "src": "in", "tgt": "t", "tag": {"kind": "in", "morphism": "tick", "port": 0}},
              {"id": "e2", "src": "t", "tgt": "v7", "tag": {"kind": "out", "morphism": "tick", "port": 0}}],
    "inputs": ["in"],
    "outputs": ["v7"]
  })");
  const StringGraph g = graph_from_json(doc, gw().signature);
  EXPECT_TRUE(validate(g).empty());
  EXPECT_TRUE(g.has_vertex(VertexId{7}));
  EXPECT_TRUE(g.has_edge(EdgeId{2}));
  EXPECT_EQ(g.num_vertices(), 3u);
  expect_graph_round_trip(g, "gw");
}

TEST(GraphIo, AcceptsInvalidGraphsForValidation) {
  const Json doc = parse_json(R"({"theory": "gw",
    "vertices": [{"id": "v0", "kind": "box", "type": "tick"}], "edges": [], "inputs": [], "outputs": []})");
  const StringGraph g = graph_from_json(doc, gw().signature);
  EXPECT_FALSE(validate(g).empty());
}

TEST(GraphIo, RejectsUnknownFieldsEverywhere) {
  const Json good = graph_to_json(gw_cnot(gw().signature), "gw");
  std::vector<Json> bad(5, good);
  bad[0]["extra"] = 1;
  bad[1]["vertices"][0]["colour"] = "red";
  bad[2]["edges"][0]["weight"] = 2;
  bad[3]["edges"][0]["tag"]["label"] = "x";
  bad[4]["edges"][0]["tag"]["kind"] = "sideways";
  for (const auto& b : bad) {
    try {
      graph_from_json(b, gw().signature);
      ADD_FAILURE() << b.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError);
    }
  }
}

TEST(GraphIo, TypeErrors) {
  Json doc = graph_to_json(gw_cnot(gw().signature), "gw");
  for (auto& e : doc["edges"]) {
    if (e["tag"]["kind"] == "in") {
      e["tag"]["morphism"] = "g_unit";
      break;
    }
  }
  EXPECT_THROW(graph_from_json(doc, gw().signature), Error);
  Json unknown = graph_to_json(gw_cnot(gw().signature), "gw");
  unknown["vertices"][0]["type"] = "nope";
  EXPECT_THROW(graph_from_json(unknown, gw().signature), Error);
  Json dangling = graph_to_json(gw_cnot(gw().signature), "gw");
  dangling["inputs"].push_back("v999");
  EXPECT_THROW(graph_from_json(dangling, gw().signature), Error);
  EXPECT_THROW(parse_json("{not json"), Error);
}

TEST(GraphIo, AngleDataIsExact) {
  const StringGraph g = zx_euler(zx().signature, Angle(3, 7), Angle(1, 360), Angle(0, 1));
  const Json j = graph_to_json(g, "zx");
  std::set<std::string> data;
  for (const auto& v : j["vertices"]) {
    if (v.contains("data")) data.insert(v["data"].get<std::string>());
  }
  EXPECT_TRUE(data.count("3/7"));
  EXPECT_TRUE(data.count("1/360"));
  Json bad = j;
  for (auto& v : bad["vertices"]) {
    if (v.contains("data")) v["data"] = "1/0";
  }
  EXPECT_THROW(graph_from_json(bad, zx().signature), Error);
}

TEST(RulesIo, BundledSetsRoundTrip) {
  for (const Theory* t : {&zx(), &gw()}) {
    const std::string first = dump(rules_to_json(t->rules, t->name));
    const RewriteSystem back = rules_from_json(parse_json(first), t->signature);
    ASSERT_EQ(back.size(), t->rules.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      const auto& a = back.rules()[i];
      const auto& b = t->rules.rules()[i];
      EXPECT_EQ(a.name, b.name);
      EXPECT_TRUE(a.lhs == b.lhs && a.rhs == b.rhs);
      EXPECT_EQ(a.iface, b.iface);
      EXPECT_EQ(a.scalar, b.scalar);
      EXPECT_EQ(a.tag, b.tag);
    }
    EXPECT_EQ(dump(rules_to_json(back, t->name)), first);
  }
}

TEST(RulesIo, LiteralRulesKeepModeAndAnchors) {
  const RewriteSystem h = homeomorphism_rules(gw().signature);
  const std::string first = dump(rules_to_json(h, "gw"));
  const RewriteSystem back = rules_from_json(parse_json(first), gw().signature);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back.rules()[i].mode, MatchMode::kLiteral);
    EXPECT_EQ(back.rules()[i].kept, h.rules()[i].kept);
  }
  EXPECT_EQ(dump(rules_to_json(back, "gw")), first);
}

TEST(RulesIo, RejectsBadRules) {
  Json doc = rules_to_json(gw().rules, "gw");
  Json extra = doc;
  extra["rules"][0]["weight"] = 1;
  EXPECT_THROW(rules_from_json(extra, gw().signature), Error);
  Json iface = doc;
  iface["rules"][0]["iface"][0][0] = "v999";
  EXPECT_THROW(rules_from_json(iface, gw().signature), Error);
  Json dup = doc;
  dup["rules"].push_back(dup["rules"][0]);
  EXPECT_THROW(rules_from_json(dup, gw().signature), Error);
  Json mode = doc;
  mode["rules"][0]["mode"] = "fuzzy";
  EXPECT_THROW(rules_from_json(mode, gw().signature), Error);
}

TEST(TheoryIo, BundledTheoriesExportAndReload) {
  const fs::path dir = scratch_dir("export");
  for (const Theory* t : {&zx(), &gw()}) {
    const fs::path p = export_theory(*t, dir);
    const std::string theory_text = read_text(p);
    const std::string rules_text = read_text(dir / (t->name + ".rules"));
    const Theory back = load_theory(p);
    EXPECT_EQ(back.name, t->name);
    EXPECT_TRUE(*back.signature == *t->signature);
    EXPECT_EQ(back.rules.size(), t->rules.size());
    EXPECT_EQ(dump(theory_to_json(back, t->name + ".rules")), theory_text);
    EXPECT_EQ(dump(rules_to_json(back.rules, back.name)), rules_text);
  }
  fs::remove_all(dir);
}

TEST(TheoryIo, ReloadedValuationsAgree) {
  const fs::path dir = scratch_dir("values");
  const Theory z = load_theory(export_theory(zx(), dir));
  const StringGraph e = zx_euler(z.signature, Angle(1, 3), Angle(5, 4), Angle(-1, 6));
  const Tensor a = evaluate(e, z.valuation);
  const Tensor b = evaluate(zx_euler(zx().signature, Angle(1, 3), Angle(5, 4), Angle(-1, 6)), zx().valuation);
  EXPECT_LE((a.entries() - b.entries()).cwiseAbs().maxCoeff(), 1e-12);
  const Theory g = load_theory(export_theory(gw(), dir));
  EXPECT_LE((evaluate(gw_cnot(g.signature), g.valuation).entries() -
             evaluate(gw_cnot(gw().signature), gw().valuation).entries())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  fs::remove_all(dir);
}

TEST(TheoryIo, StateTablesRoundTrip) {
  const Construction c = gw_diagonal(Complex(0.5, 1.0), Complex(-2.0, 0.25));
  const fs::path dir = scratch_dir("states");
  const Theory back = load_theory(export_theory(c.theory, dir));
  ASSERT_NE(back.valuation.table("state"), nullptr);
  const StringGraph g = graph_from_json(graph_to_json(c.graph, c.theory.name), back.signature);
  EXPECT_LE((evaluate(g, back.valuation).entries() - evaluate(c.graph, c.theory.valuation).entries())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  fs::remove_all(dir);
}

TEST(TheoryIo, LoadCertifiesRules) {
  const fs::path dir = scratch_dir("unsound");
  export_theory(gw(), dir);
  Json rules = read_json_file(dir / "gw.rules");
  // Swap the sides of the lolli rule's scalar.
  for (auto& r : rules["rules"]) {
    if (r["name"] == "w_lolli") r["scalar"] = Json::array({3.0, 0.0});
  }
  write_json_file(dir / "gw.rules", rules);
  try {
    load_theory(dir / "gw.theory");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidRule);
  }
  fs::remove_all(dir);
}

TEST(TheoryIo, RejectsBadDocuments) {
  Json doc = theory_to_json(gw(), std::nullopt);
  Json extra = doc;
  extra["morphisms"][0]["colour"] = "white";
  EXPECT_THROW(theory_from_json(extra), Error);
  Json both = theory_to_json(zx(), std::nullopt);
  for (auto& m : both["morphisms"]) {
    if (m["name"] == "z_phase") m["tensor"] = tensor_to_json(hadamard_matrix());
  }
  EXPECT_THROW(theory_from_json(both), Error);
  Json shape = doc;
  shape["morphisms"][0]["tensor"] = tensor_to_json(hadamard_matrix());
  EXPECT_THROW(theory_from_json(shape), Error);
}

TEST(TheoryIo, ResolveUsesSearchPathThenBundled) {
  EXPECT_EQ(resolve_theory("gw").name, "gw");
  const fs::path dir = scratch_dir("search");
  Theory renamed = gw();
  renamed.name = "gw_copy";
  export_theory(renamed, dir);
  ::setenv("STRIGRAPH_THEORY_PATH", ("/nonexistent:" + dir.string()).c_str(), 1);
  EXPECT_EQ(resolve_theory("gw_copy").name, "gw_copy");
  EXPECT_EQ(resolve_theory((dir / "gw_copy.theory").string()).name, "gw_copy");
  ::unsetenv("STRIGRAPH_THEORY_PATH");
  EXPECT_THROW(resolve_theory("gw_copy"), Error);
  fs::remove_all(dir);
}

TEST(CospanIo, RoundTrip) {
  const auto& sig = gw().signature;
  const FramePoint q{sig->require_object("q"), Sign::kPlus};
  for (const FramedCospan& c : {from_graph(gw_cnot(sig)), unit(sig, q), symmetry(sig, Frame{{q}}, Frame{{{q.type, Sign::kMinus}}})}) {
    const std::string first = dump(cospan_to_json(c, "gw"));
    const FramedCospan back = cospan_from_json(parse_json(first), sig);
    EXPECT_EQ(back.dom, c.dom);
    EXPECT_EQ(back.cod, c.cod);
    EXPECT_EQ(back.d, c.d);
    EXPECT_EQ(back.c, c.c);
    EXPECT_EQ(dump(cospan_to_json(back, "gw")), first);
  }
}

TEST(CospanIo, RejectsInconsistentFrames) {
  const auto& sig = gw().signature;
  Json j = cospan_to_json(from_graph(gw_cnot(sig)), "gw");
  j["dom"][0]["sign"] = "-";
  EXPECT_THROW(cospan_from_json(j, sig), Error);
  j["dom"][0]["sign"] = "?";
  EXPECT_THROW(cospan_from_json(j, sig), Error);
}

TEST(SynthIo, ReportRoundTrip) {
  SynthParams p;
  p.M = 1;
  p.N = 1;
  p.B = 2;
  p.P = 2;
  p.generators = {"g_mul", "g_unit", "g_comul", "g_counit", "tick"};
  const SynthReport r = run_synthesis(gw().valuation, p, RewriteSystem(), 7);
  ASSERT_GT(r.rules.size(), 0u);
  const std::string first = dump(synth_report_to_json(r, "gw"));
  const SynthReport back = synth_report_from_json(parse_json(first), gw().signature);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.counts.rules, r.counts.rules);
  EXPECT_EQ(back.params.generators, p.generators);
  EXPECT_EQ(dump(synth_report_to_json(back, "gw")), first);
  const Json j = parse_json(first);
  EXPECT_TRUE(j.contains("params") && j.contains("counts") && j.contains("rules") && j.contains("congruences"));
}

TEST(DerivationIo, RoundTripAndReplay) {
  const auto d = cnot3_swap_derivation(zx());
  ASSERT_TRUE(d);
  const Derivation doc{"zx", zx_cnot3(zx().signature), d->trace};
  const std::string first = dump(derivation_to_json(doc));
  const Derivation back = derivation_from_json(parse_json(first), zx().signature);
  EXPECT_EQ(back.steps.size(), d->trace.size());
  EXPECT_EQ(dump(derivation_to_json(back)), first);
  const StringGraph end = replay(back.start, zx().rules, back.steps);
  EXPECT_TRUE(isomorphic(end, d->graph));
}

TEST(TheoryIo, ShippedFilesMatchBundledTheories) {
  const fs::path shipped = fs::path(STRIGRAPH_SOURCE_DIR) / "theories";
  const fs::path dir = scratch_dir("shipped");
  for (const auto& name : bundled_theory_names()) {
    export_theory(*bundled_theory(name), dir);
    for (const char* ext : {".theory", ".rules"}) {
      EXPECT_EQ(read_text(shipped / (name + ext)), read_text(dir / (name + ext))) << name << ext;
    }
    const Theory loaded = load_theory(shipped / (name + ".theory"));
    EXPECT_EQ(loaded.rules.size(), bundled_theory(name)->rules.size());
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace strigraph
