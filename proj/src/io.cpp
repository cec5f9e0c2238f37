// SPDX-License-Identifier: Apache-2.0
#include "strigraph/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace strigraph {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::kParseError, what); }

const Json& require_object(const Json& doc, const char* what) {
  if (!doc.is_object()) fail(std::string(what) + " must be an object");
  return doc;
}

void check_keys(const Json& doc, std::initializer_list<std::string_view> allowed, const char* what) {
  require_object(doc, what);
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(std::string("unknown field '") + key + "' in " + what);
    }
  }
}

const Json& field(const Json& doc, const char* key, const char* what) {
  auto it = doc.find(key);
  if (it == doc.end()) fail(std::string("missing field '") + key + "' in " + what);
  return *it;
}

std::string str(const Json& v, const char* what) {
  if (!v.is_string()) fail(std::string(what) + " must be a string");
  return v.get<std::string>();
}

const Json& arr(const Json& v, const char* what) {
  if (!v.is_array()) fail(std::string(what) + " must be an array");
  return v;
}

std::int64_t integer(const Json& v, const char* what) {
  if (!v.is_number_integer()) fail(std::string(what) + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint32_t index_value(const Json& v, const char* what) {
  const auto n = integer(v, what);
  if (n < 0 || n > 0xfffffffe) fail(std::string(what) + " out of range");
  return static_cast<std::uint32_t>(n);
}

bool boolean(const Json& v, const char* what) {
  if (!v.is_boolean()) fail(std::string(what) + " must be a boolean");
  return v.get<bool>();
}

double number(const Json& v, const char* what) {
  if (!v.is_number()) fail(std::string(what) + " must be a number");
  return v.get<double>();
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) fail(std::string(what) + " must be [re, im]");
  return {number(v[0], what), number(v[1], what)};
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string vid(VertexId v) { return "v" + std::to_string(raw(v)); }
std::string eid(EdgeId e) { return "e" + std::to_string(raw(e)); }

std::optional<std::uint64_t> numbered_id(const std::string& s, char prefix) {
  if (s.size() < 2 || s[0] != prefix) return std::nullopt;
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return n;
}

std::string edge_kind_name(EdgeKind k) { return std::string(to_string(k)); }

std::optional<EdgeKind> edge_kind_from(const std::string& s) {
  if (s == "mid") return EdgeKind::kMid;
  if (s == "in") return EdgeKind::kIn;
  if (s == "out") return EdgeKind::kOut;
  return std::nullopt;
}

/// Graph parse with the id strings it used.
struct ParsedGraph {
  StringGraph graph;
  std::map<std::string, VertexId> vertices;
};

ParsedGraph parse_graph(const Json& doc, const SignaturePtr& sig) {
  check_keys(doc, {"theory", "vertices", "edges", "inputs", "outputs"}, "graph");
  str(field(doc, "theory", "graph"), "graph theory");
  const Json& vs = arr(field(doc, "vertices", "graph"), "vertices");
  const Json& es = arr(field(doc, "edges", "graph"), "edges");

  // Numeric ids first, everything else after the largest.
  std::vector<std::string> vnames, enames;
  for (const auto& v : vs) {
    check_keys(v, {"id", "kind", "type", "data"}, "vertex");
    vnames.push_back(str(field(v, "id", "vertex"), "vertex id"));
  }
  for (const auto& e : es) {
    check_keys(e, {"id", "src", "tgt", "tag"}, "edge");
    enames.push_back(str(field(e, "id", "edge"), "edge id"));
  }
  std::set<std::uint64_t> used;
  std::uint64_t next = 0;
  std::vector<std::optional<std::uint64_t>> vnum(vnames.size()), enumr(enames.size());
  auto claim = [&](const std::string& s, char prefix, std::optional<std::uint64_t>& slot) {
    if (auto n = numbered_id(s, prefix); n && used.insert(*n).second) {
      slot = n;
      next = std::max(next, *n + 1);
    }
  };
  for (std::size_t i = 0; i < vnames.size(); ++i) claim(vnames[i], 'v', vnum[i]);
  for (std::size_t i = 0; i < enames.size(); ++i) claim(enames[i], 'e', enumr[i]);

  ParsedGraph out{StringGraph(sig), {}};
  StringGraph& g = out.graph;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Json& v = vs[i];
    const std::string kind = str(field(v, "kind", "vertex"), "vertex kind");
    const std::string type = str(field(v, "type", "vertex"), "vertex type");
    Vertex vx;
    if (kind == "wire") {
      auto o = sig->object_index(type);
      if (!o) throw Error(ErrorCode::kTypeMismatch, "unknown object " + type);
      if (v.contains("data")) fail("wire-vertex " + vnames[i] + " has data");
      vx = {VertexKind::kWire, *o, {}};
    } else if (kind == "box") {
      auto m = sig->morphism_index(type);
      if (!m) throw Error(ErrorCode::kTypeMismatch, "unknown morphism " + type);
      vx = {VertexKind::kBox, *m, {}};
      const DataKind dk = sig->morphism(*m).data_kind;
      if (v.contains("data")) {
        const std::string d = str(v["data"], "vertex data");
        if (dk == DataKind::kAngle) {
          vx.data = Angle::parse(d);
        } else if (dk == DataKind::kOpaque) {
          vx.data = d;
        } else {
          fail("box " + vnames[i] + " of " + type + " takes no data");
        }
      } else if (dk == DataKind::kOpaque) {
        fail("box " + vnames[i] + " of " + type + " needs data");
      }
    } else {
      fail("vertex kind must be wire or box");
    }
    const VertexId id{vnum[i] ? *vnum[i] : next++};
    if (!out.vertices.emplace(vnames[i], id).second) fail("duplicate vertex id " + vnames[i]);
    g.insert_vertex(id, std::move(vx));
  }
  auto lookup = [&](const Json& v, const char* what) {
    const std::string s = str(v, what);
    auto it = out.vertices.find(s);
    if (it == out.vertices.end()) throw Error(ErrorCode::kNoSuchVertex, s);
    return it->second;
  };
  std::set<std::string> seen_edges;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const Json& e = es[i];
    if (!seen_edges.insert(enames[i]).second) fail("duplicate edge id " + enames[i]);
    Edge edge;
    edge.src = lookup(field(e, "src", "edge"), "edge src");
    edge.tgt = lookup(field(e, "tgt", "edge"), "edge tgt");
    const Json& tag = field(e, "tag", "edge");
    check_keys(tag, {"kind", "morphism", "port"}, "edge tag");
    auto kind = edge_kind_from(str(field(tag, "kind", "edge tag"), "edge tag kind"));
    if (!kind) fail("edge tag kind must be mid, in or out");
    edge.kind = *kind;
    const Vertex& s = g.vertex(edge.src);
    const Vertex& t = g.vertex(edge.tgt);
    if (edge.kind == EdgeKind::kMid) {
      if (tag.contains("morphism") || tag.contains("port")) fail("mid edge " + enames[i] + " has a port");
      if (!s.is_wire() || !t.is_wire()) throw Error(ErrorCode::kTypeMismatch, "mid edge " + enames[i] + " must join wires");
      edge.type = s.type;
    } else {
      const VertexId box = edge.kind == EdgeKind::kIn ? edge.tgt : edge.src;
      const VertexId wire = edge.kind == EdgeKind::kIn ? edge.src : edge.tgt;
      if (!g.vertex(box).is_box() || !g.vertex(wire).is_wire()) {
        throw Error(ErrorCode::kTypeMismatch, "edge " + enames[i] + " does not fit its tag");
      }
      const std::string m = str(field(tag, "morphism", "edge tag"), "edge tag morphism");
      if (sig->morphism(g.vertex(box).type).name != m) {
        throw Error(ErrorCode::kTypeMismatch, "edge " + enames[i] + " names " + m);
      }
      edge.type = g.vertex(box).type;
      edge.port = index_value(field(tag, "port", "edge tag"), "edge tag port");
    }
    g.insert_edge(EdgeId{enumr[i] ? *enumr[i] : next++}, edge);
  }
  std::vector<VertexId> ins, outs;
  for (const auto& v : arr(field(doc, "inputs", "graph"), "inputs")) ins.push_back(lookup(v, "input"));
  for (const auto& v : arr(field(doc, "outputs", "graph"), "outputs")) outs.push_back(lookup(v, "output"));
  g.set_input_order(std::move(ins));
  g.set_output_order(std::move(outs));
  return out;
}

Json id_pairs(const std::vector<std::pair<VertexId, VertexId>>& pairs) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs) out.push_back(Json::array({vid(a), vid(b)}));
  return out;
}

std::vector<std::pair<VertexId, VertexId>> parse_pairs(const Json& doc, const ParsedGraph& l, const ParsedGraph& r,
                                                      const char* what) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (const auto& p : arr(doc, what)) {
    if (!p.is_array() || p.size() != 2) fail(std::string(what) + " entries must be pairs");
    auto a = l.vertices.find(str(p[0], what));
    auto b = r.vertices.find(str(p[1], what));
    if (a == l.vertices.end() || b == r.vertices.end()) throw Error(ErrorCode::kNoSuchVertex, std::string(what) + " entry");
    out.emplace_back(a->second, b->second);
  }
  return out;
}

Json frame_to_json(const Frame& f, const Signature& sig) {
  Json out = Json::array();
  for (const auto& p : f.points) {
    out.push_back({{"type", sig.object(p.type).name}, {"sign", p.sign == Sign::kPlus ? "+" : "-"}});
  }
  return out;
}

Frame frame_from_json(const Json& doc, const Signature& sig) {
  Frame f;
  for (const auto& p : arr(doc, "frame")) {
    check_keys(p, {"type", "sign"}, "frame point");
    const std::string t = str(field(p, "type", "frame point"), "frame type");
    auto o = sig.object_index(t);
    if (!o) throw Error(ErrorCode::kTypeMismatch, "unknown object " + t);
    const std::string s = str(field(p, "sign", "frame point"), "frame sign");
    if (s != "+" && s != "-") fail("frame sign must be + or -");
    f.points.push_back({*o, s == "+" ? Sign::kPlus : Sign::kMinus});
  }
  return f;
}

IndexTypes index_types_from_json(const Json& doc) {
  IndexTypes out;
  for (const auto& t : arr(doc, "index types")) {
    check_keys(t, {"name", "dim"}, "index type");
    const auto dim = integer(field(t, "dim", "index type"), "index dim");
    if (dim < 1) fail("index dim must be positive");
    out.push_back({str(field(t, "name", "index type"), "index name"), static_cast<int>(dim)});
  }
  return out;
}

Json index_types_to_json(const IndexTypes& ts) {
  Json out = Json::array();
  for (const auto& t : ts) out.push_back({{"name", t.name}, {"dim", t.dim}});
  return out;
}

}  // namespace

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

void write_json_file(const fs::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path.string());
  out << dump(doc);
}

Json tensor_to_json(const Tensor& t) {
  Json entries = Json::array();
  for (Eigen::Index k = 0; k < t.entries().size(); ++k) entries.push_back(complex_to_json(t.entries()(k)));
  return {{"lower", index_types_to_json(t.lower())}, {"upper", index_types_to_json(t.upper())}, {"entries", entries}};
}

Tensor tensor_from_json(const Json& doc) {
  return guarded([&] {
    check_keys(doc, {"lower", "upper", "entries"}, "tensor");
    IndexTypes lower = index_types_from_json(field(doc, "lower", "tensor"));
    IndexTypes upper = index_types_from_json(field(doc, "upper", "tensor"));
    const Json& es = arr(field(doc, "entries", "tensor"), "entries");
    if (es.size() != volume(upper) * volume(lower)) throw Error(ErrorCode::kShapeMismatch, "tensor entry count");
    Tensor::Vector v(static_cast<Eigen::Index>(es.size()));
    for (std::size_t k = 0; k < es.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_from_json(es[k], "entry");
    return Tensor(std::move(upper), std::move(lower), std::move(v));
  });
}

Json graph_to_json(const StringGraph& g, const std::string& theory) {
  const Signature& sig = g.sig();
  Json vs = Json::array();
  for (const auto& [id, rec] : g.vertices()) {
    const Vertex& v = rec.vertex;
    Json j{{"id", vid(id)},
           {"kind", v.is_box() ? "box" : "wire"},
           {"type", v.is_box() ? sig.morphism(v.type).name : sig.object(v.type).name}};
    if (const auto* a = std::get_if<Angle>(&v.data)) j["data"] = a->str();
    if (const auto* token = std::get_if<std::string>(&v.data)) j["data"] = *token;
    vs.push_back(std::move(j));
  }
  Json es = Json::array();
  for (const auto& [id, e] : g.edges()) {
    Json tag{{"kind", edge_kind_name(e.kind)}};
    if (e.kind != EdgeKind::kMid) {
      tag["morphism"] = sig.morphism(e.type).name;
      tag["port"] = e.port;
    }
    es.push_back({{"id", eid(id)}, {"src", vid(e.src)}, {"tgt", vid(e.tgt)}, {"tag", tag}});
  }
  Json ins = Json::array(), outs = Json::array();
  for (VertexId v : g.input_order()) ins.push_back(vid(v));
  for (VertexId v : g.output_order()) outs.push_back(vid(v));
  return {{"theory", theory}, {"vertices", vs}, {"edges", es}, {"inputs", ins}, {"outputs", outs}};
}

StringGraph graph_from_json(const Json& doc, const SignaturePtr& sig) {
  return guarded([&] { return parse_graph(doc, sig).graph; });
}

std::string theory_name_of(const Json& doc) {
  return guarded([&] { return str(field(require_object(doc, "document"), "theory", "document"), "theory"); });
}

Json rule_to_json(const RewriteRule& r, const std::string& theory) {
  Json j{{"name", r.name},
         {"lhs", graph_to_json(r.lhs, theory)},
         {"rhs", graph_to_json(r.rhs, theory)},
         {"iface", id_pairs(r.iface)}};
  if (r.mode != MatchMode::kHomeomorphic) j["mode"] = std::string(to_string(r.mode));
  if (!r.kept.empty()) j["kept"] = id_pairs(r.kept);
  if (r.scalar) j["scalar"] = complex_to_json(*r.scalar);
  if (!r.tag.empty()) j["tag"] = r.tag;
  return j;
}

RewriteRule rule_from_json(const Json& doc, const SignaturePtr& sig) {
  return guarded([&] {
    check_keys(doc, {"name", "lhs", "rhs", "iface", "mode", "kept", "scalar", "tag"}, "rule");
    RewriteRule r;
    r.name = str(field(doc, "name", "rule"), "rule name");
    const ParsedGraph l = parse_graph(field(doc, "lhs", "rule"), sig);
    const ParsedGraph h = parse_graph(field(doc, "rhs", "rule"), sig);
    r.iface = parse_pairs(field(doc, "iface", "rule"), l, h, "iface");
    if (doc.contains("mode")) {
      const std::string m = str(doc["mode"], "rule mode");
      if (m == "literal") {
        r.mode = MatchMode::kLiteral;
      } else if (m != "homeomorphic") {
        fail("rule mode must be homeomorphic or literal");
      }
    }
    if (doc.contains("kept")) r.kept = parse_pairs(doc["kept"], l, h, "kept");
    if (doc.contains("scalar")) r.scalar = complex_from_json(doc["scalar"], "scalar");
    if (doc.contains("tag")) r.tag = str(doc["tag"], "rule tag");
    r.lhs = l.graph;
    r.rhs = h.graph;
    require_valid_rule(r);
    return r;
  });
}

Json rules_to_json(const RewriteSystem& rs, const std::string& theory) {
  Json rules = Json::array();
  for (const auto& r : rs.rules()) rules.push_back(rule_to_json(r, theory));
  return {{"theory", theory}, {"rules", rules}};
}

RewriteSystem rules_from_json(const Json& doc, const SignaturePtr& sig) {
  return guarded([&] {
    check_keys(doc, {"theory", "rules"}, "rules document");
    const std::string theory = str(field(doc, "theory", "rules document"), "theory");
    RewriteSystem rs(theory);
    for (const auto& r : arr(field(doc, "rules", "rules document"), "rules")) rs.add(rule_from_json(r, sig));
    return rs;
  });
}

Json theory_to_json(const Theory& t, const std::optional<std::string>& rules_path) {
  const Signature& sig = *t.signature;
  Json objects = Json::array();
  for (std::uint32_t i = 0; i < sig.objects().size(); ++i) {
    Json o{{"name", sig.object(i).name}};
    try {
      o["dim"] = t.valuation.dim(i);
    } catch (const Error&) {
    }
    objects.push_back(std::move(o));
  }
  Json morphisms = Json::array();
  for (const auto& m : sig.morphisms()) {
    Json j{{"name", m.name}, {"dom", m.dom}, {"cod", m.cod}};
    if (m.data_kind != DataKind::kNone) j["data_kind"] = std::string(to_string(m.data_kind));
    if (t.valuation.has_fixed(m.name)) {
      j["tensor"] = tensor_to_json(t.valuation.fixed(m.name));
    } else if (const Tensor* b = t.valuation.phase_basis(m.name)) {
      j["phase_basis"] = tensor_to_json(*b);
    } else if (const auto* tab = t.valuation.table(m.name)) {
      Json entries = Json::object();
      for (const auto& [key, value] : *tab) entries[key] = tensor_to_json(value);
      j["table"] = std::move(entries);
    }
    morphisms.push_back(std::move(j));
  }
  Json doc{{"name", t.name}, {"objects", objects}, {"morphisms", morphisms}};
  if (rules_path) doc["rules"] = *rules_path;
  return doc;
}

Theory theory_from_json(const Json& doc) {
  return guarded([&] {
    check_keys(doc, {"name", "objects", "morphisms", "rules"}, "theory");
    Theory t;
    t.name = str(field(doc, "name", "theory"), "theory name");
    std::vector<ObjectType> objects;
    for (const auto& o : arr(field(doc, "objects", "theory"), "objects")) {
      check_keys(o, {"name", "dim"}, "object");
      ObjectType ot{str(field(o, "name", "object"), "object name"), std::nullopt};
      if (o.contains("dim")) ot.dim = static_cast<int>(integer(o["dim"], "object dim"));
      objects.push_back(std::move(ot));
    }
    std::vector<MorphismType> morphisms;
    const Json& ms = arr(field(doc, "morphisms", "theory"), "morphisms");
    for (const auto& m : ms) {
      check_keys(m, {"name", "dom", "cod", "data_kind", "tensor", "phase_basis", "table"}, "morphism");
      MorphismType mt;
      mt.name = str(field(m, "name", "morphism"), "morphism name");
      for (const auto& x : arr(field(m, "dom", "morphism"), "dom")) mt.dom.push_back(str(x, "dom entry"));
      for (const auto& x : arr(field(m, "cod", "morphism"), "cod")) mt.cod.push_back(str(x, "cod entry"));
      if (m.contains("data_kind")) {
        auto dk = data_kind_from_string(str(m["data_kind"], "data_kind"));
        if (!dk) fail("data_kind must be none, angle or opaque");
        mt.data_kind = *dk;
      }
      const int given = m.contains("tensor") + m.contains("phase_basis") + m.contains("table");
      if (given > 1) fail("morphism " + mt.name + " has more than one valuation");
      if (m.contains("phase_basis") && mt.data_kind != DataKind::kAngle) fail(mt.name + ": phase_basis needs angle data");
      if (m.contains("table") && mt.data_kind != DataKind::kOpaque) fail(mt.name + ": table needs opaque data");
      morphisms.push_back(std::move(mt));
    }
    t.signature = make_signature(std::move(objects), std::move(morphisms));
    t.valuation = Valuation(t.signature);
    for (const auto& m : ms) {
      const std::string name = m["name"].get<std::string>();
      if (m.contains("tensor")) {
        t.valuation.set(name, tensor_from_json(m["tensor"]));
      } else if (m.contains("phase_basis")) {
        t.valuation.set_phase(name, tensor_from_json(m["phase_basis"]));
      } else if (m.contains("table")) {
        std::map<std::string, Tensor> tab;
        for (const auto& [key, value] : require_object(m["table"], "table").items()) tab.emplace(key, tensor_from_json(value));
        t.valuation.set_table(name, std::move(tab));
      }
    }
    t.rules = RewriteSystem(t.name);
    return t;
  });
}

Theory load_theory(const fs::path& path) {
  const Json doc = read_json_file(path);
  Theory t = theory_from_json(doc);
  if (doc.contains("rules")) {
    const fs::path rp = path.parent_path() / str(doc["rules"], "rules path");
    const Json rdoc = read_json_file(rp);
    if (theory_name_of(rdoc) != t.name) {
      throw Error(ErrorCode::kSignatureMismatch, rp.string() + " belongs to theory " + theory_name_of(rdoc));
    }
    t.rules = rules_from_json(rdoc, t.signature);
  }
  certify(t);
  return t;
}

fs::path export_theory(const Theory& t, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string rules_file = t.name + ".rules";
  write_json_file(dir / rules_file, rules_to_json(t.rules, t.name));
  const fs::path theory_path = dir / (t.name + ".theory");
  write_json_file(theory_path, theory_to_json(t, rules_file));
  return theory_path;
}

std::vector<std::string> bundled_theory_names() { return {"zx", "gw"}; }

std::optional<Theory> bundled_theory(const std::string& name) {
  if (name == "zx") return zx_theory();
  if (name == "gw") return gw_theory();
  return std::nullopt;
}

Theory resolve_theory(const std::string& name_or_path) {
  std::error_code ec;
  if (fs::is_regular_file(name_or_path, ec)) return load_theory(name_or_path);
  if (const char* env = std::getenv("STRIGRAPH_THEORY_PATH")) {
    std::stringstream dirs(env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      for (const fs::path& p : {fs::path(dir) / (name_or_path + ".theory"), fs::path(dir) / name_or_path}) {
        if (fs::is_regular_file(p, ec)) return load_theory(p);
      }
    }
  }
  if (auto t = bundled_theory(name_or_path)) return std::move(*t);
  throw Error(ErrorCode::kParseError, "no theory named " + name_or_path);
}

Json cospan_to_json(const FramedCospan& f, const std::string& theory) {
  const Signature& sig = *f.signature();
  Json d = Json::array(), c = Json::array();
  for (VertexId v : f.d) d.push_back(vid(v));
  for (VertexId v : f.c) c.push_back(vid(v));
  return {{"graph", graph_to_json(f.graph, theory)},
          {"dom", frame_to_json(f.dom, sig)},
          {"cod", frame_to_json(f.cod, sig)},
          {"d", d},
          {"c", c}};
}

FramedCospan cospan_from_json(const Json& doc, const SignaturePtr& sig) {
  return guarded([&] {
    check_keys(doc, {"graph", "dom", "cod", "d", "c"}, "cospan");
    ParsedGraph g = parse_graph(field(doc, "graph", "cospan"), sig);
    auto ids = [&](const char* key) {
      std::vector<VertexId> out;
      for (const auto& v : arr(field(doc, key, "cospan"), key)) {
        auto it = g.vertices.find(str(v, key));
        if (it == g.vertices.end()) throw Error(ErrorCode::kNoSuchVertex, v.dump());
        out.push_back(it->second);
      }
      return out;
    };
    return make_cospan(std::move(g.graph), frame_from_json(field(doc, "dom", "cospan"), *sig),
                       frame_from_json(field(doc, "cod", "cospan"), *sig), ids("d"), ids("c"));
  });
}

Json synth_report_to_json(const SynthReport& r, const std::string& theory) {
  const SynthParams& p = r.params;
  Json params{{"M", p.M}, {"N", p.N}, {"B", p.B}, {"P", p.P}};
  if (p.max_boundary) params["max_boundary"] = *p.max_boundary;
  params["naive"] = p.naive;
  params["size_only_omega"] = p.size_only_omega;
  params["generators"] = p.generators;
  params["seed"] = r.seed;
  Json counts{{"enumerated", r.counts.enumerated},
              {"filtered_by_redex", r.counts.filtered_by_redex},
              {"classes", r.counts.classes},
              {"rules", r.counts.rules}};
  Json congruences = Json::array();
  for (const auto& c : r.congruences) {
    congruences.push_back({{"a", graph_to_json(c.a, theory)}, {"b", graph_to_json(c.b, theory)}});
  }
  return {{"params", params}, {"counts", counts}, {"rules", rules_to_json(r.rules, theory)}, {"congruences", congruences}};
}

SynthReport synth_report_from_json(const Json& doc, const SignaturePtr& sig) {
  return guarded([&] {
    check_keys(doc, {"params", "counts", "rules", "congruences"}, "synthesis report");
    SynthReport r;
    const Json& p = field(doc, "params", "synthesis report");
    check_keys(p, {"M", "N", "B", "P", "max_boundary", "naive", "size_only_omega", "generators", "seed"}, "params");
    r.params.M = static_cast<int>(integer(field(p, "M", "params"), "M"));
    r.params.N = static_cast<int>(integer(field(p, "N", "params"), "N"));
    r.params.B = static_cast<int>(integer(field(p, "B", "params"), "B"));
    r.params.P = static_cast<int>(integer(field(p, "P", "params"), "P"));
    if (p.contains("max_boundary")) r.params.max_boundary = static_cast<int>(integer(p["max_boundary"], "max_boundary"));
    r.params.naive = boolean(field(p, "naive", "params"), "naive");
    r.params.size_only_omega = boolean(field(p, "size_only_omega", "params"), "size_only_omega");
    for (const auto& g : arr(field(p, "generators", "params"), "generators")) r.params.generators.push_back(str(g, "generator"));
    const Json& seed = field(p, "seed", "params");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail("seed must be an integer");
    r.seed = seed.get<std::uint64_t>();
    const Json& c = field(doc, "counts", "synthesis report");
    check_keys(c, {"enumerated", "filtered_by_redex", "classes", "rules"}, "counts");
    auto count = [&](const char* key) { return static_cast<std::size_t>(integer(field(c, key, "counts"), key)); };
    r.counts = {count("enumerated"), count("filtered_by_redex"), count("classes"), count("rules")};
    r.rules = rules_from_json(field(doc, "rules", "synthesis report"), sig);
    for (const auto& cg : arr(field(doc, "congruences", "synthesis report"), "congruences")) {
      check_keys(cg, {"a", "b"}, "congruence");
      r.congruences.push_back(
          {parse_graph(field(cg, "a", "congruence"), sig).graph, parse_graph(field(cg, "b", "congruence"), sig).graph});
    }
    return r;
  });
}

Json derivation_to_json(const Derivation& d) {
  Json steps = Json::array();
  for (const auto& s : d.steps) steps.push_back({{"rule", s.rule}, {"match_index", s.match_index}});
  return {{"theory", d.theory}, {"graph", graph_to_json(d.start, d.theory)}, {"steps", steps}};
}

Derivation derivation_from_json(const Json& doc, const SignaturePtr& sig) {
  return guarded([&] {
    check_keys(doc, {"theory", "graph", "steps"}, "derivation");
    Derivation d;
    d.theory = str(field(doc, "theory", "derivation"), "theory");
    d.start = parse_graph(field(doc, "graph", "derivation"), sig).graph;
    for (const auto& s : arr(field(doc, "steps", "derivation"), "steps")) {
      check_keys(s, {"rule", "match_index"}, "step");
      TraceEntry e;
      e.rule = str(field(s, "rule", "step"), "step rule");
      const auto idx = integer(field(s, "match_index", "step"), "match_index");
      if (idx < 0) fail("match_index must be non-negative");
      e.match_index = static_cast<std::size_t>(idx);
      d.steps.push_back(std::move(e));
    }
    return d;
  });
}

Json violations_to_json(const std::vector<Violation>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back({{"kind", v.kind}, {"subject", v.subject}});
  return out;
}

Json match_to_json(const Match& m, std::size_t index) {
  Json boxes = Json::array(), vs = Json::array(), es = Json::array();
  for (VertexId v : m.box_images) boxes.push_back(vid(v));
  for (VertexId v : m.anchor_vertices) vs.push_back(vid(v));
  for (EdgeId e : m.anchor_edges) es.push_back(eid(e));
  return {{"rule", m.rule ? m.rule->name : ""}, {"index", index}, {"boxes", boxes}, {"anchors", {{"vertices", vs}, {"edges", es}}}};
}

}  // namespace strigraph
