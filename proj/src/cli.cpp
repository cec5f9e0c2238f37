// SPDX-License-Identifier: Apache-2.0
#include "strigraph/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iomanip>
#include <sstream>

#include "strigraph/io.hpp"
#include "strigraph/iso.hpp"
#include "strigraph/server.hpp"

namespace strigraph {

namespace {

struct Loaded {
  Theory theory;
  StringGraph graph;
};

Loaded load_graph(const std::string& path, const std::string& theory_flag) {
  const Json doc = read_json_file(path);
  Theory t = resolve_theory(theory_flag.empty() ? theory_name_of(doc) : theory_flag);
  StringGraph g = graph_from_json(doc, t.signature);
  return {std::move(t), std::move(g)};
}

RewriteSystem load_rules(const std::string& path, const Theory& t) {
  if (path.empty()) return t.rules;
  return rules_from_json(read_json_file(path), t.signature);
}

std::string complex_text(Complex z) {
  std::ostringstream s;
  s << std::setprecision(12) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return s.str();
}

std::string types_text(const IndexTypes& ts) {
  std::string out;
  for (const auto& t : ts) out += (out.empty() ? "" : " ") + t.name + "[" + std::to_string(t.dim) + "]";
  return out.empty() ? "-" : out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"String graph rewriting, evaluation and synthesis"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  std::string theory_flag;
  std::function<int()> action;
  const auto json_out = [&] { return format == "json"; };

  // validate
  std::string graph_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check the string graph invariants");
  validate_cmd->add_option("graph", graph_path)->required();
  validate_cmd->add_option("--theory", theory_flag, "Theory file or name");
  validate_cmd->callback([&] {
    action = [&] {
      const Loaded l = load_graph(graph_path, theory_flag);
      const auto vs = validate(l.graph);
      if (json_out()) {
        out << dump({{"valid", vs.empty()}, {"violations", violations_to_json(vs)}});
      } else if (vs.empty()) {
        out << "valid\n";
      } else {
        for (const auto& v : vs) out << v.str() << "\n";
      }
      return vs.empty() ? kExitOk : kExitDomain;
    };
  });

  // normalize
  std::string rules_path, trace_path;
  std::size_t steps = 1000;
  auto* normalize_cmd = app.add_subcommand("normalize", "Rewrite to a normal form with the first-match strategy");
  normalize_cmd->add_option("graph", graph_path)->required();
  normalize_cmd->add_option("--rules", rules_path, "Rules file (default: the theory's rules)");
  normalize_cmd->add_option("--steps", steps, "Step limit");
  normalize_cmd->add_option("--trace", trace_path, "Write the derivation document here");
  normalize_cmd->add_option("--theory", theory_flag, "Theory file or name");
  normalize_cmd->callback([&] {
    action = [&] {
      const Loaded l = load_graph(graph_path, theory_flag);
      require_valid(l.graph);
      const RewriteSystem rs = load_rules(rules_path, l.theory);
      const NormalizeResult r = normalize(l.graph, rs, {.max_steps = steps});
      if (!trace_path.empty()) write_json_file(trace_path, derivation_to_json({l.theory.name, l.graph, r.trace}));
      if (r.status == NormalizeStatus::kStepLimit) err << "step limit reached after " << r.trace.size() << " steps\n";
      out << dump(graph_to_json(r.graph, l.theory.name));
      return kExitOk;
    };
  });

  // match
  std::string rule_name;
  auto* match_cmd = app.add_subcommand("match", "List the matches of rules on a graph");
  match_cmd->add_option("rules", rules_path, "Rules file")->required();
  match_cmd->add_option("graph", graph_path)->required();
  match_cmd->add_option("--rule", rule_name, "Only this rule");
  match_cmd->add_option("--theory", theory_flag, "Theory file or name");
  match_cmd->callback([&] {
    action = [&] {
      const Loaded l = load_graph(graph_path, theory_flag);
      require_valid(l.graph);
      const RewriteSystem rs = load_rules(rules_path, l.theory);
      Json list = Json::array();
      for (const auto& r : rs.rules()) {
        if (!rule_name.empty() && r.name != rule_name) continue;
        const auto ms = find_matches(r, l.graph);
        for (std::size_t i = 0; i < ms.size(); ++i) list.push_back(match_to_json(ms[i], i));
      }
      if (!rule_name.empty()) rs.require(rule_name);
      if (json_out()) {
        out << dump({{"matches", list}});
      } else {
        for (const auto& m : list) {
          out << m["rule"].get<std::string>() << " #" << m["index"].get<std::size_t>() << ":";
          for (const auto& b : m["boxes"]) out << " " << b.get<std::string>();
          out << "\n";
        }
      }
      return kExitOk;
    };
  });

  // rewrite
  std::size_t match_index = 0;
  auto* rewrite_cmd = app.add_subcommand("rewrite", "Apply one rule at one match");
  rewrite_cmd->add_option("graph", graph_path)->required();
  rewrite_cmd->add_option("--rule", rule_name, "Rule name")->required();
  rewrite_cmd->add_option("--match", match_index, "Index into the match list")->required();
  rewrite_cmd->add_option("--rules", rules_path, "Rules file (default: the theory's rules)");
  rewrite_cmd->add_option("--theory", theory_flag, "Theory file or name");
  rewrite_cmd->callback([&] {
    action = [&] {
      const Loaded l = load_graph(graph_path, theory_flag);
      require_valid(l.graph);
      const RewriteSystem rs = load_rules(rules_path, l.theory);
      const auto ms = find_matches(rs.require(rule_name), l.graph);
      if (match_index >= ms.size()) {
        throw Error(ErrorCode::kStaleMatch, rule_name + " has " + std::to_string(ms.size()) + " matches");
      }
      out << dump(graph_to_json(apply(ms[match_index], l.graph), l.theory.name));
      return kExitOk;
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a graph to a tensor");
  eval_cmd->add_option("graph", graph_path)->required();
  eval_cmd->add_option("--theory", theory_flag, "Theory file or name");
  eval_cmd->callback([&] {
    action = [&] {
      const Loaded l = load_graph(graph_path, theory_flag);
      require_valid(l.graph);
      const Tensor t = evaluate(l.graph, l.theory.valuation);
      if (json_out()) {
        out << dump(tensor_to_json(t));
      } else {
        out << "upper: " << types_text(t.upper()) << "\nlower: " << types_text(t.lower()) << "\n";
        const auto m = t.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << complex_text(m(i, j));
          out << "\n";
        }
      }
      return kExitOk;
    };
  });

  // iso
  std::string other_path;
  bool unordered = false;
  auto* iso_cmd = app.add_subcommand("iso", "Decide isomorphism; exit 1 when the graphs differ");
  iso_cmd->add_option("g1", graph_path)->required();
  iso_cmd->add_option("g2", other_path)->required();
  iso_cmd->add_flag("--unordered", unordered, "Ignore boundary order");
  iso_cmd->add_option("--theory", theory_flag, "Theory file or name");
  iso_cmd->callback([&] {
    action = [&] {
      const Loaded a = load_graph(graph_path, theory_flag);
      const Json other = read_json_file(other_path);
      const StringGraph b = graph_from_json(other, a.theory.signature);
      const bool same = unordered ? isomorphic_unordered(a.graph, b).has_value() : isomorphic(a.graph, b).has_value();
      if (json_out()) {
        out << dump({{"isomorphic", same}});
      } else {
        out << (same ? "isomorphic\n" : "not isomorphic\n");
      }
      return same ? kExitOk : kExitDomain;
    };
  });

  // synth
  SynthParams params;
  std::uint64_t seed = 0;
  std::string out_path, generators;
  int max_boundary = -1;
  bool spider = false;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize rewrite rules from a valuation");
  synth_cmd->add_option("--theory", theory_flag, "Theory file or name")->required();
  synth_cmd->add_option("-M", params.M, "Largest input arity")->required();
  synth_cmd->add_option("-N", params.N, "Largest output arity")->required();
  synth_cmd->add_option("-B", params.B, "Largest box count")->required();
  synth_cmd->add_option("-P", params.P, "Largest plugging count")->required();
  synth_cmd->add_option("--max-boundary", max_boundary, "Bound on inputs plus outputs");
  synth_cmd->add_option("--generators", generators, "Comma-separated generator names (default: all)");
  synth_cmd->add_flag("--naive", params.naive, "Disable redex filtering");
  synth_cmd->add_flag("--size-only", params.size_only_omega, "Order by size only");
  synth_cmd->add_flag("--spider", spider, "Preload the spider merge rules");
  synth_cmd->add_option("--seed", seed, "Random seed");
  synth_cmd->add_option("--out", out_path, "Write the rules document here");
  synth_cmd->callback([&] {
    action = [&] {
      const Theory t = resolve_theory(theory_flag);
      if (max_boundary >= 0) params.max_boundary = max_boundary;
      params.generators = split_list(generators);
      const RewriteSystem preload = spider ? spider_merge_rules(t.valuation, params.generators) : RewriteSystem();
      const SynthReport r = run_synthesis(t.valuation, params, preload, seed);
      if (!out_path.empty()) write_json_file(out_path, rules_to_json(r.rules, t.name));
      if (json_out()) {
        out << dump(synth_report_to_json(r, t.name));
      } else {
        out << "enumerated: " << r.counts.enumerated << "\nfiltered_by_redex: " << r.counts.filtered_by_redex
            << "\nclasses: " << r.counts.classes << "\nrules: " << r.counts.rules << "\n";
        for (const auto& rule : r.rules.rules()) {
          out << rule.name << ": " << rule.lhs.num_boxes() << " boxes, " << rule.lhs.num_edges() << " edges => "
              << rule.rhs.num_boxes() << " boxes, " << rule.rhs.num_edges() << " edges\n";
        }
      }
      return kExitOk;
    };
  });

  // check-theory
  std::string theory_path;
  auto* check_cmd = app.add_subcommand("check-theory", "Load a theory and check every rule against its valuation");
  check_cmd->add_option("file", theory_path)->required();
  check_cmd->callback([&] {
    action = [&] {
      const Json doc = read_json_file(theory_path);
      Theory t = theory_from_json(doc);
      if (doc.contains("rules")) {
        const auto rp = std::filesystem::path(theory_path).parent_path() / doc["rules"].get<std::string>();
        t.rules = rules_from_json(read_json_file(rp), t.signature);
      }
      Json bad = Json::array();
      for (const auto& r : t.rules.rules()) {
        if (!r.kept.empty()) continue;
        const auto s = check_rule_sound(r, t.valuation);
        if (!s || (r.scalar && std::abs(*s - *r.scalar) > 1e-9 * std::max(1.0, std::abs(*s)))) bad.push_back(r.name);
      }
      if (json_out()) {
        out << dump({{"name", t.name},
                     {"objects", t.signature->objects().size()},
                     {"morphisms", t.signature->morphisms().size()},
                     {"rules", t.rules.size()},
                     {"unsound", bad}});
      } else {
        out << "theory " << t.name << ": " << t.signature->objects().size() << " objects, "
            << t.signature->morphisms().size() << " morphisms, " << t.rules.size() << " rules\n";
        for (const auto& b : bad) out << "unsound: " << b.get<std::string>() << "\n";
        if (bad.empty()) out << "all rules sound\n";
      }
      return bad.empty() ? kExitOk : kExitDomain;
    };
  });

  // export-theory
  std::string export_name, export_dir;
  auto* export_cmd = app.add_subcommand("export-theory", "Write a bundled theory as .theory and .rules files");
  export_cmd->add_option("name", export_name)->required()->check(CLI::IsMember(bundled_theory_names()));
  export_cmd->add_option("dir", export_dir)->required();
  export_cmd->callback([&] {
    action = [&] {
      out << export_theory(*bundled_theory(export_name), export_dir).string() << "\n";
      return kExitOk;
    };
  });

  // serve
  int port = 8080;
  std::string host = "127.0.0.1", origin = "*";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP derivation service");
  serve_cmd->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--cors-origin", origin, "Allowed UI origin");
  serve_cmd->callback([&] {
    action = [&] {
      Server server({origin});
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
      err << "listening on " << host << ":" << bound << "\n";
      return server.listen_after_bind() ? kExitOk : kExitDomain;
    };
  });

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  if (storage.empty()) storage.push_back("strigraph");
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.detail() << "\n";
    return kExitDomain;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace strigraph
