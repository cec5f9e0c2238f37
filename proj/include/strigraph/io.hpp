// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strigraph/cospan.hpp"
#include "strigraph/rewrite.hpp"
#include "strigraph/synth.hpp"
#include "strigraph/theories.hpp"

namespace strigraph {

using Json = nlohmann::ordered_json;

/// Every reader throws kParseError for malformed documents, including
/// unknown fields, and the usual domain errors for ill-typed content.

/// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const Json& doc);
Json parse_json(std::string_view text);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// {lower:[{name, dim}], upper:[...], entries:[[re, im], ...]}, entries in
/// the tensor's own row-major order.
Json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const Json& doc);

/// .graph document. Vertex ids are written "v<N>" and edge ids "e<N>";
/// other id strings are accepted and renumbered after the numeric ones.
Json graph_to_json(const StringGraph& g, const std::string& theory);
StringGraph graph_from_json(const Json& doc, const SignaturePtr& sig);
/// The theory name a graph or rules document refers to.
std::string theory_name_of(const Json& doc);

/// .rules document. Besides name, lhs, rhs and iface a rule may carry mode
/// ("homeomorphic" or "literal"), kept, scalar ([re, im]) and tag.
Json rules_to_json(const RewriteSystem& rs, const std::string& theory);
RewriteSystem rules_from_json(const Json& doc, const SignaturePtr& sig);
Json rule_to_json(const RewriteRule& r, const std::string& theory);
RewriteRule rule_from_json(const Json& doc, const SignaturePtr& sig);

/// .theory document. A data-carrying morphism has `phase_basis` (angle data)
/// or `table` (opaque data, name to tensor) in place of `tensor`. `rules` is
/// a path relative to the theory file.
Json theory_to_json(const Theory& t, const std::optional<std::string>& rules_path);
/// Signature and valuation only; the rules member is left empty.
Theory theory_from_json(const Json& doc);
/// Reads the theory and its rules file, then certifies every rule.
Theory load_theory(const std::filesystem::path& path);
/// Writes <dir>/<name>.theory and <dir>/<name>.rules. Returns the theory path.
std::filesystem::path export_theory(const Theory& t, const std::filesystem::path& dir);

/// "zx" and "gw".
std::vector<std::string> bundled_theory_names();
std::optional<Theory> bundled_theory(const std::string& name);
/// A path to a .theory file, a bundled name, or <name>.theory found in one of
/// the directories of STRIGRAPH_THEORY_PATH (colon separated). Throws
/// kParseError when nothing matches.
Theory resolve_theory(const std::string& name_or_path);

/// {graph:<.graph doc>, dom:[{type, sign}], cod:[...], d:[ids], c:[ids]}.
Json cospan_to_json(const FramedCospan& f, const std::string& theory);
FramedCospan cospan_from_json(const Json& doc, const SignaturePtr& sig);

/// {params, counts, rules:<.rules doc>, congruences:[{a, b}]}.
Json synth_report_to_json(const SynthReport& r, const std::string& theory);
SynthReport synth_report_from_json(const Json& doc, const SignaturePtr& sig);

/// {theory, graph, steps:[{rule, match_index}]}: a start graph and the rule
/// applications that lead away from it.
struct Derivation {
  std::string theory;
  StringGraph start;
  std::vector<TraceEntry> steps;
};
Json derivation_to_json(const Derivation& d);
Derivation derivation_from_json(const Json& doc, const SignaturePtr& sig);

Json violations_to_json(const std::vector<Violation>& vs);

/// {rule, index, boxes:[ids], anchors:{vertices, edges}}. Ids refer to the
/// graph the match was found on (its minimal form for homeomorphic rules).
Json match_to_json(const Match& m, std::size_t index);

}  // namespace strigraph
