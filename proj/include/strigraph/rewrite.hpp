// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "strigraph/string_graph.hpp"
#include "strigraph/tensor_eval.hpp"

namespace strigraph {

/// kHomeomorphic matches the lhs up to wire-homeomorphism against the minimal
/// form of the host and normalizes the result. kLiteral matches the lhs as an
/// exact subgraph of the host as given and leaves wire lengths alone; the
/// homeomorphism contractions themselves are literal rules.
enum class MatchMode : std::uint8_t { kHomeomorphic, kLiteral };

std::string_view to_string(MatchMode mode);

struct RewriteRule {
  std::string name;
  StringGraph lhs;
  StringGraph rhs;
  /// Pairs (lhs boundary vertex, rhs boundary vertex).
  std::vector<std::pair<VertexId, VertexId>> iface;
  MatchMode mode = MatchMode::kHomeomorphic;
  /// Literal rules only: pairs (lhs box, rhs box) that survive the rewrite.
  /// A kept box is an anchor: it may list only some of its ports, matches
  /// host boxes of its type regardless of data, and the host box (with its
  /// data and remaining ports) is reused for the rhs. Rules with kept boxes
  /// have no tensor value of their own.
  std::vector<std::pair<VertexId, VertexId>> kept;
  /// eval(lhs) = scalar * eval(rhs), when known.
  std::optional<Complex> scalar;
  /// Free-form law label for bundled rules.
  std::string tag;
};

std::vector<Violation> validate_rule(const RewriteRule& r);
void require_valid_rule(const RewriteRule& r);

/// Builds a rule whose iface pairs the i-th input (output) of lhs with the
/// i-th input (output) of rhs.
RewriteRule make_rule(std::string name, StringGraph lhs, StringGraph rhs, MatchMode mode = MatchMode::kHomeomorphic);

/// The rule with lhs and rhs exchanged.
RewriteRule reversed(const RewriteRule& r, std::string name);

/// Evaluates both sides with rhs boundary arranged through the iface.
std::pair<Tensor, Tensor> rule_tensors(const RewriteRule& r, const Valuation& v);
/// Some(lambda) with eval(lhs) = lambda * eval(rhs) within tol.
std::optional<Complex> check_rule_sound(const RewriteRule& r, const Valuation& v, double tol = 1e-9);

class RewriteSystem {
 public:
  RewriteSystem() = default;
  explicit RewriteSystem(std::string name, std::vector<RewriteRule> rules = {});

  const std::string& name() const { return name_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  /// Throws kInvalidRule on duplicate names or invalid rules.
  void add(RewriteRule r);
  const RewriteRule* find(std::string_view name) const;
  /// Throws kUnknownRule.
  const RewriteRule& require(std::string_view name) const;

 private:
  std::string name_;
  std::vector<RewriteRule> rules_;
};

/// Hash of the id-level content of a graph.
std::uint64_t fingerprint(const StringGraph& g);

struct Match {
  std::shared_ptr<const RewriteRule> rule;
  /// Host the match was computed on (the minimal form for homeomorphic rules).
  StringGraph host;
  /// Fingerprint of the graph passed to find_matches.
  std::uint64_t source_fingerprint = 0;
  /// Host after the wire expansions this match needs.
  StringGraph expanded;
  /// Pattern actually embedded (normalized lhs for homeomorphic rules).
  StringGraph pattern;
  GraphMap embedding;
  /// Edges of `host` that were expanded, with the number of inserted vertices.
  std::vector<std::pair<EdgeId, int>> expansions;
  /// Host vertices of the pattern boxes, in pattern box-id order.
  std::vector<VertexId> box_images;
  /// Vertices and edges of `host` touched by the match (for display).
  std::vector<VertexId> anchor_vertices;
  std::vector<EdgeId> anchor_edges;
  /// Sort key of the deterministic match order.
  std::vector<std::uint64_t> key;
};

/// Calls `visit` for each match until it returns false. The visiting order is
/// search order; find_matches sorts.
void for_each_match(const RewriteRule& r, const StringGraph& host, const std::function<bool(Match&&)>& visit);
/// All matches in deterministic order.
std::vector<Match> find_matches(const RewriteRule& r, const StringGraph& host);
bool has_match(const RewriteRule& r, const StringGraph& host);

/// Double-pushout rewrite at `m`: deletes the matched interior, glues the rhs
/// along the iface, and (for homeomorphic rules) normalizes wires.
StringGraph apply(const Match& m);
/// As apply(m), throwing kStaleMatch unless `host` is the graph m was found on.
StringGraph apply(const Match& m, const StringGraph& host);

enum class Strategy { kFirstMatch, kRandom };

struct NormalizeOptions {
  Strategy strategy = Strategy::kFirstMatch;
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
};

struct TraceEntry {
  std::string rule;
  /// Index into find_matches(rule, graph before the step).
  std::size_t match_index = 0;
  std::vector<VertexId> box_images;
};

enum class NormalizeStatus { kNormalForm, kStepLimit };

std::string_view to_string(NormalizeStatus status);

struct NormalizeResult {
  StringGraph graph;
  std::vector<TraceEntry> trace;
  NormalizeStatus status = NormalizeStatus::kNormalForm;
};

NormalizeResult normalize(const StringGraph& g, const RewriteSystem& rs, const NormalizeOptions& opts = {});

/// Replays a trace; throws kUnknownRule or kStaleMatch when it does not fit.
StringGraph replay(const StringGraph& g, const RewriteSystem& rs, const std::vector<TraceEntry>& trace);

/// Scripted strategy: applies the named rules in order, backtracking over
/// the match chosen at each step, until `goal` accepts the final graph.
/// Gives up after `max_visits` applications.
std::optional<NormalizeResult> derive(const StringGraph& g, const RewriteSystem& rs,
                                      const std::vector<std::string>& script,
                                      const std::function<bool(const StringGraph&)>& goal,
                                      std::size_t max_visits = 200000);

struct JoinLimits {
  std::size_t max_depth = 6;
  std::size_t max_states = 4000;
};

/// Bounded breadth-first search for a common reduct up to isomorphism.
bool joinable(const StringGraph& g, const StringGraph& h, const RewriteSystem& rs, const JoinLimits& limits = {});

/// Literal contraction rules for every object and port: hL_X (two-vertex
/// loop to one), hW_X (drop the middle of three chained wire-vertices),
/// hI_f_i and hO_f_j (drop a wire-vertex next to port i / j of a box f).
RewriteSystem homeomorphism_rules(const SignaturePtr& sig);

}  // namespace strigraph
