// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strigraph/rewrite.hpp"
#include "strigraph/tensor_eval.hpp"

namespace strigraph {

struct SynthParams {
  /// Runs cover every boundary (m, n) with m <= M, n <= N and, when set,
  /// m + n <= max_boundary.
  int M = 0;
  int N = 0;
  int B = 0;
  int P = 0;
  std::optional<int> max_boundary;
  /// Disables redex filtering.
  bool naive = false;
  /// Compares only (boxes, edges), so equal-size minimal members become
  /// congruences instead of being ordered by canonical bytes.
  bool size_only_omega = false;
  /// Generators used for enumeration; empty means all of the signature.
  std::vector<std::string> generators;
};

/// (box count, edge count, canonical bytes) of the minimal wire form, with
/// the boundary treated as unordered.
struct OmegaKey {
  std::size_t boxes = 0;
  std::size_t edges = 0;
  std::string bytes;

  friend auto operator<=>(const OmegaKey&, const OmegaKey&) = default;
  friend bool operator==(const OmegaKey&, const OmegaKey&) = default;
};

OmegaKey omega(const StringGraph& g);
/// Strict ordering used by synthesis: the full key, or (boxes, edges) only.
bool omega_less(const OmegaKey& a, const OmegaKey& b, bool size_only);

struct SynthCounts {
  /// Distinct graphs that reached classification.
  std::size_t enumerated = 0;
  /// Distinct intermediate or final graphs discarded as containing a redex.
  std::size_t filtered_by_redex = 0;
  std::size_t classes = 0;
  /// Emitted rules plus both directions of every congruence.
  std::size_t rules = 0;
};

struct Congruence {
  StringGraph a;
  StringGraph b;
};

struct SynthReport {
  SynthParams params;
  std::uint64_t seed = 0;
  RewriteSystem rules;
  std::vector<Congruence> congruences;
  /// The representative (omega-least member) of every class.
  std::vector<StringGraph> representatives;
  SynthCounts counts;
};

/// Disjoint unions of bare strands and at most `max_boxes` single boxes with
/// their port wire-vertices, with exactly the given boundary arities, one
/// per isomorphism class.
std::vector<StringGraph> enumerate_disconnected(const SignaturePtr& sig, int inputs, int outputs, int max_boxes,
                                                const std::vector<std::string>& generators = {});

/// Every graph reached from `seed` by `p` output-to-input pluggings, one per
/// isomorphism class ignoring boundary order, in minimal wire form. A branch
/// stops as soon as its graph contains the lhs of a rule in `redexes`;
/// `pruned`, when given, is increased once per distinct discarded graph.
std::vector<StringGraph> enumerate_pluggings(const StringGraph& seed, int p, const RewriteSystem& redexes,
                                             std::size_t* pruned = nullptr);

/// Graphs sharing a tensor up to scalar and boundary permutations.
struct SynthClass {
  std::string key;
  std::vector<StringGraph> members;
};

/// Groups by boundary_permutation_class of the value, dropping graphs
/// isomorphic (ignoring boundary order) to an earlier member.
std::vector<SynthClass> classify(const std::vector<StringGraph>& graphs, const Valuation& v);

/// Rule lhs => rhs where rhs is `target` with its boundary reordered so that
/// eval(lhs) = scalar * eval(rhs). Throws kInvalidRule when no reordering
/// works.
RewriteRule oriented_rule(std::string name, const StringGraph& lhs, const StringGraph& target, const Valuation& v,
                          double tol = 1e-9);

/// Rules and congruences from one batch of classes: every non-minimal member
/// t gets t => s for an s chosen with `rng_state` among the minimal members;
/// the other minimal members are paired with s.
struct RuleBatch {
  std::vector<RewriteRule> rules;
  std::vector<Congruence> congruences;
};
RuleBatch generate_rules(const std::vector<SynthClass>& classes, const Valuation& v, bool size_only,
                         std::uint64_t seed, const std::string& name_prefix = "syn");

/// Spider laws for every prefix with _mul, _unit, _comul and _counit
/// generators: single-edge merges that collapse to an identity, and every
/// two-vertex four-leg shape rewritten to the omega-least shape of its arity.
RewriteSystem spider_merge_rules(const Valuation& v, const std::vector<std::string>& generators = {});

/// Full loop over runs (b, p, m + n, m) in increasing order. Classes are
/// shared across runs with the same (m, n). Deterministic in `seed`.
SynthReport run_synthesis(const Valuation& v, const SynthParams& params, const RewriteSystem& seed_rules,
                          std::uint64_t seed);

}  // namespace strigraph
