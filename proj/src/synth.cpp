// SPDX-License-Identifier: Apache-2.0
#include "strigraph/synth.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "strigraph/builder.hpp"
#include "strigraph/graph_ops.hpp"
#include "strigraph/iso.hpp"

namespace strigraph {

namespace {

std::string shape_key(const StringGraph& g) { return canonical_key(g, BoundaryMode::kUnordered); }

std::vector<std::uint32_t> generator_indices(const Signature& sig, const std::vector<std::string>& names) {
  std::vector<std::uint32_t> out;
  if (names.empty()) {
    out.resize(sig.morphisms().size());
    std::iota(out.begin(), out.end(), 0u);
    return out;
  }
  for (const auto& n : names) out.push_back(sig.require_morphism(n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Calls f on every multiset of size k over [0, n) as a sorted vector.
void multisets(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> pick(k, 0);
  if (k == 0) {
    f(pick);
    return;
  }
  if (n == 0) return;
  while (true) {
    f(pick);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - 1) --i;
    if (i == 0) return;
    const std::size_t v = pick[i - 1] + 1;
    for (std::size_t j = i - 1; j < k; ++j) pick[j] = v;
  }
}

/// Disconnected seeds with exactly `boxes` boxes.
std::vector<StringGraph> seeds_with(const SignaturePtr& sig, int inputs, int outputs, int boxes,
                                    const std::vector<std::uint32_t>& gens) {
  std::vector<StringGraph> out;
  const std::size_t objects = sig->objects().size();
  multisets(gens.size(), static_cast<std::size_t>(boxes), [&](const std::vector<std::size_t>& pick) {
    int in = 0, outc = 0;
    for (std::size_t k : pick) {
      in += static_cast<int>(sig->arity_in(gens[k]));
      outc += static_cast<int>(sig->arity_out(gens[k]));
    }
    const int strands = inputs - in;
    if (strands < 0 || outputs - outc != strands) return;
    if (strands > 0 && objects == 0) return;
    multisets(objects, static_cast<std::size_t>(strands), [&](const std::vector<std::size_t>& types) {
      StringGraph g(sig);
      std::vector<VertexId> ins, outs;
      for (std::size_t k : pick) {
        const std::uint32_t m = gens[k];
        const VertexId b = g.add_box(m);
        for (std::uint32_t i = 0; i < sig->arity_in(m); ++i) {
          const VertexId w = g.add_wire(sig->dom_type(m, i));
          g.connect(w, b, i);
          ins.push_back(w);
        }
        for (std::uint32_t j = 0; j < sig->arity_out(m); ++j) {
          const VertexId w = g.add_wire(sig->cod_type(m, j));
          g.connect(b, w, j);
          outs.push_back(w);
        }
      }
      for (std::size_t t : types) {
        const VertexId a = g.add_wire(static_cast<std::uint32_t>(t));
        const VertexId z = g.add_wire(static_cast<std::uint32_t>(t));
        g.connect(a, z);
        ins.push_back(a);
        outs.push_back(z);
      }
      g.set_input_order(std::move(ins));
      g.set_output_order(std::move(outs));
      out.push_back(std::move(g));
    });
  });
  return out;
}

/// Rules with a per-generator box count for a cheap pre-filter.
class RedexIndex {
 public:
  RedexIndex() = default;
  explicit RedexIndex(const RewriteSystem& rs) {
    for (const auto& r : rs.rules()) add(r);
  }

  void add(const RewriteRule& r) {
    std::vector<std::uint32_t> need;
    for (const auto& [id, rec] : r.lhs.vertices()) {
      if (!rec.vertex.is_box()) continue;
      if (need.size() <= rec.vertex.type) need.resize(rec.vertex.type + 1, 0);
      ++need[rec.vertex.type];
    }
    const bool shrinks = r.lhs.num_boxes() > r.rhs.num_boxes();
    entries_.push_back({std::make_shared<const RewriteRule>(r), std::move(need), shrinks});
  }

  bool empty() const { return entries_.empty(); }

  bool contains_redex(const StringGraph& g) const {
    std::vector<std::uint32_t> have;
    for (const auto& [id, rec] : g.vertices()) {
      if (!rec.vertex.is_box()) continue;
      if (have.size() <= rec.vertex.type) have.resize(rec.vertex.type + 1, 0);
      ++have[rec.vertex.type];
    }
    std::optional<OmegaKey> here;
    for (const auto& e : entries_) {
      bool possible = true;
      for (std::size_t k = 0; k < e.need.size() && possible; ++k) {
        possible = e.need[k] == 0 || (k < have.size() && have[k] >= e.need[k]);
      }
      if (!possible) continue;
      if (e.shrinks) {
        if (has_match(*e.rule, g)) return true;
        continue;
      }
      if (!here) here = omega(g);
      bool reduces = false;
      for_each_match(*e.rule, g, [&](Match&& m) {
        reduces = omega(apply(m, g)) < *here;
        return !reduces;
      });
      if (reduces) return true;
    }
    return false;
  }

 private:
  struct Entry {
    std::shared_ptr<const RewriteRule> rule;
    std::vector<std::uint32_t> need;
    bool shrinks = false;
  };
  std::vector<Entry> entries_;
};

struct Keyed {
  StringGraph graph;
  std::string key;
};

/// Level-by-level plugging with per-level dedup. `pruned_keys` collects the
/// keys of discarded graphs.
std::vector<Keyed> plug_levels(const StringGraph& seed, int p, const RedexIndex& redexes,
                               std::unordered_set<std::string>& pruned_keys) {
  std::vector<Keyed> level;
  {
    StringGraph s = normalize_wires(seed);
    std::string k = shape_key(s);
    if (!redexes.empty() && redexes.contains_redex(s)) {
      pruned_keys.insert(std::move(k));
      return {};
    }
    level.push_back({std::move(s), std::move(k)});
  }
  for (int step = 0; step < p; ++step) {
    std::vector<Keyed> next;
    std::unordered_set<std::string> seen;
    for (const auto& [g, key] : level) {
      for (VertexId o : g.output_order()) {
        for (VertexId i : g.input_order()) {
          if (o == i || g.vertex(o).type != g.vertex(i).type) continue;
          StringGraph h = normalize_wires(self_plug(g, o, i));
          std::string k = shape_key(h);
          if (!seen.insert(k).second) continue;
          if (!redexes.empty() && redexes.contains_redex(h)) {
            pruned_keys.insert(std::move(k));
            continue;
          }
          next.push_back({std::move(h), std::move(k)});
        }
      }
    }
    level = std::move(next);
  }
  return level;
}

/// Smallest (by omega) members of a class.
std::vector<std::size_t> minimal_members(const std::vector<OmegaKey>& keys, bool size_only) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < keys.size() && !dominated; ++j) dominated = omega_less(keys[j], keys[i], size_only);
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::string numbered(const std::string& prefix, std::size_t n) {
  std::string digits = std::to_string(n);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return prefix + "_" + digits;
}

}  // namespace

OmegaKey omega(const StringGraph& g) {
  const StringGraph m = normalize_wires(g);
  return {m.num_boxes(), m.num_edges(), canonical_form(m, BoundaryMode::kUnordered).bytes};
}

bool omega_less(const OmegaKey& a, const OmegaKey& b, bool size_only) {
  if (size_only) return std::tie(a.boxes, a.edges) < std::tie(b.boxes, b.edges);
  return a < b;
}

std::vector<StringGraph> enumerate_disconnected(const SignaturePtr& sig, int inputs, int outputs, int max_boxes,
                                                const std::vector<std::string>& generators) {
  const auto gens = generator_indices(*sig, generators);
  std::vector<StringGraph> out;
  for (int b = 0; b <= max_boxes; ++b) {
    auto part = seeds_with(sig, inputs, outputs, b, gens);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<StringGraph> enumerate_pluggings(const StringGraph& seed, int p, const RewriteSystem& redexes,
                                             std::size_t* pruned) {
  std::unordered_set<std::string> pruned_keys;
  auto level = plug_levels(seed, p, RedexIndex(redexes), pruned_keys);
  if (pruned) *pruned += pruned_keys.size();
  std::vector<StringGraph> out;
  for (auto& k : level) out.push_back(std::move(k.graph));
  return out;
}

std::vector<SynthClass> classify(const std::vector<StringGraph>& graphs, const Valuation& v) {
  std::vector<SynthClass> out;
  std::map<std::string, std::size_t> index;
  std::set<std::string> shapes;
  for (const auto& g : graphs) {
    StringGraph m = normalize_wires(g);
    if (!shapes.insert(shape_key(m)).second) continue;
    std::string key = boundary_permutation_class(evaluate(m, v));
    auto [it, fresh] = index.emplace(key, out.size());
    if (fresh) out.push_back({std::move(key), {}});
    out[it->second].members.push_back(std::move(m));
  }
  return out;
}

RewriteRule oriented_rule(std::string name, const StringGraph& lhs, const StringGraph& target, const Valuation& v,
                          double tol) {
  const Tensor tl = evaluate(lhs, v);
  const Tensor tr = evaluate(target, v);
  const auto& ins = target.input_order();
  const auto& outs = target.output_order();
  std::vector<std::size_t> up(outs.size()), lo(ins.size());
  std::iota(up.begin(), up.end(), 0);
  do {
    std::iota(lo.begin(), lo.end(), 0);
    do {
      const Tensor tp = permute(tr, up, lo);
      if (tp.upper() != tl.upper() || tp.lower() != tl.lower()) continue;
      auto s = equal_up_to_scalar(tl, tp, tol);
      if (!s) continue;
      StringGraph rhs = target;
      std::vector<VertexId> ni, no;
      for (std::size_t k : lo) ni.push_back(ins[k]);
      for (std::size_t k : up) no.push_back(outs[k]);
      rhs.set_input_order(std::move(ni));
      rhs.set_output_order(std::move(no));
      RewriteRule r = make_rule(std::move(name), lhs, std::move(rhs));
      r.scalar = *s;
      return r;
    } while (std::next_permutation(lo.begin(), lo.end()));
  } while (std::next_permutation(up.begin(), up.end()));
  throw Error(ErrorCode::kInvalidRule, name + ": sides differ for every boundary order");
}

RuleBatch generate_rules(const std::vector<SynthClass>& classes, const Valuation& v, bool size_only, std::uint64_t seed,
                         const std::string& name_prefix) {
  RuleBatch out;
  std::mt19937_64 rng(seed);
  std::size_t n = 0;
  for (const auto& c : classes) {
    std::vector<OmegaKey> keys;
    for (const auto& g : c.members) keys.push_back(omega(g));
    const auto mins = minimal_members(keys, size_only);
    const std::size_t s = mins[std::uniform_int_distribution<std::size_t>(0, mins.size() - 1)(rng)];
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (std::find(mins.begin(), mins.end(), i) != mins.end()) {
        if (i != s) out.congruences.push_back({c.members[s], c.members[i]});
        continue;
      }
      out.rules.push_back(oriented_rule(numbered(name_prefix, ++n), c.members[i], c.members[s], v));
    }
  }
  return out;
}

RewriteSystem spider_merge_rules(const Valuation& v, const std::vector<std::string>& generators) {
  const SignaturePtr& sig = v.signature();
  const auto gens = generator_indices(*sig, generators);
  auto allowed = [&](const std::string& name) {
    auto idx = sig->morphism_index(name);
    return idx && std::binary_search(gens.begin(), gens.end(), *idx);
  };
  std::vector<std::string> prefixes;
  for (const auto& m : sig->morphisms()) {
    const auto cut = m.name.rfind("_mul");
    if (cut == std::string::npos || cut + 4 != m.name.size()) continue;
    const std::string p = m.name.substr(0, cut);
    if (allowed(p + "_mul") && allowed(p + "_unit") && allowed(p + "_comul") && allowed(p + "_counit")) prefixes.push_back(p);
  }
  std::vector<RewriteRule> rules;
  std::size_t n = 0;
  for (const auto& p : prefixes) {
    const std::vector<std::string> family{p + "_mul", p + "_unit", p + "_comul", p + "_counit"};
    std::map<std::pair<int, int>, std::vector<StringGraph>> shapes;
    for (const auto& f : family) {
      for (const auto& g : family) {
        const std::uint32_t fi = sig->require_morphism(f), gi = sig->require_morphism(g);
        for (std::uint32_t j = 0; j < sig->arity_out(fi); ++j) {
          for (std::uint32_t k = 0; k < sig->arity_in(gi); ++k) {
            const int ins = static_cast<int>(sig->arity_in(fi) + sig->arity_in(gi)) - 1;
            const int outs = static_cast<int>(sig->arity_out(fi) + sig->arity_out(gi)) - 1;
            if (ins + outs == 0 || (ins + outs == 2 && ins != 1)) continue;
            GraphBuilder b(sig);
            std::vector<VertexId> fin;
            for (std::uint32_t i = 0; i < sig->arity_in(fi); ++i) fin.push_back(b.input(sig->object(sig->dom_type(fi, i)).name));
            auto fout = b.box(f, fin);
            std::vector<VertexId> gin;
            for (std::uint32_t i = 0; i < sig->arity_in(gi); ++i) {
              gin.push_back(i == k ? fout[j] : b.input(sig->object(sig->dom_type(gi, i)).name));
            }
            auto gout = b.box(g, gin);
            std::vector<VertexId> outputs;
            for (std::uint32_t i = 0; i < fout.size(); ++i) {
              if (i != j) outputs.push_back(fout[i]);
            }
            outputs.insert(outputs.end(), gout.begin(), gout.end());
            StringGraph shape = normalize_wires(b.finish(outputs));
            if (ins + outs == 2) {
              GraphBuilder id(sig);
              const VertexId x = id.input(sig->object(sig->cod_type(fi, j)).name);
              const StringGraph strand = id.finish({id.extend(x)});
              rules.push_back(oriented_rule(numbered("merge_" + p, ++n), shape, strand, v));
            } else {
              shapes[{ins, outs}].push_back(std::move(shape));
            }
          }
        }
      }
    }
    for (auto& [arity, list] : shapes) {
      std::vector<StringGraph> distinct;
      std::set<std::string> seen;
      for (auto& g : list) {
        if (seen.insert(shape_key(g)).second) distinct.push_back(std::move(g));
      }
      std::size_t best = 0;
      std::vector<OmegaKey> keys;
      for (const auto& g : distinct) keys.push_back(omega(g));
      for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] < keys[best]) best = i;
      }
      for (std::size_t i = 0; i < distinct.size(); ++i) {
        if (i != best) rules.push_back(oriented_rule(numbered("merge_" + p, ++n), distinct[i], distinct[best], v));
      }
    }
  }
  return RewriteSystem("spider", std::move(rules));
}

SynthReport run_synthesis(const Valuation& v, const SynthParams& params, const RewriteSystem& seed_rules,
                          std::uint64_t seed) {
  if (params.M < 0 || params.N < 0 || params.B < 0 || params.P < 0 || (params.max_boundary && *params.max_boundary < 0)) {
    throw Error(ErrorCode::kInvalidArgument, "synthesis parameters must be non-negative");
  }
  const SignaturePtr& sig = v.signature();
  const auto gens = generator_indices(*sig, params.generators);
  for (std::uint32_t m : gens) {
    if (!v.has(m)) throw Error(ErrorCode::kMissingValuation, sig->morphism(m).name);
  }

  SynthReport report;
  report.params = params;
  report.seed = seed;
  report.rules = RewriteSystem("synth");
  std::mt19937_64 rng(seed);

  RedexIndex redexes;
  if (!params.naive) redexes = RedexIndex(seed_rules);

  struct Member {
    StringGraph graph;
    OmegaKey key;
    bool reduced = false;
  };
  struct ClassState {
    std::vector<Member> members;
    std::optional<std::size_t> rep;
    std::set<std::size_t> paired;
  };
  std::map<std::string, ClassState> classes;
  std::unordered_set<std::string> classified;
  std::unordered_set<std::string> pruned_keys;
  std::size_t rule_no = 0;

  const int max_sum = params.M + params.N;
  for (int b = 0; b <= params.B; ++b) {
    for (int p = 0; p <= params.P; ++p) {
      for (int s = 0; s <= max_sum; ++s) {
        if (params.max_boundary && s > *params.max_boundary) continue;
        for (int m = 0; m <= std::min(params.M, s); ++m) {
          const int n = s - m;
          if (n > params.N) continue;
          // Steps 1 and 2: seeds and pluggings.
          std::vector<Keyed> finals;
          for (const auto& seed_graph : seeds_with(sig, m + p, n + p, b, gens)) {
            for (auto& k : plug_levels(seed_graph, p, redexes, pruned_keys)) {
              if (classified.insert(k.key).second) finals.push_back(std::move(k));
            }
          }
          // Step 3: classes by value.
          std::set<std::string> touched;
          for (auto& k : finals) {
            std::string key = boundary_permutation_class(evaluate(k.graph, v));
            OmegaKey w = omega(k.graph);
            classes[key].members.push_back({std::move(k.graph), std::move(w), false});
            touched.insert(std::move(key));
          }
          report.counts.enumerated += finals.size();
          // Step 4: orient towards the omega-least members.
          for (const auto& key : touched) {
            ClassState& c = classes[key];
            std::vector<OmegaKey> keys;
            for (const auto& mem : c.members) keys.push_back(mem.key);
            const auto mins = minimal_members(keys, params.size_only_omega);
            if (!c.rep || std::find(mins.begin(), mins.end(), *c.rep) == mins.end()) {
              c.rep = mins[std::uniform_int_distribution<std::size_t>(0, mins.size() - 1)(rng)];
              c.paired.clear();
            }
            const std::size_t r = *c.rep;
            for (std::size_t i = 0; i < c.members.size(); ++i) {
              if (i == r || c.members[i].reduced) continue;
              if (std::find(mins.begin(), mins.end(), i) != mins.end()) {
                if (c.paired.insert(i).second) report.congruences.push_back({c.members[r].graph, c.members[i].graph});
                continue;
              }
              RewriteRule rule = oriented_rule(numbered("syn", ++rule_no), c.members[i].graph, c.members[r].graph, v);
              rule.tag = "synth";
              c.members[i].reduced = true;
              if (!params.naive) redexes.add(rule);
              report.rules.add(std::move(rule));
            }
          }
        }
      }
    }
  }
  report.counts.classes = classes.size();
  for (const auto& [key, c] : classes) report.representatives.push_back(c.members[*c.rep].graph);
  report.counts.filtered_by_redex = pruned_keys.size();
  report.counts.rules = report.rules.size() + 2 * report.congruences.size();
  return report;
}

}  // namespace strigraph
