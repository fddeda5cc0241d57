// Copyright 2026 The ancm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Incremental analogical generalization. Each concept owns a context of
// probabilistic generalizations and lone examples; a new example is absorbed
// by the first generalization (then the first lone example) it matches at or
// above the assimilation threshold, and kept as a lone example otherwise.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ancm/fact.hpp"
#include "ancm/mapping.hpp"

namespace ancm {

struct Thresholds {
  double assimilation = 0.01;
  double probability = 0.6;
  double match = 0.75;
};

/// One example absorbed into a generalization, with the alignment from
/// generalization terms to the example's own terms.
struct Member {
  Case example;
  std::map<Term, Term> alignment;
};

struct Generalization {
  int id = 0;
  /// Number of absorbed examples in which each fact appeared aligned.
  std::map<Fact, int> aligned_count;
  int example_count = 0;
  int next_entity_index = 0;
  std::vector<Member> members;

  double probability(const Fact& f) const {
    auto it = aligned_count.find(f);
    if (it == aligned_count.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(example_count);
  }

  /// All facts in canonical order.
  Case facts() const {
    std::vector<Fact> fs;
    fs.reserve(aligned_count.size());
    for (const auto& [f, n] : aligned_count) fs.push_back(f);
    return Case(std::move(fs));
  }

  /// Probabilities parallel to facts().
  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(aligned_count.size());
    for (const auto& [f, n] : aligned_count) w.push_back(probability(f));
    return w;
  }
};

/// The probability-filtered view of a generalization used as a match base.
struct ConceptFacts {
  Case facts;
  std::vector<double> weights;
};

inline ConceptFacts concept_facts(const Generalization& g, double probability_threshold) {
  if (!(probability_threshold > 0.0 && probability_threshold <= 1.0))
    throw std::invalid_argument("probability threshold must lie in (0,1]");
  ConceptFacts out;
  std::vector<Fact> fs;
  for (const auto& [f, n] : g.aligned_count) {
    if (g.probability(f) >= probability_threshold) fs.push_back(f);
  }
  out.facts = Case(std::move(fs));
  for (const Fact& f : out.facts) out.weights.push_back(g.probability(f));
  return out;
}

enum class StorageKind { assimilated, merged, stored };

inline std::string_view to_string(StorageKind k) {
  switch (k) {
    case StorageKind::assimilated: return "assimilated-into-generalization";
    case StorageKind::merged: return "merged-two-examples";
    case StorageKind::stored: return "stored-as-example";
  }
  return "stored-as-example";
}

struct StorageOutcome {
  StorageKind kind = StorageKind::stored;
  int generalization_id = -1;
  double score = 0;
};

/// The fact naming concept `c` in a case: `(C a b)` or `(isa o C)`.
inline const Fact* find_concept_tag(const Case& facts, const Symbol& c) {
  for (const Fact& f : facts) {
    if (f.predicate.name == c.name) return &f;
    if (f.predicate.name == names::isa && f.args.size() == 2 && f.args[1].is_symbol() &&
        f.args[1].head() == c)
      return &f;
  }
  return nullptr;
}

/// Bindings that keep the roles of the concept tag aligned: the i-th tagged
/// term of `base` maps to the i-th tagged term of `target`.
inline std::vector<std::pair<Term, Term>> tag_bindings(const Case& base, const Case& target,
                                                       const Symbol& c) {
  std::vector<std::pair<Term, Term>> out;
  const Fact* b = find_concept_tag(base, c);
  const Fact* t = find_concept_tag(target, c);
  if (!b || !t || b->predicate.name != t->predicate.name || b->arity() != t->arity()) return out;
  for (std::size_t i = 0; i < b->arity(); ++i) {
    if (b->args[i].is_bindable() && t->args[i].is_bindable()) out.emplace_back(b->args[i], t->args[i]);
  }
  return out;
}

class GeneralizationContext {
 public:
  explicit GeneralizationContext(Symbol c, Thresholds th = {})
      : concept_(std::move(c)),
        context_id_(Kind::concept_, concept_.name + "Mt"),
        thresholds_(th) {}

  const Symbol& concept_id() const { return concept_; }
  const Symbol& context_id() const { return context_id_; }
  const Thresholds& thresholds() const { return thresholds_; }
  const std::vector<Generalization>& generalizations() const { return generalizations_; }
  const std::vector<Case>& examples() const { return examples_; }
  int next_generalization_id() const { return next_id_; }

  bool empty() const { return generalizations_.empty() && examples_.empty(); }

  /// Examples seen so far: absorbed ones plus lone ones.
  int examples_seen() const {
    int n = static_cast<int>(examples_.size());
    for (const Generalization& g : generalizations_) n += g.example_count;
    return n;
  }

  StorageOutcome add_example(const Case& example) {
    if (example.empty()) throw std::invalid_argument("example must be nonempty");
    for (Generalization& g : generalizations_) {
      const Case base = g.facts();
      const std::vector<double> w = g.weights();
      MatchOptions opt;
      opt.weights = w;
      opt.prebound = tag_bindings(base, example, concept_);
      Mapping m = match(base, example, opt);
      if (m.score >= thresholds_.assimilation) {
        absorb(g, m, example);
        return {StorageKind::assimilated, g.id, m.score};
      }
    }
    for (std::size_t i = 0; i < examples_.size(); ++i) {
      MatchOptions opt;
      opt.prebound = tag_bindings(examples_[i], example, concept_);
      Mapping m = match(examples_[i], example, opt);
      if (m.score >= thresholds_.assimilation) {
        Generalization g = merge(examples_[i], example, m);
        examples_.erase(examples_.begin() + static_cast<std::ptrdiff_t>(i));
        generalizations_.push_back(std::move(g));
        return {StorageKind::merged, generalizations_.back().id, m.score};
      }
    }
    examples_.push_back(example);
    return {StorageKind::stored, -1, 0.0};
  }

  /// Restores state from a snapshot.
  void restore(std::vector<Generalization> gens, std::vector<Case> examples, int next_id) {
    generalizations_ = std::move(gens);
    examples_ = std::move(examples);
    next_id_ = next_id;
  }

 private:
  Term fresh(Generalization& g) { return gen_entity(g.next_entity_index++, context_id_); }

  /// Maps an example's facts into generalization terms. `to_gen` is extended
  /// with fresh generalized entities for example terms not yet mapped.
  std::vector<Fact> translate(Generalization& g, const std::vector<Fact>& facts,
                              std::map<Term, Term>& to_gen) {
    std::vector<Fact> out;
    for (const Fact& f : facts) {
      visit_terms(f, [&](const Term& t) {
        if (t.is_bindable() && !to_gen.contains(t)) to_gen.emplace(t, fresh(g));
      });
      out.push_back(rewrite(f, [&](const Term& t) -> std::optional<Term> {
        return to_gen.at(t);
      }));
    }
    return out;
  }

  static std::map<Term, Term> invert(const std::map<Term, Term>& m) {
    std::map<Term, Term> out;
    for (const auto& [a, b] : m) out.emplace(b, a);
    return out;
  }

  void absorb(Generalization& g, const Mapping& m, const Case& example) {
    g.example_count += 1;
    Case corresponded_targets;
    for (const Correspondence& c : m.correspondences) {
      g.aligned_count[c.base_fact] += 1;
      corresponded_targets.insert(c.target_fact);
    }
    std::map<Term, Term> to_gen = invert(m.bindings);
    std::vector<Fact> rest;
    for (const Fact& f : example)
      if (!corresponded_targets.contains(f)) rest.push_back(f);
    for (Fact& f : translate(g, rest, to_gen)) g.aligned_count[f] += 1;
    g.members.push_back({example, invert(to_gen)});
  }

  Generalization merge(const Case& a, const Case& b, const Mapping& m) {
    Generalization g;
    g.id = next_id_++;
    g.example_count = 2;
    std::map<Term, Term> a_to_gen;
    // Aligned entity pairs get indices in order of first appearance.
    for (const Correspondence& c : m.correspondences) {
      visit_terms(c.base_fact, [&](const Term& t) {
        if (t.is_bindable() && !a_to_gen.contains(t)) a_to_gen.emplace(t, fresh(g));
      });
    }
    Case corresponded_a, corresponded_b;
    for (const Correspondence& c : m.correspondences) {
      corresponded_a.insert(c.base_fact);
      corresponded_b.insert(c.target_fact);
    }
    const std::vector<Fact> a_facts = translate(g, a.facts(), a_to_gen);
    for (std::size_t i = 0; i < a.size(); ++i) {
      g.aligned_count[a_facts[i]] = corresponded_a.contains(a[i]) ? 2 : 1;
    }
    std::map<Term, Term> b_to_gen;
    for (const auto& [at, bt] : m.bindings) b_to_gen.emplace(bt, a_to_gen.at(at));
    std::vector<Fact> b_rest;
    for (const Fact& f : b)
      if (!corresponded_b.contains(f)) b_rest.push_back(f);
    for (Fact& f : translate(g, b_rest, b_to_gen)) g.aligned_count[f] += 1;
    g.members.push_back({a, invert(a_to_gen)});
    g.members.push_back({b, invert(b_to_gen)});
    return g;
  }

  Symbol concept_;
  Symbol context_id_;
  Thresholds thresholds_;
  std::vector<Generalization> generalizations_;
  std::vector<Case> examples_;
  int next_id_ = 0;
};

}  // namespace ancm
