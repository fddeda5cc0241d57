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

// The concept memory: one generalization context per concept, addressed
// through four commands (create, store, query, project).

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ancm/errors.hpp"
#include "ancm/fact.hpp"
#include "ancm/generalize.hpp"
#include "ancm/mapping.hpp"

namespace ancm {

enum class ConceptKind { visual, spatial, action };

inline std::string_view to_string(ConceptKind k) {
  switch (k) {
    case ConceptKind::visual: return "visual";
    case ConceptKind::spatial: return "spatial";
    case ConceptKind::action: return "action";
  }
  return "visual";
}

inline std::optional<ConceptKind> concept_kind_from_string(std::string_view s) {
  for (ConceptKind k : {ConceptKind::visual, ConceptKind::spatial, ConceptKind::action})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternArg = std::variant<Term, Variable>;

/// A fact with variables in some argument positions, e.g. `(isa ?o RRed)`.
struct FactPattern {
  Symbol predicate;
  std::vector<PatternArg> args;

  void validate() const {
    std::set<std::string> seen;
    for (const PatternArg& a : args) {
      if (const auto* v = std::get_if<Variable>(&a)) {
        if (!seen.insert(v->name).second)
          throw std::invalid_argument("pattern variables must be distinct");
      }
    }
    if (seen.empty()) throw std::invalid_argument("pattern needs at least one variable");
  }

  /// Structural unification against a ground fact. Variables match any term.
  bool unifies(const Fact& f) const {
    if (f.predicate.name != predicate.name || f.args.size() != args.size()) return false;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (const auto* t = std::get_if<Term>(&args[i]); t && !(*t == f.args[i])) return false;
    }
    return true;
  }

  /// Unification against a base fact where variable positions must hold
  /// bindable terms (the ones an inference will substitute).
  bool unifies_base(const Fact& f) const {
    if (!unifies(f)) return false;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (std::holds_alternative<Variable>(args[i]) && !f.args[i].is_bindable()) return false;
    }
    return true;
  }
};

struct ScoredFact {
  Fact fact;
  double score = 0;
};

struct QueryResult {
  std::vector<ScoredFact> inferences;
  std::vector<ScoredFact> accepted;
};

struct NextState {
  std::vector<Fact> facts;
  bool terminal = false;
  double score = 0;
  Term timepoint;
};

/// "red" -> RRed, "left of" -> RLeftOf.
inline std::string concept_name_for(const std::string& word) {
  std::string out = "R";
  bool up = true;
  for (char c : word) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0) {
      up = true;
      continue;
    }
    out += up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    up = false;
  }
  return out;
}

namespace command {
struct Create {
  std::string word;
  ConceptKind kind = ConceptKind::visual;
};
struct Store {
  Case facts;
  Symbol concept_id;
};
struct Query {
  Case scene;
  FactPattern pattern;
};
struct Project {
  Case trace;
  Symbol concept_id;
};
}  // namespace command

using MemoryCommand =
    std::variant<command::Create, command::Store, command::Query, command::Project>;
using MemoryResponse = std::variant<Symbol, StorageOutcome, QueryResult, NextState>;

/// Comparison slack for scores computed from ratios of probabilities.
inline constexpr double kScoreSlack = 1e-9;

class ConceptMemory {
 public:
  explicit ConceptMemory(Thresholds th = {}) : thresholds_(th) {}

  const Thresholds& thresholds() const { return thresholds_; }

  Symbol create(const std::string& word, ConceptKind kind) {
    if (words_.contains(word)) throw DuplicateConcept("word '" + word + "' is already mapped");
    std::string name = concept_name_for(word);
    for (int k = 2; contexts_.contains(concept_symbol(name)); ++k) name = concept_name_for(word) + std::to_string(k);
    Symbol c = concept_symbol(name);
    contexts_.emplace(c, Entry{kind, word, GeneralizationContext(c, thresholds_)});
    words_.emplace(word, c);
    ++create_count_;
    return c;
  }

  StorageOutcome store(const Case& facts, const Symbol& c) {
    Entry& e = entry(c);
    if (!mentions(facts, c))
      throw std::invalid_argument("stored facts must mention concept " + c.name);
    ++store_count_;
    return e.context.add_example(facts);
  }

  QueryResult query(const Case& scene, const FactPattern& pattern) const {
    pattern.validate();
    const Entry& e = entry(pattern_concept(pattern));
    std::map<Fact, double> best;
    for_each_base(e, [&](const Case& base, const std::vector<double>& w) {
      query_base(base, w, scene, pattern, best);
    });
    QueryResult r;
    for (const auto& [f, s] : best) r.inferences.push_back({f, s});
    std::stable_sort(r.inferences.begin(), r.inferences.end(),
                     [](const ScoredFact& a, const ScoredFact& b) { return a.score > b.score; });
    for (const ScoredFact& sf : r.inferences)
      if (sf.score + kScoreSlack >= thresholds_.match) r.accepted.push_back(sf);
    return r;
  }

  NextState project(const Case& trace, const Symbol& c) const {
    const Entry& e = entry(c);
    if (e.kind != ConceptKind::action)
      throw std::invalid_argument("projection needs an action concept, got " + c.name);
    const Term current = current_timepoint(trace);
    std::optional<NextState> best;
    for_each_base(e, [&](const Case& base, const std::vector<double>& w) {
      MatchOptions opt;
      opt.weights = w;
      opt.prebound = tag_bindings(base, trace, c);
      bind_timeline(base, trace, opt.prebound);
      Mapping m = match(base, trace, opt);
      std::optional<NextState> ns = next_state(m, current);
      if (ns && (!best || ns->score > best->score)) best = std::move(ns);
    });
    if (!best) throw NoProjection("no candidate inference describes a state after " +
                                  to_string(current));
    return *best;
  }

  MemoryResponse execute(const MemoryCommand& cmd) {
    struct V {
      ConceptMemory& m;
      MemoryResponse operator()(const command::Create& c) { return m.create(c.word, c.kind); }
      MemoryResponse operator()(const command::Store& c) { return m.store(c.facts, c.concept_id); }
      MemoryResponse operator()(const command::Query& c) { return m.query(c.scene, c.pattern); }
      MemoryResponse operator()(const command::Project& c) {
        return m.project(c.trace, c.concept_id);
      }
    };
    return std::visit(V{*this}, cmd);
  }

  // Inspection -------------------------------------------------------------

  bool has_concept(const Symbol& c) const { return contexts_.contains(c); }

  std::optional<Symbol> concept_for(const std::string& word) const {
    auto it = words_.find(word);
    if (it == words_.end()) return std::nullopt;
    return it->second;
  }

  ConceptKind kind_of(const Symbol& c) const { return entry(c).kind; }
  const std::string& word_of(const Symbol& c) const { return entry(c).word; }
  const GeneralizationContext& context(const Symbol& c) const { return entry(c).context; }

  std::vector<Symbol> concepts() const {
    std::vector<Symbol> out;
    for (const auto& [c, e] : contexts_) out.push_back(c);
    return out;
  }

  int store_count() const { return store_count_; }
  int create_count() const { return create_count_; }

  /// Rebuilds a concept from a snapshot without counting it as a command.
  GeneralizationContext& restore_concept(const std::string& word, const Symbol& c,
                                         ConceptKind kind) {
    if (words_.contains(word)) throw DuplicateConcept("word '" + word + "' is already mapped");
    words_.emplace(word, c);
    auto [it, ok] = contexts_.emplace(c, Entry{kind, word, GeneralizationContext(c, thresholds_)});
    return it->second.context;
  }

  void restore_counters(int creates, int stores) {
    create_count_ = creates;
    store_count_ = stores;
  }

  /// The concept a pattern asks about: a concept-kind argument if one has a
  /// context, otherwise the concept named like the predicate.
  Symbol pattern_concept(const FactPattern& p) const {
    for (const PatternArg& a : p.args) {
      if (const auto* t = std::get_if<Term>(&a);
          t && t->is_symbol() && t->head().kind == Kind::concept_ && contexts_.contains(t->head()))
        return t->head();
    }
    Symbol c = concept_symbol(p.predicate.name);
    if (!contexts_.contains(c)) throw UnknownContext("no context for pattern " + p.predicate.name);
    return c;
  }

 private:
  struct Entry {
    ConceptKind kind;
    std::string word;
    GeneralizationContext context;
  };

  const Entry& entry(const Symbol& c) const {
    auto it = contexts_.find(c);
    if (it == contexts_.end()) throw UnknownContext("unknown concept " + c.name);
    return it->second;
  }
  Entry& entry(const Symbol& c) {
    auto it = contexts_.find(c);
    if (it == contexts_.end()) throw UnknownContext("unknown concept " + c.name);
    return it->second;
  }

  static bool mentions(const Case& facts, const Symbol& c) {
    for (const Fact& f : facts) {
      if (f.predicate.name == c.name) return true;
      bool hit = false;
      visit_all_terms(f, [&](const Term& t) { hit = hit || (t.is_symbol() && t.head() == c); });
      if (hit) return true;
    }
    return false;
  }

  /// Generalizations contribute their probability-filtered facts; lone
  /// examples match with uniform weight.
  template <typename Fn>
  void for_each_base(const Entry& e, Fn&& fn) const {
    for (const Generalization& g : e.context.generalizations()) {
      ConceptFacts cf = concept_facts(g, thresholds_.probability);
      if (!cf.facts.empty()) fn(cf.facts, cf.weights);
    }
    for (const Case& ex : e.context.examples()) fn(ex, std::vector<double>(ex.size(), 1.0));
  }

  /// Tries every injective assignment of the pattern's role entities to scene
  /// terms. Each assignment is scored by the aligned share of the base facts
  /// that are evidence, i.e. all facts other than the ones the pattern asks
  /// about.
  void query_base(const Case& base, const std::vector<double>& w, const Case& scene,
                  const FactPattern& pattern, std::map<Fact, double>& best) const {
    std::vector<char> is_pattern(base.size(), 0);
    std::vector<Term> roles;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (!pattern.unifies_base(base[i])) continue;
      is_pattern[i] = 1;
      for (std::size_t a = 0; a < pattern.args.size(); ++a) {
        if (std::holds_alternative<Variable>(pattern.args[a]) &&
            std::find(roles.begin(), roles.end(), base[i].args[a]) == roles.end())
          roles.push_back(base[i].args[a]);
      }
    }
    if (roles.empty()) return;
    double evidence_total = 0;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (!is_pattern[i]) evidence_total += w[i];

    HypothesisSpace hs = local_hypotheses(base, scene, w);
    sort_hypotheses(hs.hypotheses);
    std::vector<int> role_ids;
    for (const Term& r : roles) role_ids.push_back(*hs.base_terms.find(r));
    std::vector<Term> candidates = scene.bindables();

    std::vector<std::pair<int, int>> assignment;
    std::vector<char> taken(candidates.size(), 0);
    auto evaluate = [&]() {
      auto chosen = greedy_correspondence_search(hs.hypotheses, base.size(), scene.size(),
                                                 hs.base_terms.size(), hs.target_terms.size(),
                                                 std::nullopt, assignment);
      Mapping m = detail::build_mapping(base, scene, hs, hs.hypotheses, chosen, assignment, w);
      double aligned = 0;
      for (std::size_t i : chosen) {
        const std::size_t b = hs.hypotheses[i].base;
        if (!is_pattern[b]) aligned += w[b];
      }
      const double score = evidence_total > 0 ? std::min(1.0, aligned / evidence_total) : 0.0;
      for (const Fact& f : m.candidate_inferences) {
        if (f.contains_skolem() || !pattern.unifies(f)) continue;
        auto [it, inserted] = best.emplace(f, score);
        if (!inserted) it->second = std::max(it->second, score);
      }
    };
    auto recurse = [&](auto&& self, std::size_t k) -> void {
      if (k == role_ids.size()) {
        evaluate();
        return;
      }
      const Term& role = roles[k];
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (taken[c] || !detail::bindable_compatible(role, candidates[c])) continue;
        taken[c] = 1;
        assignment.emplace_back(role_ids[k], *hs.target_terms.find(candidates[c]));
        self(self, k + 1);
        assignment.pop_back();
        taken[c] = 0;
      }
    };
    recurse(recurse, 0);
  }

  /// Timepoints of a trace case in order: the start, then the after-chain.
  static std::vector<Term> timeline(const Case& trace) {
    std::optional<Term> start;
    std::map<Term, Term> successor;
    for (const Fact& f : trace) {
      if (f.predicate.name == names::isa && f.args.size() == 2 && f.args[1].is_symbol() &&
          f.args[1].head().name == names::start)
        start = f.args[0];
      if (f.predicate.name == names::after && f.args.size() == 2)
        successor.emplace(f.args[1], f.args[0]);
    }
    if (!start) throw MalformedTrace("trace has no start timepoint");
    std::vector<Term> out{*start};
    while (successor.contains(out.back())) {
      if (out.size() > successor.size()) throw MalformedTrace("after-chain has a cycle");
      out.push_back(successor.at(out.back()));
    }
    return out;
  }

  static Term current_timepoint(const Case& trace) { return timeline(trace).back(); }

  /// Pairs the i-th timepoint of the trace with the i-th of the base, so a
  /// partial trace is read as the beginning of a demonstration.
  static void bind_timeline(const Case& base, const Case& trace,
                            std::vector<std::pair<Term, Term>>& out) {
    std::vector<Term> bt;
    try {
      bt = timeline(base);
    } catch (const MalformedTrace&) {
      return;
    }
    const std::vector<Term> tt = timeline(trace);
    for (std::size_t i = 0; i < std::min(bt.size(), tt.size()); ++i) {
      if (bt[i].is_bindable() && tt[i].is_bindable()) out.emplace_back(bt[i], tt[i]);
    }
  }

  static std::optional<NextState> next_state(const Mapping& m, const Term& current) {
    std::vector<Term> nexts;
    for (const Fact& f : m.candidate_inferences) {
      if (f.predicate.name == names::after && f.args.size() == 2 && f.args[0].is_skolem() &&
          f.args[1] == current)
        nexts.push_back(f.args[0]);
    }
    if (nexts.empty()) return std::nullopt;
    std::sort(nexts.begin(), nexts.end());
    NextState ns;
    ns.timepoint = nexts.front();
    ns.score = m.score;
    for (const Fact& f : m.candidate_inferences) {
      if (f.predicate.name == names::holds_in && f.args.size() == 2 &&
          f.args[0] == ns.timepoint && f.args[1].is_nested_fact()) {
        Fact inner = Fact::from_term(f.args[1]);
        if (!inner.contains_skolem()) ns.facts.push_back(std::move(inner));
      }
      if (f.predicate.name == names::final_ && f.args.size() == 2 && f.args[0] == ns.timepoint)
        ns.terminal = true;
    }
    std::sort(ns.facts.begin(), ns.facts.end());
    return ns;
  }

  Thresholds thresholds_;
  std::map<Symbol, Entry> contexts_;
  std::map<std::string, Symbol> words_;
  int store_count_ = 0;
  int create_count_ = 0;
};

}  // namespace ancm
