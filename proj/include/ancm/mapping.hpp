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

// Structure mapping between two cases: one-to-one fact correspondences under
// a consistent injective entity binding, a base-normalized similarity score,
// and candidate inferences carried over from the base.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ancm/fact.hpp"

namespace ancm {

struct Correspondence {
  Fact base_fact;
  Fact target_fact;
  std::vector<std::pair<Term, Term>> entity_bindings;
};

struct Mapping {
  std::vector<Correspondence> correspondences;
  /// base term -> target term, union over all correspondences.
  std::map<Term, Term> bindings;
  double score = 0;
  std::vector<Fact> candidate_inferences;
};

/// A candidate pairing of one base fact with one target fact, together with
/// the entity bindings it would commit to. Ids index into the interned
/// bindable terms of each side.
struct LocalHypothesis {
  std::size_t base = 0;
  std::size_t target = 0;
  double weight = 1.0;
  std::vector<std::pair<int, int>> binds;
};

namespace detail {

class TermIndex {
 public:
  int id(const Term& t) {
    auto [it, inserted] = ids_.try_emplace(t, static_cast<int>(terms_.size()));
    if (inserted) terms_.push_back(t);
    return it->second;
  }
  std::optional<int> find(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const Term& term(int i) const { return terms_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(terms_.size()); }

 private:
  std::map<Term, int> ids_;
  std::vector<Term> terms_;
};

inline bool bindable_compatible(const Term& b, const Term& t) {
  if (b.is_symbol() && t.is_symbol()) return b.head().kind == t.head().kind;
  return true;
}

inline bool align_terms(const Term& b, const Term& t, TermIndex& bi, TermIndex& ti,
                        std::vector<std::pair<int, int>>& binds) {
  const bool bb = b.is_bindable(), tb = t.is_bindable();
  if (bb || tb) {
    if (!(bb && tb) || !bindable_compatible(b, t)) return false;
    binds.emplace_back(bi.id(b), ti.id(t));
    return true;
  }
  if (b.is_symbol() != t.is_symbol()) return false;
  if (b.head() != t.head()) return false;
  if (b.is_symbol()) return true;
  if (b.args().size() != t.args().size()) return false;
  for (std::size_t i = 0; i < b.args().size(); ++i) {
    if (!align_terms(b.args()[i], t.args()[i], bi, ti, binds)) return false;
  }
  return true;
}

/// Removes duplicate pairs; false if the pairs are not a partial bijection.
inline bool normalize_binds(std::vector<std::pair<int, int>>& binds) {
  std::sort(binds.begin(), binds.end());
  binds.erase(std::unique(binds.begin(), binds.end()), binds.end());
  for (std::size_t i = 0; i < binds.size(); ++i) {
    for (std::size_t j = i + 1; j < binds.size(); ++j) {
      if (binds[i].first == binds[j].first || binds[i].second == binds[j].second) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Interned hypothesis space for a base/target pair.
struct HypothesisSpace {
  detail::TermIndex base_terms;
  detail::TermIndex target_terms;
  std::vector<LocalHypothesis> hypotheses;
};

/// All base/target fact pairs with the same predicate and arity whose
/// constants agree and whose entity positions bind consistently.
inline HypothesisSpace local_hypotheses(const Case& base, const Case& target,
                                        std::span<const double> weights = {}) {
  HypothesisSpace hs;
  // Every bindable term gets an id, even if it never appears in a hypothesis.
  for (const Term& t : base.bindables()) hs.base_terms.id(t);
  for (const Term& t : target.bindables()) hs.target_terms.id(t);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Fact& b = base[i];
    // Target is sorted by predicate first; narrow to the equal range.
    auto lo = std::lower_bound(target.begin(), target.end(), b.predicate,
                               [](const Fact& f, const Symbol& p) { return f.predicate < p; });
    for (auto it = lo; it != target.end() && it->predicate == b.predicate; ++it) {
      if (it->arity() != b.arity()) continue;
      LocalHypothesis h;
      h.base = i;
      h.target = static_cast<std::size_t>(it - target.begin());
      h.weight = weights.empty() ? 1.0 : weights[i];
      bool ok = true;
      for (std::size_t a = 0; a < b.arity() && ok; ++a) {
        ok = detail::align_terms(b.args[a], it->args[a], hs.base_terms, hs.target_terms, h.binds);
      }
      if (ok && detail::normalize_binds(h.binds)) hs.hypotheses.push_back(std::move(h));
    }
  }
  return hs;
}

/// Orders hypotheses by descending weight, ties by canonical base then
/// target fact order.
inline void sort_hypotheses(std::vector<LocalHypothesis>& hyps) {
  std::stable_sort(hyps.begin(), hyps.end(), [](const LocalHypothesis& a, const LocalHypothesis& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.base != b.base) return a.base < b.base;
    return a.target < b.target;
  });
}

namespace detail {

struct GreedyState {
  std::vector<int> b2t;
  std::vector<int> t2b;
  std::vector<char> base_used;
  std::vector<char> target_used;

  GreedyState(int nb, int nt, std::size_t nbf, std::size_t ntf)
      : b2t(static_cast<std::size_t>(nb), -1),
        t2b(static_cast<std::size_t>(nt), -1),
        base_used(nbf, 0),
        target_used(ntf, 0) {}

  bool consistent(const LocalHypothesis& h) const {
    if (base_used[h.base] || target_used[h.target]) return false;
    for (auto [b, t] : h.binds) {
      const int bt = b2t[static_cast<std::size_t>(b)];
      const int tb = t2b[static_cast<std::size_t>(t)];
      if (bt != -1 && bt != t) return false;
      if (tb != -1 && tb != b) return false;
    }
    return true;
  }

  bool bind(int b, int t) {
    const int bt = b2t[static_cast<std::size_t>(b)];
    const int tb = t2b[static_cast<std::size_t>(t)];
    if ((bt != -1 && bt != t) || (tb != -1 && tb != b)) return false;
    b2t[static_cast<std::size_t>(b)] = t;
    t2b[static_cast<std::size_t>(t)] = b;
    return true;
  }

  void take(const LocalHypothesis& h) {
    base_used[h.base] = 1;
    target_used[h.target] = 1;
    for (auto [b, t] : h.binds) bind(b, t);
  }
};

}  // namespace detail

/// Greedy maximal consistent selection over `hyps`, which must already be in
/// selection order. `seed`, when given, is taken first. Returns indices into
/// `hyps` in the order they were accepted.
inline std::vector<std::size_t> greedy_correspondence_search(
    std::span<const LocalHypothesis> hyps, std::size_t base_facts, std::size_t target_facts,
    int base_terms, int target_terms, std::optional<std::size_t> seed = std::nullopt,
    std::span<const std::pair<int, int>> prebound = {}) {
  detail::GreedyState st(base_terms, target_terms, base_facts, target_facts);
  for (auto [b, t] : prebound) st.bind(b, t);
  std::vector<std::size_t> chosen;
  if (seed) {
    if (!st.consistent(hyps[*seed])) return chosen;
    st.take(hyps[*seed]);
    chosen.push_back(*seed);
  }
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (seed && i == *seed) continue;
    if (st.consistent(hyps[i])) {
      st.take(hyps[i]);
      chosen.push_back(i);
    }
  }
  return chosen;
}

/// Convenience overload for callers holding a HypothesisSpace.
inline std::vector<std::size_t> greedy_correspondence_search(const HypothesisSpace& hs,
                                                            const Case& base,
                                                            const Case& target) {
  return greedy_correspondence_search(hs.hypotheses, base.size(), target.size(),
                                      hs.base_terms.size(), hs.target_terms.size());
}

struct MatchOptions {
  /// Per-base-fact weights in (0,1], parallel to base.facts(). Empty means 1.
  std::span<const double> weights;
  /// Bindings fixed before the search (base term -> target term).
  std::vector<std::pair<Term, Term>> prebound;
  /// Also try every hypothesis as a forced first choice and keep the best.
  bool restarts = true;
};

namespace detail {

inline Mapping build_mapping(const Case& base, const Case& target, const HypothesisSpace& hs,
                             std::span<const LocalHypothesis> hyps,
                             const std::vector<std::size_t>& chosen,
                             std::span<const std::pair<int, int>> prebound,
                             std::span<const double> weights) {
  Mapping m;
  std::vector<char> used(base.size(), 0);
  for (auto [b, t] : prebound) m.bindings.emplace(hs.base_terms.term(b), hs.target_terms.term(t));
  std::vector<std::size_t> order(chosen.begin(), chosen.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hyps[a].base < hyps[b].base;
  });
  double aligned = 0;
  for (std::size_t i : order) {
    const LocalHypothesis& h = hyps[i];
    Correspondence c;
    c.base_fact = base[h.base];
    c.target_fact = target[h.target];
    for (auto [b, t] : h.binds) {
      c.entity_bindings.emplace_back(hs.base_terms.term(b), hs.target_terms.term(t));
      m.bindings.emplace(hs.base_terms.term(b), hs.target_terms.term(t));
    }
    used[h.base] = 1;
    aligned += weights.empty() ? 1.0 : weights[h.base];
    m.correspondences.push_back(std::move(c));
  }
  double total = 0;
  for (std::size_t i = 0; i < base.size(); ++i) total += weights.empty() ? 1.0 : weights[i];
  m.score = total > 0 ? std::min(1.0, aligned / total) : 0.0;

  for (std::size_t i = 0; i < base.size(); ++i) {
    if (used[i]) continue;
    bool anchored = false;
    Fact inferred = rewrite(base[i], [&](const Term& t) -> std::optional<Term> {
      auto it = m.bindings.find(t);
      if (it != m.bindings.end()) {
        anchored = true;
        return it->second;
      }
      return skolemize(t);
    });
    if (!anchored || target.contains(inferred)) continue;
    m.candidate_inferences.push_back(std::move(inferred));
  }
  std::sort(m.candidate_inferences.begin(), m.candidate_inferences.end());
  m.candidate_inferences.erase(
      std::unique(m.candidate_inferences.begin(), m.candidate_inferences.end()),
      m.candidate_inferences.end());
  return m;
}

inline double selection_weight(std::span<const LocalHypothesis> hyps,
                               const std::vector<std::size_t>& chosen) {
  double w = 0;
  for (std::size_t i : chosen) w += hyps[i].weight;
  return w;
}

}  // namespace detail

inline void check_weights(const Case& base, std::span<const double> weights) {
  if (weights.empty()) return;
  if (weights.size() != base.size())
    throw std::invalid_argument("weights must cover every base fact");
  for (double w : weights) {
    if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("weights must lie in (0,1]");
  }
}

/// Matches `base` against `target`. The score is the weight of aligned base
/// facts over the total base weight, so identical cases score 1 and extra
/// target facts cost nothing.
inline Mapping match(const Case& base, const Case& target, const MatchOptions& opt = {}) {
  check_weights(base, opt.weights);
  HypothesisSpace hs = local_hypotheses(base, target, opt.weights);
  sort_hypotheses(hs.hypotheses);

  std::vector<std::pair<int, int>> prebound;
  for (const auto& [b, t] : opt.prebound) {
    auto bi = hs.base_terms.find(b);
    auto ti = hs.target_terms.find(t);
    if (bi && ti) prebound.emplace_back(*bi, *ti);
  }

  const auto run = [&](std::optional<std::size_t> seed) {
    return greedy_correspondence_search(hs.hypotheses, base.size(), target.size(),
                                        hs.base_terms.size(), hs.target_terms.size(), seed,
                                        prebound);
  };
  std::vector<std::size_t> best = run(std::nullopt);
  if (opt.restarts) {
    double best_w = detail::selection_weight(hs.hypotheses, best);
    for (std::size_t s = 0; s < hs.hypotheses.size(); ++s) {
      std::vector<std::size_t> cand = run(s);
      const double w = detail::selection_weight(hs.hypotheses, cand);
      if (w > best_w + 1e-12) {
        best = std::move(cand);
        best_w = w;
      }
    }
  }
  return detail::build_mapping(base, target, hs, hs.hypotheses, best, prebound, opt.weights);
}

inline Mapping match(const Case& base, const Case& target, std::span<const double> weights) {
  MatchOptions opt;
  opt.weights = weights;
  return match(base, target, opt);
}

}  // namespace ancm
