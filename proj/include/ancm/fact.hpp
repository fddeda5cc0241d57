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

// Symbols, terms, facts and cases: the predicate-calculus layer shared by the
// matcher, the generalizer and the agent. Everything here is a value type.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ancm/errors.hpp"

namespace ancm {

enum class Kind : std::uint8_t {
  entity,
  percept,
  concept_,
  predicate,
  functor,
  time,
  literal,
};

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::entity: return "entity";
    case Kind::percept: return "percept";
    case Kind::concept_: return "concept";
    case Kind::predicate: return "predicate";
    case Kind::functor: return "functor";
    case Kind::time: return "time";
    case Kind::literal: return "literal";
  }
  return "entity";
}

inline std::optional<Kind> kind_from_string(std::string_view s) {
  for (Kind k : {Kind::entity, Kind::percept, Kind::concept_, Kind::predicate,
                 Kind::functor, Kind::time, Kind::literal}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// An opaque name tagged with its kind. Equality is by (kind, name); the
/// ordering is by name first so that printed cases sort lexicographically.
struct Symbol {
  Kind kind = Kind::entity;
  std::string name;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.kind <=> b.kind;
  }
};

inline Symbol entity(std::string name) { return {Kind::entity, std::move(name)}; }
inline Symbol percept(std::string name) { return {Kind::percept, std::move(name)}; }
inline Symbol concept_symbol(std::string name) { return {Kind::concept_, std::move(name)}; }
inline Symbol predicate(std::string name) { return {Kind::predicate, std::move(name)}; }
inline Symbol functor(std::string name) { return {Kind::functor, std::move(name)}; }
inline Symbol timepoint(std::string name) { return {Kind::time, std::move(name)}; }
inline Symbol literal(std::string name) { return {Kind::literal, std::move(name)}; }

namespace names {
inline constexpr std::string_view gen_ent_fn = "GenEntFn";
inline constexpr std::string_view skolem = ":skolem";
inline constexpr std::string_view holds_in = "H";
inline constexpr std::string_view after = "after";
inline constexpr std::string_view final_ = "final";
inline constexpr std::string_view isa = "isa";
inline constexpr std::string_view start = "start";
inline constexpr std::string_view held = "held";
}  // namespace names

/// A symbol or a functional application `(head args...)`. Applications whose
/// head is a predicate are nested facts, e.g. the third argument of
/// `(H T0 (dc o1 o2))`.
class Term {
 public:
  Term() = default;
  Term(Symbol s) : head_(std::move(s)) {}  // NOLINT(google-explicit-constructor)

  static Term apply(Symbol head, std::vector<Term> args) {
    Term t(std::move(head));
    t.args_ = std::move(args);
    t.app_ = true;
    return t;
  }

  bool is_symbol() const { return !app_; }
  bool is_application() const { return app_; }
  const Symbol& head() const { return head_; }
  const std::vector<Term>& args() const { return args_; }

  bool is_gen_entity() const {
    return app_ && head_.kind == Kind::functor && head_.name == names::gen_ent_fn;
  }
  bool is_skolem() const {
    return app_ && head_.kind == Kind::functor && head_.name == names::skolem;
  }
  bool is_nested_fact() const { return app_ && head_.kind == Kind::predicate; }

  /// Terms that structure mapping may align with each other: objects,
  /// timepoints, generalized entities and skolems.
  bool is_bindable() const {
    if (!app_) return head_.kind == Kind::entity || head_.kind == Kind::time;
    return is_gen_entity() || is_skolem();
  }

  bool contains_skolem() const {
    if (is_skolem()) return true;
    return std::any_of(args_.begin(), args_.end(),
                       [](const Term& t) { return t.contains_skolem(); });
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.app_ == b.app_ && a.head_ == b.head_ && a.args_ == b.args_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.head_ <=> b.head_; c != 0) return c;
    if (auto c = a.app_ <=> b.app_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args_.begin(), a.args_.end(),
                                                  b.args_.begin(), b.args_.end());
  }

 private:
  Symbol head_;
  std::vector<Term> args_;
  bool app_ = false;
};

inline Term gen_entity(int index, const Symbol& context) {
  return Term::apply(functor(std::string(names::gen_ent_fn)),
                     {Term(literal(std::to_string(index))), Term(context)});
}

inline Term skolemize(const Term& t) {
  return Term::apply(functor(std::string(names::skolem)), {t});
}

/// A ground atomic statement `(predicate args...)`.
struct Fact {
  Symbol predicate;
  std::vector<Term> args;

  Fact() = default;
  Fact(Symbol pred, std::vector<Term> a) : predicate(std::move(pred)), args(std::move(a)) {}

  std::size_t arity() const { return args.size(); }

  Term as_term() const { return Term::apply(predicate, args); }

  static Fact from_term(const Term& t) {
    if (!t.is_nested_fact()) throw ParseError("term is not a nested fact");
    return Fact(t.head(), t.args());
  }

  bool contains_skolem() const {
    return std::any_of(args.begin(), args.end(),
                       [](const Term& t) { return t.contains_skolem(); });
  }

  friend bool operator==(const Fact&, const Fact&) = default;
  friend std::strong_ordering operator<=>(const Fact& a, const Fact& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(),
                                                  b.args.begin(), b.args.end());
  }
};

inline Fact isa(const Term& e, const Symbol& type) {
  return Fact(predicate(std::string(names::isa)), {e, Term(type)});
}

inline Fact holds_in(const Symbol& time, const Fact& f) {
  return Fact(predicate(std::string(names::holds_in)), {Term(time), f.as_term()});
}

/// Applies `fn` to every term in `t` depth-first, parents before children.
template <typename Fn>
void visit_terms(const Term& t, Fn&& fn) {
  fn(t);
  if (t.is_bindable()) return;
  for (const Term& a : t.args()) visit_terms(a, fn);
}

template <typename Fn>
void visit_terms(const Fact& f, Fn&& fn) {
  for (const Term& a : f.args) visit_terms(a, fn);
}

/// Like visit_terms but also descends into generalized entities and skolems.
template <typename Fn>
void visit_all_terms(const Term& t, Fn&& fn) {
  fn(t);
  for (const Term& a : t.args()) visit_all_terms(a, fn);
}

template <typename Fn>
void visit_all_terms(const Fact& f, Fn&& fn) {
  for (const Term& a : f.args) visit_all_terms(a, fn);
}

/// Replaces bindable terms according to `fn`, which returns the replacement
/// or nullopt to keep the term.
template <typename Fn>
Term rewrite(const Term& t, Fn&& fn) {
  if (t.is_bindable()) {
    if (auto r = fn(t)) return *r;
    return t;
  }
  if (!t.is_application()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(rewrite(a, fn));
  return Term::apply(t.head(), std::move(args));
}

template <typename Fn>
Fact rewrite(const Fact& f, Fn&& fn) {
  std::vector<Term> args;
  args.reserve(f.args.size());
  for (const Term& a : f.args) args.push_back(rewrite(a, fn));
  return Fact(f.predicate, std::move(args));
}

/// A duplicate-free set of facts kept in canonical (sorted) order.
class Case {
 public:
  Case() = default;
  Case(std::initializer_list<Fact> facts) : facts_(facts) { normalize(); }
  explicit Case(std::vector<Fact> facts) : facts_(std::move(facts)) { normalize(); }

  bool insert(Fact f) {
    auto it = std::lower_bound(facts_.begin(), facts_.end(), f);
    if (it != facts_.end() && *it == f) return false;
    facts_.insert(it, std::move(f));
    return true;
  }

  void merge(const Case& other) {
    facts_.insert(facts_.end(), other.facts_.begin(), other.facts_.end());
    normalize();
  }

  bool contains(const Fact& f) const {
    return std::binary_search(facts_.begin(), facts_.end(), f);
  }

  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }
  const std::vector<Fact>& facts() const { return facts_; }
  const Fact& operator[](std::size_t i) const { return facts_[i]; }

  /// Entity-kind symbols reachable anywhere in the facts, sorted.
  std::vector<Term> entities() const {
    std::set<Term> out;
    for (const Fact& f : facts_) {
      visit_terms(f, [&](const Term& t) {
        if (t.is_symbol() && t.head().kind == Kind::entity) out.insert(t);
      });
    }
    return {out.begin(), out.end()};
  }

  /// All terms structure mapping can align: entities, timepoints,
  /// generalized entities and skolems.
  std::vector<Term> bindables() const {
    std::set<Term> out;
    for (const Fact& f : facts_) {
      visit_terms(f, [&](const Term& t) {
        if (t.is_bindable()) out.insert(t);
      });
    }
    return {out.begin(), out.end()};
  }

  friend bool operator==(const Case&, const Case&) = default;

 private:
  void normalize() {
    std::sort(facts_.begin(), facts_.end());
    facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
  }

  std::vector<Fact> facts_;
};

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

inline void write_term(std::string& out, const Term& t) {
  if (t.is_symbol()) {
    out += t.head().name;
    return;
  }
  out += '(';
  out += t.head().name;
  for (const Term& a : t.args()) {
    out += ' ';
    write_term(out, a);
  }
  out += ')';
}

inline std::string to_string(const Term& t) {
  std::string s;
  write_term(s, t);
  return s;
}

inline std::string to_string(const Fact& f) { return to_string(f.as_term()); }

/// Declared kinds for bare atoms read from text. Undeclared atoms are
/// entities, except where their position fixes the kind (timepoint slots of
/// `H`/`after`/`final`, the two slots of `GenEntFn`).
class Lexicon {
 public:
  Lexicon() {
    declare(std::string(names::gen_ent_fn), Kind::functor);
    declare(std::string(names::skolem), Kind::functor);
    declare(std::string(names::start), Kind::concept_);
  }

  void declare(const std::string& name, Kind k) { kinds_[name] = k; }

  void declare(const Symbol& s) {
    if (s.kind != Kind::entity && s.kind != Kind::predicate) declare(s.name, s.kind);
  }

  void declare_all(const Case& c) {
    for (const Fact& f : c) {
      visit_all_terms(f, [&](const Term& t) { declare(t.head()); });
    }
  }

  std::optional<Kind> lookup(const std::string& name) const {
    auto it = kinds_.find(name);
    if (it == kinds_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::string, Kind>& declarations() const { return kinds_; }

 private:
  std::map<std::string, Kind> kinds_;
};

namespace detail {

struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool list = false;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::optional<SExpr> next() {
    skip();
    if (pos_ >= text_.size()) return std::nullopt;
    return read();
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input");
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')' at offset " + std::to_string(pos_));
    if (c == '(') {
      ++pos_;
      SExpr e;
      e.list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw ParseError("unterminated list");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.items.push_back(read());
      }
      if (e.items.empty()) throw ParseError("empty list");
      if (e.items.front().list) throw ParseError("list head must be an atom");
      return e;
    }
    std::size_t b = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\n' ||
          d == '\r')
        break;
      ++pos_;
    }
    SExpr e;
    e.atom = std::string(text_.substr(b, pos_ - b));
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Term to_term(const SExpr& e, const Lexicon& lex, std::optional<Kind> slot_kind);

inline std::vector<Term> to_args(const SExpr& e, const Lexicon& lex,
                                 const std::string& head_name) {
  std::vector<Term> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    std::optional<Kind> slot;
    if (head_name == names::gen_ent_fn) {
      slot = (i == 1) ? Kind::literal : Kind::concept_;
    } else if ((head_name == names::holds_in && i == 1) ||
               ((head_name == names::after || head_name == names::final_) && i <= 2)) {
      slot = Kind::time;
    }
    args.push_back(to_term(e.items[i], lex, slot));
  }
  return args;
}

inline Term to_term(const SExpr& e, const Lexicon& lex, std::optional<Kind> slot_kind) {
  if (!e.list) {
    if (auto k = lex.lookup(e.atom)) return Symbol{*k, e.atom};
    return Symbol{slot_kind.value_or(Kind::entity), e.atom};
  }
  const std::string& head = e.items.front().atom;
  Kind hk = Kind::predicate;
  if (auto k = lex.lookup(head); k && *k == Kind::functor) hk = Kind::functor;
  return Term::apply(Symbol{hk, head}, to_args(e, lex, head));
}

}  // namespace detail

inline Fact parse_fact(std::string_view text, const Lexicon& lex = {}) {
  detail::SExprReader r(text);
  auto e = r.next();
  if (!e || !e->list) throw ParseError("expected a fact: " + std::string(text));
  if (r.next()) throw ParseError("trailing input after fact: " + std::string(text));
  const std::string& head = e->items.front().atom;
  return Fact(predicate(head), detail::to_args(*e, lex, head));
}

inline Term parse_term(std::string_view text, const Lexicon& lex = {}) {
  detail::SExprReader r(text);
  auto e = r.next();
  if (!e) throw ParseError("expected a term");
  if (r.next()) throw ParseError("trailing input after term: " + std::string(text));
  return detail::to_term(*e, lex, std::nullopt);
}

/// Reads a `.facts` document: one s-expression per line, `;` comments, and
/// optional `(:declare <kind> name...)` lines that fix symbol kinds.
inline Case parse_case(std::string_view text, Lexicon& lex) {
  detail::SExprReader r(text);
  std::vector<Fact> facts;
  while (auto e = r.next()) {
    if (!e->list) throw ParseError("expected a list, got atom '" + e->atom + "'");
    const std::string& head = e->items.front().atom;
    if (head == ":declare") {
      if (e->items.size() < 2 || e->items[1].list)
        throw ParseError("malformed :declare");
      auto k = kind_from_string(e->items[1].atom);
      if (!k) throw ParseError("unknown kind '" + e->items[1].atom + "'");
      for (std::size_t i = 2; i < e->items.size(); ++i) {
        if (e->items[i].list) throw ParseError("malformed :declare");
        lex.declare(e->items[i].atom, *k);
      }
      continue;
    }
    facts.emplace_back(predicate(head), detail::to_args(*e, lex, head));
  }
  return Case(std::move(facts));
}

inline Case parse_case(std::string_view text) {
  Lexicon lex;
  return parse_case(text, lex);
}

/// Canonical text form: kind declarations for every symbol whose kind is not
/// implied by position, then one fact per line in canonical order.
inline std::string write_case(const Case& c) {
  std::map<Kind, std::set<std::string>> decl;
  const Lexicon defaults;
  auto note = [&](const Term& t) {
    const Symbol& s = t.head();
    if (s.kind == Kind::entity || s.kind == Kind::predicate) return;
    if (defaults.lookup(s.name) == s.kind) return;
    decl[s.kind].insert(s.name);
  };
  for (const Fact& f : c) visit_all_terms(f, note);
  std::string out;
  for (const auto& [k, names] : decl) {
    out += "(:declare ";
    out += to_string(k);
    for (const std::string& n : names) {
      out += ' ';
      out += n;
    }
    out += ")\n";
  }
  for (const Fact& f : c) {
    out += to_string(f);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Episodic traces
// ---------------------------------------------------------------------------

struct Episode {
  Symbol time;
  std::vector<Fact> state;
};

/// A time-indexed sequence of qualitative states. The first episode carries
/// the start marker and the last one the final marker.
struct EpisodicTrace {
  std::vector<Episode> episodes;
  Symbol start;
  Symbol final_;

  void validate() const {
    if (episodes.empty()) throw MalformedTrace("trace has no episodes");
    if (episodes.front().time != start)
      throw MalformedTrace("start marker is not on the first episode");
    if (episodes.back().time != final_)
      throw MalformedTrace("final marker is not on the last episode");
    std::set<Symbol> seen;
    for (const Episode& e : episodes) {
      if (e.time.kind != Kind::time)
        throw MalformedTrace("timepoint '" + e.time.name + "' is not a time symbol");
      if (!seen.insert(e.time).second)
        throw MalformedTrace("duplicate timepoint '" + e.time.name + "'");
    }
  }
};

inline Fact after_fact(const Term& later, const Term& earlier) {
  return Fact(predicate(std::string(names::after)), {later, earlier});
}

inline Fact final_fact(const Term& last, const Term& prev) {
  return Fact(predicate(std::string(names::final_)), {last, prev});
}

inline Fact start_fact(const Term& t0) {
  return isa(t0, concept_symbol(std::string(names::start)));
}

/// Flattens a trace into `(H t f)` facts plus the start/after/final
/// scaffolding. An open trace (one still being executed) gets no final marker.
inline Case trace_to_case(const EpisodicTrace& trace, bool closed = true) {
  trace.validate();
  Case out;
  for (const Episode& e : trace.episodes) {
    for (const Fact& f : e.state) out.insert(holds_in(e.time, f));
  }
  out.insert(start_fact(trace.episodes.front().time));
  for (std::size_t i = 1; i < trace.episodes.size(); ++i) {
    out.insert(after_fact(trace.episodes[i].time, trace.episodes[i - 1].time));
  }
  if (closed && trace.episodes.size() >= 2) {
    const auto n = trace.episodes.size();
    out.insert(final_fact(trace.episodes[n - 1].time, trace.episodes[n - 2].time));
  }
  return out;
}

}  // namespace ancm
