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

// Template parsing of teacher utterances and the word/concept maps.

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ancm/errors.hpp"
#include "ancm/fact.hpp"
#include "ancm/memory.hpp"

namespace ancm {

struct ObjectRef {
  std::string id;
  std::vector<std::string> properties;
  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

struct RelRef {
  std::string relation;
  std::string arg1;
  std::string arg2;
  friend bool operator==(const RelRef&, const RelRef&) = default;
};

struct ActRef {
  std::string verb;
  std::string arg1;
  std::string arg2;
  std::string relation;
  /// The word the action concept is filed under, e.g. "move right of".
  std::string word() const { return verb + " " + relation; }
  friend bool operator==(const ActRef&, const ActRef&) = default;
};

struct ParseResult {
  std::vector<ObjectRef> object_refs;
  std::vector<RelRef> rel_refs;
  std::vector<ActRef> act_refs;

  const ObjectRef* find(const std::string& id) const {
    for (const ObjectRef& o : object_refs)
      if (o.id == id) return &o;
    return nullptr;
  }
};

/// The three pre-encoded templates:
///   <adj>* <noun>
///   <obj-ref> <rel-name> <obj-ref>
///   <verb> <obj-ref> <rel-name> <obj-ref>
/// Relation names are the configured phrases plus any "<word> of".
class TemplateParser {
 public:
  TemplateParser()
      : relations_{"left of", "right of", "above", "below"}, verbs_{"move"} {}
  TemplateParser(std::set<std::string> relations, std::set<std::string> verbs)
      : relations_(std::move(relations)), verbs_(std::move(verbs)) {}

  const std::set<std::string>& relations() const { return relations_; }
  const std::set<std::string>& verbs() const { return verbs_; }

  ParseResult parse(std::string_view content) const {
    const std::vector<std::string> tokens = tokenize(content);
    if (tokens.empty()) throw UnparseableUtterance("empty utterance");
    std::size_t i = 0;
    std::optional<std::string> verb;
    if (verbs_.contains(tokens[0])) {
      verb = tokens[0];
      i = 1;
    }
    // Find the relation phrase; it must leave a nonempty object ref on both sides.
    std::optional<std::pair<std::size_t, std::size_t>> rel;  // [begin, end)
    for (std::size_t k = i + 1; k < tokens.size() && !rel; ++k) {
      if (relations_.contains(tokens[k])) {
        rel = {k, k + 1};
      } else if (k + 1 < tokens.size() && relations_.contains(tokens[k] + " " + tokens[k + 1])) {
        rel = {k, k + 2};
      } else if (k + 1 < tokens.size() && tokens[k + 1] == "of") {
        rel = {k, k + 2};
      }
      if (rel && rel->second >= tokens.size()) rel.reset();
    }

    ParseResult r;
    auto obj = [&](std::size_t b, std::size_t e) {
      ObjectRef o;
      o.id = "or" + std::to_string(r.object_refs.size() + 1);
      o.properties.assign(tokens.begin() + static_cast<std::ptrdiff_t>(b),
                          tokens.begin() + static_cast<std::ptrdiff_t>(e));
      r.object_refs.push_back(o);
      return o.id;
    };
    if (!rel) {
      if (verb) throw UnparseableUtterance("'" + *verb + "' needs a relation and two objects");
      obj(0, tokens.size());
      return r;
    }
    std::string name = tokens[rel->first];
    for (std::size_t k = rel->first + 1; k < rel->second; ++k) name += " " + tokens[k];
    const std::string a = obj(i, rel->first);
    const std::string b = obj(rel->second, tokens.size());
    if (verb) {
      r.act_refs.push_back({*verb, a, b, name});
    } else {
      r.rel_refs.push_back({name, a, b});
    }
    return r;
  }

 private:
  static std::vector<std::string> tokenize(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::istringstream in(lower);
    std::vector<std::string> out;
    for (std::string t; in >> t;) {
      if (t == "the" || t == "a" || t == "an") continue;
      out.push_back(t);
    }
    return out;
  }

  std::set<std::string> relations_;
  std::set<std::string> verbs_;
};

struct SemanticEntry {
  std::string word;
  Symbol concept_id;
  ConceptKind kind;
};

/// Bidirectional word <-> concept association.
class SemanticMap {
 public:
  void add(const std::string& word, const Symbol& c, ConceptKind kind) {
    if (by_word_.contains(word)) throw DuplicateConcept("word '" + word + "' is already mapped");
    if (by_concept_.contains(c))
      throw DuplicateConcept("concept " + c.name + " is already mapped");
    entries_.push_back({word, c, kind});
    by_word_.emplace(word, entries_.size() - 1);
    by_concept_.emplace(c, entries_.size() - 1);
  }

  const SemanticEntry* lookup(const std::string& word) const {
    auto it = by_word_.find(word);
    return it == by_word_.end() ? nullptr : &entries_[it->second];
  }

  const SemanticEntry* lookup(const Symbol& c) const {
    auto it = by_concept_.find(c);
    return it == by_concept_.end() ? nullptr : &entries_[it->second];
  }

  const std::vector<SemanticEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<SemanticEntry> entries_;
  std::map<std::string, std::size_t> by_word_;
  std::map<Symbol, std::size_t> by_concept_;
};

}  // namespace ancm
