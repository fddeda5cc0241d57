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

// Deterministic 2-D tabletop: objects carry ground-truth percepts, spatial
// relations come from RCC8 over axis-aligned boxes and an eight-way cardinal
// direction calculus over centroids.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ancm/errors.hpp"
#include "ancm/fact.hpp"

namespace ancm {

enum class Shape : std::uint8_t { box, cone, sphere, cylinder };
enum class Color : std::uint8_t { green, blue, red, yellow, purple };

inline constexpr std::array<Shape, 4> kShapes = {Shape::box, Shape::cone, Shape::sphere,
                                                 Shape::cylinder};
inline constexpr std::array<Color, 5> kColors = {Color::green, Color::blue, Color::red,
                                                 Color::yellow, Color::purple};

inline std::string_view percept_name(Shape s) {
  switch (s) {
    case Shape::box: return "CVBox";
    case Shape::cone: return "CVCone";
    case Shape::sphere: return "CVSphere";
    case Shape::cylinder: return "CVCylinder";
  }
  return "CVBox";
}

inline std::string_view percept_name(Color c) {
  switch (c) {
    case Color::green: return "CVGreen";
    case Color::blue: return "CVBlue";
    case Color::red: return "CVRed";
    case Color::yellow: return "CVYellow";
    case Color::purple: return "CVPurple";
  }
  return "CVGreen";
}

/// Trainer-side vocabulary. The agent never sees these words paired with
/// percepts; it only learns the pairing from lessons.
inline std::string_view word(Shape s) {
  switch (s) {
    case Shape::box: return "box";
    case Shape::cone: return "cone";
    case Shape::sphere: return "ball";
    case Shape::cylinder: return "cylinder";
  }
  return "box";
}

inline std::string_view word(Color c) {
  switch (c) {
    case Color::green: return "green";
    case Color::blue: return "blue";
    case Color::red: return "red";
    case Color::yellow: return "yellow";
    case Color::purple: return "purple";
  }
  return "green";
}

template <typename E, std::size_t N>
std::optional<E> from_percept(std::string_view name, const std::array<E, N>& all) {
  for (E e : all)
    if (percept_name(e) == name) return e;
  return std::nullopt;
}

struct Vec2 {
  double x = 0;
  double y = 0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Axis-aligned rectangle given by centre and positive half extents.
struct Box {
  Vec2 center;
  Vec2 half;

  double xmin() const { return center.x - half.x; }
  double xmax() const { return center.x + half.x; }
  double ymin() const { return center.y - half.y; }
  double ymax() const { return center.y + half.y; }
};

struct Rect {
  double xmin = 0;
  double ymin = 0;
  double xmax = 100;
  double ymax = 100;

  bool contains(const Box& b) const {
    return b.xmin() >= xmin && b.xmax() <= xmax && b.ymin() >= ymin && b.ymax() <= ymax;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Rcc8 : std::uint8_t { dc, ec, po, tpp, ntpp, tppi, ntppi, eq };
enum class Cdc : std::uint8_t { n, ne, e, se, s, sw, w, nw };

inline constexpr std::array<Rcc8, 8> kRcc8 = {Rcc8::dc,  Rcc8::ec,   Rcc8::po,    Rcc8::tpp,
                                              Rcc8::ntpp, Rcc8::tppi, Rcc8::ntppi, Rcc8::eq};
inline constexpr std::array<Cdc, 8> kCdc = {Cdc::n, Cdc::ne, Cdc::e, Cdc::se,
                                            Cdc::s, Cdc::sw, Cdc::w, Cdc::nw};

inline std::string_view to_string(Rcc8 r) {
  static constexpr std::array<std::string_view, 8> n = {"dc",   "ec",   "po",    "tpp",
                                                        "ntpp", "tppi", "ntppi", "eq"};
  return n[static_cast<std::size_t>(r)];
}

inline std::string_view to_string(Cdc c) {
  static constexpr std::array<std::string_view, 8> n = {"n", "ne", "e", "se",
                                                        "s", "sw", "w", "nw"};
  return n[static_cast<std::size_t>(c)];
}

inline Rcc8 converse(Rcc8 r) {
  switch (r) {
    case Rcc8::tpp: return Rcc8::tppi;
    case Rcc8::ntpp: return Rcc8::ntppi;
    case Rcc8::tppi: return Rcc8::tpp;
    case Rcc8::ntppi: return Rcc8::ntpp;
    default: return r;
  }
}

inline Cdc converse(Cdc c) {
  return static_cast<Cdc>((static_cast<int>(c) + 4) % 8);
}

/// RCC8 relation of `a` to `b` with closed boxes and open interiors.
inline Rcc8 compute_rcc8(const Box& a, const Box& b) {
  const double ax1 = a.xmin(), ax2 = a.xmax(), ay1 = a.ymin(), ay2 = a.ymax();
  const double bx1 = b.xmin(), bx2 = b.xmax(), by1 = b.ymin(), by2 = b.ymax();
  if (ax2 < bx1 || bx2 < ax1 || ay2 < by1 || by2 < ay1) return Rcc8::dc;
  if (ax2 <= bx1 || bx2 <= ax1 || ay2 <= by1 || by2 <= ay1) return Rcc8::ec;
  if (ax1 == bx1 && ax2 == bx2 && ay1 == by1 && ay2 == by2) return Rcc8::eq;
  const bool a_in_b = ax1 >= bx1 && ax2 <= bx2 && ay1 >= by1 && ay2 <= by2;
  const bool b_in_a = bx1 >= ax1 && bx2 <= ax2 && by1 >= ay1 && by2 <= ay2;
  const bool touching = ax1 == bx1 || ax2 == bx2 || ay1 == by1 || ay2 == by2;
  if (a_in_b) return touching ? Rcc8::tpp : Rcc8::ntpp;
  if (b_in_a) return touching ? Rcc8::tppi : Rcc8::ntppi;
  return Rcc8::po;
}

inline constexpr double kCentroidEpsilon = 1e-6;

/// Direction of `a` relative to `b`. Pure cardinal directions cover the open
/// ±22.5° band around each axis; band edges belong to the diagonals.
inline Cdc compute_cdc(Vec2 a, Vec2 b, double eps = kCentroidEpsilon) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (std::hypot(dx, dy) < eps) throw Indeterminate("centroids coincide");
  static const double k = std::sqrt(2.0) - 1.0;  // tan(22.5 deg)
  const double ax = std::fabs(dx), ay = std::fabs(dy);
  if (ay < k * ax) return dx > 0 ? Cdc::e : Cdc::w;
  if (ax < k * ay) return dy > 0 ? Cdc::n : Cdc::s;
  if (dx > 0) return dy > 0 ? Cdc::ne : Cdc::se;
  return dy > 0 ? Cdc::nw : Cdc::sw;
}

struct WorldObject {
  Symbol id;
  Shape shape = Shape::box;
  Color color = Color::green;
  Vec2 position;
  Vec2 half_extent{3, 3};
  bool held = false;

  Box box() const { return {position, half_extent}; }
  friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

struct SceneSnapshot {
  std::vector<WorldObject> objects;
  Rect table;

  const WorldObject* find(const Symbol& id) const {
    for (const WorldObject& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }

  const WorldObject* held_object() const {
    for (const WorldObject& o : objects)
      if (o.held) return &o;
    return nullptr;
  }

  friend bool operator==(const SceneSnapshot&, const SceneSnapshot&) = default;
};

/// A relation kind from either calculus.
using QsrKind = std::variant<Rcc8, Cdc>;

inline std::string_view to_string(const QsrKind& k) {
  return std::visit([](auto v) { return to_string(v); }, k);
}

inline std::optional<QsrKind> qsr_from_string(std::string_view s) {
  for (Rcc8 r : kRcc8)
    if (to_string(r) == s) return QsrKind{r};
  for (Cdc c : kCdc)
    if (to_string(c) == s) return QsrKind{c};
  return std::nullopt;
}

inline QsrKind converse(const QsrKind& k) {
  return std::visit([](auto v) { return QsrKind{converse(v)}; }, k);
}

struct QSRelation {
  QsrKind kind;
  Symbol a;
  Symbol b;

  Fact to_fact() const {
    return Fact(predicate(std::string(to_string(kind))), {Term(a), Term(b)});
  }
};

/// One CDC and one RCC8 relation per ordered pair of non-held objects. The
/// CDC relation is omitted for coincident centroids.
inline std::vector<QSRelation> extract_relations(const SceneSnapshot& scene) {
  std::vector<QSRelation> out;
  for (const WorldObject& a : scene.objects) {
    if (a.held) continue;
    for (const WorldObject& b : scene.objects) {
      if (b.held || &a == &b) continue;
      out.push_back({compute_rcc8(a.box(), b.box()), a.id, b.id});
      const double d = std::hypot(a.position.x - b.position.x, a.position.y - b.position.y);
      if (d >= kCentroidEpsilon) out.push_back({compute_cdc(a.position, b.position), a.id, b.id});
    }
  }
  return out;
}

/// A relation the target must bear to `anchor` once placed.
struct Constraint {
  QsrKind kind;
  Symbol anchor;
};

inline bool satisfies(const Box& target, const Constraint& c, const SceneSnapshot& scene) {
  const WorldObject* anchor = scene.find(c.anchor);
  if (anchor == nullptr) throw PreconditionViolated("unknown anchor '" + c.anchor.name + "'");
  return std::visit(
      [&](auto k) -> bool {
        using K = decltype(k);
        if constexpr (std::is_same_v<K, Rcc8>) {
          return compute_rcc8(target, anchor->box()) == k;
        } else {
          const double d = std::hypot(target.center.x - anchor->position.x,
                                      target.center.y - anchor->position.y);
          if (d < kCentroidEpsilon) return false;
          return compute_cdc(target.center, anchor->position) == k;
        }
      },
      c.kind);
}

inline constexpr int kSampleBudget = 10000;

/// Seeded rejection sampling of a centre for a box of `half_extent` that
/// satisfies every constraint and lies on the table.
inline Vec2 sample_point(std::span<const Constraint> constraints, Vec2 half_extent,
                         const SceneSnapshot& scene, std::uint64_t seed,
                         int budget = kSampleBudget) {
  for (const Constraint& c : constraints) {
    if (scene.find(c.anchor) == nullptr)
      throw PreconditionViolated("unknown anchor '" + c.anchor.name + "'");
  }
  const Rect& t = scene.table;
  const double x0 = t.xmin + half_extent.x, x1 = t.xmax - half_extent.x;
  const double y0 = t.ymin + half_extent.y, y1 = t.ymax - half_extent.y;
  if (x0 > x1 || y0 > y1) throw Unsatisfiable("object does not fit on the table");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  for (int i = 0; i < budget; ++i) {
    const Box candidate{{ux(rng), uy(rng)}, half_extent};
    bool ok = true;
    for (const Constraint& c : constraints) {
      if (!satisfies(candidate, c, scene)) {
        ok = false;
        break;
      }
    }
    if (ok) return candidate.center;
  }
  throw Unsatisfiable("no point satisfies the constraints within " + std::to_string(budget) +
                      " draws");
}

namespace action {
struct Point {
  Symbol object;
  friend bool operator==(const Point&, const Point&) = default;
};
struct PickUp {
  Symbol object;
  friend bool operator==(const PickUp&, const PickUp&) = default;
};
struct Place {
  Vec2 position;
  friend bool operator==(const Place&, const Place&) = default;
};
}  // namespace action

using Action = std::variant<action::Point, action::PickUp, action::Place>;

inline std::string describe(const Action& a) {
  struct V {
    std::string operator()(const action::Point& p) const { return "point(" + p.object.name + ")"; }
    std::string operator()(const action::PickUp& p) const {
      return "pick-up(" + p.object.name + ")";
    }
    std::string operator()(const action::Place& p) const {
      return "place([" + std::to_string(p.position.x) + ", " + std::to_string(p.position.y) +
             "])";
    }
  };
  return std::visit(V{}, a);
}

/// Pure transition function of the tabletop.
inline SceneSnapshot apply_action(const SceneSnapshot& scene, const Action& act) {
  SceneSnapshot next = scene;
  struct V {
    SceneSnapshot& s;
    void operator()(const action::Point& p) const {
      if (s.find(p.object) == nullptr)
        throw PreconditionViolated("present(" + p.object.name + ")");
    }
    void operator()(const action::PickUp& p) const {
      if (s.held_object() != nullptr) throw PreconditionViolated("hand-empty");
      for (WorldObject& o : s.objects) {
        if (o.id == p.object) {
          o.held = true;
          return;
        }
      }
      throw PreconditionViolated("present(" + p.object.name + ")");
    }
    void operator()(const action::Place& p) const {
      for (WorldObject& o : s.objects) {
        if (!o.held) continue;
        if (!s.table.contains(Box{p.position, o.half_extent}))
          throw PreconditionViolated("in-bounds(" + std::to_string(p.position.x) + ", " +
                                     std::to_string(p.position.y) + ")");
        o.position = p.position;
        o.held = false;
        return;
      }
      throw PreconditionViolated("holding");
    }
  };
  std::visit(V{next}, act);
  return next;
}

/// Replaces each percept by a different one with probability `error_rate`.
template <typename Rng>
SceneSnapshot corrupt_percepts(const SceneSnapshot& scene, double error_rate, Rng& rng) {
  if (error_rate <= 0) return scene;
  SceneSnapshot out = scene;
  std::bernoulli_distribution flip(error_rate);
  for (WorldObject& o : out.objects) {
    if (flip(rng)) {
      std::uniform_int_distribution<int> d(1, static_cast<int>(kColors.size()) - 1);
      o.color = kColors[(static_cast<int>(o.color) + d(rng)) % kColors.size()];
    }
    if (flip(rng)) {
      std::uniform_int_distribution<int> d(1, static_cast<int>(kShapes.size()) - 1);
      o.shape = kShapes[(static_cast<int>(o.shape) + d(rng)) % kShapes.size()];
    }
  }
  return out;
}

}  // namespace ancm
