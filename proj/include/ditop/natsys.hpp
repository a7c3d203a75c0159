#pragma once

// Natural class systems: the Γ-indexed diagram of trace-class sets with the
// action of elementary extensions, and bisimilarity between two of them.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ditop/cubecore.hpp"
#include "ditop/error.hpp"
#include "ditop/traceclass.hpp"

namespace ditop {

/// Class-level action of an arrow: entry c is the image of class c.
using ClassMap = std::vector<ClassId>;

inline ClassMap identity_map(std::size_t k) {
  ClassMap m(k);
  std::iota(m.begin(), m.end(), ClassId{0});
  return m;
}

/// (second ∘ first)
inline ClassMap then(const ClassMap& first, const ClassMap& second) {
  ClassMap out(first.size());
  for (std::size_t c = 0; c < first.size(); ++c) out[c] = second.at(first[c]);
  return out;
}

inline std::size_t image_size(const ClassMap& m) {
  std::vector<ClassId> v(m);
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

inline bool is_bijection(const ClassMap& m, std::size_t codomain) {
  return m.size() == codomain && image_size(m) == codomain;
}

inline ClassMap inverse(const ClassMap& m) {
  ClassMap out(m.size());
  for (std::size_t c = 0; c < m.size(); ++c) out.at(m[c]) = static_cast<ClassId>(c);
  return out;
}

/// An elementary extension: one prefix edge or one suffix edge.
struct ElementaryArrow {
  std::size_t source = 0;
  std::size_t target = 0;
  bool prefix = true;
  EdgeId edge = 0;
  ClassMap action;
};

/// A morphism of the diagram out of a fixed object, known only through its
/// target and its action; `depth` is the least number of elementary arrows
/// composing to it.
struct Morphism {
  std::size_t target = 0;
  ClassMap action;
  std::size_t depth = 0;
};

class NaturalClassSystem {
 public:
  NaturalClassSystem() = default;
  NaturalClassSystem(const NaturalClassSystem& o)
      : objects_(o.objects_), counts_(o.counts_), arrows_(o.arrows_), out_(o.out_), names_(o.names_) {}
  NaturalClassSystem& operator=(const NaturalClassSystem& o) {
    if (this != &o) {
      NaturalClassSystem tmp(o);
      swap(tmp);
    }
    return *this;
  }
  NaturalClassSystem(NaturalClassSystem&& o) noexcept { swap(o); }
  NaturalClassSystem& operator=(NaturalClassSystem&& o) noexcept {
    swap(o);
    return *this;
  }

  /// Builds a system from explicit data. Arrow actions must be total maps
  /// into the target's classes.
  static NaturalClassSystem create(std::vector<VertexPair> objects, std::vector<std::size_t> counts,
                                   std::vector<ElementaryArrow> arrows, std::vector<std::string> names = {}) {
    if (counts.size() != objects.size()) throw ModelError("one class count per object is required");
    NaturalClassSystem s;
    s.objects_ = std::move(objects);
    s.counts_ = std::move(counts);
    s.arrows_ = std::move(arrows);
    s.names_ = std::move(names);
    if (s.names_.empty()) {
      for (const auto& p : s.objects_) s.names_.push_back(std::to_string(p.first) + "->" + std::to_string(p.second));
    }
    s.out_.assign(s.objects_.size(), {});
    for (std::size_t i = 0; i < s.arrows_.size(); ++i) {
      const auto& a = s.arrows_[i];
      if (a.source >= s.objects_.size() || a.target >= s.objects_.size()) throw ModelError("arrow to unknown object");
      if (a.action.size() != s.counts_[a.source]) throw ModelError("arrow action is not total");
      for (auto c : a.action)
        if (c >= s.counts_[a.target]) throw ModelError("arrow action leaves the target's classes");
      s.out_[a.source].push_back(i);
    }
    return s;
  }

  std::size_t object_count() const noexcept { return objects_.size(); }
  const std::vector<VertexPair>& objects() const noexcept { return objects_; }
  VertexPair object(std::size_t i) const { return objects_.at(i); }
  const std::string& object_name(std::size_t i) const { return names_.at(i); }
  std::size_t class_count(std::size_t i) const { return counts_.at(i); }
  const std::vector<ElementaryArrow>& arrows() const noexcept { return arrows_; }
  const std::vector<std::size_t>& out_arrows(std::size_t i) const { return out_.at(i); }

  std::optional<std::size_t> index_of(VertexPair p) const {
    auto it = std::lower_bound(objects_.begin(), objects_.end(), p);
    if (it == objects_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - objects_.begin());
  }

  /// Every morphism out of object i, the identity included, sorted by
  /// (target, action). Computed once per object by breadth-first
  /// composition of elementary arrows.
  const std::vector<Morphism>& closure(std::size_t i) const {
    {
      std::lock_guard lock(closure_mutex_);
      if (closures_.size() != objects_.size()) closures_.assign(objects_.size(), nullptr);
      if (closures_.at(i)) return *closures_[i];
    }
    auto fresh = std::make_shared<const std::vector<Morphism>>(compute_closure(i));
    std::lock_guard lock(closure_mutex_);
    if (!closures_[i]) closures_[i] = std::move(fresh);
    return *closures_[i];
  }

  /// Morphisms out of i landing on `target`, as a sub-range of closure(i).
  std::pair<const Morphism*, const Morphism*> closure_to(std::size_t i, std::size_t target) const {
    const auto& c = closure(i);
    auto lo = std::lower_bound(c.begin(), c.end(), target,
                               [](const Morphism& m, std::size_t t) { return m.target < t; });
    auto hi = std::upper_bound(lo, c.end(), target, [](std::size_t t, const Morphism& m) { return t < m.target; });
    return {c.data() + (lo - c.begin()), c.data() + (hi - c.begin())};
  }

 private:
  void swap(NaturalClassSystem& o) noexcept {
    objects_.swap(o.objects_);
    counts_.swap(o.counts_);
    arrows_.swap(o.arrows_);
    out_.swap(o.out_);
    names_.swap(o.names_);
    closures_.swap(o.closures_);
  }

  std::vector<Morphism> compute_closure(std::size_t i) const {
    std::set<std::pair<std::size_t, ClassMap>> seen;
    std::vector<Morphism> out;
    std::deque<Morphism> queue;
    Morphism id{i, identity_map(counts_[i]), 0};
    seen.insert({i, id.action});
    queue.push_back(id);
    while (!queue.empty()) {
      auto m = std::move(queue.front());
      queue.pop_front();
      for (auto ai : out_[m.target]) {
        const auto& a = arrows_[ai];
        Morphism next{a.target, then(m.action, a.action), m.depth + 1};
        if (seen.insert({next.target, next.action}).second) queue.push_back(next);
      }
      out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const Morphism& a, const Morphism& b) {
      return std::tie(a.target, a.action) < std::tie(b.target, b.action);
    });
    return out;
  }

  std::vector<VertexPair> objects_;
  std::vector<std::size_t> counts_;
  std::vector<ElementaryArrow> arrows_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::string> names_;
  mutable std::mutex closure_mutex_;
  mutable std::vector<std::shared_ptr<const std::vector<Morphism>>> closures_;
};

/// The system of a model: objects Γ_X, values the trace-class sets, arrows
/// all one-edge prefix and suffix extensions.
inline NaturalClassSystem build_natural_system(const TraceSpace& t) {
  const auto& x = t.complex();
  auto objects = gamma(x).pairs();
  precompute(t, objects);
  std::vector<std::size_t> counts;
  std::vector<std::string> names;
  for (const auto& p : objects) {
    counts.push_back(t.class_count(p));
    names.push_back(x.vertex_name(p.first) + "->" + x.vertex_name(p.second));
  }
  auto index = [&](VertexPair p) {
    return static_cast<std::size_t>(std::lower_bound(objects.begin(), objects.end(), p) - objects.begin());
  };
  std::vector<ElementaryArrow> arrows;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    auto p = objects[i];
    for (auto e : x.in_edges(p.first)) {
      arrows.push_back({i, index({x.edge(e).source, p.second}), true, e, t.prefix_action(p, e)});
    }
    for (auto e : x.out_edges(p.second)) {
      arrows.push_back({i, index({p.first, x.edge(e).target}), false, e, t.suffix_action(p, e)});
    }
  }
  return NaturalClassSystem::create(std::move(objects), std::move(counts), std::move(arrows), std::move(names));
}

inline NaturalClassSystem build_natural_system(const PrecubicalSet& x, std::size_t path_cap = kDefaultPathCap) {
  TraceSpace t(x, path_cap);
  return build_natural_system(t);
}

/// The one-object, one-class system with no arrows.
inline NaturalClassSystem trivial_system() {
  return NaturalClassSystem::create({{0, 0}}, {1}, {}, {"*"});
}

/// (object of S, bijection from its classes to those of the T object,
/// object of T).
struct BisimTriple {
  std::size_t s = 0;
  ClassMap bijection;
  std::size_t t = 0;
  auto operator<=>(const BisimTriple&) const = default;
};

struct BisimResult {
  bool bisimilar = false;
  /// The greatest bisimulation found (empty when there is none).
  std::vector<BisimTriple> relation;
  /// First S object left uncovered, by elimination order; set only when S
  /// is not covered.
  std::optional<std::size_t> counterexample_s;
  /// First T object left uncovered, when S is covered but T is not.
  std::optional<std::size_t> counterexample_t;
  std::vector<std::size_t> uncovered_s;
  std::vector<std::size_t> uncovered_t;
};

inline constexpr std::size_t kBijectionCap = 6;

namespace detail {

inline std::vector<ClassMap> all_permutations(std::size_t k) {
  std::vector<ClassMap> out;
  auto p = identity_map(k);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Colour refinement over the disjoint union of S and T. An object's colour
// is its class count together with the set of (target colour, image size)
// over all its morphisms. Objects related by a bisimulation always share a
// colour. Returns final colours and, per object, the first round in which
// no object of the other side shared its colour.
struct Colouring {
  std::vector<std::size_t> s, t;
  std::vector<std::size_t> s_stage, t_stage;
  std::size_t rounds = 0;
};

inline Colouring refine_colours(const NaturalClassSystem& a, const NaturalClassSystem& b) {
  constexpr auto kNever = std::numeric_limits<std::size_t>::max();
  Colouring c;
  c.s.resize(a.object_count());
  c.t.resize(b.object_count());
  c.s_stage.assign(a.object_count(), kNever);
  c.t_stage.assign(b.object_count(), kNever);
  for (std::size_t i = 0; i < a.object_count(); ++i) c.s[i] = a.class_count(i);
  for (std::size_t i = 0; i < b.object_count(); ++i) c.t[i] = b.class_count(i);

  auto mark = [&](std::size_t round) {
    std::set<std::size_t> sc(c.s.begin(), c.s.end()), tc(c.t.begin(), c.t.end());
    for (std::size_t i = 0; i < c.s.size(); ++i)
      if (c.s_stage[i] == kNever && !tc.count(c.s[i])) c.s_stage[i] = round;
    for (std::size_t i = 0; i < c.t.size(); ++i)
      if (c.t_stage[i] == kNever && !sc.count(c.t[i])) c.t_stage[i] = round;
  };
  auto distinct = [&] {
    std::set<std::size_t> all(c.s.begin(), c.s.end());
    all.insert(c.t.begin(), c.t.end());
    return all.size();
  };

  mark(0);
  std::size_t classes = distinct();
  using Signature = std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>;
  auto signature = [](const NaturalClassSystem& sys, const std::vector<std::size_t>& colour, std::size_t i) {
    std::vector<std::pair<std::size_t, std::size_t>> succ;
    for (const auto& m : sys.closure(i)) succ.emplace_back(colour[m.target], image_size(m.action));
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    return Signature{colour[i], std::move(succ)};
  };
  while (true) {
    ++c.rounds;
    std::map<Signature, std::size_t> ids;
    std::vector<Signature> ss, ts;
    for (std::size_t i = 0; i < a.object_count(); ++i) ss.push_back(signature(a, c.s, i));
    for (std::size_t i = 0; i < b.object_count(); ++i) ts.push_back(signature(b, c.t, i));
    for (const auto& sig : ss) ids.emplace(sig, ids.size());
    for (const auto& sig : ts) ids.emplace(sig, ids.size());
    for (std::size_t i = 0; i < ss.size(); ++i) c.s[i] = ids.at(ss[i]);
    for (std::size_t i = 0; i < ts.size(); ++i) c.t[i] = ids.at(ts[i]);
    mark(c.rounds);
    auto now = distinct();
    if (now == classes) break;
    classes = now;
  }
  return c;
}

using Relation = std::map<std::pair<std::size_t, std::size_t>, std::vector<ClassMap>>;

// Whether some bijection π' at (s', t') satisfies π' ∘ A = B ∘ π.
inline bool has_successor(const Relation& r, std::size_t s2, std::size_t t2, const ClassMap& a, const ClassMap& b,
                          const ClassMap& pi) {
  auto it = r.find({s2, t2});
  if (it == r.end()) return false;
  for (const auto& pi2 : it->second) {
    bool ok = true;
    for (std::size_t c = 0; c < pi.size() && ok; ++c) ok = pi2[a[c]] == b[pi[c]];
    if (ok) return true;
  }
  return false;
}

// Transfer in both directions: every elementary arrow on either side is
// answered by some morphism on the other side, landing in the relation.
inline bool transfers(const NaturalClassSystem& a, const NaturalClassSystem& b, const Relation& r, std::size_t s,
                      const ClassMap& pi, std::size_t t) {
  for (auto ai : a.out_arrows(s)) {
    const auto& arrow = a.arrows()[ai];
    bool matched = false;
    for (const auto& m : b.closure(t)) {
      if (has_successor(r, arrow.target, m.target, arrow.action, m.action, pi)) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  for (auto bi : b.out_arrows(t)) {
    const auto& arrow = b.arrows()[bi];
    bool matched = false;
    for (const auto& m : a.closure(s)) {
      if (has_successor(r, m.target, arrow.target, m.action, arrow.action, pi)) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

}  // namespace detail

/// Decides bisimilarity as a greatest fixed point over triples, after
/// colour refinement has discarded pairs that no bisimulation relates.
inline BisimResult bisimilar(const NaturalClassSystem& a, const NaturalClassSystem& b,
                             std::size_t bijection_cap = kBijectionCap) {
  constexpr auto kNever = std::numeric_limits<std::size_t>::max();
  auto colours = detail::refine_colours(a, b);

  std::map<std::size_t, std::vector<std::size_t>> t_by_colour;
  for (std::size_t j = 0; j < b.object_count(); ++j) t_by_colour[colours.t[j]].push_back(j);

  std::map<std::size_t, std::vector<ClassMap>> perms;
  detail::Relation r;
  for (std::size_t i = 0; i < a.object_count(); ++i) {
    auto it = t_by_colour.find(colours.s[i]);
    if (it == t_by_colour.end()) continue;
    auto k = a.class_count(i);
    if (k > bijection_cap) {
      throw CapExceeded("class set of size " + std::to_string(k) + " at " + a.object_name(i) +
                        " exceeds the bijection cap of " + std::to_string(bijection_cap));
    }
    if (!perms.count(k)) perms[k] = detail::all_permutations(k);
    for (auto j : it->second) r[{i, j}] = perms[k];
  }

  std::vector<std::size_t> s_stage = colours.s_stage, t_stage = colours.t_stage;
  auto record = [&](std::size_t stage) {
    std::vector<bool> s_cov(a.object_count(), false), t_cov(b.object_count(), false);
    for (const auto& [key, ps] : r) {
      if (ps.empty()) continue;
      s_cov[key.first] = true;
      t_cov[key.second] = true;
    }
    for (std::size_t i = 0; i < s_cov.size(); ++i)
      if (!s_cov[i] && s_stage[i] == kNever) s_stage[i] = stage;
    for (std::size_t j = 0; j < t_cov.size(); ++j)
      if (!t_cov[j] && t_stage[j] == kNever) t_stage[j] = stage;
  };

  std::size_t sweep = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++sweep;
    for (auto& [key, ps] : r) {
      std::vector<ClassMap> kept;
      for (const auto& pi : ps)
        if (detail::transfers(a, b, r, key.first, pi, key.second)) kept.push_back(pi);
      if (kept.size() != ps.size()) {
        ps = std::move(kept);
        changed = true;
      }
    }
    record(colours.rounds + sweep);
  }

  BisimResult out;
  for (const auto& [key, ps] : r)
    for (const auto& pi : ps) out.relation.push_back({key.first, pi, key.second});
  std::vector<bool> s_cov(a.object_count(), false), t_cov(b.object_count(), false);
  for (const auto& tr : out.relation) {
    s_cov[tr.s] = true;
    t_cov[tr.t] = true;
  }
  for (std::size_t i = 0; i < s_cov.size(); ++i)
    if (!s_cov[i]) out.uncovered_s.push_back(i);
  for (std::size_t j = 0; j < t_cov.size(); ++j)
    if (!t_cov[j]) out.uncovered_t.push_back(j);
  auto first_eliminated = [](const std::vector<std::size_t>& uncovered, const std::vector<std::size_t>& stage) {
    return *std::min_element(uncovered.begin(), uncovered.end(), [&](std::size_t x, std::size_t y) {
      return std::pair{stage[x], x} < std::pair{stage[y], y};
    });
  };
  if (!out.uncovered_s.empty()) {
    out.counterexample_s = first_eliminated(out.uncovered_s, s_stage);
  } else if (!out.uncovered_t.empty()) {
    out.counterexample_t = first_eliminated(out.uncovered_t, t_stage);
  }
  out.bisimilar = out.uncovered_s.empty() && out.uncovered_t.empty();
  if (!out.bisimilar) out.relation.clear();
  return out;
}

/// Checks that an explicit relation covers both systems and transfers.
inline bool is_bisimulation(const NaturalClassSystem& a, const NaturalClassSystem& b,
                            const std::vector<BisimTriple>& relation) {
  detail::Relation r;
  std::vector<bool> s_cov(a.object_count(), false), t_cov(b.object_count(), false);
  for (const auto& tr : relation) {
    if (tr.s >= a.object_count() || tr.t >= b.object_count()) return false;
    if (tr.bijection.size() != a.class_count(tr.s) || !is_bijection(tr.bijection, b.class_count(tr.t))) return false;
    r[{tr.s, tr.t}].push_back(tr.bijection);
    s_cov[tr.s] = true;
    t_cov[tr.t] = true;
  }
  if (std::find(s_cov.begin(), s_cov.end(), false) != s_cov.end()) return false;
  if (std::find(t_cov.begin(), t_cov.end(), false) != t_cov.end()) return false;
  for (const auto& tr : relation)
    if (!detail::transfers(a, b, r, tr.s, tr.bijection, tr.t)) return false;
  return true;
}

/// Swaps the sides of a relation, inverting every bijection.
inline std::vector<BisimTriple> converse(const std::vector<BisimTriple>& relation) {
  std::vector<BisimTriple> out;
  for (const auto& tr : relation) out.push_back({tr.t, inverse(tr.bijection), tr.s});
  std::sort(out.begin(), out.end());
  return out;
}

inline bool is_weakly_dicontractible(const PrecubicalSet& x, std::size_t path_cap = kDefaultPathCap) {
  return bisimilar(build_natural_system(x, path_cap), trivial_system()).bisimilar;
}

}  // namespace ditop
