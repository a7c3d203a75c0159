#pragma once

// Directed topological complexity of a discrete model: the least number of
// parts of Γ_X each carrying a choice of class per pair that is compatible
// with every elementary extension inside the part.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ditop/cubecore.hpp"
#include "ditop/error.hpp"
#include "ditop/natsys.hpp"
#include "ditop/traceclass.hpp"

namespace ditop {

struct SectionPartition {
  std::vector<std::map<VertexPair, ClassId>> parts;

  std::size_t size() const noexcept { return parts.size(); }
  bool operator==(const SectionPartition&) const = default;
};

struct PartitionReport {
  bool valid = false;
  std::string violation;  // the first one found
};

namespace detail {

inline std::string object_text(const NaturalClassSystem& n, VertexPair p) {
  auto i = n.index_of(p);
  return i ? n.object_name(*i) : std::to_string(p.first) + "->" + std::to_string(p.second);
}

}  // namespace detail

/// Checks, in order: every chosen pair is reachable with a genuine class, no
/// part is empty, parts are disjoint, they cover Γ, and every elementary
/// extension inside a part carries the chosen class to the chosen class.
inline PartitionReport verify_partition(const NaturalClassSystem& n, const SectionPartition& sp) {
  auto fail = [](std::string m) { return PartitionReport{false, std::move(m)}; };
  std::vector<std::optional<std::size_t>> part_of(n.object_count());
  std::vector<ClassId> chosen(n.object_count(), 0);
  for (std::size_t k = 0; k < sp.parts.size(); ++k) {
    if (sp.parts[k].empty()) return fail("part " + std::to_string(k) + " is empty");
    for (const auto& [p, c] : sp.parts[k]) {
      auto i = n.index_of(p);
      if (!i) return fail("part " + std::to_string(k) + " holds the unreachable pair " + detail::object_text(n, p));
      if (c >= n.class_count(*i)) {
        return fail("part " + std::to_string(k) + " chooses class " + std::to_string(c) + " at " + n.object_name(*i) +
                    ", which has " + std::to_string(n.class_count(*i)));
      }
      if (part_of[*i]) {
        return fail("pair " + n.object_name(*i) + " lies in parts " + std::to_string(*part_of[*i]) + " and " +
                    std::to_string(k));
      }
      part_of[*i] = k;
      chosen[*i] = c;
    }
  }
  for (std::size_t i = 0; i < n.object_count(); ++i) {
    if (!part_of[i]) return fail("pair " + n.object_name(i) + " is in no part");
  }
  for (const auto& a : n.arrows()) {
    if (*part_of[a.source] != *part_of[a.target]) continue;
    auto image = a.action[chosen[a.source]];
    if (image != chosen[a.target]) {
      return fail("part " + std::to_string(*part_of[a.source]) + ": " + (a.prefix ? "prefix" : "suffix") + " edge " +
                  std::to_string(a.edge) + " sends class " + std::to_string(chosen[a.source]) + " of " +
                  n.object_name(a.source) + " to class " + std::to_string(image) + " of " + n.object_name(a.target) +
                  ", but class " + std::to_string(chosen[a.target]) + " is chosen");
    }
  }
  return {true, {}};
}

inline PartitionReport verify_partition(const PrecubicalSet& x, const SectionPartition& sp) {
  return verify_partition(build_natural_system(x), sp);
}

struct DitcResult {
  std::size_t n = 0;
  SectionPartition partition;
  /// n is the minimum; false when the search budget ran out first.
  bool optimal = false;
  std::size_t lower_bound = 0;
  std::size_t nodes = 0;
};

struct DitcOptions {
  std::size_t cap = 6;
  std::size_t max_pairs = 2500;
  std::size_t node_budget = 2'000'000;
};

namespace detail {

struct Link {
  std::size_t other;
  const ClassMap* action;
  bool outgoing;
};

class PartitionProblem {
 public:
  explicit PartitionProblem(const NaturalClassSystem& n) : n_(&n), links_(n.object_count()) {
    for (const auto& a : n.arrows()) {
      if (a.source == a.target) continue;
      links_[a.source].push_back({a.target, &a.action, true});
      links_[a.target].push_back({a.source, &a.action, false});
    }
    order_.resize(n.object_count());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return n.class_count(a) > n.class_count(b); });
    for (std::size_t i = 0; i < n.object_count(); ++i) max_classes_ = std::max(max_classes_, n.class_count(i));
  }

  std::size_t size() const noexcept { return links_.size(); }
  std::size_t classes(std::size_t i) const { return n_->class_count(i); }
  const std::vector<Link>& links(std::size_t i) const { return links_[i]; }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  std::size_t max_classes() const noexcept { return max_classes_; }

  /// Whether class cp at p and cq at q agree along the link from p.
  static bool agrees(const Link& l, ClassId cp, ClassId cq) {
    return l.outgoing ? (*l.action)[cp] == cq : (*l.action)[cq] == cp;
  }

  SectionPartition to_partition(const std::vector<std::size_t>& part, const std::vector<ClassId>& cls,
                                std::size_t parts) const {
    SectionPartition sp;
    sp.parts.resize(parts);
    for (std::size_t i = 0; i < size(); ++i) sp.parts[part[i]].emplace(n_->object(i), cls[i]);
    return sp;
  }

 private:
  const NaturalClassSystem* n_;
  std::vector<std::vector<Link>> links_;
  std::vector<std::size_t> order_;
  std::size_t max_classes_ = 1;
};

/// Largest compatible region containing `seed` with class c, grown along
/// links first and then over the rest in order. Rejected pairs stay
/// rejected, as adding pairs only adds constraints.
inline std::vector<std::pair<std::size_t, ClassId>> grow_region(const PartitionProblem& pb,
                                                                const std::vector<bool>& remaining, std::size_t seed,
                                                                ClassId c) {
  constexpr auto kOut = static_cast<ClassId>(-1);
  std::vector<ClassId> chosen(pb.size(), kOut);
  std::vector<bool> seen(pb.size(), false);
  std::vector<std::pair<std::size_t, ClassId>> region;
  auto try_add = [&](std::size_t p) {
    for (ClassId cp = 0; cp < pb.classes(p); ++cp) {
      bool ok = true;
      for (const auto& l : pb.links(p)) {
        if (chosen[l.other] != kOut && !PartitionProblem::agrees(l, cp, chosen[l.other])) {
          ok = false;
          break;
        }
      }
      if (ok) {
        chosen[p] = cp;
        region.emplace_back(p, cp);
        return true;
      }
    }
    return false;
  };
  chosen[seed] = c;
  region.emplace_back(seed, c);
  seen[seed] = true;
  std::deque<std::size_t> queue{seed};
  while (!queue.empty()) {
    auto p = queue.front();
    queue.pop_front();
    for (const auto& l : pb.links(p)) {
      auto q = l.other;
      if (seen[q] || !remaining[q]) continue;
      seen[q] = true;
      if (try_add(q)) queue.push_back(q);
    }
  }
  for (auto p : pb.order()) {
    if (!seen[p] && remaining[p]) {
      seen[p] = true;
      try_add(p);
    }
  }
  return region;
}

inline DitcResult greedy_partition(const PartitionProblem& pb) {
  std::vector<bool> remaining(pb.size(), true);
  std::vector<std::size_t> part(pb.size(), 0);
  std::vector<ClassId> cls(pb.size(), 0);
  std::size_t parts = 0, left = pb.size();
  while (left > 0) {
    std::size_t seed = *std::find_if(pb.order().begin(), pb.order().end(), [&](std::size_t p) { return remaining[p]; });
    std::vector<std::pair<std::size_t, ClassId>> best;
    for (ClassId c = 0; c < pb.classes(seed); ++c) {
      auto region = grow_region(pb, remaining, seed, c);
      if (region.size() > best.size()) best = std::move(region);
    }
    for (auto [p, c] : best) {
      remaining[p] = false;
      part[p] = parts;
      cls[p] = c;
    }
    left -= best.size();
    ++parts;
  }
  DitcResult r;
  r.n = parts;
  r.partition = pb.to_partition(part, cls, parts);
  return r;
}

enum class SearchOutcome { Found, Infeasible, Budget };

/// Depth-first search for a partition into at most `limit` parts with
/// forward checking: blocked_[p][k][c] counts assigned neighbours in part k
/// that rule out class c at p.
class PartitionSearch {
 public:
  PartitionSearch(const PartitionProblem& pb, std::size_t limit, std::size_t budget)
      : pb_(pb),
        limit_(limit),
        budget_(budget),
        stride_(pb.max_classes()),
        blocked_(pb.size() * limit * pb.max_classes(), 0),
        part_(pb.size(), kNone),
        cls_(pb.size(), 0) {}

  SearchOutcome run() {
    if (pb_.size() == 0) return SearchOutcome::Found;
    auto r = dfs(0, 0);
    if (r) return SearchOutcome::Found;
    return exhausted_ ? SearchOutcome::Budget : SearchOutcome::Infeasible;
  }

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t parts_used() const noexcept { return used_at_success_; }
  const std::vector<std::size_t>& parts() const noexcept { return part_; }
  const std::vector<ClassId>& classes() const noexcept { return cls_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::uint16_t& blocked(std::size_t p, std::size_t k, ClassId c) {
    return blocked_[(p * limit_ + k) * stride_ + c];
  }

  bool has_option(std::size_t q, std::size_t used) {
    if (used < limit_) return true;
    for (std::size_t k = 0; k < limit_; ++k)
      for (ClassId c = 0; c < pb_.classes(q); ++c)
        if (blocked(q, k, c) == 0) return true;
    return false;
  }

  void mark(std::size_t p, std::size_t k, ClassId c, int delta) {
    for (const auto& l : pb_.links(p)) {
      auto q = l.other;
      if (part_[q] != kNone) continue;
      for (ClassId cq = 0; cq < pb_.classes(q); ++cq) {
        if (!PartitionProblem::agrees(l, c, cq)) blocked(q, k, cq) = static_cast<std::uint16_t>(blocked(q, k, cq) + delta);
      }
    }
  }

  bool dfs(std::size_t pos, std::size_t used) {
    if (pos == pb_.size()) {
      used_at_success_ = used;
      return true;
    }
    auto p = pb_.order()[pos];
    auto top = std::min(used + 1, limit_);
    for (std::size_t k = 0; k < top; ++k) {
      for (ClassId c = 0; c < pb_.classes(p); ++c) {
        if (blocked(p, k, c)) continue;
        if (++nodes_ > budget_) {
          exhausted_ = true;
          return false;
        }
        part_[p] = k;
        cls_[p] = c;
        mark(p, k, c, +1);
        auto now = std::max(used, k + 1);
        bool alive = true;
        for (const auto& l : pb_.links(p)) {
          if (part_[l.other] == kNone && !has_option(l.other, now)) {
            alive = false;
            break;
          }
        }
        if (alive && dfs(pos + 1, now)) return true;
        mark(p, k, c, -1);
        part_[p] = kNone;
        if (exhausted_) return false;
      }
    }
    return false;
  }

  const PartitionProblem& pb_;
  std::size_t limit_;
  std::size_t budget_;
  std::size_t stride_;
  std::vector<std::uint16_t> blocked_;
  std::vector<std::size_t> part_;
  std::vector<ClassId> cls_;
  std::size_t nodes_ = 0;
  std::size_t used_at_success_ = 0;
  bool exhausted_ = false;
};

inline std::size_t trivial_lower_bound(const NaturalClassSystem& n) {
  if (n.object_count() == 0) return 0;
  for (std::size_t i = 0; i < n.object_count(); ++i)
    if (n.class_count(i) > 1) return 2;
  return 1;
}

}  // namespace detail

/// Greedy upper bound: repeatedly takes the largest compatible region around
/// the most constrained remaining pair.
inline DitcResult ditc_upper(const NaturalClassSystem& n) {
  detail::PartitionProblem pb(n);
  auto r = detail::greedy_partition(pb);
  r.lower_bound = detail::trivial_lower_bound(n);
  r.optimal = r.n == r.lower_bound;
  return r;
}

inline DitcResult ditc_upper(const PrecubicalSet& x, std::size_t path_cap = kDefaultPathCap) {
  return ditc_upper(build_natural_system(x, path_cap));
}

namespace detail {

/// Decision searches for n = lower, lower+1, ... below the greedy bound.
inline DitcResult exact_search(const PartitionProblem& pb, std::size_t lower, const DitcOptions& opt) {
  auto best = greedy_partition(pb);
  std::size_t nodes = 0;
  bool exhausted = false;
  for (auto k = lower; k < best.n && k <= opt.cap; ++k) {
    PartitionSearch search(pb, k, opt.node_budget > nodes ? opt.node_budget - nodes : 0);
    auto outcome = search.run();
    nodes += search.nodes();
    if (outcome == SearchOutcome::Found) {
      best.n = search.parts_used();
      best.partition = pb.to_partition(search.parts(), search.classes(), best.n);
      break;
    }
    if (outcome == SearchOutcome::Budget) {
      exhausted = true;
      break;
    }
    lower = k + 1;
  }
  if (!exhausted) lower = best.n;
  if (lower > opt.cap) {
    throw CapExceeded("diTC exceeds the cap of " + std::to_string(opt.cap) + " parts");
  }
  best.lower_bound = lower;
  best.optimal = lower == best.n;
  best.nodes = nodes;
  if (best.n > opt.cap) {
    throw CapExceeded("no partition within " + std::to_string(opt.cap) + " parts was found; best has " +
                      std::to_string(best.n));
  }
  return best;
}

}  // namespace detail

/// Least number of parts, by decision searches from the lower bound up to
/// the greedy bound. A pair with two classes rules out a single part, since
/// following two inequivalent dipaths from the constant pair forces both.
inline DitcResult ditc_exact(const NaturalClassSystem& n, const DitcOptions& opt = {}) {
  if (n.object_count() > opt.max_pairs) {
    throw CapExceeded("exact diTC search is limited to " + std::to_string(opt.max_pairs) + " pairs, model has " +
                      std::to_string(n.object_count()));
  }
  return detail::exact_search(detail::PartitionProblem(n), detail::trivial_lower_bound(n), opt);
}

inline DitcResult ditc_exact(const PrecubicalSet& x, const DitcOptions& opt = {}) {
  TraceSpace t(x);
  return ditc_exact(build_natural_system(t), opt);
}

}  // namespace ditop
