#pragma once

// Dihomotopy classes of directed paths: the paths a→b modulo elementary
// square flips, together with the extension action (α,β)·[p] = [α*p*β].

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ditop/cubecore.hpp"
#include "ditop/error.hpp"

namespace ditop {

using ClassId = std::uint32_t;

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct EdgeSequenceHash {
  std::size_t operator()(const std::vector<EdgeId>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto e : v) {
      h ^= e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// The dihomotopy classes of all directed paths between one pair of
/// vertices. Paths are stored in lexicographic order; class ids follow the
/// order of their lexicographically least member.
class ClassSet {
 public:
  ClassSet() = default;

  VertexPair pair() const noexcept { return pair_; }
  std::size_t class_count() const noexcept { return representatives_.size(); }
  std::size_t path_count() const noexcept { return paths_.size(); }

  const std::vector<std::vector<EdgeId>>& paths() const noexcept { return paths_; }
  ClassId class_of_path_index(std::size_t i) const { return class_of_path_[i]; }

  /// Least member of class c.
  DPath representative(ClassId c) const {
    if (c >= representatives_.size()) throw ModelError("class id " + std::to_string(c) + " out of range");
    return DPath{pair_.first, pair_.second, paths_[representatives_[c]]};
  }

  const std::vector<EdgeId>& representative_edges(ClassId c) const { return paths_.at(representatives_.at(c)); }

  ClassId class_of(const std::vector<EdgeId>& edges) const {
    auto it = index_.find(edges);
    if (it == index_.end()) throw ModelError("path is not a directed path between the pair");
    return class_of_path_[it->second];
  }

  /// Members of class c in lexicographic order.
  std::vector<std::size_t> members(ClassId c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < paths_.size(); ++i) {
      if (class_of_path_[i] == c) out.push_back(i);
    }
    return out;
  }

 private:
  friend ClassSet trace_classes(const PrecubicalSet&, VertexId, VertexId, std::size_t);

  VertexPair pair_{};
  std::vector<std::vector<EdgeId>> paths_;
  std::vector<ClassId> class_of_path_;
  std::vector<std::size_t> representatives_;
  std::unordered_map<std::vector<EdgeId>, std::size_t, EdgeSequenceHash> index_;
};

inline ClassSet trace_classes(const PrecubicalSet& x, VertexId a, VertexId b, std::size_t cap = kDefaultPathCap) {
  ClassSet cs;
  cs.pair_ = {a, b};
  for_each_dpath(x, a, b, cap, [&](const std::vector<EdgeId>& edges) {
    cs.index_.emplace(edges, cs.paths_.size());
    cs.paths_.push_back(edges);
  });

  DisjointSets sets(cs.paths_.size());
  std::vector<EdgeId> flipped;
  for (std::size_t i = 0; i < cs.paths_.size(); ++i) {
    const auto& p = cs.paths_[i];
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      for (const auto& [e1, e2] : x.flips(p[k], p[k + 1])) {
        flipped = p;
        flipped[k] = e1;
        flipped[k + 1] = e2;
        // Flipped paths only run through the square's corners, so they are
        // always among the enumerated paths.
        sets.unite(i, cs.index_.at(flipped));
      }
    }
  }

  constexpr auto kUnset = static_cast<ClassId>(-1);
  std::vector<ClassId> id_of_root(cs.paths_.size(), kUnset);
  cs.class_of_path_.resize(cs.paths_.size());
  for (std::size_t i = 0; i < cs.paths_.size(); ++i) {
    auto r = sets.find(i);
    if (id_of_root[r] == kUnset) {
      id_of_root[r] = static_cast<ClassId>(cs.representatives_.size());
      cs.representatives_.push_back(i);
    }
    cs.class_of_path_[i] = id_of_root[r];
  }
  return cs;
}

/// A morphism of the extension category from (x,y) to (x',y'): a prefix
/// path x'→x and a suffix path y→y'.
struct ExtensionArrow {
  VertexPair source;
  VertexPair target;
  DPath prefix;
  DPath suffix;
};

inline ExtensionArrow identity_arrow(VertexPair p) {
  return {p, p, constant_path(p.first), constant_path(p.second)};
}

inline void validate_arrow(const PrecubicalSet& x, const ExtensionArrow& arrow) {
  validate_path(x, arrow.prefix);
  validate_path(x, arrow.suffix);
  if (arrow.prefix.start != arrow.target.first || arrow.prefix.finish != arrow.source.first ||
      arrow.suffix.start != arrow.source.second || arrow.suffix.finish != arrow.target.second) {
    throw ModelError("extension arrow endpoints do not match its pairs");
  }
}

/// Arrow applied after `first`: (α2,β2)∘(α1,β1) = (α2*α1, β1*β2).
inline ExtensionArrow compose(const ExtensionArrow& first, const ExtensionArrow& second) {
  if (first.target != second.source) throw ModelError("extension arrows are not composable");
  return {first.source, second.target, concat(second.prefix, first.prefix), concat(first.suffix, second.suffix)};
}

/// Thread-safe memo of class sets per vertex pair for one complex. The
/// complex must outlive the cache.
class TraceSpace {
 public:
  explicit TraceSpace(const PrecubicalSet& x, std::size_t path_cap = kDefaultPathCap) : x_(&x), cap_(path_cap) {}

  const PrecubicalSet& complex() const noexcept { return *x_; }
  std::size_t path_cap() const noexcept { return cap_; }

  const ClassSet& classes(VertexId a, VertexId b) const {
    VertexPair key{a, b};
    {
      std::shared_lock lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return *it->second;
    }
    // Computed outside the lock; a racing duplicate is discarded.
    auto fresh = std::make_shared<const ClassSet>(trace_classes(*x_, a, b, cap_));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = memo_.emplace(key, std::move(fresh));
    return *it->second;
  }

  const ClassSet& classes(VertexPair p) const { return classes(p.first, p.second); }

  std::size_t class_count(VertexPair p) const { return classes(p).class_count(); }

  ClassId class_of(const DPath& p) const {
    validate_path(*x_, p);
    return classes(p.start, p.finish).class_of(p.edges);
  }

  DPath representative(VertexPair p, ClassId c) const { return classes(p).representative(c); }

  ClassId extend_class(const ExtensionArrow& arrow, ClassId c) const {
    validate_arrow(*x_, arrow);
    auto rep = representative(arrow.source, c);
    return class_of(concat(concat(arrow.prefix, rep), arrow.suffix));
  }

  /// Action of prepending edge e (target must be p.first) on classes of p.
  std::vector<ClassId> prefix_action(VertexPair p, EdgeId e) const {
    const auto& ed = x_->edge(e);
    if (ed.target != p.first) throw ModelError("prefix edge does not end at the pair's source");
    const auto& from = classes(p);
    const auto& to = classes(ed.source, p.second);
    std::vector<ClassId> out(from.class_count());
    std::vector<EdgeId> buf;
    for (ClassId c = 0; c < out.size(); ++c) {
      buf.assign(1, e);
      const auto& rep = from.representative_edges(c);
      buf.insert(buf.end(), rep.begin(), rep.end());
      out[c] = to.class_of(buf);
    }
    return out;
  }

  /// Action of appending edge e (source must be p.second) on classes of p.
  std::vector<ClassId> suffix_action(VertexPair p, EdgeId e) const {
    const auto& ed = x_->edge(e);
    if (ed.source != p.second) throw ModelError("suffix edge does not start at the pair's target");
    const auto& from = classes(p);
    const auto& to = classes(p.first, ed.target);
    std::vector<ClassId> out(from.class_count());
    std::vector<EdgeId> buf;
    for (ClassId c = 0; c < out.size(); ++c) {
      buf = from.representative(c).edges;
      buf.push_back(e);
      out[c] = to.class_of(buf);
    }
    return out;
  }

 private:
  const PrecubicalSet* x_;
  std::size_t cap_;
  mutable std::shared_mutex mutex_;
  mutable std::map<VertexPair, std::shared_ptr<const ClassSet>> memo_;
};

/// Worker count for parallel class computation: hardware concurrency,
/// capped by the DITOP_THREADS environment variable when set.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DITOP_THREADS")) {
    char* end = nullptr;
    auto cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return n;
}

/// Runs body(i) for i in [0, n) on worker threads. If any call throws, the
/// exception of the least failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  auto workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (auto i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Fills the memo for every pair, in parallel. On failure the pairs are
/// replayed in order so the reported error is the first one, as in a serial
/// run.
inline void precompute(const TraceSpace& t, const std::vector<VertexPair>& pairs) {
  auto workers = std::min(worker_count(), pairs.size());
  if (workers <= 1) {
    for (const auto& p : pairs) t.classes(p);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (auto i = next++; i < pairs.size() && !failed; i = next++) t.classes(pairs[i]);
      } catch (...) {
        failed = true;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed) {
    for (const auto& p : pairs) t.classes(p);
  }
}

}  // namespace ditop
