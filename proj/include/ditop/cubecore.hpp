#pragma once

// Finite precubical models of directed spaces: vertices, directed edges and
// 2-squares. Monotone edge paths play the role of the directed paths of the
// space; higher cells are never stored since dihomotopy of edge paths is
// generated by squares alone.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ditop/error.hpp"

namespace ditop {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using SquareId = std::uint32_t;

struct Edge {
  VertexId source;
  VertexId target;
  bool operator==(const Edge&) const = default;
};

/// A 2-cell given by its boundary. The two boundary routes are
/// bottom*right and left*top, both from the lower to the upper corner.
struct Square {
  EdgeId bottom;
  EdgeId right;
  EdgeId left;
  EdgeId top;
  bool operator==(const Square&) const = default;
};

struct VertexPair {
  VertexId first;
  VertexId second;
  auto operator<=>(const VertexPair&) const = default;
};

/// Optional vertex annotations: lattice coordinates for grid models and
/// symbolic names (e.g. "alpha") usable on the command line.
struct Labels {
  std::vector<std::vector<int>> coordinates;
  std::map<std::string, VertexId> names;
  bool operator==(const Labels&) const = default;
};

/// Fixed-size bitset over vertex ids.
class BitSet {
 public:
  BitSet() = default;
  explicit BitSet(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  BitSet& operator|=(const BitSet& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    return *this;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool all() const { return count() == size_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Immutable, validated precubical set whose edge digraph is acyclic.
class PrecubicalSet {
 public:
  PrecubicalSet() = default;

  /// Validates and builds. Throws ModelError on dangling ids, self-loops,
  /// non-commuting squares or directed cycles.
  static PrecubicalSet create(std::size_t vertex_count, std::vector<Edge> edges,
                              std::vector<Square> squares, Labels labels = {}) {
    PrecubicalSet x;
    if (vertex_count > std::numeric_limits<VertexId>::max()) {
      throw ModelError("too many vertices");
    }
    x.vertex_count_ = vertex_count;
    x.edges_ = std::move(edges);
    x.squares_ = std::move(squares);
    x.labels_ = std::move(labels);
    x.validate_and_index();
    return x;
  }

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t square_count() const noexcept { return squares_.size(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Square>& squares() const noexcept { return squares_; }
  const Labels& labels() const noexcept { return labels_; }

  const Edge& edge(EdgeId e) const {
    if (e >= edges_.size()) throw ModelError("unknown edge id " + std::to_string(e));
    return edges_[e];
  }
  const Square& square(SquareId s) const {
    if (s >= squares_.size()) throw ModelError("unknown square id " + std::to_string(s));
    return squares_[s];
  }

  bool has_vertex(VertexId v) const noexcept { return v < vertex_count_; }
  void require_vertex(VertexId v) const {
    if (!has_vertex(v)) throw ModelError("unknown vertex id " + std::to_string(v));
  }

  /// Outgoing / incoming edge ids of v, ascending.
  std::span<const EdgeId> out_edges(VertexId v) const {
    require_vertex(v);
    return {out_.data() + out_offset_[v], out_.data() + out_offset_[v + 1]};
  }
  std::span<const EdgeId> in_edges(VertexId v) const {
    require_vertex(v);
    return {in_.data() + in_offset_[v], in_.data() + in_offset_[v + 1]};
  }

  /// Vertices reachable from v by a monotone edge path (v included).
  const BitSet& reachable_from(VertexId v) const {
    require_vertex(v);
    return reach_[v];
  }

  bool reachable(VertexId a, VertexId b) const {
    require_vertex(a);
    require_vertex(b);
    return reach_[a].test(b);
  }

  const std::vector<VertexId>& topological_order() const noexcept { return topo_; }

  /// Edge pairs (e1,e2) that are one boundary route of a square, mapped to
  /// the opposite route(s). Replacing one by the other is an elementary flip.
  std::span<const std::pair<EdgeId, EdgeId>> flips(EdgeId first, EdgeId second) const {
    auto it = flips_.find(key(first, second));
    if (it == flips_.end()) return {};
    return it->second;
  }

  /// Resolves a vertex designator: a numeric id, a label name, or
  /// comma-separated lattice coordinates such as "2,2" or "(2,2)".
  VertexId find_vertex(std::string_view text) const {
    std::string s(text);
    if (auto it = labels_.names.find(s); it != labels_.names.end()) return it->second;
    std::string stripped;
    for (char c : s) {
      if (c != '(' && c != ')' && c != ' ') stripped.push_back(c);
    }
    if (stripped.empty()) throw ModelError("empty vertex designator");
    if (stripped.find(',') == std::string::npos) {
      std::size_t pos = 0;
      unsigned long long id = 0;
      try {
        id = std::stoull(stripped, &pos);
      } catch (const std::exception&) {
        throw ModelError("unknown vertex '" + s + "'");
      }
      if (pos != stripped.size() || id >= vertex_count_) {
        throw ModelError("unknown vertex '" + s + "'");
      }
      return static_cast<VertexId>(id);
    }
    std::vector<int> coords;
    std::size_t start = 0;
    while (start <= stripped.size()) {
      auto comma = stripped.find(',', start);
      auto piece = stripped.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        std::size_t pos = 0;
        coords.push_back(std::stoi(piece, &pos));
        if (pos != piece.size()) throw ModelError("bad coordinate");
      } catch (const std::exception&) {
        throw ModelError("bad coordinates '" + s + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    for (std::size_t v = 0; v < labels_.coordinates.size(); ++v) {
      if (labels_.coordinates[v] == coords) return static_cast<VertexId>(v);
    }
    throw ModelError("no vertex at coordinates '" + s + "'");
  }

  /// Human-readable vertex name: coordinates when known, else the id.
  std::string vertex_name(VertexId v) const {
    if (v < labels_.coordinates.size()) {
      std::string out = "(";
      const auto& c = labels_.coordinates[v];
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(c[i]);
      }
      return out + ")";
    }
    return std::to_string(v);
  }

 private:
  static std::uint64_t key(EdgeId a, EdgeId b) { return (std::uint64_t{a} << 32) | b; }

  void validate_and_index() {
    const auto n = vertex_count_;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& ed = edges_[e];
      if (ed.source >= n || ed.target >= n) {
        throw ModelError("edge " + std::to_string(e) + " has an unknown endpoint");
      }
      if (ed.source == ed.target) throw ModelError("edge " + std::to_string(e) + " is a loop");
    }
    for (std::size_t s = 0; s < squares_.size(); ++s) {
      const auto& q = squares_[s];
      for (EdgeId e : {q.bottom, q.right, q.left, q.top}) {
        if (e >= edges_.size()) throw ModelError("square " + std::to_string(s) + " has an unknown edge");
      }
      const auto& b = edges_[q.bottom];
      const auto& r = edges_[q.right];
      const auto& l = edges_[q.left];
      const auto& t = edges_[q.top];
      if (b.source != l.source || b.target != r.source || l.target != t.source || r.target != t.target) {
        throw ModelError("square " + std::to_string(s) + " does not commute");
      }
    }
    if (!labels_.coordinates.empty() && labels_.coordinates.size() != n) {
      throw ModelError("coordinate labels do not cover every vertex");
    }
    for (const auto& [name, v] : labels_.names) {
      if (v >= n) throw ModelError("label '" + name + "' names an unknown vertex");
    }

    // CSR adjacency, ascending edge ids per vertex.
    out_offset_.assign(n + 1, 0);
    in_offset_.assign(n + 1, 0);
    for (const auto& ed : edges_) {
      ++out_offset_[ed.source + 1];
      ++in_offset_[ed.target + 1];
    }
    for (std::size_t v = 0; v < n; ++v) {
      out_offset_[v + 1] += out_offset_[v];
      in_offset_[v + 1] += in_offset_[v];
    }
    out_.assign(edges_.size(), 0);
    in_.assign(edges_.size(), 0);
    {
      auto oc = out_offset_;
      auto ic = in_offset_;
      for (EdgeId e = 0; e < edges_.size(); ++e) {
        out_[oc[edges_[e].source]++] = e;
        in_[ic[edges_[e].target]++] = e;
      }
    }

    // Kahn's algorithm; a leftover vertex means a directed cycle.
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& ed : edges_) ++indeg[ed.target];
    topo_.clear();
    topo_.reserve(n);
    std::vector<VertexId> ready;
    for (std::size_t v = n; v-- > 0;) {
      if (indeg[v] == 0) ready.push_back(static_cast<VertexId>(v));
    }
    while (!ready.empty()) {
      auto v = ready.back();
      ready.pop_back();
      topo_.push_back(v);
      for (auto i = out_offset_[v]; i < out_offset_[v + 1]; ++i) {
        auto w = edges_[out_[i]].target;
        if (--indeg[w] == 0) ready.push_back(w);
      }
    }
    if (topo_.size() != n) throw ModelError("edge digraph has a directed cycle");

    reach_.assign(n, BitSet(n));
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
      auto v = *it;
      reach_[v].set(v);
      for (auto i = out_offset_[v]; i < out_offset_[v + 1]; ++i) {
        reach_[v] |= reach_[edges_[out_[i]].target];
      }
    }

    flips_.clear();
    for (const auto& q : squares_) {
      flips_[key(q.bottom, q.right)].emplace_back(q.left, q.top);
      flips_[key(q.left, q.top)].emplace_back(q.bottom, q.right);
    }
  }

  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<Square> squares_;
  Labels labels_;

  std::vector<std::size_t> out_offset_, in_offset_;
  std::vector<EdgeId> out_, in_;
  std::vector<VertexId> topo_;
  std::vector<BitSet> reach_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<EdgeId, EdgeId>>> flips_;
};

/// A monotone edge path. An empty edge list is the constant path at start.
struct DPath {
  VertexId start = 0;
  VertexId finish = 0;
  std::vector<EdgeId> edges;

  bool operator==(const DPath&) const = default;
  bool is_constant() const noexcept { return edges.empty(); }
  std::size_t length() const noexcept { return edges.size(); }
};

inline DPath constant_path(VertexId v) { return DPath{v, v, {}}; }

/// Builds a path from start along the given edges, checking consecutiveness.
inline DPath make_path(const PrecubicalSet& x, VertexId start, std::vector<EdgeId> edges) {
  x.require_vertex(start);
  VertexId at = start;
  for (auto e : edges) {
    const auto& ed = x.edge(e);
    if (ed.source != at) throw ModelError("path is not consecutive at edge " + std::to_string(e));
    at = ed.target;
  }
  return DPath{start, at, std::move(edges)};
}

/// Re-checks that a path is valid in x.
inline void validate_path(const PrecubicalSet& x, const DPath& p) {
  auto q = make_path(x, p.start, p.edges);
  if (q.finish != p.finish) throw ModelError("path end point does not match its edges");
}

inline DPath concat(const DPath& p, const DPath& q) {
  if (p.finish != q.start) {
    throw ModelError("cannot concatenate: path ends at " + std::to_string(p.finish) +
                     " but the next starts at " + std::to_string(q.start));
  }
  DPath r{p.start, q.finish, p.edges};
  r.edges.insert(r.edges.end(), q.edges.begin(), q.edges.end());
  return r;
}

/// The reachability relation as a sorted list of pairs (x,y) with x ⪯ y.
class GammaSet {
 public:
  GammaSet() = default;
  explicit GammaSet(std::vector<VertexPair> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  std::size_t size() const noexcept { return pairs_.size(); }
  const std::vector<VertexPair>& pairs() const noexcept { return pairs_; }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  bool contains(VertexPair p) const { return std::binary_search(pairs_.begin(), pairs_.end(), p); }

  std::optional<std::size_t> index_of(VertexPair p) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), p);
    if (it == pairs_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - pairs_.begin());
  }

 private:
  std::vector<VertexPair> pairs_;
};

inline bool reachable(const PrecubicalSet& x, VertexId a, VertexId b) { return x.reachable(a, b); }

inline GammaSet gamma(const PrecubicalSet& x) {
  std::vector<VertexPair> pairs;
  for (VertexId a = 0; a < x.vertex_count(); ++a) {
    const auto& r = x.reachable_from(a);
    for (VertexId b = 0; b < x.vertex_count(); ++b) {
      if (r.test(b)) pairs.push_back({a, b});
    }
  }
  return GammaSet(std::move(pairs));
}

inline constexpr std::size_t kDefaultPathCap = 100000;

/// Visits every monotone path a→b in lexicographic order of edge ids.
/// The visitor receives the edge sequence; throws CapExceeded past cap.
template <typename Visitor>
void for_each_dpath(const PrecubicalSet& x, VertexId a, VertexId b, std::size_t cap, Visitor&& visit) {
  if (!x.reachable(a, b)) {
    throw ModelError("no directed path from " + x.vertex_name(a) + " to " + x.vertex_name(b));
  }
  std::vector<EdgeId> stack;
  std::size_t count = 0;
  // Iterative DFS keeping, per depth, the position within the out-edge list.
  std::vector<std::pair<VertexId, std::size_t>> frames{{a, 0}};
  if (a == b) {
    ++count;
    visit(std::as_const(stack));
    return;
  }
  while (!frames.empty()) {
    auto& [v, pos] = frames.back();
    auto out = x.out_edges(v);
    bool descended = false;
    while (pos < out.size()) {
      EdgeId e = out[pos++];
      VertexId w = x.edge(e).target;
      if (!x.reachable_from(w).test(b)) continue;
      stack.push_back(e);
      if (w == b) {
        if (++count > cap) {
          throw CapExceeded("more than " + std::to_string(cap) + " directed paths from " +
                            x.vertex_name(a) + " to " + x.vertex_name(b));
        }
        visit(std::as_const(stack));
        stack.pop_back();
        continue;
      }
      frames.emplace_back(w, 0);
      descended = true;
      break;
    }
    if (!descended) {
      frames.pop_back();
      if (!stack.empty()) stack.pop_back();
    }
  }
}

inline std::vector<DPath> enumerate_dpaths(const PrecubicalSet& x, VertexId a, VertexId b,
                                           std::size_t cap = kDefaultPathCap) {
  std::vector<DPath> out;
  for_each_dpath(x, a, b, cap, [&](const std::vector<EdgeId>& edges) { out.push_back(DPath{a, b, edges}); });
  return out;
}

/// Per-axis half-open integer intervals [lo_i, hi_i) in cell units. The
/// forbidden region is the open box; its boundary stays in the model.
struct ForbiddenBox {
  std::vector<int> lo;
  std::vector<int> hi;
  bool operator==(const ForbiddenBox&) const = default;
  auto operator<=>(const ForbiddenBox&) const = default;
};

inline void validate_box(const std::vector<int>& dims, const ForbiddenBox& box) {
  if (box.lo.size() != dims.size() || box.hi.size() != dims.size()) {
    throw ModelError("forbidden box dimension does not match the grid");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (box.lo[i] >= box.hi[i]) throw ModelError("forbidden box is empty on axis " + std::to_string(i));
    if (box.lo[i] < 0 || box.hi[i] > dims[i]) throw ModelError("forbidden box leaves the grid");
  }
}

/// Lattice grid [0,dims_0]×…×[0,dims_{n-1}] minus the open boxes. Vertices
/// are numbered lexicographically by coordinates, axis 0 most significant;
/// edges by (source, axis); squares by (lower corner, axis pair).
inline PrecubicalSet build_grid_complex(const std::vector<int>& dims, const std::vector<ForbiddenBox>& forbidden) {
  const std::size_t n = dims.size();
  if (n == 0) throw ModelError("grid needs at least one axis");
  std::size_t total = 1;
  for (int d : dims) {
    if (d <= 0) throw ModelError("grid dimensions must be positive");
    total *= static_cast<std::size_t>(d) + 1;
    if (total > 1'000'000) throw CapExceeded("grid too large");
  }
  for (const auto& b : forbidden) validate_box(dims, b);

  // Cell centres are tested in doubled coordinates: a cell spanning axis i
  // has centre 2*x_i+1, otherwise 2*x_i; the open box is (2*lo, 2*hi).
  auto inside = [&](const std::vector<int>& doubled) {
    for (const auto& b : forbidden) {
      bool in = true;
      for (std::size_t i = 0; i < n && in; ++i) in = 2 * b.lo[i] < doubled[i] && doubled[i] < 2 * b.hi[i];
      if (in) return true;
    }
    return false;
  };

  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) stride[i] = stride[i + 1] * (static_cast<std::size_t>(dims[i + 1]) + 1);

  constexpr VertexId kAbsent = std::numeric_limits<VertexId>::max();
  std::vector<VertexId> id_of(total, kAbsent);
  Labels labels;
  std::vector<int> c(n, 0), doubled(n);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = static_cast<int>(rem / stride[i]);
      rem %= stride[i];
      doubled[i] = 2 * c[i];
    }
    if (!inside(doubled)) {
      id_of[lin] = static_cast<VertexId>(labels.coordinates.size());
      labels.coordinates.push_back(c);
    }
  }

  std::vector<Edge> edges;
  std::map<std::pair<VertexId, std::size_t>, EdgeId> edge_at;  // (source, axis)
  for (VertexId v = 0; v < labels.coordinates.size(); ++v) {
    const auto& p = labels.coordinates[v];
    std::size_t lin = 0;
    for (std::size_t i = 0; i < n; ++i) lin += static_cast<std::size_t>(p[i]) * stride[i];
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] + 1 > dims[i]) continue;
      auto w = id_of[lin + stride[i]];
      if (w == kAbsent) continue;
      for (std::size_t k = 0; k < n; ++k) doubled[k] = 2 * p[k] + (k == i ? 1 : 0);
      if (inside(doubled)) continue;
      edge_at[{v, i}] = static_cast<EdgeId>(edges.size());
      edges.push_back({v, w});
    }
  }

  std::vector<Square> squares;
  for (VertexId v = 0; v < labels.coordinates.size(); ++v) {
    const auto& p = labels.coordinates[v];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto b = edge_at.find({v, i});
        auto l = edge_at.find({v, j});
        if (b == edge_at.end() || l == edge_at.end()) continue;
        auto r = edge_at.find({edges[b->second].target, j});
        auto t = edge_at.find({edges[l->second].target, i});
        if (r == edge_at.end() || t == edge_at.end()) continue;
        for (std::size_t k = 0; k < n; ++k) doubled[k] = 2 * p[k] + ((k == i || k == j) ? 1 : 0);
        if (inside(doubled)) continue;
        squares.push_back({b->second, r->second, l->second, t->second});
      }
    }
  }
  const auto vertex_count = labels.coordinates.size();
  return PrecubicalSet::create(vertex_count, std::move(edges), std::move(squares), std::move(labels));
}

/// Isomorphic copy with vertex v renamed to perm[v]. Edge and square ids are
/// kept; coordinate labels are dropped, names follow their vertices.
inline PrecubicalSet relabel(const PrecubicalSet& x, const std::vector<VertexId>& perm) {
  const auto n = x.vertex_count();
  if (perm.size() != n) throw ModelError("relabeling must cover every vertex");
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw ModelError("relabeling is not a permutation");
    seen[p] = true;
  }
  std::vector<Edge> edges;
  edges.reserve(x.edge_count());
  for (const auto& e : x.edges()) edges.push_back({perm[e.source], perm[e.target]});
  Labels labels;
  for (const auto& [name, v] : x.labels().names) labels.names[name] = perm[v];
  return PrecubicalSet::create(n, std::move(edges), x.squares(), std::move(labels));
}

}  // namespace ditop
