#pragma once

// Directed maps between precubical models. A vertex goes to a vertex and an
// edge to a directed path of the target (empty when the edge collapses), so
// monotone paths are carried to monotone paths.

#include <optional>
#include <string>
#include <vector>

#include "ditop/cubecore.hpp"
#include "ditop/error.hpp"
#include "ditop/traceclass.hpp"

namespace ditop {

struct DMapData {
  std::vector<VertexId> vertex_map;
  std::vector<std::vector<EdgeId>> edge_map;
  /// Optional; when non-empty it has one entry per source square, and a
  /// present entry names the target square the cell is sent to.
  std::vector<std::optional<SquareId>> square_map;

  bool operator==(const DMapData&) const = default;

  VertexId operator()(VertexId v) const {
    if (v >= vertex_map.size()) throw ModelError("dmap has no image for vertex " + std::to_string(v));
    return vertex_map[v];
  }
  VertexPair operator()(VertexPair p) const { return {(*this)(p.first), (*this)(p.second)}; }
};

struct DMapReport {
  std::vector<std::string> violations;
  bool valid() const noexcept { return violations.empty(); }
};

namespace detail {

inline bool edges_form_path(const PrecubicalSet& y, VertexId from, VertexId to, const std::vector<EdgeId>& edges) {
  VertexId at = from;
  for (auto e : edges) {
    if (e >= y.edge_count() || y.edges()[e].source != at) return false;
    at = y.edges()[e].target;
  }
  return at == to;
}

inline std::vector<EdgeId> join(std::vector<EdgeId> a, const std::vector<EdgeId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace detail

/// Checks every structural requirement of f : X → Y and lists all violations.
/// Square images are compared up to dihomotopy in Y, so `ty` must be a trace
/// space over Y.
inline DMapReport validate_dmap(const PrecubicalSet& x, const TraceSpace& ty, const DMapData& f) {
  const auto& y = ty.complex();
  DMapReport r;
  auto fail = [&](std::string m) { r.violations.push_back(std::move(m)); };
  if (f.vertex_map.size() != x.vertex_count()) {
    fail("vertex map has " + std::to_string(f.vertex_map.size()) + " entries, expected " +
         std::to_string(x.vertex_count()));
    return r;
  }
  for (VertexId v = 0; v < f.vertex_map.size(); ++v) {
    if (f.vertex_map[v] >= y.vertex_count()) fail("vertex " + std::to_string(v) + " maps outside the target");
  }
  if (f.edge_map.size() != x.edge_count()) {
    fail("edge map has " + std::to_string(f.edge_map.size()) + " entries, expected " + std::to_string(x.edge_count()));
  }
  if (!r.valid()) return r;

  for (EdgeId e = 0; e < x.edge_count(); ++e) {
    const auto& ed = x.edges()[e];
    if (!detail::edges_form_path(y, f.vertex_map[ed.source], f.vertex_map[ed.target], f.edge_map[e])) {
      fail("edge " + std::to_string(e) + " (" + std::to_string(ed.source) + "->" + std::to_string(ed.target) +
           ") is not sent to a directed path from f(" + std::to_string(ed.source) + ") to f(" +
           std::to_string(ed.target) + ")");
    }
  }
  if (!f.square_map.empty() && f.square_map.size() != x.square_count()) {
    fail("square map has " + std::to_string(f.square_map.size()) + " entries, expected " +
         std::to_string(x.square_count()));
  }
  if (!r.valid()) return r;

  for (SquareId s = 0; s < x.square_count(); ++s) {
    const auto& q = x.squares()[s];
    auto lower = f.vertex_map[x.edges()[q.bottom].source];
    auto upper = f.vertex_map[x.edges()[q.top].target];
    auto route1 = detail::join(f.edge_map[q.bottom], f.edge_map[q.right]);
    auto route2 = detail::join(f.edge_map[q.left], f.edge_map[q.top]);
    if (!f.square_map.empty() && f.square_map[s]) {
      auto t = *f.square_map[s];
      if (t >= y.square_count()) {
        fail("square " + std::to_string(s) + " maps to unknown square " + std::to_string(t));
        continue;
      }
      const auto& img = y.squares()[t];
      auto single = [&](EdgeId from, EdgeId to) { return f.edge_map[from] == std::vector<EdgeId>{to}; };
      if (!single(q.bottom, img.bottom) || !single(q.right, img.right) || !single(q.left, img.left) ||
          !single(q.top, img.top)) {
        fail("square " + std::to_string(s) + " boundary does not match square " + std::to_string(t));
      }
      continue;
    }
    if (route1 == route2) continue;
    const auto& cs = ty.classes(lower, upper);
    if (cs.class_of(route1) != cs.class_of(route2)) {
      fail("square " + std::to_string(s) + " has boundary routes in different classes of the target");
    }
  }
  return r;
}

/// Image of a path of X in Y.
inline DPath image_path(const DMapData& f, const DPath& p, const PrecubicalSet& x) {
  validate_path(x, p);
  DPath out{f(p.start), f(p.finish), {}};
  for (auto e : p.edges) {
    const auto& img = f.edge_map.at(e);
    out.edges.insert(out.edges.end(), img.begin(), img.end());
  }
  return out;
}

inline DMapData identity_dmap(const PrecubicalSet& x) {
  DMapData f;
  f.vertex_map.resize(x.vertex_count());
  for (VertexId v = 0; v < x.vertex_count(); ++v) f.vertex_map[v] = v;
  f.edge_map.resize(x.edge_count());
  for (EdgeId e = 0; e < x.edge_count(); ++e) f.edge_map[e] = {e};
  f.square_map.resize(x.square_count());
  for (SquareId s = 0; s < x.square_count(); ++s) f.square_map[s] = s;
  return f;
}

/// g∘f. Square images are kept only where both maps send the cell to a
/// square.
inline DMapData compose(const DMapData& f, const DMapData& g) {
  DMapData h;
  h.vertex_map.reserve(f.vertex_map.size());
  for (auto v : f.vertex_map) h.vertex_map.push_back(g(v));
  h.edge_map.reserve(f.edge_map.size());
  for (const auto& img : f.edge_map) {
    std::vector<EdgeId> out;
    for (auto e : img) {
      const auto& gi = g.edge_map.at(e);
      out.insert(out.end(), gi.begin(), gi.end());
    }
    h.edge_map.push_back(std::move(out));
  }
  if (!f.square_map.empty() && !g.square_map.empty()) {
    h.square_map.resize(f.square_map.size());
    for (std::size_t s = 0; s < f.square_map.size(); ++s) {
      if (f.square_map[s] && *f.square_map[s] < g.square_map.size()) h.square_map[s] = g.square_map[*f.square_map[s]];
    }
  }
  return h;
}

/// Transports an isomorphism given by a vertex permutation: the dmap
/// X → relabel(X, perm) and its inverse.
inline DMapData relabel_dmap(const PrecubicalSet& x, const std::vector<VertexId>& perm) {
  DMapData f = identity_dmap(x);
  f.vertex_map = perm;
  return f;
}

inline DMapData relabel_inverse_dmap(const PrecubicalSet& x, const std::vector<VertexId>& perm) {
  DMapData f = identity_dmap(x);
  for (VertexId v = 0; v < perm.size(); ++v) f.vertex_map[perm[v]] = v;
  return f;
}

/// Whether every vertex of Y is hit.
inline bool surjective_on_vertices(const DMapData& f, std::size_t target_vertices) {
  std::vector<bool> hit(target_vertices, false);
  for (auto v : f.vertex_map) {
    if (v < target_vertices) hit[v] = true;
  }
  return std::find(hit.begin(), hit.end(), false) == hit.end();
}

}  // namespace ditop
