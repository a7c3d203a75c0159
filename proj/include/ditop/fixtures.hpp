#pragma once

// Built-in example models and the maps between them.
//
//   seg       directed unit segment
//   wedge     two segments sharing their source
//   point     a single vertex
//   sf        Swiss flag: 5×5 grid minus an open cross, deadlock "alpha" at (2,2)
//   hs        hollow square: 5×5 grid minus the open block (1,4)²
//   pv1       Pa Va | Pa Va
//   matchbox  cube boundary without its bottom face, "alpha" = far bottom corner
//   topface   the top face of the matchbox

#include <map>
#include <string>
#include <vector>

#include "ditop/cubecore.hpp"
#include "ditop/dmap.hpp"
#include "ditop/pvlang.hpp"

namespace ditop::fixtures {

inline constexpr const char* kSwissFlagSource = "Pa Pb Vb Va | Pb Pa Va Vb";
inline constexpr const char* kPV1Source = "Pa Va | Pa Va";

inline PrecubicalSet with_names(const PrecubicalSet& x, std::map<std::string, VertexId> names) {
  Labels labels = x.labels();
  for (auto& [k, v] : names) labels.names[k] = v;
  return PrecubicalSet::create(x.vertex_count(), x.edges(), x.squares(), std::move(labels));
}

inline PrecubicalSet point() { return PrecubicalSet::create(1, {}, {}); }

inline PrecubicalSet seg() { return build_grid_complex({1}, {}); }

inline PrecubicalSet wedge() { return PrecubicalSet::create(3, {{0, 1}, {0, 2}}, {}); }

inline PrecubicalSet full_grid(int w, int h) { return build_grid_complex({w, h}, {}); }

inline PrecubicalSet sf() {
  auto x = build_pv_complex(parse_pv(kSwissFlagSource));
  return with_names(x, {{"alpha", x.find_vertex("2,2")}});
}

inline PrecubicalSet hs() { return build_grid_complex({5, 5}, {ForbiddenBox{{1, 1}, {4, 4}}}); }

inline PrecubicalSet pv1() { return build_pv_complex(parse_pv(kPV1Source)); }

// Bottom corners A,B,C,D = 0..3 and top corners A',B',C',D' = 4..7.
inline PrecubicalSet matchbox() {
  std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 3}, {2, 3},   // bottom
                          {0, 4}, {1, 5}, {2, 6}, {3, 7},   // vertical
                          {4, 5}, {4, 6}, {5, 7}, {6, 7}};  // top
  std::vector<Square> squares{{8, 10, 9, 11},  // top
                              {0, 5, 4, 8},    // front
                              {1, 6, 4, 9},    // left
                              {3, 7, 6, 11},   // back
                              {2, 7, 5, 10}};  // right
  Labels labels;
  labels.names = {{"A", 0}, {"B", 1}, {"C", 2}, {"D", 3}, {"alpha", 3},
                  {"A'", 4}, {"B'", 5}, {"C'", 6}, {"D'", 7}};
  return PrecubicalSet::create(8, std::move(edges), std::move(squares), std::move(labels));
}

inline PrecubicalSet topface() {
  Labels labels;
  labels.names = {{"A'", 0}, {"B'", 1}, {"C'", 2}, {"D'", 3}, {"alpha", 3}};
  return PrecubicalSet::create(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {{0, 2, 1, 3}}, std::move(labels));
}

/// Vertical projection of the matchbox onto its top face.
inline DMapData matchbox_to_topface() {
  DMapData f;
  f.vertex_map = {0, 1, 2, 3, 0, 1, 2, 3};
  f.edge_map = {{0}, {1}, {2}, {3}, {}, {}, {}, {}, {0}, {1}, {2}, {3}};
  f.square_map = {0, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  return f;
}

/// Inclusion of the top face.
inline DMapData topface_to_matchbox() {
  DMapData g;
  g.vertex_map = {4, 5, 6, 7};
  g.edge_map = {{8}, {9}, {10}, {11}};
  g.square_map = {0};
  return g;
}

namespace detail {

inline EdgeId grid_edge(const PrecubicalSet& x, const std::vector<int>& from, std::size_t axis) {
  auto v = x.find_vertex(std::to_string(from[0]) + "," + std::to_string(from[1]));
  auto to = from;
  ++to[axis];
  for (auto e : x.out_edges(v)) {
    if (x.labels().coordinates[x.edge(e).target] == to) return e;
  }
  throw ModelError("grid has no edge from " + x.vertex_name(v) + " along axis " + std::to_string(axis));
}

inline VertexId grid_vertex(const PrecubicalSet& x, int a, int b) {
  return x.find_vertex(std::to_string(a) + "," + std::to_string(b));
}

// Sends each 5×5 grid coordinate through phi on both axes; edges go to the
// straight axis path between the images.
inline DMapData grid_stretch(const PrecubicalSet& x, const PrecubicalSet& y, const std::vector<int>& phi) {
  DMapData f;
  for (VertexId v = 0; v < x.vertex_count(); ++v) {
    const auto& c = x.labels().coordinates[v];
    f.vertex_map.push_back(grid_vertex(y, phi[c[0]], phi[c[1]]));
  }
  for (const auto& ed : x.edges()) {
    const auto& s = x.labels().coordinates[ed.source];
    const auto& t = x.labels().coordinates[ed.target];
    std::size_t axis = s[0] != t[0] ? 0 : 1;
    std::vector<int> at{phi[s[0]], phi[s[1]]};
    std::vector<EdgeId> path;
    while (at[axis] < phi[t[axis]]) {
      path.push_back(grid_edge(y, at, axis));
      ++at[axis];
    }
    f.edge_map.push_back(std::move(path));
  }
  return f;
}

}  // namespace detail

/// Swiss flag onto hollow square: each axis 0,1,2,3,4,5 ↦ 0,1,1,4,4,5, so the
/// cross collapses onto the hole's boundary.
inline DMapData sf_to_hs() { return detail::grid_stretch(sf(), hs(), {0, 1, 1, 4, 4, 5}); }

/// Hollow square into the Swiss flag by inclusion.
inline DMapData hs_to_sf() {
  auto f = detail::grid_stretch(hs(), sf(), {0, 1, 2, 3, 4, 5});
  return f;
}

/// Names of every built-in model.
inline std::vector<std::string> model_names() {
  return {"point", "seg", "wedge", "sf", "hs", "pv1", "matchbox", "topface"};
}

inline PrecubicalSet model(const std::string& name) {
  if (name == "point") return point();
  if (name == "seg") return seg();
  if (name == "wedge") return wedge();
  if (name == "sf") return sf();
  if (name == "hs") return hs();
  if (name == "pv1") return pv1();
  if (name == "matchbox") return matchbox();
  if (name == "topface") return topface();
  throw ModelError("unknown fixture '" + name + "'");
}

}  // namespace ditop::fixtures
