#pragma once

// File formats: precubical complexes and dmaps as JSON, PV programs as text,
// and the canonical fixture files.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ditop/cubecore.hpp"
#include "ditop/dmap.hpp"
#include "ditop/error.hpp"
#include "ditop/fixtures.hpp"
#include "ditop/pvlang.hpp"

namespace ditop {

using Json = nlohmann::ordered_json;

namespace detail {

inline bool all_unsigned(const Json& j) {
  if (j.is_number()) return j.is_number_unsigned();
  if (j.is_array()) return std::all_of(j.begin(), j.end(), [](const Json& e) { return all_unsigned(e); });
  return true;
}

/// Ids and counts must be non-negative integers; the library would
/// otherwise wrap -1 silently.
template <typename T>
T json_get(const Json& j, const char* what, bool ids = true) {
  if (ids && !all_unsigned(j)) throw ModelError(std::string("malformed ") + what + ": expected non-negative integers");
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed ") + what + ": " + e.what());
  }
}

inline const Json& json_field(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) throw ModelError(std::string(what) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ModelError(std::string(what) + " has no \"" + key + "\" field");
  return *it;
}

inline Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ModelError(std::string("cannot parse ") + what + ": " + e.what());
  }
}

}  // namespace detail

inline Json complex_to_json(const PrecubicalSet& x) {
  Json j;
  j["vertices"] = x.vertex_count();
  Json edges = Json::array();
  for (const auto& e : x.edges()) edges.push_back({e.source, e.target});
  j["edges"] = std::move(edges);
  Json squares = Json::array();
  for (const auto& s : x.squares()) squares.push_back({s.bottom, s.right, s.left, s.top});
  j["squares"] = std::move(squares);
  const auto& l = x.labels();
  if (!l.coordinates.empty() || !l.names.empty()) {
    Json labels = Json::object();
    if (!l.coordinates.empty()) labels["coordinates"] = l.coordinates;
    if (!l.names.empty()) {
      Json names = Json::object();
      for (const auto& [k, v] : l.names) names[k] = v;
      labels["names"] = std::move(names);
    }
    j["labels"] = std::move(labels);
  }
  return j;
}

inline PrecubicalSet complex_from_json(const Json& j) {
  constexpr const char* what = "complex";
  auto n = detail::json_get<std::size_t>(detail::json_field(j, "vertices", what), "vertex count");
  std::vector<Edge> edges;
  for (const auto& e : detail::json_field(j, "edges", what)) {
    auto v = detail::json_get<std::vector<VertexId>>(e, "edge");
    if (v.size() != 2) throw ModelError("an edge needs exactly a source and a target");
    edges.push_back({v[0], v[1]});
  }
  std::vector<Square> squares;
  for (const auto& s : detail::json_field(j, "squares", what)) {
    auto v = detail::json_get<std::vector<EdgeId>>(s, "square");
    if (v.size() != 4) throw ModelError("a square needs four edges: bottom, right, left, top");
    squares.push_back({v[0], v[1], v[2], v[3]});
  }
  Labels labels;
  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_object()) throw ModelError("labels must be a JSON object");
    if (auto c = it->find("coordinates"); c != it->end()) {
      labels.coordinates = detail::json_get<std::vector<std::vector<int>>>(*c, "coordinates", false);
    }
    if (auto m = it->find("names"); m != it->end()) {
      if (!m->is_object()) throw ModelError("label names must be a JSON object");
      for (const auto& [k, v] : m->items()) labels.names[k] = detail::json_get<VertexId>(v, "label");
    }
  }
  return PrecubicalSet::create(n, std::move(edges), std::move(squares), std::move(labels));
}

inline Json dmap_to_json(const DMapData& f) {
  Json j;
  j["vertex_map"] = f.vertex_map;
  j["edge_map"] = f.edge_map;
  Json sq = Json::array();
  for (const auto& s : f.square_map) sq.push_back(s ? Json(*s) : Json(nullptr));
  j["square_map"] = std::move(sq);
  return j;
}

inline DMapData dmap_from_json(const Json& j) {
  constexpr const char* what = "dmap";
  DMapData f;
  f.vertex_map = detail::json_get<std::vector<VertexId>>(detail::json_field(j, "vertex_map", what), "vertex_map");
  f.edge_map = detail::json_get<std::vector<std::vector<EdgeId>>>(detail::json_field(j, "edge_map", what), "edge_map");
  if (auto it = j.find("square_map"); it != j.end()) {
    if (!it->is_array()) throw ModelError("square_map must be an array");
    for (const auto& s : *it) {
      if (s.is_null()) f.square_map.emplace_back(std::nullopt);
      else f.square_map.emplace_back(detail::json_get<SquareId>(s, "square_map entry"));
    }
  }
  return f;
}

/// Canonical text: two-space indented JSON and a final newline.
inline std::string to_text(const Json& j) { return j.dump(2) + "\n"; }

inline PrecubicalSet parse_complex(std::string_view text) {
  return complex_from_json(detail::parse_json(text, "complex"));
}

inline DMapData parse_dmap(std::string_view text) { return dmap_from_json(detail::parse_json(text, "dmap")); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ModelError("cannot write '" + path + "'");
}

inline PrecubicalSet load_complex(const std::string& path) {
  try {
    return parse_complex(read_file(path));
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

inline PrecubicalSet load_pv(const std::string& path, std::size_t max_processes = kDefaultMaxProcesses) {
  auto text = read_file(path);
  try {
    return build_pv_complex(parse_pv(text), max_processes);
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

inline DMapData load_dmap(const std::string& path) {
  try {
    return parse_dmap(read_file(path));
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

struct FixtureFile {
  std::string name;
  std::string contents;
  bool operator==(const FixtureFile&) const = default;
};

inline std::vector<std::string> fixture_names() {
  return {"point", "seg", "wedge", "sf", "hs", "pv1", "matchbox", "topface", "sf-hs"};
}

/// The files making up a fixture, in a fixed order.
inline std::vector<FixtureFile> fixture_files(const std::string& name) {
  auto complex = [](const std::string& stem, const PrecubicalSet& x) {
    return FixtureFile{stem + ".json", to_text(complex_to_json(x))};
  };
  auto dmap = [](const std::string& stem, const DMapData& f) {
    return FixtureFile{stem + ".json", to_text(dmap_to_json(f))};
  };
  if (name == "pv1") return {{"pv1.pv", std::string(fixtures::kPV1Source) + "\n"}};
  if (name == "sf") return {{"sf.pv", std::string(fixtures::kSwissFlagSource) + "\n"}, complex("sf", fixtures::sf())};
  if (name == "matchbox") {
    return {complex("matchbox", fixtures::matchbox()), complex("topface", fixtures::topface()),
            dmap("matchbox_f", fixtures::matchbox_to_topface()), dmap("matchbox_g", fixtures::topface_to_matchbox())};
  }
  if (name == "sf-hs") {
    return {complex("sf", fixtures::sf()), complex("hs", fixtures::hs()), dmap("sf_hs_f", fixtures::sf_to_hs()),
            dmap("sf_hs_g", fixtures::hs_to_sf())};
  }
  for (const auto& m : fixtures::model_names()) {
    if (m == name) return {complex(name, fixtures::model(name))};
  }
  throw ModelError("unknown fixture '" + name + "'");
}

}  // namespace ditop
