#include <gtest/gtest.h>

#include <filesystem>

#include "ditop/io.hpp"

using namespace ditop;

namespace {

void expect_same(const PrecubicalSet& a, const PrecubicalSet& b) {
  EXPECT_EQ(a.vertex_count(), b.vertex_count());
  EXPECT_EQ(a.edges(), b.edges());
  EXPECT_EQ(a.squares(), b.squares());
  EXPECT_EQ(a.labels(), b.labels());
}

}  // namespace

TEST(ComplexJson, RoundTripsEveryModel) {
  for (const auto& name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    auto text = to_text(complex_to_json(x));
    auto y = parse_complex(text);
    expect_same(x, y);
    EXPECT_EQ(to_text(complex_to_json(y)), text) << name;
  }
}

TEST(ComplexJson, Format) {
  auto j = complex_to_json(fixtures::topface());
  EXPECT_EQ(j["vertices"], 4);
  EXPECT_EQ(j["squares"][0], Json({0, 2, 1, 3}));
  EXPECT_EQ(j["labels"]["names"]["alpha"], 3);
  auto x = parse_complex(R"({"vertices": 2, "edges": [[0, 1]], "squares": []})");
  EXPECT_EQ(x.edge_count(), 1u);
  EXPECT_TRUE(x.labels().names.empty());
}

TEST(ComplexJson, Errors) {
  EXPECT_THROW(parse_complex("{"), ModelError);
  EXPECT_THROW(parse_complex("[]"), ModelError);
  EXPECT_THROW(parse_complex(R"({"vertices": 2, "edges": []})"), ModelError);
  EXPECT_THROW(parse_complex(R"({"vertices": 2, "edges": [[0, 1, 1]], "squares": []})"), ModelError);
  EXPECT_THROW(parse_complex(R"({"vertices": 2, "edges": [[0, 5]], "squares": []})"), ModelError);
  EXPECT_THROW(parse_complex(R"({"vertices": 2, "edges": [[0, 1], [1, 0]], "squares": []})"), ModelError);
  EXPECT_THROW(parse_complex(R"({"vertices": "two", "edges": [], "squares": []})"), ModelError);
  EXPECT_THROW(parse_complex(R"({"vertices": 1, "edges": [], "squares": [], "labels": {"names": {"a": 4}}})"),
               ModelError);
}

TEST(DMapJson, RoundTrip) {
  for (const auto& f : {fixtures::matchbox_to_topface(), fixtures::topface_to_matchbox(), fixtures::sf_to_hs(),
                        fixtures::hs_to_sf()}) {
    EXPECT_EQ(parse_dmap(to_text(dmap_to_json(f))), f);
  }
  auto j = dmap_to_json(fixtures::matchbox_to_topface());
  EXPECT_TRUE(j["square_map"][1].is_null());
  EXPECT_EQ(j["edge_map"][4], Json::array());
  auto g = parse_dmap(R"({"vertex_map": [0], "edge_map": []})");
  EXPECT_TRUE(g.square_map.empty());
  EXPECT_THROW(parse_dmap(R"({"vertex_map": [0]})"), ModelError);
  EXPECT_THROW(parse_dmap(R"({"vertex_map": [-1], "edge_map": []})"), ModelError);
  EXPECT_THROW(parse_dmap(R"({"vertex_map": [0], "edge_map": [], "square_map": 3})"), ModelError);
}

TEST(Fixtures, Files) {
  auto pv = fixture_files("pv1");
  ASSERT_EQ(pv.size(), 1u);
  EXPECT_EQ(pv[0].name, "pv1.pv");
  EXPECT_NE(pv[0].contents.find("Pa Va | Pa Va"), std::string::npos);

  auto mb = fixture_files("matchbox");
  ASSERT_EQ(mb.size(), 4u);
  EXPECT_EQ(mb[0].name, "matchbox.json");
  EXPECT_EQ(mb[2].name, "matchbox_f.json");
  EXPECT_EQ(mb[3].name, "matchbox_g.json");
  expect_same(parse_complex(mb[0].contents), fixtures::matchbox());
  EXPECT_EQ(parse_dmap(mb[2].contents), fixtures::matchbox_to_topface());

  EXPECT_THROW(fixture_files("nope"), ModelError);
  for (const auto& name : fixture_names()) EXPECT_EQ(fixture_files(name), fixture_files(name)) << name;
}

TEST(Fixtures, LoadFromDisk) {
  auto dir = std::filesystem::temp_directory_path() / "ditop_io_test";
  std::filesystem::create_directories(dir);
  for (const auto& name : fixture_names()) {
    for (const auto& f : fixture_files(name)) write_file((dir / f.name).string(), f.contents);
  }
  expect_same(load_pv((dir / "pv1.pv").string()), fixtures::pv1());
  expect_same(load_pv((dir / "sf.pv").string()), build_pv_complex(parse_pv(fixtures::kSwissFlagSource)));
  expect_same(load_complex((dir / "hs.json").string()), fixtures::hs());
  EXPECT_EQ(load_dmap((dir / "sf_hs_g.json").string()), fixtures::hs_to_sf());
  EXPECT_THROW(load_complex((dir / "missing.json").string()), ModelError);
  write_file((dir / "bad.json").string(), "{\"vertices\": 1}");
  try {
    load_complex((dir / "bad.json").string());
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
