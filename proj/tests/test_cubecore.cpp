#include <gtest/gtest.h>

#include "ditop/cubecore.hpp"
#include "ditop/fixtures.hpp"
#include "oracles.hpp"

using namespace ditop;

TEST(Grid, Segment) {
  auto x = fixtures::seg();
  EXPECT_EQ(x.vertex_count(), 2u);
  EXPECT_EQ(x.edge_count(), 1u);
  EXPECT_EQ(x.square_count(), 0u);
}

TEST(Grid, PV1Counts) {
  auto x = build_grid_complex({3, 3}, {ForbiddenBox{{1, 1}, {2, 2}}});
  EXPECT_EQ(x.vertex_count(), 16u);
  EXPECT_EQ(x.edge_count(), 24u);
  EXPECT_EQ(x.square_count(), 8u);
  auto y = fixtures::pv1();
  EXPECT_EQ(y.edges(), x.edges());
  EXPECT_EQ(y.squares(), x.squares());
}

TEST(Grid, SwissFlagAndHollowSquareCounts) {
  auto sf = fixtures::sf();
  EXPECT_EQ(sf.vertex_count(), 36u);
  EXPECT_EQ(sf.edge_count(), 56u);
  EXPECT_EQ(sf.square_count(), 20u);
  auto hs = fixtures::hs();
  EXPECT_EQ(hs.vertex_count(), 32u);
  EXPECT_EQ(hs.edge_count(), 48u);
  EXPECT_EQ(hs.square_count(), 16u);
}

TEST(Grid, MatchesLatticeOracle) {
  struct Case {
    std::vector<int> dims;
    std::vector<ForbiddenBox> boxes;
  };
  std::vector<Case> cases{
      {{1}, {}},
      {{1, 1}, {}},
      {{3, 3}, {ForbiddenBox{{1, 1}, {2, 2}}}},
      {{5, 5}, {ForbiddenBox{{1, 2}, {4, 3}}, ForbiddenBox{{2, 1}, {3, 4}}}},
      {{5, 5}, {ForbiddenBox{{1, 1}, {4, 4}}}},
      {{4, 2}, {ForbiddenBox{{0, 0}, {2, 1}}}},
      {{3, 3, 3}, {ForbiddenBox{{1, 1, 0}, {2, 2, 3}}}},
      {{2, 3, 2}, {ForbiddenBox{{0, 1, 0}, {2, 2, 1}}, ForbiddenBox{{1, 0, 1}, {2, 3, 2}}}},
  };
  for (const auto& c : cases) {
    auto x = build_grid_complex(c.dims, c.boxes);
    auto o = oracle::lattice(c.dims, c.boxes);
    EXPECT_EQ(x.vertex_count(), o.vertices);
    EXPECT_EQ(x.edge_count(), o.edges);
    EXPECT_EQ(x.square_count(), o.squares);
    std::set<std::pair<oracle::Point, oracle::Point>> edges;
    for (const auto& e : x.edges()) edges.insert({x.labels().coordinates[e.source], x.labels().coordinates[e.target]});
    EXPECT_EQ(edges, o.edge_set);
  }
}

TEST(Grid, LexicographicNumbering) {
  auto x = fixtures::full_grid(1, 1);
  EXPECT_EQ(x.labels().coordinates,
            (std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  EXPECT_EQ(x.find_vertex("(1,0)"), 2u);
  EXPECT_EQ(x.find_vertex("3"), 3u);
  EXPECT_THROW(x.find_vertex("4"), ModelError);
  EXPECT_THROW(x.find_vertex("2,2"), ModelError);
}

TEST(Grid, BadInput) {
  EXPECT_THROW(build_grid_complex({}, {}), ModelError);
  EXPECT_THROW(build_grid_complex({0}, {}), ModelError);
  EXPECT_THROW(build_grid_complex({3, 3}, {ForbiddenBox{{1, 1}, {1, 2}}}), ModelError);
  EXPECT_THROW(build_grid_complex({3, 3}, {ForbiddenBox{{1, 1}, {4, 2}}}), ModelError);
  EXPECT_THROW(build_grid_complex({3, 3}, {ForbiddenBox{{1}, {2}}}), ModelError);
}

TEST(Create, Validation) {
  EXPECT_THROW(PrecubicalSet::create(2, {{0, 2}}, {}), ModelError);
  EXPECT_THROW(PrecubicalSet::create(2, {{1, 1}}, {}), ModelError);
  EXPECT_THROW(PrecubicalSet::create(2, {{0, 1}, {1, 0}}, {}), ModelError);
  EXPECT_THROW(PrecubicalSet::create(3, {{0, 1}, {1, 2}, {2, 0}}, {}), ModelError);
  // bottom*right and left*top must share both endpoints
  EXPECT_THROW(PrecubicalSet::create(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {{0, 1, 2, 3}}), ModelError);
  EXPECT_NO_THROW(PrecubicalSet::create(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, {{0, 2, 1, 3}}));
  EXPECT_THROW(PrecubicalSet::create(2, {{0, 1}}, {{0, 0, 0, 5}}), ModelError);
  Labels bad;
  bad.names["x"] = 7;
  EXPECT_THROW(PrecubicalSet::create(2, {{0, 1}}, {}, bad), ModelError);
}

TEST(Reachable, Examples) {
  auto seg = fixtures::seg();
  EXPECT_TRUE(reachable(seg, 0, 1));
  EXPECT_FALSE(reachable(seg, 1, 0));
  auto sf = fixtures::sf();
  auto alpha = sf.find_vertex("alpha");
  EXPECT_EQ(alpha, sf.find_vertex("2,2"));
  EXPECT_FALSE(reachable(sf, alpha, sf.find_vertex("5,5")));
  EXPECT_TRUE(reachable(sf, sf.find_vertex("0,0"), alpha));
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    for (VertexId v = 0; v < x.vertex_count(); ++v) EXPECT_TRUE(reachable(x, v, v));
  }
  EXPECT_THROW(reachable(seg, 0, 2), ModelError);
}

TEST(Reachable, Antisymmetric) {
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    for (VertexId a = 0; a < x.vertex_count(); ++a)
      for (VertexId b = 0; b < x.vertex_count(); ++b)
        if (a != b) {
          EXPECT_FALSE(reachable(x, a, b) && reachable(x, b, a)) << name;
        }
  }
}

TEST(Gamma, Examples) {
  auto g = gamma(fixtures::seg());
  EXPECT_EQ(g.pairs(), (std::vector<VertexPair>{{0, 0}, {0, 1}, {1, 1}}));
  EXPECT_EQ(gamma(fixtures::point()).pairs(), (std::vector<VertexPair>{{0, 0}}));
  EXPECT_EQ(gamma(fixtures::pv1()).size(), 100u);
  EXPECT_EQ(gamma(fixtures::full_grid(1, 1)).size(), 9u);
  EXPECT_EQ(gamma(fixtures::sf()).size(), 380u);
  EXPECT_EQ(gamma(fixtures::hs()).size(), 328u);
}

TEST(Gamma, MatchesClosureOracle) {
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    auto closure = oracle::closure(x);
    auto g = gamma(x);
    std::size_t expected = 0;
    for (VertexId a = 0; a < x.vertex_count(); ++a)
      for (VertexId b = 0; b < x.vertex_count(); ++b) {
        expected += closure[a][b];
        EXPECT_EQ(g.contains({a, b}), bool(closure[a][b])) << name;
      }
    EXPECT_EQ(g.size(), expected);
  }
}

TEST(Gamma, ReflexiveAndTransitive) {
  auto g = gamma(fixtures::sf());
  for (const auto& [a, b] : g) {
    EXPECT_TRUE(g.contains({a, a}));
    for (const auto& [c, d] : g)
      if (c == b) {
        EXPECT_TRUE(g.contains({a, d}));
      }
  }
}

TEST(Paths, Examples) {
  auto seg = fixtures::seg();
  auto p = enumerate_dpaths(seg, 0, 1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].edges, std::vector<EdgeId>{0});
  EXPECT_EQ(enumerate_dpaths(fixtures::full_grid(1, 1), 0, 3).size(), 2u);
  auto pv1 = fixtures::pv1();
  EXPECT_EQ(enumerate_dpaths(pv1, 0, 15).size(), 20u);
  auto sf = fixtures::sf();
  EXPECT_EQ(enumerate_dpaths(sf, 0, 35).size(), 84u);
  EXPECT_EQ(enumerate_dpaths(fixtures::hs(), 0, 31).size(), 52u);
  auto c = enumerate_dpaths(seg, 1, 1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].is_constant());
}

TEST(Paths, LexicographicAndCapped) {
  auto x = fixtures::pv1();
  auto paths = enumerate_dpaths(x, 0, 15);
  for (std::size_t i = 1; i < paths.size(); ++i) EXPECT_LT(paths[i - 1].edges, paths[i].edges);
  EXPECT_THROW(enumerate_dpaths(x, 0, 15, 19), CapExceeded);
  EXPECT_NO_THROW(enumerate_dpaths(x, 0, 15, 20));
  EXPECT_THROW(enumerate_dpaths(x, 15, 0), ModelError);
}

TEST(Paths, CountMatchesOracleEverywhere) {
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    for (const auto& [a, b] : gamma(x)) {
      auto n = enumerate_dpaths(x, a, b).size();
      EXPECT_EQ(oracle::cpp_int(n), oracle::path_count(x, a, b)) << name;
    }
  }
}

TEST(Concat, Laws) {
  auto x = fixtures::pv1();
  auto paths = enumerate_dpaths(x, 0, 15);
  auto p = paths[3];
  EXPECT_EQ(concat(p, constant_path(p.finish)), p);
  EXPECT_EQ(concat(constant_path(p.start), p), p);
  auto a = make_path(x, 0, {p.edges[0]});
  auto b = make_path(x, a.finish, {p.edges[1], p.edges[2]});
  auto c = make_path(x, b.finish, std::vector<EdgeId>(p.edges.begin() + 3, p.edges.end()));
  EXPECT_EQ(concat(concat(a, b), c), concat(a, concat(b, c)));
  EXPECT_EQ(concat(concat(a, b), c), p);
  EXPECT_EQ(concat(a, b).length(), a.length() + b.length());
  EXPECT_THROW(concat(b, a), ModelError);
  EXPECT_THROW(make_path(x, 0, {p.edges[1]}), ModelError);
}

TEST(Relabel, KeepsStructure) {
  auto x = fixtures::matchbox();
  std::vector<VertexId> perm{7, 6, 5, 4, 3, 2, 1, 0};
  auto y = relabel(x, perm);
  EXPECT_EQ(y.edge_count(), x.edge_count());
  EXPECT_EQ(y.find_vertex("alpha"), 4u);
  EXPECT_EQ(gamma(y).size(), gamma(x).size());
  EXPECT_THROW(relabel(x, {0, 0, 1, 2, 3, 4, 5, 6}), ModelError);
}
