#include <gtest/gtest.h>

#include <random>

#include "ditop/fixtures.hpp"
#include "ditop/zhom.hpp"
#include "oracles.hpp"

using namespace ditop;

namespace {

oracle::Matrix to_oracle(const IntegerMatrix<BigInt>& m) {
  oracle::Matrix out(m.rows(), std::vector<BigInt>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

template <typename T>
void expect_snf_invariants(const IntegerMatrix<T>& m, const SNFResult<T>& s) {
  EXPECT_EQ(s.U * m * s.V, s.D);
  for (std::size_t i = 0; i < s.D.rows(); ++i)
    for (std::size_t j = 0; j < s.D.cols(); ++j)
      if (i != j || i >= s.rank) {
        EXPECT_EQ(s.D(i, j), 0);
      }
  for (std::size_t i = 0; i < s.rank; ++i) {
    EXPECT_GT(s.D(i, i), 0);
    if (i + 1 < s.rank) {
      EXPECT_EQ(s.D(i + 1, i + 1) % s.D(i, i), 0);
    }
  }
}

IntegerMatrix<BigInt> random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, int spread) {
  std::uniform_int_distribution<int> entry(-spread, spread);
  std::bernoulli_distribution sparse(0.3);
  IntegerMatrix<BigInt> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = sparse(rng) ? 0 : entry(rng);
  return m;
}

}  // namespace

TEST(SmithNormalForm, Examples) {
  IntegerMatrix<BigInt> m{{2, 0}, {0, 3}};
  auto s = smith_normal_form(m);
  EXPECT_EQ(s.D, (IntegerMatrix<BigInt>{{1, 0}, {0, 6}}));
  expect_snf_invariants(m, s);

  IntegerMatrix<BigInt> z(3, 4);
  auto sz = smith_normal_form(z);
  EXPECT_TRUE(sz.D.is_zero());
  EXPECT_EQ(sz.rank, 0u);
  EXPECT_EQ(sz.U, IntegerMatrix<BigInt>::identity(3));
  EXPECT_EQ(sz.V, IntegerMatrix<BigInt>::identity(4));

  auto id = IntegerMatrix<BigInt>::identity(5);
  EXPECT_EQ(smith_normal_form(id).D, id);
}

TEST(SmithNormalForm, KnownInvariantFactors) {
  IntegerMatrix<BigInt> m{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  auto s = smith_normal_form(m);
  expect_snf_invariants(m, s);
  EXPECT_EQ(s.invariant_factors(), (std::vector<BigInt>{2, 6, 12}));
}

TEST(SmithNormalForm, BuiltinIntegers) {
  IntegerMatrix<long long> m{{4, 6}, {6, 9}, {2, 3}};
  auto s = smith_normal_form(m);
  expect_snf_invariants(m, s);
  EXPECT_EQ(s.rank, 1u);
  EXPECT_EQ(s.D(0, 0), 1);
}

TEST(SmithNormalForm, OverflowIsReported) {
  IntegerMatrix<std::int8_t> m{{100, 7}, {7, 100}};
  EXPECT_THROW(smith_normal_form(m), OverflowError);
}

TEST(SmithNormalForm, MatchesDeterminantalDivisors) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 5;
    auto m = random_matrix(rng, rows, cols, 6);
    auto s = smith_normal_form(m);
    expect_snf_invariants(m, s);
    EXPECT_EQ(s.invariant_factors(), oracle::invariant_factors(to_oracle(m)));
    EXPECT_EQ(abs(oracle::determinant(to_oracle(s.U))), 1);
    EXPECT_EQ(abs(oracle::determinant(to_oracle(s.V))), 1);
  }
}

TEST(Homology, Examples) {
  EXPECT_EQ(homology_ranks(fixtures::point()), (HomologyRanks{1, 0, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::seg()), (HomologyRanks{1, 0, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::wedge()), (HomologyRanks{1, 0, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::hs()), (HomologyRanks{1, 1, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::matchbox()), (HomologyRanks{1, 0, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::topface()), (HomologyRanks{1, 0, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::sf()), (HomologyRanks{1, 1, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::pv1()), (HomologyRanks{1, 1, 0, {}}));
  EXPECT_EQ(homology_ranks(PrecubicalSet::create(2, {}, {})), (HomologyRanks{2, 0, 0, {}}));
  EXPECT_EQ(homology_ranks(fixtures::full_grid(3, 2)), (HomologyRanks{1, 0, 0, {}}));
}

TEST(Homology, BoundaryOfBoundaryVanishes) {
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    if (x.square_count() == 0 || x.edge_count() == 0) continue;
    EXPECT_TRUE((boundary_1(x) * boundary_2(x)).is_zero()) << name;
  }
}

TEST(Homology, EulerCharacteristic) {
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    auto h = homology_ranks(x);
    long long chi = static_cast<long long>(x.vertex_count()) - static_cast<long long>(x.edge_count()) +
                    static_cast<long long>(x.square_count());
    EXPECT_EQ(h.betti2, 0u) << name;
    EXPECT_EQ(chi, static_cast<long long>(h.betti0) - static_cast<long long>(h.betti1)) << name;
  }
}

TEST(Homology, RelabelingInvariant) {
  std::mt19937 rng(3);
  for (auto name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    std::vector<VertexId> perm(x.vertex_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(homology_ranks(relabel(x, perm)), homology_ranks(x)) << name;
  }
}

TEST(Homology, CyclesAndImages) {
  auto hs = fixtures::hs();
  auto cycles = cycle_basis(hs);
  EXPECT_EQ(cycles.size(), hs.edge_count() - (hs.vertex_count() - 1));
  auto d1 = boundary_1(hs);
  for (const auto& z : cycles) {
    for (const auto& v : d1 * z) EXPECT_EQ(v, 0);
  }
  ImageTest image(boundary_2(hs));
  std::size_t outside = 0;
  for (const auto& z : cycles) outside += !image.contains(z);
  EXPECT_GE(outside, 1u);
  std::vector<BigInt> column(hs.edge_count());
  auto d2 = boundary_2(hs);
  for (std::size_t i = 0; i < hs.edge_count(); ++i) column[i] = d2(i, 3) - 2 * d2(i, 5);
  EXPECT_TRUE(image.contains(column));
}

TEST(Contractible, Examples) {
  EXPECT_TRUE(is_contractible_surrogate(fixtures::wedge()));
  EXPECT_TRUE(is_contractible_surrogate(fixtures::seg()));
  EXPECT_TRUE(is_contractible_surrogate(fixtures::matchbox()));
  EXPECT_FALSE(is_contractible_surrogate(fixtures::hs()));
  // the Swiss flag is an annulus around its cross
  EXPECT_FALSE(is_contractible_surrogate(fixtures::sf()));
}

TEST(Section, Examples) {
  auto seg = section_exists(fixtures::seg());
  EXPECT_TRUE(seg.exists);
  EXPECT_EQ(seg.witness.size(), 3u);
  for (const auto& [p, c] : seg.witness) EXPECT_EQ(c, 0u);

  auto pv1 = section_exists(fixtures::pv1());
  EXPECT_FALSE(pv1.exists);
  ASSERT_TRUE(pv1.obstruction);
  EXPECT_EQ(*pv1.obstruction, (VertexPair{0, 15}));
  EXPECT_EQ(pv1.obstruction_classes, 2u);

  auto mb = fixtures::matchbox();
  auto m = section_exists(mb);
  EXPECT_FALSE(m.exists);
  ASSERT_TRUE(m.obstruction);
  EXPECT_EQ(*m.obstruction, (VertexPair{0, mb.find_vertex("alpha")}));
}

TEST(Dicontractible, Table) {
  EXPECT_TRUE(is_dicontractible(fixtures::seg()));
  EXPECT_TRUE(is_dicontractible(fixtures::wedge()));
  EXPECT_TRUE(is_dicontractible(fixtures::point()));
  EXPECT_TRUE(is_dicontractible(fixtures::topface()));
  EXPECT_FALSE(is_dicontractible(fixtures::sf()));
  EXPECT_FALSE(is_dicontractible(fixtures::pv1()));
  EXPECT_FALSE(is_dicontractible(fixtures::matchbox()));
  EXPECT_FALSE(is_dicontractible(fixtures::hs()));
}

TEST(InitialState, Upgrade) {
  EXPECT_TRUE(initial_state_upgrade(fixtures::seg()));
  EXPECT_EQ(initial_state(fixtures::seg()), VertexId{0});
  EXPECT_FALSE(initial_state_upgrade(PrecubicalSet::create(2, {}, {})));
  EXPECT_FALSE(initial_state_upgrade(fixtures::pv1()));
  EXPECT_TRUE(initial_state_upgrade(fixtures::wedge()));
}
