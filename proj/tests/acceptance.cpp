// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ditop/ditc.hpp"
#include "ditop/equivcheck.hpp"
#include "ditop/fixtures.hpp"
#include "ditop/natsys.hpp"
#include "ditop/zhom.hpp"
#include "laws.hpp"
#include "oracles.hpp"

using namespace ditop;

namespace {

struct Check {
  std::ostringstream why;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Check swiss_flag() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  auto sf = fixtures::sf();
  auto hs = fixtures::hs();
  auto a = build_natural_system(sf);
  auto b = build_natural_system(hs);
  auto r = bisimilar(a, b);
  auto elapsed = seconds_since(start);
  c.require(!r.bisimilar, "SF and HS reported bisimilar");
  c.require(r.counterexample_s.has_value(), "no counterexample object in SF");
  if (r.counterexample_s) {
    auto p = a.object(*r.counterexample_s);
    auto alpha = sf.find_vertex("alpha");
    auto top = sf.find_vertex("5,5");
    // the deadlock α cannot reach the final state
    c.require(p.second == alpha && !reachable(sf, alpha, top), "counterexample " + a.object_name(*r.counterexample_s) +
                                                                 " does not end at the deadlock");
  }
  c.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

Check matchbox() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  auto m = fixtures::matchbox();
  auto t = fixtures::topface();
  auto f = fixtures::matchbox_to_topface();
  auto alpha = m.find_vertex("alpha");
  c.require(trace_classes(m, 0, alpha).class_count() == 2, "matchbox (0,alpha) does not have 2 classes");
  c.require(trace_classes(t, f(VertexId{0}), f(alpha)).class_count() == 1, "top face (f0,f alpha) does not have 1 class");
  auto r = check_dihomotopy_equivalence(m, t, f, fixtures::topface_to_matchbox());
  c.require(r.verdict == Verdict::Refuted, "matchbox maps not refuted");
  bool at_alpha = false;
  for (const auto& x : r.counterexamples) at_alpha = at_alpha || (x.pair && *x.pair == VertexPair{0, alpha});
  c.require(at_alpha, "no counterexample at (0,alpha)");
  auto elapsed = seconds_since(start);
  c.require(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

Check dicontractibility() {
  Check c;
  std::vector<std::pair<std::string, bool>> table{
      {"seg", true}, {"wedge", true}, {"sf", false}, {"pv1", false}, {"matchbox", false}};
  for (const auto& [name, expected] : table) {
    auto start = std::chrono::steady_clock::now();
    bool got = is_dicontractible(fixtures::model(name));
    auto elapsed = seconds_since(start);
    c.require(got == expected, name + " gives " + (got ? "true" : "false"));
    c.require(elapsed < 5.0, name + " took " + std::to_string(elapsed) + " s");
  }
  return c;
}

// Corner regions of PV1 around the hole (1,2)x(1,2): C1 below-left, C4
// above-right.
int corner(const PrecubicalSet& x, VertexId v) {
  auto name = x.vertex_name(v);
  int i = name[1] - '0', j = name[3] - '0';
  if (i <= 1 && j <= 1) return 1;
  if (i >= 2 && j >= 2) return 4;
  return i >= 2 ? 2 : 3;
}

bool passes_above(const PrecubicalSet& x, const TraceSpace& t, VertexPair p, ClassId c) {
  for (auto e : t.classes(p).representative_edges(c))
    if (corner(x, x.edge(e).target) == 3) return true;
  return false;
}

Check ditc() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  auto x = fixtures::pv1();
  TraceSpace t(x);
  auto r = ditc_exact(x);
  c.require(r.n == 2 && r.optimal, "diTC(PV1) = " + std::to_string(r.n));
  auto report = verify_partition(x, r.partition);
  c.require(report.valid, "partition fails: " + report.violation);

  // the pairs with two classes are exactly C1 x C4, and the partition keeps
  // them in one part on one side of the hole
  auto g = gamma(x);
  std::set<std::pair<std::size_t, bool>> sides;
  for (auto p : g.pairs()) {
    bool wide = corner(x, p.first) == 1 && corner(x, p.second) == 4;
    c.require((t.class_count(p) == 2) == wide, "class count at " + pair_text(x, p) + " breaks the C1..C4 structure");
  }
  for (std::size_t k = 0; k < r.partition.size(); ++k)
    for (const auto& [p, cls] : r.partition.parts[k])
      if (t.class_count(p) == 2) sides.emplace(k, passes_above(x, t, p, cls));
  c.require(sides.size() == 1, "C1 x C4 is split across parts or sides");

  // the two-part partition read off the regions
  SectionPartition regions;
  regions.parts.resize(2);
  for (auto p : g.pairs()) {
    if (t.class_count(p) == 2) {
      regions.parts[1].emplace(p, passes_above(x, t, p, 0) ? 0 : 1);
    } else {
      regions.parts[0].emplace(p, 0);
    }
  }
  auto rr = verify_partition(x, regions);
  c.require(rr.valid, "region partition fails: " + rr.violation);

  for (const auto& name : fixtures::model_names()) {
    auto m = fixtures::model(name);
    bool one = ditc_exact(m).n == 1;
    c.require(one == is_dicontractible(m), "diTC = 1 disagrees with dicontractibility on " + name);
  }
  auto elapsed = seconds_since(start);
  c.require(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

Check law_suite() {
  Check c;
  auto t = laws::run(250, 20261015);
  c.require(t.instances >= 200, "only " + std::to_string(t.instances) + " instances");
  c.require(t.violations.empty(), std::to_string(t.violations.size()) + " violations, first: " +
                                      (t.violations.empty() ? "" : t.violations.front()));
  c.require(t.dihomeomorphisms > 0 && t.compositions > 0 && t.strong > 0, "a law was never exercised");
  return c;
}

oracle::Matrix to_oracle(const IntegerMatrix<BigInt>& m) {
  oracle::Matrix out(m.rows(), std::vector<oracle::cpp_int>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

bool snf_holds(const IntegerMatrix<BigInt>& m, std::string& why) {
  auto s = smith_normal_form(m);
  if (s.U * m * s.V != s.D) return why = "U*M*V != D", false;
  for (std::size_t i = 0; i < s.D.rows(); ++i)
    for (std::size_t j = 0; j < s.D.cols(); ++j) {
      bool diagonal = i == j && i < s.rank;
      if (diagonal ? s.D(i, j) <= 0 : s.D(i, j) != 0) return why = "D is not in normal form", false;
    }
  for (std::size_t i = 0; i + 1 < s.rank; ++i)
    if (s.D(i + 1, i + 1) % s.D(i, i) != 0) return why = "divisibility chain broken", false;
  auto du = oracle::determinant(to_oracle(s.U)), dv = oracle::determinant(to_oracle(s.V));
  if (abs(du) != 1 || abs(dv) != 1) return why = "U or V is not unimodular", false;
  return true;
}

std::vector<DPath> arrow_paths(const PrecubicalSet& x, const NaturalClassSystem& n, const ElementaryArrow& a) {
  auto from = n.object(a.source), to = n.object(a.target);
  if (a.prefix) return {make_path(x, to.first, {a.edge}), constant_path(from.second)};
  return {constant_path(from.first), make_path(x, from.second, {a.edge})};
}

Check algebra() {
  Check c;
  std::mt19937 rng(1000);
  std::uniform_int_distribution<int> size(1, 12), entry(-9, 9);
  std::bernoulli_distribution zero(0.35);
  for (int k = 0; k < 1000 && c.ok; ++k) {
    IntegerMatrix<BigInt> m(size(rng), size(rng));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = zero(rng) ? 0 : entry(rng);
    std::string why;
    c.require(snf_holds(m, why), "SNF matrix " + std::to_string(k) + ": " + why);
  }

  std::size_t composites = 0;
  for (const auto& name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    TraceSpace t(x);
    auto n = build_natural_system(t);
    for (std::size_t i = 0; i < n.object_count() && c.ok; ++i) {
      auto p = n.object(i);
      ExtensionArrow id{p, p, constant_path(p.first), constant_path(p.second)};
      for (ClassId k = 0; k < n.class_count(i); ++k)
        c.require(t.extend_class(id, k) == k, name + ": identity extension moves a class");
    }
    for (const auto& a1 : n.arrows()) {
      auto e1 = arrow_paths(x, n, a1);
      ExtensionArrow one{n.object(a1.source), n.object(a1.target), e1[0], e1[1]};
      for (ClassId k = 0; k < n.class_count(a1.source); ++k)
        c.require(t.extend_class(one, k) == a1.action[k], name + ": arrow action differs from extend_class");
      for (auto i2 : n.out_arrows(a1.target)) {
        const auto& a2 = n.arrows()[i2];
        auto e2 = arrow_paths(x, n, a2);
        ExtensionArrow both{n.object(a1.source), n.object(a2.target), concat(e2[0], e1[0]), concat(e1[1], e2[1])};
        for (ClassId k = 0; k < n.class_count(a1.source); ++k) {
          c.require(t.extend_class(both, k) == a2.action[a1.action[k]],
                    name + ": extension of a composite is not the composite of extensions");
        }
        ++composites;
      }
    }
  }
  c.require(composites > 0, "no composable arrows");

  auto names = fixtures::model_names();
  std::vector<NaturalClassSystem> systems;
  for (const auto& name : names) systems.push_back(build_natural_system(fixtures::model(name)));
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto r = bisimilar(systems[i], systems[i]);
    c.require(r.bisimilar && is_bisimulation(systems[i], systems[i], r.relation), names[i] + " not self-bisimilar");
    auto x = fixtures::model(names[i]);
    auto y = relabel(x, instances::random_permutation(x.vertex_count(), rng));
    c.require(bisimilar(systems[i], build_natural_system(y)).bisimilar, names[i] + " not bisimilar to a relabeling");
    for (std::size_t j = 0; j < names.size(); ++j) {
      auto ab = bisimilar(systems[i], systems[j]);
      auto ba = bisimilar(systems[j], systems[i]);
      c.require(ab.bisimilar == ba.bisimilar, "bisimilarity of " + names[i] + ", " + names[j] + " is not symmetric");
      if (ab.bisimilar) {
        c.require(is_bisimulation(systems[j], systems[i], converse(ab.relation)),
                  "converse relation of " + names[i] + ", " + names[j] + " is no bisimulation");
      }
    }
  }
  return c;
}

Check oracle_classes() {
  Check c;
  std::size_t compared = 0;
  for (const auto& name : fixtures::model_names()) {
    auto x = fixtures::model(name);
    TraceSpace t(x);
    auto g = gamma(x);
    for (auto p : g.pairs()) {
      if (oracle::path_count(x, p.first, p.second) > 10000) continue;
      auto expected = oracle::flip_class_count(x, p.first, p.second);
      c.require(t.class_count(p) == expected, name + " " + pair_text(x, p) + ": " + std::to_string(t.class_count(p)) +
                                                  " classes, oracle " + std::to_string(expected));
      ++compared;
    }
  }
  c.require(compared > 0, "nothing compared");
  return c;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"Swiss flag and hollow square are not bisimilar", swiss_flag},
      {"matchbox maps fail at (0,alpha)", matchbox},
      {"dicontractibility table", dicontractibility},
      {"diTC of PV1 is 2 with the corner-region structure", ditc},
      {"equivalence laws on random instances", law_suite},
      {"SNF, functoriality and bisimilarity laws", algebra},
      {"class counts match the flip-closure oracle", oracle_classes},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.why << "threw: " << e.what();
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", seconds_since(start));
    std::cout << "criterion " << i + 1 << ": " << (c.ok ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << timing << ")";
    if (!c.ok) std::cout << ": " << c.why.str();
    std::cout << "\n";
    failures += !c.ok;
  }
  return failures;
}
