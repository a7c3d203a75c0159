#pragma once

// Dihomotopy equivalence data checked at the level of trace classes. A
// homotopy equivalence of path spaces is seen as a bijection of class sets,
// and commutation up to homotopy as equality of class ids.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ditop/dmap.hpp"
#include "ditop/natsys.hpp"
#include "ditop/traceclass.hpp"
#include "ditop/zhom.hpp"

namespace ditop {

/// Class maps indexed by a vertex pair.
using PairMaps = std::map<VertexPair, ClassMap>;

struct ModelDigest {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t squares = 0;
  auto operator<=>(const ModelDigest&) const = default;
};

inline ModelDigest digest(const PrecubicalSet& x) { return {x.vertex_count(), x.edge_count(), x.square_count()}; }

inline std::string pair_text(const PrecubicalSet& x, VertexPair p) {
  return "(" + x.vertex_name(p.first) + ", " + x.vertex_name(p.second) + ")";
}

/// Pf at the pair p. Every member of a class has to land in the same class
/// of (f(a), f(b)).
inline ClassMap induced_class_map(const TraceSpace& tx, const TraceSpace& ty, const DMapData& f, VertexPair p) {
  const auto& x = tx.complex();
  x.require_vertex(p.first);
  x.require_vertex(p.second);
  if (!x.reachable(p.first, p.second)) throw ModelError("pair " + pair_text(x, p) + " is not reachable");
  const auto& from = tx.classes(p);
  const auto& to = ty.classes(f(p));
  constexpr auto kUnset = static_cast<ClassId>(-1);
  ClassMap out(from.class_count(), kUnset);
  std::vector<EdgeId> image;
  for (std::size_t i = 0; i < from.path_count(); ++i) {
    image.clear();
    for (auto e : from.paths()[i]) {
      const auto& img = f.edge_map.at(e);
      image.insert(image.end(), img.begin(), img.end());
    }
    auto c = to.class_of(image);
    auto& slot = out[from.class_of_path_index(i)];
    if (slot == kUnset) {
      slot = c;
    } else if (slot != c) {
      throw ModelError("dmap splits class " + std::to_string(from.class_of_path_index(i)) + " of " + pair_text(x, p));
    }
  }
  return out;
}

inline ClassMap induced_class_map(const PrecubicalSet& x, const PrecubicalSet& y, const DMapData& f, VertexId a,
                                  VertexId b) {
  TraceSpace tx(x), ty(y);
  return induced_class_map(tx, ty, f, {a, b});
}

enum class FailureKind { Map, Homology, Bijection, Diagram, Strong, Composition };

inline const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::Map: return "map";
    case FailureKind::Homology: return "homology";
    case FailureKind::Bijection: return "bijection";
    case FailureKind::Diagram: return "diagram";
    case FailureKind::Strong: return "strong";
    case FailureKind::Composition: return "composition";
  }
  return "?";
}

/// One failed condition. `condition` names the diagram ("D1".."D4") or the
/// strong clause ("a".."d"); `pair` is the pair the condition is indexed by
/// and `target` the far end of the offending arrow, when there is one.
struct Counterexample {
  FailureKind kind = FailureKind::Diagram;
  std::string condition;
  std::optional<VertexPair> pair;
  std::optional<VertexPair> target;
  std::string detail;
};

/// Diagrams, by the arrow they quantify over:
///   D1  every X-arrow, matched in Y (the image arrow works on the nose),
///   D2  every X-arrow out of (g(c),g(d)) into g-image points, matched in Y,
///   D3  every Y-arrow out of (f(a),f(b)) into f-image points, matched in X,
///   D4  every Y-arrow, matched in X.
/// D1 and D4 range over elementary arrows, which suffices by pasting; D2 and
/// D3 range over all morphisms since their targets are restricted.
struct DiagramMatch {
  int diagram = 0;
  VertexPair index;
  VertexPair forall_source;
  VertexPair forall_target;
  ClassMap forall_action;
  VertexPair exists_source;
  VertexPair exists_target;
  ClassMap exists_action;
  std::size_t exists_depth = 0;
};

struct EquivalenceCertificate {
  ModelDigest x;
  ModelDigest y;
  DMapData f;
  DMapData g;
  PairMaps pf;  // by pairs of X
  PairMaps pg;  // by pairs of Y
  PairMaps F;   // inverse of pf
  PairMaps G;   // inverse of pg
  std::vector<DiagramMatch> matches;
};

enum class Verdict { Accepted, Refuted, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct EquivalenceOptions {
  /// Longest composite tried on the existential side; 0 searches every
  /// morphism.
  std::size_t depth = 0;
  bool record_matches = true;
};

struct EquivalenceResult {
  Verdict verdict = Verdict::Refuted;
  std::vector<Counterexample> counterexamples;
  /// Arrows with no match within the depth bound that do have a deeper one.
  std::vector<Counterexample> unmatched;
  std::optional<EquivalenceCertificate> certificate;

  bool accepted() const noexcept { return verdict == Verdict::Accepted; }
};

namespace detail {

inline std::vector<std::size_t> component_of(const PrecubicalSet& x) {
  DisjointSets s(x.vertex_count());
  for (const auto& e : x.edges()) s.unite(e.source, e.target);
  std::vector<std::size_t> out(x.vertex_count());
  for (VertexId v = 0; v < x.vertex_count(); ++v) out[v] = s.find(v);
  return out;
}

/// Whether the self-map h acts as the identity on H0 and H1 of x.
inline std::optional<std::string> homology_identity_failure(const PrecubicalSet& x, const DMapData& h) {
  auto comp = component_of(x);
  for (VertexId v = 0; v < x.vertex_count(); ++v) {
    if (comp[h(v)] != comp[v]) return "vertex " + x.vertex_name(v) + " is moved to another component";
  }
  auto cycles = cycle_basis(x);
  if (cycles.empty()) return std::nullopt;
  ImageTest boundaries(boundary_2(x));
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    const auto& z = cycles[k];
    std::vector<BigInt> w(x.edge_count());
    for (EdgeId e = 0; e < x.edge_count(); ++e) {
      if (z[e] == 0) continue;
      for (auto img : h.edge_map.at(e)) w[img] += z[e];
      w[e] -= z[e];
    }
    if (!boundaries.contains(w)) return "basis cycle " + std::to_string(k) + " is not fixed in homology";
  }
  return std::nullopt;
}

inline std::vector<Counterexample> homology_failures(const PrecubicalSet& x, const PrecubicalSet& y,
                                                     const DMapData& f, const DMapData& g) {
  std::vector<Counterexample> out;
  if (auto m = homology_identity_failure(x, compose(f, g))) {
    out.push_back({FailureKind::Homology, "g.f", std::nullopt, std::nullopt, *m});
  }
  if (auto m = homology_identity_failure(y, compose(g, f))) {
    out.push_back({FailureKind::Homology, "f.g", std::nullopt, std::nullopt, *m});
  }
  return out;
}

/// One direction h : D → C of the data, with Ph and its inverse per object
/// of D.
struct Side {
  const TraceSpace* dom = nullptr;
  const TraceSpace* cod = nullptr;
  const NaturalClassSystem* ndom = nullptr;
  const NaturalClassSystem* ncod = nullptr;
  const DMapData* h = nullptr;
  std::vector<ClassMap> p;
  std::vector<std::optional<ClassMap>> q;
  std::vector<std::size_t> image;  // object of C under h
  std::vector<bool> hit;           // vertices of C in the image of h
  std::map<VertexPair, std::vector<std::size_t>> preimages;

  VertexPair dom_pair(std::size_t i) const { return ndom->object(i); }
  VertexPair cod_pair(std::size_t j) const { return ncod->object(j); }
};

inline Side make_side(const TraceSpace& dom, const TraceSpace& cod, const NaturalClassSystem& ndom,
                      const NaturalClassSystem& ncod, const DMapData& h) {
  Side s{&dom, &cod, &ndom, &ncod, &h, {}, {}, {}, {}, {}};
  auto n = ndom.object_count();
  s.p.resize(n);
  s.q.resize(n);
  s.image.resize(n);
  parallel_for(n, [&](std::size_t i) { s.p[i] = induced_class_map(dom, cod, h, ndom.object(i)); });
  for (std::size_t i = 0; i < n; ++i) {
    auto hp = h(ndom.object(i));
    auto j = ncod.index_of(hp);
    if (!j) throw ModelError("dmap sends a reachable pair to an unreachable one");
    s.image[i] = *j;
    if (is_bijection(s.p[i], ncod.class_count(*j))) s.q[i] = inverse(s.p[i]);
    s.preimages[hp].push_back(i);
  }
  s.hit.assign(cod.complex().vertex_count(), false);
  for (auto v : h.vertex_map) s.hit[v] = true;
  return s;
}

/// Both squares of a diagram between objects i → j of D, with A acting in
/// D and C in C: C∘Ph_i = Ph_j∘A and, where the inverses exist,
/// Q_j∘C = A∘Q_i.
inline bool commutes(const Side& s, std::size_t i, std::size_t j, const ClassMap& a, const ClassMap& c) {
  if (then(s.p[i], c) != then(a, s.p[j])) return false;
  if (s.q[i] && s.q[j] && then(c, *s.q[j]) != then(*s.q[i], a)) return false;
  return true;
}

/// Action in C of the image of an elementary arrow of D.
inline ClassMap image_action(const Side& s, const ElementaryArrow& a) {
  const auto& from = s.cod->classes(s.cod_pair(s.image[a.source]));
  const auto& to = s.cod->classes(s.cod_pair(s.image[a.target]));
  const auto& img = s.h->edge_map.at(a.edge);
  ClassMap out(from.class_count());
  std::vector<EdgeId> buf;
  for (ClassId c = 0; c < out.size(); ++c) {
    const auto& rep = from.representative_edges(c);
    if (a.prefix) {
      buf = img;
      buf.insert(buf.end(), rep.begin(), rep.end());
    } else {
      buf = rep;
      buf.insert(buf.end(), img.begin(), img.end());
    }
    out[c] = to.class_of(buf);
  }
  return out;
}

struct Partial {
  std::vector<DiagramMatch> matches;
  std::vector<Counterexample> refuted;
  std::vector<Counterexample> unmatched;
};

inline bool within(std::size_t depth, std::size_t limit) { return limit == 0 || depth <= limit; }

/// Image-arrow diagram for every elementary arrow out of object i of D.
inline void image_diagram(const Side& s, int diagram, std::size_t i, const EquivalenceOptions& opt, Partial& out) {
  const auto& x = s.dom->complex();
  for (auto ai : s.ndom->out_arrows(i)) {
    const auto& a = s.ndom->arrows()[ai];
    auto hi = s.image[i], hj = s.image[a.target];
    auto record = [&](const ClassMap& c, std::size_t depth) {
      if (opt.record_matches) {
        out.matches.push_back({diagram, s.dom_pair(i), s.dom_pair(i), s.dom_pair(a.target), a.action, s.cod_pair(hi),
                               s.cod_pair(hj), c, depth});
      }
    };
    auto direct = image_action(s, a);
    if (commutes(s, i, a.target, a.action, direct)) {
      record(direct, s.h->edge_map.at(a.edge).size());
      continue;
    }
    auto search = [&](std::size_t limit) -> const Morphism* {
      auto [lo, hi_] = s.ncod->closure_to(hi, hj);
      for (auto m = lo; m != hi_; ++m)
        if (within(m->depth, limit) && commutes(s, i, a.target, a.action, m->action)) return m;
      return nullptr;
    };
    if (auto m = search(opt.depth)) {
      record(m->action, m->depth);
      continue;
    }
    Counterexample ce{FailureKind::Diagram, "D" + std::to_string(diagram), s.dom_pair(i), s.dom_pair(a.target),
                      std::string(a.prefix ? "prefix" : "suffix") + " edge " + std::to_string(a.edge) + " from " +
                          pair_text(x, s.dom_pair(i)) + " has no commuting image"};
    if (opt.depth && search(0)) {
      ce.detail += " within depth " + std::to_string(opt.depth);
      out.unmatched.push_back(std::move(ce));
    } else {
      out.refuted.push_back(std::move(ce));
    }
  }
}

/// Restricted diagram indexed by object i of D: every morphism of C out of
/// h(i) whose target has both ends in the image of h must be matched by a
/// morphism of D out of i into a preimage.
inline void restricted_diagram(const Side& s, int diagram, std::size_t i, const EquivalenceOptions& opt,
                               Partial& out) {
  const auto& x = s.dom->complex();
  const auto& y = s.cod->complex();
  auto hi = s.image[i];
  const auto& closure = s.ncod->closure(hi);
  static const std::vector<std::size_t> kNone;
  for (const auto& m : closure) {
    auto t = s.cod_pair(m.target);
    if (!s.hit[t.first] || !s.hit[t.second]) continue;
    auto it = s.preimages.find(t);
    const auto& candidates = it == s.preimages.end() ? kNone : it->second;
    auto search = [&](std::size_t limit) -> std::optional<std::pair<std::size_t, const Morphism*>> {
      for (auto j : candidates) {
        auto [lo, hi_] = s.ndom->closure_to(i, j);
        for (auto k = lo; k != hi_; ++k)
          if (within(k->depth, limit) && commutes(s, i, j, k->action, m.action)) return std::pair{j, k};
      }
      return std::nullopt;
    };
    if (auto found = search(opt.depth)) {
      if (opt.record_matches) {
        auto [j, k] = *found;
        out.matches.push_back({diagram, s.dom_pair(i), s.cod_pair(hi), t, m.action, s.dom_pair(i), s.dom_pair(j),
                               k->action, k->depth});
      }
      continue;
    }
    Counterexample ce{FailureKind::Diagram, "D" + std::to_string(diagram), s.dom_pair(i), t,
                      "extension of " + pair_text(y, s.cod_pair(hi)) + " to " + pair_text(y, t) +
                          " has no commuting lift from " + pair_text(x, s.dom_pair(i))};
    if (opt.depth && search(0)) {
      ce.detail += " within depth " + std::to_string(opt.depth);
      out.unmatched.push_back(std::move(ce));
    } else {
      out.refuted.push_back(std::move(ce));
    }
  }
}

inline void run_side(const Side& s, int image_id, int restricted_id, const EquivalenceOptions& opt,
                     EquivalenceResult& r, std::vector<DiagramMatch>& matches) {
  auto n = s.ndom->object_count();
  std::vector<Partial> parts(n);
  parallel_for(n, [&](std::size_t i) {
    image_diagram(s, image_id, i, opt, parts[i]);
    restricted_diagram(s, restricted_id, i, opt, parts[i]);
  });
  for (auto& p : parts) {
    std::move(p.refuted.begin(), p.refuted.end(), std::back_inserter(r.counterexamples));
    std::move(p.unmatched.begin(), p.unmatched.end(), std::back_inserter(r.unmatched));
    std::move(p.matches.begin(), p.matches.end(), std::back_inserter(matches));
  }
}

inline PairMaps by_pair(const NaturalClassSystem& n, const std::vector<ClassMap>& maps) {
  PairMaps out;
  for (std::size_t i = 0; i < maps.size(); ++i) out.emplace(n.object(i), maps[i]);
  return out;
}

}  // namespace detail

/// Checks (f, g) with F, G taken as the inverses of the induced class maps.
/// Every failed condition is listed; the certificate is filled only on
/// acceptance.
inline EquivalenceResult check_dihomotopy_equivalence(const TraceSpace& tx, const TraceSpace& ty, const DMapData& f,
                                                      const DMapData& g, const EquivalenceOptions& opt = {}) {
  const auto& x = tx.complex();
  const auto& y = ty.complex();
  EquivalenceResult r;
  auto vf = validate_dmap(x, ty, f);
  auto vg = validate_dmap(y, tx, g);
  for (const auto& v : vf.violations) r.counterexamples.push_back({FailureKind::Map, "f", {}, {}, v});
  for (const auto& v : vg.violations) r.counterexamples.push_back({FailureKind::Map, "g", {}, {}, v});
  if (!r.counterexamples.empty()) return r;

  r.counterexamples = detail::homology_failures(x, y, f, g);

  auto nx = build_natural_system(tx);
  auto ny = build_natural_system(ty);
  auto sf = detail::make_side(tx, ty, nx, ny, f);
  auto sg = detail::make_side(ty, tx, ny, nx, g);
  for (const auto* s : {&sf, &sg}) {
    const auto& d = s->dom->complex();
    for (std::size_t i = 0; i < s->p.size(); ++i) {
      if (s->q[i]) continue;
      auto k = s->ncod->class_count(s->image[i]);
      r.counterexamples.push_back({FailureKind::Bijection, s == &sf ? "Pf" : "Pg", s->dom_pair(i),
                                   s->cod_pair(s->image[i]),
                                   std::to_string(s->p[i].size()) + " classes at " + pair_text(d, s->dom_pair(i)) +
                                       " meet " + std::to_string(image_size(s->p[i])) + " of " + std::to_string(k)});
    }
  }

  std::vector<DiagramMatch> matches;
  detail::run_side(sf, 1, 3, opt, r, matches);
  detail::run_side(sg, 4, 2, opt, r, matches);

  if (!r.counterexamples.empty()) {
    r.verdict = Verdict::Refuted;
    return r;
  }
  if (!r.unmatched.empty()) {
    r.verdict = Verdict::Inconclusive;
    return r;
  }
  r.verdict = Verdict::Accepted;
  EquivalenceCertificate c{digest(x), digest(y), f, g, detail::by_pair(nx, sf.p), detail::by_pair(ny, sg.p), {}, {},
                           std::move(matches)};
  for (std::size_t i = 0; i < sf.q.size(); ++i) c.F.emplace(nx.object(i), *sf.q[i]);
  for (std::size_t i = 0; i < sg.q.size(); ++i) c.G.emplace(ny.object(i), *sg.q[i]);
  std::sort(c.matches.begin(), c.matches.end(), [](const DiagramMatch& a, const DiagramMatch& b) {
    return std::tie(a.diagram, a.index, a.forall_target, a.forall_action) <
           std::tie(b.diagram, b.index, b.forall_target, b.forall_action);
  });
  r.certificate = std::move(c);
  return r;
}

inline EquivalenceResult check_dihomotopy_equivalence(const PrecubicalSet& x, const PrecubicalSet& y,
                                                      const DMapData& f, const DMapData& g,
                                                      const EquivalenceOptions& opt = {}) {
  TraceSpace tx(x), ty(y);
  return check_dihomotopy_equivalence(tx, ty, f, g, opt);
}

/// Re-checks a certificate against its models: stored class maps are the
/// induced ones, F and G invert them, and every stored match is a pair of
/// genuine morphisms whose squares commute. Returns the problems found.
inline std::vector<std::string> verify_certificate(const TraceSpace& tx, const TraceSpace& ty,
                                                   const EquivalenceCertificate& c) {
  const auto& x = tx.complex();
  const auto& y = ty.complex();
  std::vector<std::string> problems;
  if (c.x != digest(x) || c.y != digest(y)) {
    problems.push_back("certificate belongs to other models");
    return problems;
  }
  for (const auto& v : validate_dmap(x, ty, c.f).violations) problems.push_back("f: " + v);
  for (const auto& v : validate_dmap(y, tx, c.g).violations) problems.push_back("g: " + v);
  if (!problems.empty()) return problems;

  auto check_maps = [&](const TraceSpace& dom, const TraceSpace& cod, const DMapData& h, const PairMaps& p,
                        const PairMaps& q, const char* name) {
    for (const auto& pair : gamma(dom.complex())) {
      auto ip = p.find(pair);
      auto iq = q.find(pair);
      if (ip == p.end() || iq == q.end()) {
        problems.push_back(std::string(name) + " missing at " + pair_text(dom.complex(), pair));
        continue;
      }
      if (ip->second != induced_class_map(dom, cod, h, pair)) {
        problems.push_back(std::string(name) + " is not the induced map at " + pair_text(dom.complex(), pair));
      }
      auto k = cod.class_count(h(pair));
      if (iq->second.size() != k || then(ip->second, iq->second) != identity_map(ip->second.size()) ||
          then(iq->second, ip->second) != identity_map(k)) {
        problems.push_back(std::string(name) + " inverse fails at " + pair_text(dom.complex(), pair));
      }
    }
  };
  check_maps(tx, ty, c.f, c.pf, c.F, "Pf");
  check_maps(ty, tx, c.g, c.pg, c.G, "Pg");
  if (!problems.empty()) return problems;

  auto nx = build_natural_system(tx);
  auto ny = build_natural_system(ty);
  auto is_morphism = [](const NaturalClassSystem& n, VertexPair from, VertexPair to, const ClassMap& a) {
    auto i = n.index_of(from), j = n.index_of(to);
    if (!i || !j) return false;
    auto [lo, hi] = n.closure_to(*i, *j);
    return std::any_of(lo, hi, [&](const Morphism& m) { return m.action == a; });
  };
  for (const auto& m : c.matches) {
    bool f_side = m.diagram == 1 || m.diagram == 3;
    const auto& p = f_side ? c.pf : c.pg;
    const auto& q = f_side ? c.F : c.G;
    const auto& ndom = f_side ? nx : ny;
    const auto& ncod = f_side ? ny : nx;
    bool image_form = m.diagram == 1 || m.diagram == 4;
    // i → j in the domain of the map, a acting there and b in the codomain
    auto i = image_form ? m.forall_source : m.exists_source;
    auto j = image_form ? m.forall_target : m.exists_target;
    const auto& a = image_form ? m.forall_action : m.exists_action;
    const auto& b = image_form ? m.exists_action : m.forall_action;
    auto bi = image_form ? m.exists_source : m.forall_source;
    auto bj = image_form ? m.exists_target : m.forall_target;
    bool ok = is_morphism(ndom, i, j, a) && is_morphism(ncod, bi, bj, b) && p.count(i) && p.count(j);
    if (ok) {
      ok = then(p.at(i), b) == then(a, p.at(j)) && then(b, q.at(j)) == then(q.at(i), a);
    }
    if (!ok) problems.push_back("D" + std::to_string(m.diagram) + " match at " + std::to_string(m.index.first) + "->" +
                                std::to_string(m.index.second) + " does not commute");
  }
  return problems;
}

/// (f2∘f1, g1∘g2, F1∘F2, G2∘G1), re-verified from scratch. The composed F
/// and G must agree with the ones the check derives.
inline EquivalenceResult compose_equivalences(const TraceSpace& tx, const TraceSpace& ty, const TraceSpace& tz,
                                              const EquivalenceCertificate& e1, const EquivalenceCertificate& e2,
                                              const EquivalenceOptions& opt = {}) {
  if (e1.y != e2.x || e1.x != digest(tx.complex()) || e1.y != digest(ty.complex()) || e2.y != digest(tz.complex())) {
    throw ModelError("certificates do not share their middle model");
  }
  if (!validate_dmap(tx.complex(), ty, e1.f).valid() || !validate_dmap(ty.complex(), tx, e1.g).valid() ||
      !validate_dmap(ty.complex(), tz, e2.f).valid() || !validate_dmap(tz.complex(), ty, e2.g).valid()) {
    throw ModelError("certificate maps do not fit the models");
  }
  auto at = [](const PairMaps& m, VertexPair p) -> const ClassMap& {
    auto it = m.find(p);
    if (it == m.end()) throw ModelError("certificates do not share their middle model");
    return it->second;
  };
  auto f = compose(e1.f, e2.f);
  auto g = compose(e2.g, e1.g);
  PairMaps F, G;
  for (const auto& [p, m] : e1.F) F.emplace(p, then(at(e2.F, e1.f(p)), m));
  for (const auto& [p, m] : e2.G) G.emplace(p, then(at(e1.G, e2.g(p)), m));
  auto r = check_dihomotopy_equivalence(tx, tz, f, g, opt);
  if (r.certificate && (r.certificate->F != F || r.certificate->G != G)) {
    r.counterexamples.push_back(
        {FailureKind::Composition, "FG", {}, {}, "composed inverses differ from the induced ones"});
    r.verdict = Verdict::Refuted;
    r.certificate.reset();
  }
  return r;
}

struct StrongResult {
  bool holds = false;
  /// F or G is undefined (a non-bijective induced map) or a map is invalid.
  bool precondition_failed = false;
  std::vector<Counterexample> failures;
};

namespace detail {

/// Clause (a)/(b) on elementary arrows of D: Q_j∘C = A∘Q_i with C the image
/// arrow. Longer arrows follow by pasting.
inline void strong_image_clause(const Side& s, const char* clause, std::vector<Counterexample>& out) {
  for (const auto& a : s.ndom->arrows()) {
    auto c = image_action(s, a);
    if (then(c, *s.q[a.target]) != then(*s.q[a.source], a.action)) {
      out.push_back({FailureKind::Strong, clause, s.dom_pair(a.source), s.dom_pair(a.target),
                     "inverse does not commute with the image of edge " + std::to_string(a.edge)});
    }
  }
}

/// Clause (c)/(d): for γ ∈ PC(u', h(a)), p ∈ PC(h(a), h(b)), δ ∈ PC(h(b), v')
/// with u', v' images of points before a and after b, some (a', b') over
/// (u', v') must satisfy Q(γ*p*δ) = Q(γ)*Q(p)*Q(δ).
inline void strong_composite_clause(const Side& s, const char* clause, std::vector<Counterexample>& out) {
  const auto& d = s.dom->complex();
  const auto& c = s.cod->complex();
  auto n = s.ndom->object_count();
  std::vector<std::vector<Counterexample>> parts(n);
  auto q_at = [&](VertexPair p) -> const ClassMap& { return *s.q[*s.ndom->index_of(p)]; };
  parallel_for(n, [&](std::size_t i) {
    auto [a, b] = s.dom_pair(i);
    std::map<VertexId, std::vector<VertexId>> before, after;
    for (VertexId v = 0; v < d.vertex_count(); ++v) {
      if (d.reachable(v, a)) before[(*s.h)(v)].push_back(v);
      if (d.reachable(b, v)) after[(*s.h)(v)].push_back(v);
    }
    auto ha = (*s.h)(a), hb = (*s.h)(b);
    const auto& mid = s.cod->classes(ha, hb);
    std::vector<EdgeId> buf;
    for (const auto& [u, pre] : before) {
      const auto& left = s.cod->classes(u, ha);
      for (const auto& [v, post] : after) {
        const auto& right = s.cod->classes(hb, v);
        const auto& whole = s.cod->classes(u, v);
        bool failed = false;
        for (ClassId gc = 0; gc < left.class_count() && !failed; ++gc)
          for (ClassId pc = 0; pc < mid.class_count() && !failed; ++pc)
            for (ClassId dc = 0; dc < right.class_count() && !failed; ++dc) {
              buf = left.representative_edges(gc);
              const auto& pe = mid.representative_edges(pc);
              const auto& de = right.representative_edges(dc);
              buf.insert(buf.end(), pe.begin(), pe.end());
              buf.insert(buf.end(), de.begin(), de.end());
              auto joined = whole.class_of(buf);
              bool some = false;
              for (auto a2 : pre) {
                for (auto b2 : post) {
                  const auto& target = s.dom->classes(a2, b2);
                  auto lhs = q_at({a2, b2})[joined];
                  buf = s.dom->classes(a2, a).representative_edges(q_at({a2, a})[gc]);
                  const auto& m2 = s.dom->classes(a, b).representative_edges(q_at({a, b})[pc]);
                  const auto& r2 = s.dom->classes(b, b2).representative_edges(q_at({b, b2})[dc]);
                  buf.insert(buf.end(), m2.begin(), m2.end());
                  buf.insert(buf.end(), r2.begin(), r2.end());
                  if (target.class_of(buf) == lhs) {
                    some = true;
                    break;
                  }
                }
                if (some) break;
              }
              if (!some) {
                failed = true;
                parts[i].push_back({FailureKind::Strong, clause, VertexPair{a, b}, VertexPair{u, v},
                                    "no pair over " + pair_text(c, {u, v}) + " splits classes (" + std::to_string(gc) +
                                        ", " + std::to_string(pc) + ", " + std::to_string(dc) + ")"});
              }
            }
      }
    }
  });
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
}

inline std::optional<std::vector<std::optional<ClassMap>>> supplied_inverses(const Side& s, const PairMaps& given,
                                                                             const char* name,
                                                                             std::vector<Counterexample>& out) {
  std::vector<std::optional<ClassMap>> q(s.p.size());
  bool ok = true;
  for (std::size_t i = 0; i < s.p.size(); ++i) {
    auto it = given.find(s.dom_pair(i));
    auto k = s.ncod->class_count(s.image[i]);
    if (it == given.end() || it->second.size() != k ||
        std::any_of(it->second.begin(), it->second.end(), [&](ClassId c) { return c >= s.p[i].size(); }) ||
        then(s.p[i], it->second) != identity_map(s.p[i].size()) || then(it->second, s.p[i]) != identity_map(k)) {
      out.push_back({FailureKind::Bijection, name, s.dom_pair(i), std::nullopt, "supplied map is not an inverse"});
      ok = false;
      continue;
    }
    q[i] = it->second;
  }
  if (!ok) return std::nullopt;
  return q;
}

}  // namespace detail

/// Strong dihomotopy equivalence: the underlying homotopy equivalence, F and
/// G inverse to the induced maps, and clauses (a)–(d) on class ids. F and G
/// default to the inverses of the induced maps.
inline StrongResult check_strong(const TraceSpace& tx, const TraceSpace& ty, const DMapData& f, const DMapData& g,
                                 const std::optional<PairMaps>& F = std::nullopt,
                                 const std::optional<PairMaps>& G = std::nullopt) {
  const auto& x = tx.complex();
  const auto& y = ty.complex();
  StrongResult r;
  for (const auto& v : validate_dmap(x, ty, f).violations) r.failures.push_back({FailureKind::Map, "f", {}, {}, v});
  for (const auto& v : validate_dmap(y, tx, g).violations) r.failures.push_back({FailureKind::Map, "g", {}, {}, v});
  if (!r.failures.empty()) {
    r.precondition_failed = true;
    return r;
  }
  auto nx = build_natural_system(tx);
  auto ny = build_natural_system(ty);
  auto sf = detail::make_side(tx, ty, nx, ny, f);
  auto sg = detail::make_side(ty, tx, ny, nx, g);
  for (const auto* s : {&sf, &sg}) {
    for (std::size_t i = 0; i < s->q.size(); ++i) {
      if (!s->q[i]) {
        r.failures.push_back({FailureKind::Bijection, s == &sf ? "Pf" : "Pg", s->dom_pair(i), s->cod_pair(s->image[i]),
                              "induced class map is not bijective, so its inverse is undefined"});
      }
    }
  }
  if (!r.failures.empty()) {
    r.precondition_failed = true;
    return r;
  }
  if (F) {
    auto q = detail::supplied_inverses(sf, *F, "F", r.failures);
    if (!q) return r;
    sf.q = std::move(*q);
  }
  if (G) {
    auto q = detail::supplied_inverses(sg, *G, "G", r.failures);
    if (!q) return r;
    sg.q = std::move(*q);
  }
  auto h = detail::homology_failures(x, y, f, g);
  r.failures.insert(r.failures.end(), h.begin(), h.end());
  detail::strong_image_clause(sf, "a", r.failures);
  detail::strong_image_clause(sg, "b", r.failures);
  detail::strong_composite_clause(sf, "c", r.failures);
  detail::strong_composite_clause(sg, "d", r.failures);
  r.holds = r.failures.empty();
  return r;
}

inline StrongResult check_strong(const PrecubicalSet& x, const PrecubicalSet& y, const DMapData& f,
                                 const DMapData& g) {
  TraceSpace tx(x), ty(y);
  return check_strong(tx, ty, f, g);
}

struct TwoOfThreeResult {
  EquivalenceResult result;
  /// Pf1∘F21 is a right inverse of Pf2 on every pair of Y over a pair of X.
  bool right_inverse = false;
};

/// Given certificates for f1 : X → Y and f21 = f2∘f1 : X → Z, both
/// surjective on vertices, builds g2 = f1∘g21 and the right inverses
/// Pf1∘F21, then re-verifies (f2, g2).
inline TwoOfThreeResult check_two_of_three_surjective(const TraceSpace& tx, const TraceSpace& ty,
                                                      const TraceSpace& tz, const EquivalenceCertificate& e1,
                                                      const EquivalenceCertificate& e21, const DMapData& f2,
                                                      const EquivalenceOptions& opt = {}) {
  const auto& y = ty.complex();
  const auto& z = tz.complex();
  if (e1.x != digest(tx.complex()) || e1.y != digest(y) || e21.x != digest(tx.complex()) || e21.y != digest(z)) {
    throw ModelError("certificates do not match the models");
  }
  if (!surjective_on_vertices(e1.f, y.vertex_count())) throw ModelError("f1 is not surjective on vertices");
  if (!surjective_on_vertices(e21.f, z.vertex_count())) throw ModelError("f2.f1 is not surjective on vertices");
  if (f2.vertex_map.size() != y.vertex_count()) throw ModelError("f2 does not start at Y");
  if (compose(e1.f, f2).vertex_map != e21.f.vertex_map) throw ModelError("f2.f1 differs from the composite");

  TwoOfThreeResult out;
  auto g2 = compose(e21.g, e1.f);
  out.result = check_dihomotopy_equivalence(ty, tz, f2, g2, opt);
  if (!validate_dmap(y, tz, f2).valid()) return out;
  out.right_inverse = true;
  for (const auto& [p, f21_inv] : e21.F) {
    auto q = e1.f(p);
    auto right = then(f21_inv, e1.pf.at(p));
    auto pf2 = induced_class_map(ty, tz, f2, q);
    if (then(right, pf2) != identity_map(right.size())) out.right_inverse = false;
  }
  return out;
}

/// The bisimulation an accepted equivalence induces between the natural
/// systems: ((a,b), Pf, (f(a),f(b))) and ((g(c),g(d)), G, (c,d)).
inline std::vector<BisimTriple> relation_from_equivalence(const NaturalClassSystem& nx, const NaturalClassSystem& ny,
                                                          const EquivalenceCertificate& c) {
  std::vector<BisimTriple> out;
  for (const auto& [p, m] : c.pf) {
    auto s = nx.index_of(p), t = ny.index_of(c.f(p));
    if (!s || !t) throw ModelError("certificate pair outside the systems");
    out.push_back({*s, m, *t});
  }
  for (const auto& [p, m] : c.G) {
    auto s = nx.index_of(c.g(p)), t = ny.index_of(p);
    if (!s || !t) throw ModelError("certificate pair outside the systems");
    out.push_back({*s, m, *t});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ditop
