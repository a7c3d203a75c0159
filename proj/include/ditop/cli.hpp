#pragma once

// Command-line front end. `run` parses arguments, performs one analysis and
// writes a text summary plus a JSON report.

#include <chrono>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ditop/ditc.hpp"
#include "ditop/equivcheck.hpp"
#include "ditop/io.hpp"
#include "ditop/natsys.hpp"
#include "ditop/zhom.hpp"

namespace ditop::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kUsage = 1, kCap = 2 };

struct LoadedModel {
  std::string source;
  PrecubicalSet x;
};

namespace detail {

struct Source {
  enum Kind { Pv, Complex, Builtin, Auto } kind;
  std::string value;
};

inline LoadedModel load(const Source& s, std::size_t max_processes) {
  auto kind = s.kind;
  if (kind == Source::Auto) kind = std::filesystem::path(s.value).extension() == ".pv" ? Source::Pv : Source::Complex;
  switch (kind) {
    case Source::Pv:
      return {s.value, load_pv(s.value, max_processes)};
    case Source::Builtin:
      return {"model:" + s.value, fixtures::model(s.value)};
    default:
      return {s.value, load_complex(s.value)};
  }
}

inline Json pair_json(VertexPair p) { return Json::array({p.first, p.second}); }

inline Json optional_pair(const std::optional<VertexPair>& p) { return p ? pair_json(*p) : Json(nullptr); }

inline Json counterexamples_json(const std::vector<Counterexample>& cs) {
  Json out = Json::array();
  for (const auto& c : cs) {
    out.push_back({{"kind", to_string(c.kind)},
                   {"condition", c.condition},
                   {"pair", optional_pair(c.pair)},
                   {"target", optional_pair(c.target)},
                   {"detail", c.detail}});
  }
  return out;
}

inline Json names_json(const NaturalClassSystem& n, const std::vector<std::size_t>& objects) {
  Json out = Json::array();
  for (auto i : objects) out.push_back(n.object_name(i));
  return out;
}

struct Context {
  std::vector<LoadedModel> models;
  std::ostringstream text;
  Json result = Json::object();
};

}  // namespace detail

/// DOT rendering of the 1-skeleton.
inline std::string to_dot(const PrecubicalSet& x) {
  std::ostringstream s;
  s << "digraph complex {\n  rankdir=LR;\n";
  for (VertexId v = 0; v < x.vertex_count(); ++v) s << "  " << v << " [label=\"" << x.vertex_name(v) << "\"];\n";
  for (EdgeId e = 0; e < x.edge_count(); ++e) {
    s << "  " << x.edge(e).source << " -> " << x.edge(e).target << " [label=\"e" << e << "\"];\n";
  }
  s << "}\n";
  return s.str();
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directed topology of finite concurrent models", "ditop"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  std::vector<detail::Source> sources;
  bool json_only = false, no_timing = false;
  std::size_t path_cap = kDefaultPathCap, max_processes = kDefaultMaxProcesses;
  auto add_source = [&](const std::string& name, detail::Source::Kind kind, const std::string& help) {
    app.add_option_function<std::string>(name, [&sources, kind](const std::string& v) { sources.push_back({kind, v}); },
                                         help)
        ->trigger_on_parse()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };
  add_source("--pv", detail::Source::Pv, "PV program file");
  add_source("--complex", detail::Source::Complex, "precubical complex JSON file");
  add_source("--model", detail::Source::Builtin, "built-in model name");
  app.add_flag("--json-only", json_only, "print only the JSON report");
  app.add_flag("--no-timing", no_timing, "omit timing from the report");
  app.add_option("--path-cap", path_cap, "maximum dipaths enumerated per pair")->capture_default_str();
  app.add_option("--max-processes", max_processes, "maximum PV processes")->capture_default_str();

  auto positional_models = [&](CLI::App* sub) {
    sub->add_option_function<std::vector<std::string>>(
           "models",
           [&sources](const std::vector<std::string>& vs) {
             for (const auto& v : vs) sources.push_back({detail::Source::Auto, v});
           },
           "model files (.pv or JSON)")
        ->trigger_on_parse();
  };

  using Handler = std::function<void(detail::Context&)>;
  std::map<CLI::App*, std::pair<std::size_t, Handler>> handlers;  // required model count (0 = at least one)

  auto* parse = app.add_subcommand("parse", "load and summarise models");
  positional_models(parse);
  std::string dot_file;
  parse->add_option("--dot", dot_file, "write the first model as DOT");
  handlers[parse] = {0, [&](detail::Context& c) {
                       Json list = Json::array();
                       for (const auto& m : c.models) {
                         auto h = homology_ranks(m.x);
                         auto init = initial_state(m.x);
                         list.push_back({{"gamma", gamma(m.x).size()},
                                         {"initial_state", init ? Json(m.x.vertex_name(*init)) : Json(nullptr)},
                                         {"betti", {h.betti0, h.betti1, h.betti2}}});
                         c.text << m.source << ": " << m.x.vertex_count() << " vertices, " << m.x.edge_count()
                                << " edges, " << m.x.square_count() << " squares, |Gamma| = " << gamma(m.x).size()
                                << "\n";
                       }
                       if (!dot_file.empty()) write_file(dot_file, to_dot(c.models.front().x));
                       c.result["models"] = std::move(list);
                     }};

  auto* classes = app.add_subcommand("classes", "dihomotopy classes of dipaths between two vertices");
  positional_models(classes);
  std::string from, to;
  bool show_reps = false;
  classes->add_option("--from", from, "source vertex (id, name or coordinates)")->required();
  classes->add_option("--to", to, "target vertex")->required();
  classes->add_flag("--representatives", show_reps, "list the least dipath of each class");
  handlers[classes] = {1, [&](detail::Context& c) {
                         const auto& x = c.models.front().x;
                         auto a = x.find_vertex(from), b = x.find_vertex(to);
                         auto cs = trace_classes(x, a, b, path_cap);
                         c.result["from"] = x.vertex_name(a);
                         c.result["to"] = x.vertex_name(b);
                         c.result["paths"] = cs.path_count();
                         c.result["classes"] = cs.class_count();
                         if (show_reps) {
                           Json reps = Json::array();
                           for (ClassId k = 0; k < cs.class_count(); ++k) reps.push_back(cs.representative_edges(k));
                           c.result["representatives"] = std::move(reps);
                         }
                         c.text << "classes " << x.vertex_name(a) << " -> " << x.vertex_name(b) << ": "
                                << cs.class_count() << " (" << cs.path_count() << " dipaths)\n";
                       }};

  auto* nathom = app.add_subcommand("nathom", "natural system of trace classes");
  positional_models(nathom);
  handlers[nathom] = {1, [&](detail::Context& c) {
                        TraceSpace t(c.models.front().x, path_cap);
                        auto n = build_natural_system(t);
                        std::map<std::size_t, std::size_t> hist;
                        Json multi = Json::array();
                        for (std::size_t i = 0; i < n.object_count(); ++i) {
                          ++hist[n.class_count(i)];
                          if (n.class_count(i) > 1) multi.push_back({{"pair", n.object_name(i)}, {"classes", n.class_count(i)}});
                        }
                        Json h = Json::object();
                        for (auto [k, v] : hist) h[std::to_string(k)] = v;
                        c.result["objects"] = n.object_count();
                        c.result["arrows"] = n.arrows().size();
                        c.result["histogram"] = std::move(h);
                        c.result["multi_class"] = std::move(multi);
                        c.text << "natural system: " << n.object_count() << " objects, " << n.arrows().size()
                               << " elementary arrows\n";
                        for (auto [k, v] : hist) c.text << "  " << v << " pairs with H0 = Z^" << k << "\n";
                      }};

  auto* bisim = app.add_subcommand("bisim", "bisimilarity of two natural systems");
  positional_models(bisim);
  std::size_t bij_cap = kBijectionCap;
  bisim->add_option("--cap", bij_cap, "largest class set whose bijections are enumerated")->capture_default_str();
  handlers[bisim] = {2, [&](detail::Context& c) {
                       TraceSpace ta(c.models[0].x, path_cap), tb(c.models[1].x, path_cap);
                       auto a = build_natural_system(ta);
                       auto b = build_natural_system(tb);
                       auto r = bisimilar(a, b, bij_cap);
                       Json cx = nullptr;
                       if (r.counterexample_s) cx = {{"model", 0}, {"pair", a.object_name(*r.counterexample_s)}};
                       else if (r.counterexample_t) cx = {{"model", 1}, {"pair", b.object_name(*r.counterexample_t)}};
                       c.result["bisimilar"] = r.bisimilar;
                       c.result["relation_size"] = r.relation.size();
                       c.result["counterexample"] = cx;
                       c.result["uncovered"] = {detail::names_json(a, r.uncovered_s), detail::names_json(b, r.uncovered_t)};
                       c.text << "bisimilar: " << (r.bisimilar ? "yes" : "no") << "\n";
                       if (!cx.is_null()) {
                         c.text << "  no partner for " << cx["pair"].get<std::string>() << " of model "
                                << cx["model"].get<int>() << "\n";
                       }
                     }};

  auto* equiv = app.add_subcommand("equiv", "check a pair of dmaps for a dihomotopy equivalence");
  positional_models(equiv);
  std::string f_file, g_file;
  bool strong = false;
  std::size_t depth = 0;
  equiv->add_option("--f", f_file, "dmap from the first model to the second")->required();
  equiv->add_option("--g", g_file, "dmap from the second model to the first")->required();
  equiv->add_flag("--strong", strong, "also check the strong conditions");
  equiv->add_option("--depth", depth, "bound on composite length searched (0 = unbounded)")->capture_default_str();
  handlers[equiv] = {2, [&](detail::Context& c) {
                       auto f = load_dmap(f_file);
                       auto g = load_dmap(g_file);
                       TraceSpace tx(c.models[0].x, path_cap), ty(c.models[1].x, path_cap);
                       EquivalenceOptions opt;
                       opt.depth = depth;
                       auto r = check_dihomotopy_equivalence(tx, ty, f, g, opt);
                       c.result["verdict"] = to_string(r.verdict);
                       c.result["counterexamples"] = detail::counterexamples_json(r.counterexamples);
                       c.result["unmatched"] = detail::counterexamples_json(r.unmatched);
                       c.result["matches"] = r.certificate ? r.certificate->matches.size() : 0;
                       c.text << "equivalence: " << to_string(r.verdict) << "\n";
                       for (const auto& x : r.counterexamples) c.text << "  " << x.condition << ": " << x.detail << "\n";
                       if (strong) {
                         auto s = check_strong(tx, ty, f, g);
                         c.result["strong"] = {{"holds", s.holds},
                                               {"precondition_failed", s.precondition_failed},
                                               {"failures", detail::counterexamples_json(s.failures)}};
                         c.text << "strong: " << (s.holds ? "yes" : "no") << "\n";
                       }
                     }};

  auto* dicon = app.add_subcommand("dicontractible", "decide dicontractibility");
  positional_models(dicon);
  handlers[dicon] = {1, [&](detail::Context& c) {
                       const auto& x = c.models.front().x;
                       TraceSpace t(x, path_cap);
                       auto sec = section_exists(t);
                       bool contractible = is_contractible_surrogate(x);
                       auto init = initial_state(x);
                       c.result["dicontractible"] = contractible && sec.exists;
                       c.result["contractible"] = contractible;
                       c.result["section"] = sec.exists;
                       c.result["obstruction"] =
                           sec.obstruction ? Json{{"pair", pair_text(x, *sec.obstruction)}, {"classes", sec.obstruction_classes}}
                                           : Json(nullptr);
                       c.result["initial_state"] = init ? Json(x.vertex_name(*init)) : Json(nullptr);
                       c.text << "dicontractible: " << (contractible && sec.exists ? "yes" : "no") << "\n";
                       if (sec.obstruction) {
                         c.text << "  " << pair_text(x, *sec.obstruction) << " has " << sec.obstruction_classes
                                << " classes\n";
                       }
                       if (!contractible) c.text << "  underlying complex is not contractible\n";
                     }};

  auto* ditc = app.add_subcommand("ditc", "directed topological complexity");
  positional_models(ditc);
  bool exact = false, upper = false, witness = false;
  DitcOptions dopt;
  auto* ex = ditc->add_flag("--exact", exact, "search for the least number of parts (default)");
  ditc->add_flag("--upper", upper, "greedy upper bound only")->excludes(ex);
  ditc->add_option("--cap", dopt.cap, "largest number of parts searched")->capture_default_str();
  ditc->add_option("--max-pairs", dopt.max_pairs, "largest |Gamma| for the exact search")->capture_default_str();
  ditc->add_option("--budget", dopt.node_budget, "search node budget")->capture_default_str();
  ditc->add_flag("--witness", witness, "include the partition in the report");
  handlers[ditc] = {1, [&](detail::Context& c) {
                      const auto& x = c.models.front().x;
                      TraceSpace t(x, path_cap);
                      auto n = build_natural_system(t);
                      auto r = upper ? ditc_upper(n) : ditc_exact(n, dopt);
                      auto report = verify_partition(n, r.partition);
                      if (!report.valid) throw ModelError("internal: partition fails to verify: " + report.violation);
                      Json parts = Json::array();
                      for (const auto& p : r.partition.parts) {
                        Json part{{"size", p.size()}};
                        if (witness) {
                          Json pairs = Json::array();
                          for (const auto& [pr, cls] : p) pairs.push_back({pr.first, pr.second, cls});
                          part["pairs"] = std::move(pairs);
                        }
                        parts.push_back(std::move(part));
                      }
                      c.result["mode"] = upper ? "upper" : "exact";
                      c.result["n"] = r.n;
                      c.result["optimal"] = r.optimal;
                      c.result["lower_bound"] = r.lower_bound;
                      c.result["nodes"] = r.nodes;
                      c.result["parts"] = std::move(parts);
                      c.text << "diTC " << (r.optimal ? "= " : "<= ") << r.n;
                      if (!r.optimal) c.text << " (lower bound " << r.lower_bound << ")";
                      c.text << "\n";
                    }};

  auto* fixtures_cmd = app.add_subcommand("fixtures", "write the built-in fixture files");
  std::string fixture_name, out_dir = ".";
  bool list = false;
  fixtures_cmd->add_option("name", fixture_name, "fixture to write");
  fixtures_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  fixtures_cmd->add_flag("--list", list, "list fixture names");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto* sub = app.get_subcommands().front();
  Json report;
  report["schema"] = kSchemaVersion;
  report["tool"] = {{"name", "ditop"}, {"version", kToolVersion}};
  report["command"] = sub->get_name();
  detail::Context ctx;
  auto start = std::chrono::steady_clock::now();
  auto emit = [&](const char* status) {
    report["status"] = status;
    if (!no_timing) {
      report["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    }
    if (!json_only) out << ctx.text.str();
    out << to_text(report);
  };

  try {
    if (sub == fixtures_cmd) {
      if (!sources.empty()) throw CLI::ValidationError("fixtures takes no models");
      if (list) {
        ctx.result["fixtures"] = fixture_names();
        for (const auto& n : fixture_names()) ctx.text << n << "\n";
      } else {
        if (fixture_name.empty()) throw CLI::ValidationError("fixtures needs a name or --list");
        auto files = fixture_files(fixture_name);
        std::filesystem::create_directories(out_dir);
        Json names = Json::array();
        for (const auto& f : files) {
          write_file((std::filesystem::path(out_dir) / f.name).string(), f.contents);
          names.push_back(f.name);
          ctx.text << "wrote " << (std::filesystem::path(out_dir) / f.name).string() << "\n";
        }
        ctx.result["fixture"] = fixture_name;
        ctx.result["files"] = std::move(names);
      }
      report["models"] = Json::array();
      report["result"] = std::move(ctx.result);
      emit("ok");
      return kOk;
    }

    const auto& [count, handler] = handlers.at(sub);
    if (sources.empty()) throw CLI::ValidationError("no model given; use --pv, --complex, --model or a file");
    if (count != 0 && sources.size() != count) {
      throw CLI::ValidationError(sub->get_name() + " takes " + std::to_string(count) + " model(s), got " +
                                 std::to_string(sources.size()));
    }
    Json models = Json::array();
    for (const auto& s : sources) {
      ctx.models.push_back(detail::load(s, max_processes));
      const auto& x = ctx.models.back().x;
      models.push_back({{"source", ctx.models.back().source},
                        {"vertices", x.vertex_count()},
                        {"edges", x.edge_count()},
                        {"squares", x.square_count()}});
    }
    report["models"] = std::move(models);
    handler(ctx);
    report["result"] = std::move(ctx.result);
    emit("ok");
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded& e) {
    report["error"] = e.what();
    report["result"] = nullptr;
    emit("cap_exceeded");
    err << "cap exceeded: " << e.what() << "\n";
    return kCap;
  } catch (const OverflowError& e) {
    report["error"] = e.what();
    report["result"] = nullptr;
    emit("cap_exceeded");
    err << "overflow: " << e.what() << "\n";
    return kCap;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace ditop::cli
