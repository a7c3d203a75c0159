#pragma once

// A minimal PV process language: processes separated by '|', each a
// sequence of P<res> (lock) / V<res> (unlock) actions on mutexes.
//
//   program := proc ("|" proc)* ; proc := action* ; action := ("P"|"V") ident
//   ident   := [a-z][a-z0-9]*
//
// '#' starts a comment running to the end of the line.

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ditop/cubecore.hpp"
#include "ditop/error.hpp"

namespace ditop {

struct PVAction {
  enum class Kind { Lock, Unlock };
  Kind kind = Kind::Lock;
  std::string resource;
  std::size_t line = 0;
  std::size_t column = 0;

  // Positions are annotations only.
  bool operator==(const PVAction& o) const { return kind == o.kind && resource == o.resource; }
};

struct PVProgram {
  std::vector<std::vector<PVAction>> processes;

  bool operator==(const PVProgram&) const = default;

  std::set<std::string> resources() const {
    std::set<std::string> out;
    for (const auto& p : processes) {
      for (const auto& a : p) out.insert(a.resource);
    }
    return out;
  }
};

namespace detail {

inline void check_process(const std::vector<PVAction>& proc, std::size_t index) {
  std::map<std::string, const PVAction*> held;
  for (const auto& a : proc) {
    if (a.kind == PVAction::Kind::Lock) {
      if (held.count(a.resource)) {
        throw ParseError("process " + std::to_string(index + 1) + " locks '" + a.resource + "' while holding it",
                         a.line, a.column);
      }
      held[a.resource] = &a;
    } else {
      if (!held.count(a.resource)) {
        throw ParseError("unmatched Unlock of '" + a.resource + "' in process " + std::to_string(index + 1),
                         a.line, a.column);
      }
      held.erase(a.resource);
    }
  }
}

}  // namespace detail

inline PVProgram parse_pv(std::string_view text) {
  PVProgram prog;
  prog.processes.emplace_back();
  std::size_t line = 1, col = 1;
  bool any_token = false;
  std::size_t i = 0;
  auto advance = [&]() {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    any_token = true;
    if (c == '|') {
      prog.processes.emplace_back();
      advance();
      continue;
    }
    if (c != 'P' && c != 'V') {
      throw ParseError(std::string("expected 'P', 'V' or '|' but found '") + c + "'", line, col);
    }
    PVAction act;
    act.kind = c == 'P' ? PVAction::Kind::Lock : PVAction::Kind::Unlock;
    act.line = line;
    act.column = col;
    advance();
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) advance();
    if (i >= text.size() || !std::islower(static_cast<unsigned char>(text[i]))) {
      throw ParseError("expected a resource name after '" + std::string(1, c) + "'", line, col);
    }
    while (i < text.size() &&
           (std::islower(static_cast<unsigned char>(text[i])) || std::isdigit(static_cast<unsigned char>(text[i])))) {
      act.resource.push_back(text[i]);
      advance();
    }
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '|' &&
        text[i] != '#') {
      throw ParseError(std::string("unexpected character '") + text[i] + "' in resource name", line, col);
    }
    prog.processes.back().push_back(std::move(act));
  }
  if (!any_token) throw ParseError("empty program", line, col);
  for (std::size_t p = 0; p < prog.processes.size(); ++p) detail::check_process(prog.processes[p], p);
  return prog;
}

inline std::string pretty_print(const PVProgram& prog) {
  std::string out;
  for (std::size_t p = 0; p < prog.processes.size(); ++p) {
    if (p) out += " | ";
    const auto& proc = prog.processes[p];
    for (std::size_t k = 0; k < proc.size(); ++k) {
      if (k) out += ' ';
      out += proc[k].kind == PVAction::Kind::Lock ? 'P' : 'V';
      out += proc[k].resource;
    }
  }
  return out;
}

/// Half-open cell interval [begin, end) during which a process holds a mutex.
struct CriticalSection {
  std::string resource;
  int begin = 0;
  int end = 0;
};

/// Critical sections of one process: a lock at position k released at m
/// gives [k+1, m+1). A lock still held at the end runs to the last cell.
inline std::vector<CriticalSection> critical_sections(const std::vector<PVAction>& proc) {
  std::vector<CriticalSection> out;
  std::map<std::string, int> open;
  for (int k = 0; k < static_cast<int>(proc.size()); ++k) {
    const auto& a = proc[k];
    if (a.kind == PVAction::Kind::Lock) {
      open[a.resource] = k;
    } else {
      out.push_back({a.resource, open.at(a.resource) + 1, k + 1});
      open.erase(a.resource);
    }
  }
  const int last = static_cast<int>(proc.size()) + 1;
  for (const auto& [res, k] : open) out.push_back({res, k + 1, last});
  return out;
}

struct CompiledPV {
  std::vector<int> dims;
  std::vector<ForbiddenBox> boxes;
};

inline constexpr std::size_t kDefaultMaxProcesses = 3;

/// Grid model of a program: one axis per process with (length + 1) cells and
/// one forbidden box per pair of conflicting critical sections, spanning the
/// full extent of the other axes.
inline CompiledPV compile_pv(const PVProgram& prog, std::size_t max_processes = kDefaultMaxProcesses) {
  const auto n = prog.processes.size();
  if (n == 0) throw ModelError("program has no process");
  if (n > max_processes) {
    throw CapExceeded("program has " + std::to_string(n) + " processes; the cap is " + std::to_string(max_processes));
  }
  CompiledPV out;
  for (const auto& p : prog.processes) out.dims.push_back(static_cast<int>(p.size()) + 1);

  std::vector<std::vector<CriticalSection>> sections;
  for (const auto& p : prog.processes) sections.push_back(critical_sections(p));

  std::vector<std::tuple<std::string, ForbiddenBox>> tagged;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (const auto& si : sections[i]) {
        for (const auto& sj : sections[j]) {
          if (si.resource != sj.resource) continue;
          ForbiddenBox box;
          box.lo.assign(n, 0);
          box.hi = out.dims;
          box.lo[i] = si.begin;
          box.hi[i] = si.end;
          box.lo[j] = sj.begin;
          box.hi[j] = sj.end;
          tagged.emplace_back(si.resource, std::move(box));
        }
      }
    }
  }
  std::sort(tagged.begin(), tagged.end());
  for (auto& [res, box] : tagged) out.boxes.push_back(std::move(box));
  return out;
}

inline PrecubicalSet build_pv_complex(const PVProgram& prog, std::size_t max_processes = kDefaultMaxProcesses) {
  auto compiled = compile_pv(prog, max_processes);
  return build_grid_complex(compiled.dims, compiled.boxes);
}

}  // namespace ditop
