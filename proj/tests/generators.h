#pragma once

// Random program generation and trace auditing shared by the property
// tests and the acceptance suite.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.h"

namespace osp::test {

struct GeneratedProgram {
  std::string source;
  std::set<std::string> walker_types;
  std::set<std::string> edge_types;
};

// At most 6 nodes, 10 edges and 3 ability declarations per archetype.
// Every visit is guarded by a hop counter so programs terminate.
inline GeneratedProgram random_program(std::mt19937& rng) {
  auto roll = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](int percent) { return roll(1, 100) <= percent; };

  GeneratedProgram g;
  g.walker_types = {"WA", "WB"};
  g.edge_types = {"EA", "EB"};
  const std::vector<std::string> node_types{"NA", "NB"};
  const std::vector<std::string> edge_types{"EA", "EB"};
  const std::vector<std::string> walker_types{"WA", "WB"};
  std::ostringstream src;
  int tag = 0;

  auto flow = [&]() -> std::string {
    const int r = roll(1, 100);
    if (r <= 6) return "skip; ";
    if (r <= 8) return "disengage; ";
    return "";
  };

  // Location abilities: triggered by walker types.
  auto location_decl = [&](const std::string& kind, const std::string& name, const std::string& parent) {
    src << kind << " " << name << (parent.empty() ? "" : " : " + parent) << " {\n";
    const int n = roll(0, 3);
    for (int i = 0; i < n; ++i) {
      const std::string phase = chance(50) ? "entry" : "exit";
      src << "  can a" << i << " with " << walker_types[roll(0, 1)] << " " << phase << " { report " << tag++ << "; ";
      if (kind == "node" && phase == "entry" && chance(40)) {
        src << "if visitor.hops < 6 { visitor.hops += 1; visit any(self); } ";
      }
      src << flow() << "}\n";
    }
    src << "}\n";
  };
  location_decl("node", "NA", "");
  location_decl("node", "NB", "NA");
  location_decl("edge", "EA", "");
  location_decl("edge", "EB", "EA");

  for (size_t wi = 0; wi < walker_types.size(); ++wi) {
    const std::string& name = walker_types[wi];
    src << "walker " << name << (wi == 1 ? " : WA" : "") << " {\n";
    if (wi == 0) src << "  has hops: int = 0;\n";
    const int n = roll(0, 3);
    for (int i = 0; i < n; ++i) {
      const bool on_node = chance(60);
      const std::string trigger = on_node ? node_types[roll(0, 1)] : edge_types[roll(0, 1)];
      const std::string phase = chance(60) ? "entry" : "exit";
      src << "  can b" << i << " with " << trigger << " " << phase << " { report " << tag++ << "; ";
      if (on_node && phase == "entry") {
        const int v = roll(1, 4);
        src << "if self.hops < 6 { self.hops += 1; ";
        if (v == 1) src << "visit out(here); ";
        if (v == 2) src << "visit any_edges(here); ";
        if (v == 3) src << "visit out_edges(here, EB); ";
        if (v == 4) src << "visit pathq(here, none, " << (chance(50) ? "true" : "false") << ", \"any\"); ";
        src << "} ";
      }
      src << flow() << "}\n";
    }
    src << "}\n";
  }

  const int nodes = roll(1, 6);
  for (int i = 0; i < nodes; ++i) src << "let n" << i << " = " << node_types[roll(0, 1)] << "();\n";
  const int edges = roll(0, 10);
  for (int i = 0; i < edges; ++i) {
    src << "let e" << i << " = connect n" << roll(0, nodes - 1) << " -[" << edge_types[roll(0, 1)] << "]-> n"
        << roll(0, nodes - 1) << ";\n";
  }
  const int spawns = roll(1, 3);
  for (int i = 0; i < spawns; ++i) {
    src << "spawn " << walker_types[roll(0, 1)] << "() in ";
    if (edges > 0 && chance(30)) {
      src << "e" << roll(0, edges - 1);
    } else {
      src << "n" << roll(0, nodes - 1);
    }
    src << ";\n";
  }
  g.source = src.str();
  return g;
}

// Checks the execution-order properties over a flat trace without nested
// spawns. Returns one message per violation.
inline std::vector<std::string> order_violations(const std::vector<TraceEvent>& events, const SystemState& state,
                                                 const std::set<std::string>& walker_types,
                                                 const std::set<std::string>& edge_types) {
  enum class Stage { kIdle, kEntry, kExit, kSkipped, kMoved };
  std::vector<std::string> bad;
  Stage stage = Stage::kIdle;
  std::optional<InstanceId> here;
  InstanceId entered_from{};
  bool entered_known = false;
  std::optional<InstanceId> pending_move;
  bool walker_entry_seen = false;
  bool location_exit_seen = false;
  bool last_was_edge = false;

  auto fail = [&](const TraceEvent& ev, const std::string& why) { bad.push_back(format_event(ev) + ": " + why); };

  for (const auto& ev : events) {
    switch (ev.kind) {
      case TraceKind::kSpawn:
        stage = Stage::kMoved;
        pending_move = ev.location;
        last_was_edge = false;
        entered_known = false;
        break;
      case TraceKind::kArrive: {
        if (stage != Stage::kMoved || ev.location != pending_move) fail(ev, "arrival without a preceding move");
        const bool is_edge = edge_types.count(ev.detail) > 0;
        if (is_edge && last_was_edge) fail(ev, "two consecutive edge locations");
        last_was_edge = is_edge;
        stage = Stage::kEntry;
        here = ev.location;
        walker_entry_seen = false;
        break;
      }
      case TraceKind::kAbility: {
        const std::string owner = ev.detail.substr(0, ev.detail.find('.'));
        const bool walker_owned = walker_types.count(owner) > 0;
        const bool entry = ev.detail.ends_with("/entry");
        if (ev.location != here) fail(ev, "ability outside the current location");
        if (entry) {
          if (stage != Stage::kEntry) fail(ev, "entry ability outside the entry phase");
          if (walker_owned) walker_entry_seen = true;
          if (!walker_owned && walker_entry_seen) fail(ev, "location entry after walker entry");
        } else {
          if (stage != Stage::kExit) fail(ev, "exit ability outside the exit phase");
          if (!walker_owned) location_exit_seen = true;
          if (walker_owned && location_exit_seen) fail(ev, "walker exit after location exit");
        }
        break;
      }
      case TraceKind::kDepart:
        if (stage != Stage::kEntry) fail(ev, "departure before entry completed");
        stage = Stage::kExit;
        location_exit_seen = false;
        break;
      case TraceKind::kSkip:
        if (stage != Stage::kEntry && stage != Stage::kExit) fail(ev, "skip outside a visit");
        stage = Stage::kSkipped;
        break;
      case TraceKind::kMove: {
        if (stage != Stage::kExit && stage != Stage::kSkipped) fail(ev, "dequeue before abilities completed");
        // detail: from=<id> [via=<id>]
        const InstanceId from{std::stoull(ev.detail.substr(5))};
        const auto via_at = ev.detail.find(" via=");
        const InstanceId side = via_at == std::string::npos ? from : InstanceId{std::stoull(ev.detail.substr(via_at + 5))};
        if (state.is_edge(from) && entered_known && ev.location) {
          const auto& ends = state.endpoints(from);
          const InstanceId expect = ends.src == entered_from ? ends.dst : ends.src;
          if (*ev.location != expect) fail(ev, "left an edge toward its entry side");
        }
        if (state.is_edge(*ev.location)) {
          const auto& ends = state.endpoints(*ev.location);
          if (ends.src != side && ends.dst != side) fail(ev, "entered an edge away from its endpoints");
          entered_from = side;
          entered_known = true;
        } else {
          entered_known = false;
        }
        stage = Stage::kMoved;
        pending_move = ev.location;
        break;
      }
      case TraceKind::kExhaust:
      case TraceKind::kDisengage:
      case TraceKind::kError:
        stage = Stage::kIdle;
        break;
      case TraceKind::kAutoQueue:
      case TraceKind::kReport:
        break;
    }
  }
  return bad;
}

struct AuditResult {
  int outcome = 0;  // 0 ok, 2 runtime error, 3 budget
  std::string error;
  size_t events = 0;
  std::vector<std::string> violations;
};

// Runs a generated program and audits its trace.
inline AuditResult audit_program(const GeneratedProgram& g, uint64_t budget = 100000) {
  AuditResult r;
  dsl::Program program = dsl::parse_source(g.source);
  auto diags = dsl::check(program);
  if (!diags.empty()) {
    r.outcome = 1;
    r.error = diags.front().message;
    return r;
  }
  dsl::Interpreter interp(program, budget);
  try {
    interp.run();
  } catch (const BudgetExceeded& e) {
    r.outcome = 3;
    r.error = e.message();
  } catch (const OspError& e) {
    r.outcome = 2;
    r.error = e.message();
  }
  const auto& events = interp.engine().events();
  r.events = events.size();
  r.violations = order_violations(events, interp.state(), g.walker_types, g.edge_types);
  return r;
}

// Random graph with walkers holding random queues; deletes a random node
// and compares against the incidence complement. Returns a mismatch
// description or empty.
inline std::string cascade_round(std::mt19937& rng) {
  World w;
  auto roll = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = roll(1, 20);
  std::vector<InstanceId> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(w.add_node());
  struct Rec {
    InstanceId id, src, dst;
  };
  std::vector<Rec> edges;
  const int m = roll(0, 40);
  for (int i = 0; i < m; ++i) {
    const InstanceId a = nodes[roll(0, n - 1)];
    const InstanceId b = nodes[roll(0, n - 1)];
    edges.push_back({w.add_edge(a, b), a, b});
  }
  std::vector<InstanceId> all = nodes;
  for (const auto& e : edges) all.push_back(e.id);
  std::vector<InstanceId> walkers;
  for (int i = 0; i < 4; ++i) {
    const InstanceId walker = w.add_walker();
    walkers.push_back(walker);
    if (!edges.empty() && roll(0, 2) == 0) {
      const Rec& e = edges[roll(0, static_cast<int>(edges.size()) - 1)];
      w.state.place(walker, e.id, e.src);
    } else {
      w.state.place(walker, nodes[roll(0, n - 1)]);
    }
    const int q = roll(0, 6);
    for (int k = 0; k < q; ++k) {
      w.state.mutable_queue(walker).push_back(QueueEntry{all[roll(0, static_cast<int>(all.size()) - 1)], std::nullopt});
    }
  }
  std::map<InstanceId, std::vector<InstanceId>> queues_before;
  std::map<InstanceId, std::optional<InstanceId>> loc_before;
  for (InstanceId walker : walkers) {
    for (const auto& q : w.state.queue(walker)) queues_before[walker].push_back(q.target);
    loc_before[walker] = w.state.location(walker);
  }

  const InstanceId victim = nodes[roll(0, n - 1)];
  w.state.delete_node(victim);

  std::set<InstanceId> dead{victim};
  std::vector<InstanceId> expect_edges;
  for (const auto& e : edges) {
    if (e.src == victim || e.dst == victim) {
      dead.insert(e.id);
    } else {
      expect_edges.push_back(e.id);
    }
  }
  if (w.state.edges() != expect_edges) return "surviving edges differ from the incidence complement";
  for (InstanceId walker : walkers) {
    std::vector<InstanceId> expect_queue;
    for (InstanceId x : queues_before[walker]) {
      if (!dead.count(x)) expect_queue.push_back(x);
    }
    std::vector<InstanceId> got;
    for (const auto& q : w.state.queue(walker)) got.push_back(q.target);
    for (InstanceId x : got) {
      if (dead.count(x)) return "queue holds dead id";
    }
    const bool knocked = loc_before[walker] && dead.count(*loc_before[walker]);
    if (knocked) {
      if (w.state.is_active(walker) || w.state.location(walker)) return "walker on a dead location stayed active";
    } else {
      if (got != expect_queue) return "queue purge removed a live id";
      if (w.state.location(walker) != loc_before[walker]) return "unaffected walker moved";
    }
  }
  if (auto broken = w.state.check_invariants()) return *broken;
  return {};
}

}  // namespace osp::test
