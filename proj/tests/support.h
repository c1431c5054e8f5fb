#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "osp/dsl/checker.h"
#include "osp/dsl/interpreter.h"
#include "osp/dsl/parser.h"
#include "osp/engine.h"

namespace osp::test {

inline InstanceId id(uint64_t v) { return InstanceId{v}; }

inline std::string trace_text(const std::vector<TraceEvent>& events) {
  std::string out;
  for (const auto& ev : events) out += format_event(ev) + "\n";
  return out;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) { return std::string(OSP_SOURCE_DIR) + "/corpus/" + name; }
inline std::string golden_path(const std::string& name) {
  return std::string(OSP_SOURCE_DIR) + "/tests/golden/" + name;
}

inline const std::vector<std::string>& corpus_files() {
  static const std::vector<std::string> files{"social.osp", "fsm.osp", "skip_disengage.osp", "roads.osp",
                                              "cycle.osp"};
  return files;
}

// A registry with one archetype of each kind plus a mutable state and
// engine over it. Abilities are host callbacks.
struct World {
  ArchetypeRegistry reg;
  SystemState state;
  Engine engine{state};
  ArchetypeDef& node = reg.define("N", ArchetypeKind::kNode);
  ArchetypeDef& edge = reg.define("E", ArchetypeKind::kEdge);
  ArchetypeDef& walker = reg.define("W", ArchetypeKind::kWalker);
  ArchetypeDef& object = reg.define("O", ArchetypeKind::kObject);

  World() {
    reg.add_field(node, FieldDef{"tag", FieldType::kStr, PropertyValue("")});
    reg.add_field(walker, FieldDef{"count", FieldType::kInt, PropertyValue(0)});
  }

  InstanceId add_node(const std::string& tag = "") { return state.create(node, {{"tag", PropertyValue(tag)}}); }
  InstanceId add_edge(InstanceId a, InstanceId b) { return state.create_edge(edge, a, b); }
  InstanceId add_walker() { return state.create(walker); }

  void on(const ArchetypeDef& owner, const ArchetypeDef& trigger, Phase phase, const std::string& name,
          AbilityBody body) {
    reg.register_ability(AbilityDef{name, &owner, &trigger, phase, std::move(body)});
  }

  std::string trace() const { return trace_text(engine.events()); }
};

struct ProgramRun {
  std::string trace;
  std::string snapshot;
  std::vector<std::string> reports;
  int outcome = 0;  // 0 ok, 2 runtime error, 3 budget
  std::string error;
};

// Parses, checks and runs a program held in memory.
inline ProgramRun run_program(const std::string& source, uint64_t budget = Engine::kDefaultBudget) {
  ProgramRun r;
  dsl::Program program = dsl::parse_source(source);
  auto diags = dsl::check(program);
  if (!diags.empty()) throw std::runtime_error("unexpected diagnostic: " + diags.front().message);
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
  r.trace = trace_text(interp.engine().events());
  r.snapshot = interp.state().snapshot();
  r.reports = interp.engine().reports();
  return r;
}

}  // namespace osp::test
