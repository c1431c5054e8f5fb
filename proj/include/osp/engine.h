#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "osp/ability.h"
#include "osp/path.h"
#include "osp/system_state.h"
#include "osp/trace.h"

namespace osp {

struct SpawnAtNode {
  InstanceId node;
};
struct SpawnOnEdge {
  InstanceId edge;
};
struct SpawnOnEdgeFrom {
  InstanceId edge;
  InstanceId entry;
};
struct SpawnOnPath {
  PathCollection path;
};
using SpawnTarget = std::variant<SpawnAtNode, SpawnOnEdge, SpawnOnEdgeFrom, SpawnOnPath>;

struct VisitNode {
  InstanceId node;
};
struct VisitEdge {
  InstanceId edge;
};
struct VisitDirection {
  Direction direction = Direction::kOutgoing;
  const ArchetypeDef* filter = nullptr;
};
struct VisitPath {
  PathCollection path;
};
using VisitTarget = std::variant<VisitNode, VisitEdge, VisitDirection, VisitPath>;

class Engine;

// Handed to each ability body for the duration of its call.
class ExecutionContext {
 public:
  ExecutionContext(Engine& engine, const AbilityDef& ability, InstanceId walker, InstanceId location)
      : engine_(engine), ability_(ability), walker_(walker), location_(location) {}

  Engine& engine() { return engine_; }
  SystemState& state();
  const AbilityDef& ability() const { return ability_; }

  InstanceId walker() const { return walker_; }
  InstanceId location() const { return location_; }
  bool walker_ability() const { return ability_.owner->kind() == ArchetypeKind::kWalker; }

  InstanceId self() const { return walker_ability() ? walker_ : location_; }
  std::optional<InstanceId> here() const;
  std::optional<InstanceId> visitor() const;
  // The triggering walker's live destination queue.
  WalkerQueue& path();

  void visit(const VisitTarget& target);
  [[noreturn]] void skip();
  [[noreturn]] void disengage();
  void report(const std::string& payload);

 private:
  Engine& engine_;
  const AbilityDef& ability_;
  InstanceId walker_;
  InstanceId location_;
};

// Runs walkers over a SystemState. Spawns are synchronous: a spawn issued
// inside an ability body runs the new walker to quiescence before the body
// resumes.
class Engine {
 public:
  static constexpr uint64_t kDefaultBudget = 100000;

  explicit Engine(SystemState& state, uint64_t budget = kDefaultBudget) : state_(state), budget_(budget) {}

  SystemState& state() { return state_; }
  const SystemState& state() const { return state_; }

  void set_sink(TraceSink sink) { sink_ = std::move(sink); }
  const std::vector<TraceEvent>& events() const { return events_; }
  const std::vector<std::string>& reports() const { return reports_; }
  uint64_t steps() const { return steps_; }
  uint64_t budget() const { return budget_; }

  // Activates an inactive walker at the target and runs it until it is
  // inactive again.
  void spawn(InstanceId w, const SpawnTarget& target);

  // Enqueues destinations for an active walker standing on a node.
  void visit(InstanceId w, const VisitTarget& target);

  // Control flow for the walker currently running; unwinds to its loop.
  [[noreturn]] void skip(InstanceId w);
  [[noreturn]] void disengage(InstanceId w);

  void report(const std::string& payload, std::optional<InstanceId> w = std::nullopt,
              std::optional<InstanceId> location = std::nullopt);

  // Entry: location abilities, then walker abilities. Exit: the reverse.
  // Returns false when the walker was knocked out of its location mid-phase.
  bool run_visit_phase(InstanceId w, InstanceId location, Phase phase);

 private:
  void emit(TraceKind kind, std::optional<InstanceId> w, std::optional<InstanceId> location, std::string detail = {});
  [[noreturn]] void fail(InstanceId w, std::optional<InstanceId> location, const std::string& message);
  void require_running(InstanceId w, const char* op) const;
  void run(InstanceId w);
  void auto_queue(InstanceId w, InstanceId edge);
  void move_to_head(InstanceId w);

  SystemState& state_;
  uint64_t budget_;
  uint64_t steps_ = 0;
  uint64_t seq_ = 0;
  TraceSink sink_;
  std::vector<TraceEvent> events_;
  std::vector<std::string> reports_;
  std::vector<InstanceId> running_;
};

}  // namespace osp
