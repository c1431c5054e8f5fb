#include "osp/engine.h"

#include <algorithm>

namespace osp {

namespace {

struct SkipSignal {
  InstanceId walker;
};
struct DisengageSignal {
  InstanceId walker;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string ref(InstanceId id) { return "#" + to_string(id); }

}  // namespace

SystemState& ExecutionContext::state() { return engine_.state(); }

std::optional<InstanceId> ExecutionContext::here() const {
  if (walker_ability()) return location_;
  return std::nullopt;
}

std::optional<InstanceId> ExecutionContext::visitor() const {
  if (walker_ability()) return std::nullopt;
  return walker_;
}

WalkerQueue& ExecutionContext::path() { return engine_.state().mutable_queue(walker_); }

void ExecutionContext::visit(const VisitTarget& target) { engine_.visit(walker_, target); }
void ExecutionContext::skip() { engine_.skip(walker_); }
void ExecutionContext::disengage() { engine_.disengage(walker_); }
void ExecutionContext::report(const std::string& payload) { engine_.report(payload, walker_, location_); }

void Engine::emit(TraceKind kind, std::optional<InstanceId> w, std::optional<InstanceId> location, std::string detail) {
  TraceEvent ev{++seq_, kind, w, location, std::move(detail)};
  if (sink_) sink_(ev);
  events_.push_back(std::move(ev));
}

void Engine::fail(InstanceId w, std::optional<InstanceId> location, const std::string& message) {
  TraversalError err(message);
  emit(TraceKind::kError, w, location, message);
  err.traced = true;
  throw err;
}

void Engine::report(const std::string& payload, std::optional<InstanceId> w, std::optional<InstanceId> location) {
  reports_.push_back(payload);
  emit(TraceKind::kReport, w, location, payload);
}

void Engine::require_running(InstanceId w, const char* op) const {
  if (!state_.is_walker(w)) throw TraversalError(std::string(op) + ": #" + to_string(w) + " is not a walker");
  if (!state_.is_active(w)) throw TraversalError(std::string(op) + ": walker " + ref(w) + " is not active");
  if (running_.empty() || running_.back() != w) {
    throw TraversalError(std::string(op) + ": walker " + ref(w) + " is not the walker currently executing");
  }
}

void Engine::skip(InstanceId w) {
  require_running(w, "skip");
  throw SkipSignal{w};
}

void Engine::disengage(InstanceId w) {
  require_running(w, "disengage");
  throw DisengageSignal{w};
}

bool Engine::run_visit_phase(InstanceId w, InstanceId location, Phase phase) {
  auto location_abilities = matching_abilities(state_, location, w, phase);
  auto walker_abilities = matching_abilities(state_, w, location, phase);
  std::vector<std::pair<const AbilityDef*, InstanceId>> order;
  auto add = [&](const std::vector<const AbilityDef*>& list, InstanceId owner) {
    for (const AbilityDef* a : list) order.emplace_back(a, owner);
  };
  if (phase == Phase::kEntry) {
    add(location_abilities, location);
    add(walker_abilities, w);
  } else {
    add(walker_abilities, w);
    add(location_abilities, location);
  }

  for (const auto& [ability, owner] : order) {
    const std::string detail = ability->owner->name() + "." + ability->name + "/" + std::string(phase_name(phase));
    emit(TraceKind::kAbility, w, location, detail);
    ExecutionContext ctx(*this, *ability, w, location);
    try {
      if (ability->body) ability->body(ctx);
    } catch (OspError& err) {
      if (!err.traced) {
        err.add_context(detail + " (walker " + ref(w) + " at " + ref(location) + ")");
        emit(TraceKind::kError, w, location, err.message());
        err.traced = true;
      }
      throw;
    }
    if (!state_.is_active(w) || state_.location(w) != location) return false;
  }
  return true;
}

void Engine::auto_queue(InstanceId w, InstanceId edge) {
  const auto entry = state_.source(w, edge);
  if (!entry) fail(w, edge, "walker " + ref(w) + " is on edge " + ref(edge) + " without an entry node");
  const InstanceId far = state_.next_node(edge, *entry);
  auto& queue = state_.mutable_queue(w);
  const bool present = std::any_of(queue.begin(), queue.end(), [&](const QueueEntry& q) { return q.target == far; });
  if (present) return;
  queue.push_back(QueueEntry{far, std::nullopt});
  emit(TraceKind::kAutoQueue, w, edge, "+" + to_string(far));
}

void Engine::move_to_head(InstanceId w) {
  auto& queue = state_.mutable_queue(w);
  const QueueEntry head = queue.front();
  queue.pop_front();
  const InstanceId cur = *state_.location(w);
  const InstanceId to = head.target;
  std::optional<InstanceId> via;

  if (!state_.is_node(to) && !state_.is_edge(to)) {
    fail(w, cur, "walker " + ref(w) + " cannot move to " + ref(to) + ": not a live node or edge");
  }
  if (state_.is_node(cur)) {
    if (state_.is_node(to)) {
      const bool from_anchor = head.anchor && state_.is_node(*head.anchor) &&
                               (*head.anchor == to || state_.adjacent(*head.anchor, to));
      if (to != cur && !state_.adjacent(cur, to) && !from_anchor) {
        fail(w, cur, "walker " + ref(w) + " cannot move from " + ref(cur) + " to " + ref(to) + ": no connecting edge");
      }
      state_.place(w, to);
      if (to != cur && !state_.adjacent(cur, to)) via = *head.anchor;
    } else {
      const Endpoints& ends = state_.endpoints(to);
      auto is_end = [&](InstanceId n) { return ends.src == n || ends.dst == n; };
      std::optional<InstanceId> entry;
      if (head.anchor && is_end(*head.anchor)) {
        entry = *head.anchor;
      } else if (is_end(cur)) {
        entry = cur;
      }
      if (!entry) {
        fail(w, cur, "walker " + ref(w) + " cannot enter edge " + ref(to) + " from " + ref(cur) + ": not an endpoint");
      }
      state_.place(w, to, *entry);
      if (*entry != cur) via = *entry;
    }
  } else {
    if (state_.is_edge(to)) {
      fail(w, cur, "walker " + ref(w) + " cannot move from edge " + ref(cur) + " directly to edge " + ref(to));
    }
    const InstanceId entry = *state_.source(w, cur);
    const InstanceId far = state_.next_node(cur, entry);
    if (to != far) {
      fail(w, cur,
           "walker " + ref(w) + " must leave edge " + ref(cur) + " at " + ref(far) + ", but its queue head is " +
               ref(to));
    }
    state_.place(w, to);
  }
  std::string detail = "from=" + to_string(cur);
  if (via) detail += " via=" + to_string(*via);
  emit(TraceKind::kMove, w, to, detail);
}

void Engine::run(InstanceId w) {
  running_.push_back(w);
  struct Pop {
    std::vector<InstanceId>& stack;
    ~Pop() { stack.pop_back(); }
  } pop{running_};

  for (;;) {
    const InstanceId loc = *state_.location(w);
    emit(TraceKind::kArrive, w, loc, state_.archetype_of(loc).name());
    if (++steps_ > budget_) {
      BudgetExceeded err("step budget of " + std::to_string(budget_) + " arrivals exceeded");
      emit(TraceKind::kError, w, loc, err.message());
      err.traced = true;
      throw err;
    }

    bool intact = true;
    try {
      if (state_.is_edge(loc)) auto_queue(w, loc);
      intact = run_visit_phase(w, loc, Phase::kEntry);
      if (intact && !state_.queue(w).empty()) {
        emit(TraceKind::kDepart, w, loc, state_.archetype_of(loc).name());
        intact = run_visit_phase(w, loc, Phase::kExit);
      }
    } catch (const SkipSignal&) {
      emit(TraceKind::kSkip, w, loc);
    } catch (const DisengageSignal&) {
      emit(TraceKind::kDisengage, w, loc);
      state_.detach(w);
      return;
    }

    if (!intact) {
      emit(TraceKind::kDisengage, w, std::nullopt, "location-deleted");
      return;
    }
    if (state_.queue(w).empty()) {
      if (state_.is_node(loc)) {
        state_.deactivate(w);
        emit(TraceKind::kExhaust, w, loc);
        return;
      }
      fail(w, loc, "walker " + ref(w) + " cannot stop on edge " + ref(loc) + ": destination queue is empty");
    }
    move_to_head(w);
  }
}

void Engine::spawn(InstanceId w, const SpawnTarget& target) {
  if (!state_.is_walker(w)) throw TraversalError("spawn: " + ref(w) + " is not a walker");
  if (state_.is_active(w)) throw TraversalError("spawn: walker " + ref(w) + " is already active");

  InstanceId start{};
  std::optional<InstanceId> entry;
  WalkerQueue queue;

  auto require_edge = [&](InstanceId e) {
    if (!state_.is_edge(e)) throw TraversalError("spawn: " + ref(e) + " is not a live edge");
    return state_.endpoints(e);
  };

  std::visit(Overloaded{
                 [&](const SpawnAtNode& t) {
                   if (!state_.is_node(t.node)) throw TraversalError("spawn: " + ref(t.node) + " is not a live node");
                   start = t.node;
                 },
                 [&](const SpawnOnEdge& t) {
                   const Endpoints ends = require_edge(t.edge);
                   start = t.edge;
                   entry = ends.src;
                   queue.push_back(QueueEntry{ends.dst, std::nullopt});
                 },
                 [&](const SpawnOnEdgeFrom& t) {
                   const Endpoints ends = require_edge(t.edge);
                   if (ends.src != t.entry && ends.dst != t.entry) {
                     throw TraversalError("spawn: " + ref(t.entry) + " is not an endpoint of edge " + ref(t.edge));
                   }
                   start = t.edge;
                   entry = t.entry;
                   queue.push_back(QueueEntry{state_.next_node(t.edge, t.entry), std::nullopt});
                 },
                 [&](const SpawnOnPath& t) {
                   const PathCollection p = make_path(state_, t.path.origin, t.path.elements);
                   if (p.elements.empty()) throw PathError("spawn: path is empty");
                   const auto anchors = path_anchors(state_, p);
                   start = p.elements.front();
                   size_t rest = 1;
                   if (state_.is_edge(start)) {
                     const Endpoints ends = state_.endpoints(start);
                     entry = ends.src;
                     queue.push_back(QueueEntry{ends.dst, std::nullopt});
                     if (p.elements.size() > 1 && p.elements[1] == ends.dst) rest = 2;
                   }
                   for (size_t i = rest; i < p.elements.size(); ++i) {
                     queue.push_back(QueueEntry{p.elements[i], anchors[i]});
                   }
                 },
             },
             target);

  state_.mutable_queue(w) = std::move(queue);
  state_.place(w, start, entry);
  emit(TraceKind::kSpawn, w, start, state_.archetype_of(w).name());
  run(w);
}

void Engine::visit(InstanceId w, const VisitTarget& target) {
  if (!state_.is_walker(w)) throw TraversalError("visit: " + ref(w) + " is not a walker");
  if (!state_.is_active(w)) throw TraversalError("visit: walker " + ref(w) + " is not active");
  const InstanceId cur = *state_.location(w);
  if (!state_.is_node(cur)) throw TraversalError("visit: walker " + ref(w) + " is on edge " + ref(cur) + ", not a node");
  auto& queue = state_.mutable_queue(w);

  std::visit(Overloaded{
                 [&](const VisitNode& t) {
                   if (!state_.is_node(t.node)) throw TraversalError("visit: " + ref(t.node) + " is not a live node");
                   if (!state_.adjacent(cur, t.node)) {
                     throw TraversalError("visit: no edge connects " + ref(cur) + " to " + ref(t.node));
                   }
                   queue.push_back(QueueEntry{t.node, cur});
                 },
                 [&](const VisitEdge& t) {
                   if (!state_.is_edge(t.edge)) throw TraversalError("visit: " + ref(t.edge) + " is not a live edge");
                   const Endpoints& ends = state_.endpoints(t.edge);
                   if (ends.src != cur && ends.dst != cur) {
                     throw TraversalError("visit: edge " + ref(t.edge) + " is not incident to " + ref(cur));
                   }
                   queue.push_back(QueueEntry{t.edge, cur});
                   queue.push_back(QueueEntry{state_.next_node(t.edge, cur), std::nullopt});
                 },
                 [&](const VisitDirection& t) {
                   for (InstanceId e : state_.edges_at(cur, t.direction, t.filter)) {
                     queue.push_back(QueueEntry{e, cur});
                     queue.push_back(QueueEntry{state_.next_node(e, cur), std::nullopt});
                   }
                 },
                 [&](const VisitPath& t) {
                   const PathCollection p = make_path(state_, t.path.origin, t.path.elements);
                   if (p.elements.empty()) return;
                   const InstanceId first = p.elements.front();
                   bool reachable = first == cur;
                   if (state_.is_node(first)) {
                     reachable = reachable || state_.adjacent(cur, first);
                   } else {
                     const Endpoints& ends = state_.endpoints(first);
                     reachable = ends.src == cur || ends.dst == cur;
                   }
                   if (!reachable) {
                     throw TraversalError("visit: path starts at " + ref(first) + ", which is not reachable from " +
                                          ref(cur));
                   }
                   const auto expanded = expand_path(state_, p, cur);
                   InstanceId prev = cur;
                   for (InstanceId x : expanded) {
                     queue.push_back(QueueEntry{x, prev});
                     prev = x;
                   }
                 },
             },
             target);
}

}  // namespace osp
