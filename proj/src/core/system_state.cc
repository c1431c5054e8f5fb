#include "osp/system_state.h"

#include <algorithm>
#include <set>

#include "osp/error.h"

namespace osp {

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::kOutgoing: return "out";
    case Direction::kIncoming: return "in";
    case Direction::kAny: return "any";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "out" || text == "outgoing") return Direction::kOutgoing;
  if (text == "in" || text == "incoming") return Direction::kIncoming;
  if (text == "any") return Direction::kAny;
  return std::nullopt;
}

namespace {

std::string describe(const Instance& inst) { return inst.archetype->name() + "#" + to_string(inst.id); }

std::string render_props(const PropertyMap& props) {
  std::string out = "{";
  for (size_t i = 0; i < props.size(); ++i) {
    if (i) out += ',';
    out += props.keys()[i] + "=" + render_value(props.values()[i]);
  }
  return out + "}";
}

}  // namespace

PropertyMap SystemState::build_props(const ArchetypeDef& arch, const FieldInits& props) const {
  PropertyMap out;
  const auto fields = arch.all_fields();
  for (const auto& f : fields) out.set(f.name, f.default_value);
  for (const auto& [name, value] : props) {
    const FieldDef* field = arch.find_field(name);
    if (!field) throw GraphError("archetype '" + arch.name() + "' has no field '" + name + "'");
    auto coerced = coerce_to_field(field->type, value);
    if (!coerced) {
      throw GraphError("field '" + arch.name() + "." + name + "' expects " + std::string(field_type_name(field->type)) +
                       ", got " + std::string(value_kind_name(value.kind())));
    }
    out.set(name, std::move(*coerced));
  }
  return out;
}

InstanceId SystemState::create(const ArchetypeDef& arch, const FieldInits& props) {
  if (arch.kind() == ArchetypeKind::kEdge) {
    throw GraphError("edge archetype '" + arch.name() + "' needs source and destination nodes");
  }
  Instance inst;
  inst.archetype = &arch;
  inst.props = build_props(arch, props);
  inst.id = InstanceId{next_id_++};
  const InstanceId id = inst.id;
  instances_.emplace(id, std::move(inst));
  if (arch.kind() == ArchetypeKind::kNode) incidence_[id];
  if (arch.kind() == ArchetypeKind::kWalker) walkers_[id];
  return id;
}

InstanceId SystemState::create_edge(const ArchetypeDef& arch, InstanceId src, InstanceId dst, const FieldInits& props) {
  if (arch.kind() != ArchetypeKind::kEdge) throw GraphError("'" + arch.name() + "' is not an edge archetype");
  if (!is_node(src)) throw GraphError("cannot create edge '" + arch.name() + "': source node #" + to_string(src) + " does not exist");
  if (!is_node(dst)) {
    throw GraphError("cannot create edge '" + arch.name() + "': destination node #" + to_string(dst) + " does not exist");
  }
  Instance inst;
  inst.archetype = &arch;
  inst.props = build_props(arch, props);
  inst.endpoints = Endpoints{src, dst};
  inst.id = InstanceId{next_id_++};
  const InstanceId id = inst.id;
  instances_.emplace(id, std::move(inst));
  incidence_[src].push_back(id);
  if (dst != src) incidence_[dst].push_back(id);
  return id;
}

void SystemState::remove_edge_record(InstanceId e) {
  const Endpoints ends = endpoints(e);
  for (InstanceId n : {ends.src, ends.dst}) {
    auto it = incidence_.find(n);
    if (it == incidence_.end()) continue;
    auto& list = it->second;
    list.erase(std::remove(list.begin(), list.end(), e), list.end());
  }
  instances_.erase(e);
}

void SystemState::purge_dead(const std::vector<InstanceId>& dead) {
  auto is_dead = [&](InstanceId id) { return std::find(dead.begin(), dead.end(), id) != dead.end(); };
  for (auto& [w, rt] : walkers_) {
    auto& q = rt.queue;
    q.erase(std::remove_if(q.begin(), q.end(), [&](const QueueEntry& e) { return is_dead(e.target); }), q.end());
    for (auto& entry : q) {
      if (entry.anchor && is_dead(*entry.anchor)) entry.anchor.reset();
    }
    if (rt.location && is_dead(*rt.location)) {
      rt.location.reset();
      rt.active = false;
      rt.source.reset();
    }
    if (rt.source && is_dead(rt.source->first)) rt.source.reset();
  }
}

void SystemState::delete_node(InstanceId n) {
  if (!is_node(n)) throw GraphError("delete_node: #" + to_string(n) + " is not a live node");
  std::vector<InstanceId> dead = incidence_.at(n);
  for (InstanceId e : dead) remove_edge_record(e);
  incidence_.erase(n);
  instances_.erase(n);
  dead.push_back(n);
  purge_dead(dead);
}

void SystemState::delete_edge(InstanceId e) {
  if (!is_edge(e)) throw GraphError("delete_edge: #" + to_string(e) + " is not a live edge");
  remove_edge_record(e);
  purge_dead({e});
}

void SystemState::delete_instance(InstanceId id) {
  const auto kind = kind_of(id);
  if (!kind) throw GraphError("delete: #" + to_string(id) + " does not exist");
  if (*kind == ArchetypeKind::kNode || *kind == ArchetypeKind::kEdge) {
    throw GraphError("delete_instance: use node/edge deletion for #" + to_string(id));
  }
  if (*kind == ArchetypeKind::kWalker) {
    if (walkers_.at(id).active) throw GraphError("cannot delete active walker #" + to_string(id));
    walkers_.erase(id);
  }
  instances_.erase(id);
}

void SystemState::destroy(InstanceId id) {
  const auto kind = kind_of(id);
  if (!kind) throw GraphError("delete: #" + to_string(id) + " does not exist");
  switch (*kind) {
    case ArchetypeKind::kNode: delete_node(id); break;
    case ArchetypeKind::kEdge: delete_edge(id); break;
    default: delete_instance(id); break;
  }
}

std::optional<ArchetypeKind> SystemState::kind_of(InstanceId id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) return std::nullopt;
  return it->second.archetype->kind();
}

bool SystemState::is_node(InstanceId id) const { return kind_of(id) == ArchetypeKind::kNode; }
bool SystemState::is_edge(InstanceId id) const { return kind_of(id) == ArchetypeKind::kEdge; }
bool SystemState::is_walker(InstanceId id) const { return kind_of(id) == ArchetypeKind::kWalker; }

const Instance& SystemState::instance(InstanceId id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) throw GraphError("unknown instance #" + to_string(id));
  return it->second;
}

Instance& SystemState::mutable_instance(InstanceId id) {
  auto it = instances_.find(id);
  if (it == instances_.end()) throw GraphError("unknown instance #" + to_string(id));
  return it->second;
}

const Endpoints& SystemState::endpoints(InstanceId e) const {
  const Instance& inst = instance(e);
  if (!inst.endpoints) throw GraphError("#" + to_string(e) + " is not an edge");
  return *inst.endpoints;
}

const PropertyValue& SystemState::get_prop(InstanceId id, std::string_view field) const {
  const Instance& inst = instance(id);
  const PropertyValue* v = inst.props.find(field);
  if (!v) throw GraphError(describe(inst) + " has no field '" + std::string(field) + "'");
  return *v;
}

void SystemState::set_prop(InstanceId id, std::string_view field, PropertyValue value) {
  Instance& inst = mutable_instance(id);
  const FieldDef* def = inst.archetype->find_field(field);
  if (!def) throw GraphError(describe(inst) + " has no field '" + std::string(field) + "'");
  auto coerced = coerce_to_field(def->type, value);
  if (!coerced) {
    throw GraphError("field '" + inst.archetype->name() + "." + std::string(field) + "' expects " +
                     std::string(field_type_name(def->type)) + ", got " + std::string(value_kind_name(value.kind())));
  }
  *inst.props.find(field) = std::move(*coerced);
}

std::vector<InstanceId> SystemState::edges_at(InstanceId n, Direction d, const ArchetypeDef* filter) const {
  auto it = incidence_.find(n);
  if (it == incidence_.end()) throw GraphError("edges_at: #" + to_string(n) + " is not a live node");
  std::vector<InstanceId> out;
  for (InstanceId e : it->second) {
    const Instance& inst = instances_.at(e);
    if (filter && !inst.archetype->is_a(*filter)) continue;
    const bool outgoing = inst.endpoints->src == n;
    const bool incoming = inst.endpoints->dst == n;
    if ((d == Direction::kOutgoing && outgoing) || (d == Direction::kIncoming && incoming) || d == Direction::kAny) {
      out.push_back(e);
    }
  }
  return out;
}

InstanceId SystemState::next_node(InstanceId e, InstanceId from) const {
  const Endpoints& ends = endpoints(e);
  if (from == ends.src) return ends.dst;
  if (from == ends.dst) return ends.src;
  throw GraphError("node #" + to_string(from) + " is not an endpoint of edge #" + to_string(e));
}

bool SystemState::adjacent(InstanceId a, InstanceId b) const {
  auto it = incidence_.find(a);
  if (it == incidence_.end()) return false;
  for (InstanceId e : it->second) {
    const Endpoints& ends = *instances_.at(e).endpoints;
    if ((ends.src == a && ends.dst == b) || (ends.dst == a && ends.src == b)) return true;
  }
  return false;
}

std::vector<InstanceId> SystemState::ids() const {
  std::vector<InstanceId> out;
  for (const auto& [id, inst] : instances_) out.push_back(id);
  return out;
}

std::vector<InstanceId> SystemState::nodes() const {
  std::vector<InstanceId> out;
  for (const auto& [id, inst] : instances_)
    if (inst.archetype->kind() == ArchetypeKind::kNode) out.push_back(id);
  return out;
}

std::vector<InstanceId> SystemState::edges() const {
  std::vector<InstanceId> out;
  for (const auto& [id, inst] : instances_)
    if (inst.archetype->kind() == ArchetypeKind::kEdge) out.push_back(id);
  return out;
}

std::vector<InstanceId> SystemState::walkers() const {
  std::vector<InstanceId> out;
  for (const auto& [id, rt] : walkers_) out.push_back(id);
  return out;
}

SystemState::WalkerRuntime& SystemState::runtime(InstanceId w) {
  auto it = walkers_.find(w);
  if (it == walkers_.end()) throw GraphError("#" + to_string(w) + " is not a live walker");
  return it->second;
}

const SystemState::WalkerRuntime& SystemState::runtime(InstanceId w) const {
  auto it = walkers_.find(w);
  if (it == walkers_.end()) throw GraphError("#" + to_string(w) + " is not a live walker");
  return it->second;
}

const WalkerQueue& SystemState::queue(InstanceId w) const { return runtime(w).queue; }
WalkerQueue& SystemState::mutable_queue(InstanceId w) { return runtime(w).queue; }
std::optional<InstanceId> SystemState::location(InstanceId w) const { return runtime(w).location; }
bool SystemState::is_active(InstanceId w) const { return runtime(w).active; }

std::optional<InstanceId> SystemState::source(InstanceId w, InstanceId e) const {
  const auto& rt = runtime(w);
  if (rt.source && rt.source->first == e) return rt.source->second;
  return std::nullopt;
}

void SystemState::place(InstanceId w, InstanceId location, std::optional<InstanceId> source) {
  auto& rt = runtime(w);
  if (!is_live(location) || !(is_node(location) || is_edge(location))) {
    throw GraphError("cannot place walker #" + to_string(w) + " at #" + to_string(location));
  }
  rt.location = location;
  rt.active = true;
  if (is_edge(location)) {
    if (!source) throw GraphError("placing walker on an edge requires an entry node");
    rt.source = std::make_pair(location, *source);
  } else {
    rt.source.reset();
  }
}

void SystemState::deactivate(InstanceId w) {
  auto& rt = runtime(w);
  rt.active = false;
  rt.source.reset();
}

void SystemState::detach(InstanceId w) {
  auto& rt = runtime(w);
  rt.queue.clear();
  rt.location.reset();
  rt.active = false;
  rt.source.reset();
}

std::optional<std::string> SystemState::check_invariants() const {
  for (const auto& [id, inst] : instances_) {
    if (!inst.endpoints) continue;
    if (!is_node(inst.endpoints->src) || !is_node(inst.endpoints->dst)) {
      return "edge #" + to_string(id) + " references a dead endpoint";
    }
  }
  for (const auto& [w, rt] : walkers_) {
    for (const auto& entry : rt.queue) {
      if (!is_node(entry.target) && !is_edge(entry.target)) {
        return "walker #" + to_string(w) + " queues dead id #" + to_string(entry.target);
      }
    }
    if (rt.active && !rt.location) return "walker #" + to_string(w) + " is active without a location";
    if (rt.location && !is_live(*rt.location)) return "walker #" + to_string(w) + " stands on a dead location";
    const bool on_edge = rt.active && rt.location && is_edge(*rt.location);
    if (on_edge != rt.source.has_value()) {
      return "walker #" + to_string(w) + " source entry does not match its edge location";
    }
    if (rt.source && rt.source->first != *rt.location) return "walker #" + to_string(w) + " source refers to another edge";
  }
  return std::nullopt;
}

std::string SystemState::snapshot() const {
  std::string out;
  for (const auto& [id, inst] : instances_) {
    switch (inst.archetype->kind()) {
      case ArchetypeKind::kNode:
        out += "NODE " + to_string(id) + " " + inst.archetype->name() + " " + render_props(inst.props) + "\n";
        break;
      case ArchetypeKind::kEdge:
        out += "EDGE " + to_string(id) + " " + inst.archetype->name() + " " + to_string(inst.endpoints->src) + " -> " +
               to_string(inst.endpoints->dst) + " " + render_props(inst.props) + "\n";
        break;
      case ArchetypeKind::kWalker: {
        const auto& rt = walkers_.at(id);
        std::string queue = "[";
        for (size_t i = 0; i < rt.queue.size(); ++i) {
          if (i) queue += ',';
          queue += to_string(rt.queue[i].target);
        }
        queue += "]";
        out += "WALKER " + to_string(id) + " " + inst.archetype->name() +
               " loc=" + (rt.location ? to_string(*rt.location) : std::string("none")) +
               " active=" + (rt.active ? "true" : "false") + " queue=" + queue + " " + render_props(inst.props) + "\n";
        break;
      }
      case ArchetypeKind::kObject:
        break;
    }
  }
  return out;
}

}  // namespace osp
