#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osp/archetype.h"
#include "osp/value.h"

namespace osp {

enum class Direction { kOutgoing, kIncoming, kAny };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

struct Endpoints {
  InstanceId src;
  InstanceId dst;
};

struct Instance {
  InstanceId id;
  const ArchetypeDef* archetype = nullptr;
  PropertyMap props;
  std::optional<Endpoints> endpoints;  // edges only
};

// One destination queue slot. `anchor` is the node the hop was justified
// from when it was enqueued (the node a visit was issued at, or the prior
// path element); movement falls back to the current location without one.
struct QueueEntry {
  InstanceId target;
  std::optional<InstanceId> anchor;

  friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

using WalkerQueue = std::deque<QueueEntry>;

// The system state: every instance plus the walker queue, location, activity
// and edge-entry source maps. Single owner, no internal locking.
class SystemState {
 public:
  using FieldInits = std::vector<std::pair<std::string, PropertyValue>>;

  // Objects, nodes and walkers. Missing fields take their defaults; unknown
  // names and kind mismatches throw GraphError.
  InstanceId create(const ArchetypeDef& arch, const FieldInits& props = {});
  InstanceId create_edge(const ArchetypeDef& arch, InstanceId src, InstanceId dst, const FieldInits& props = {});

  void delete_node(InstanceId n);
  void delete_edge(InstanceId e);
  // Objects and inactive walkers.
  void delete_instance(InstanceId id);
  // Dispatches on kind.
  void destroy(InstanceId id);

  bool is_live(InstanceId id) const { return instances_.count(id) > 0; }
  bool is_node(InstanceId id) const;
  bool is_edge(InstanceId id) const;
  bool is_walker(InstanceId id) const;
  std::optional<ArchetypeKind> kind_of(InstanceId id) const;

  const Instance& instance(InstanceId id) const;
  const ArchetypeDef& archetype_of(InstanceId id) const { return *instance(id).archetype; }
  const Endpoints& endpoints(InstanceId e) const;

  const PropertyValue& get_prop(InstanceId id, std::string_view field) const;
  void set_prop(InstanceId id, std::string_view field, PropertyValue value);

  // Incident edges of `n` whose direction relative to `n` is `d`, optionally
  // restricted to an archetype (or its descendants), ascending by id. A
  // self-loop is both outgoing and incoming and is listed once.
  std::vector<InstanceId> edges_at(InstanceId n, Direction d, const ArchetypeDef* filter = nullptr) const;
  // Opposite endpoint of `e` seen from `from`.
  InstanceId next_node(InstanceId e, InstanceId from) const;
  bool adjacent(InstanceId a, InstanceId b) const;

  std::vector<InstanceId> ids() const;
  std::vector<InstanceId> nodes() const;
  std::vector<InstanceId> edges() const;
  std::vector<InstanceId> walkers() const;

  // Walker maps.
  const WalkerQueue& queue(InstanceId w) const;
  WalkerQueue& mutable_queue(InstanceId w);
  std::optional<InstanceId> location(InstanceId w) const;
  bool is_active(InstanceId w) const;
  // S(w, e): the node `w` entered edge `e` from, defined only while w is on e.
  std::optional<InstanceId> source(InstanceId w, InstanceId e) const;

  void place(InstanceId w, InstanceId location, std::optional<InstanceId> source = std::nullopt);
  // Inactive but keeps its location (queue exhaustion at a node).
  void deactivate(InstanceId w);
  // Inactive, no location, empty queue, no source entry.
  void detach(InstanceId w);

  // Full-scan check of referential integrity, queue hygiene, and the
  // activity/location/source coupling. Returns a description of the first
  // broken invariant.
  std::optional<std::string> check_invariants() const;

  // Line-oriented snapshot of every node, edge and walker in id order.
  std::string snapshot() const;

 private:
  struct WalkerRuntime {
    WalkerQueue queue;
    std::optional<InstanceId> location;
    bool active = false;
    std::optional<std::pair<InstanceId, InstanceId>> source;  // (edge, entry node)
  };

  Instance& mutable_instance(InstanceId id);
  WalkerRuntime& runtime(InstanceId w);
  const WalkerRuntime& runtime(InstanceId w) const;
  PropertyMap build_props(const ArchetypeDef& arch, const FieldInits& props) const;
  void remove_edge_record(InstanceId e);
  void purge_dead(const std::vector<InstanceId>& dead);

  uint64_t next_id_ = 1;
  std::map<InstanceId, Instance> instances_;
  std::map<InstanceId, std::vector<InstanceId>> incidence_;  // node -> incident edges, ascending
  std::map<InstanceId, WalkerRuntime> walkers_;
};

}  // namespace osp
