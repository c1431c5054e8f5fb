#include "osp/path.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace osp {

std::string_view constraint_name(PathConstraint c) {
  switch (c) {
    case PathConstraint::kOriginConnectivity: return "origin connectivity";
    case PathConstraint::kSequentialConnectivity: return "sequential connectivity";
    case PathConstraint::kPathCompleteness: return "path completeness";
    case PathConstraint::kTraversalCoherence: return "traversal coherence";
  }
  return "?";
}

namespace {

// True when a walker standing on/at `from` could step straight to `to`:
// node-node over some edge, node-edge or edge-node by incidence.
bool connects(const SystemState& state, InstanceId from, InstanceId to) {
  const bool from_node = state.is_node(from);
  const bool to_node = state.is_node(to);
  if (from_node && to_node) return state.adjacent(from, to);
  if (from_node && !to_node) {
    const auto& ends = state.endpoints(to);
    return ends.src == from || ends.dst == from;
  }
  if (!from_node && to_node) {
    const auto& ends = state.endpoints(from);
    return ends.src == to || ends.dst == to;
  }
  return false;
}

std::vector<InstanceId> neighbours(const SystemState& state, InstanceId x) {
  std::vector<InstanceId> out;
  if (state.is_node(x)) {
    for (InstanceId e : state.edges_at(x, Direction::kAny)) {
      out.push_back(e);
      out.push_back(state.next_node(e, x));
    }
  } else {
    const auto& ends = state.endpoints(x);
    out.push_back(ends.src);
    out.push_back(ends.dst);
  }
  return out;
}

// Route from the origin to `target` whose intermediates all lie in `prefix`.
bool reachable_through(const SystemState& state, InstanceId origin, InstanceId target,
                       const std::set<InstanceId>& prefix) {
  if (target == origin) return true;
  std::set<InstanceId> seen{origin};
  std::deque<InstanceId> frontier{origin};
  while (!frontier.empty()) {
    const InstanceId x = frontier.front();
    frontier.pop_front();
    for (InstanceId y : neighbours(state, x)) {
      if (y == target) return true;
      if (prefix.count(y) && seen.insert(y).second) frontier.push_back(y);
    }
  }
  return false;
}

void require_live(const SystemState& state, InstanceId origin, const std::vector<InstanceId>& elements) {
  if (!state.is_node(origin)) throw PathError("path origin #" + to_string(origin) + " is not a live node");
  for (size_t i = 0; i < elements.size(); ++i) {
    const InstanceId x = elements[i];
    if (!state.is_node(x) && !state.is_edge(x)) {
      throw PathError("path element " + std::to_string(i) + " (#" + to_string(x) + ") is not a live node or edge");
    }
  }
}

PathViolation violation(PathConstraint c, size_t index, InstanceId x, const std::string& why) {
  return PathViolation{c, index,
                       std::string(constraint_name(c)) + " violated at element " + std::to_string(index) + " (#" +
                           to_string(x) + "): " + why};
}

}  // namespace

std::optional<PathViolation> validate_path(const SystemState& state, InstanceId origin,
                                           const std::vector<InstanceId>& elements) {
  require_live(state, origin, elements);

  // positions[0] is the origin, positions[k] is element k-1.
  std::vector<InstanceId> positions{origin};
  std::set<InstanceId> prefix{origin};
  size_t last_parent = 0;

  for (size_t i = 0; i < elements.size(); ++i) {
    const InstanceId x = elements[i];
    std::vector<size_t> parents;
    if (i == 0) {
      if (x == origin || connects(state, origin, x)) parents.push_back(0);
      if (parents.empty()) {
        return violation(PathConstraint::kOriginConnectivity, i, x, "not the origin and not connected to it");
      }
    } else {
      for (size_t j = 0; j < positions.size(); ++j) {
        if (connects(state, positions[j], x)) parents.push_back(j);
      }
      if (parents.empty()) {
        return violation(PathConstraint::kSequentialConnectivity, i, x, "no earlier element connects to it");
      }
    }
    if (!reachable_through(state, origin, x, prefix)) {
      return violation(PathConstraint::kPathCompleteness, i, x, "no route from the origin through earlier elements");
    }
    auto parent = std::lower_bound(parents.begin(), parents.end(), last_parent);
    if (parent == parents.end()) {
      return violation(PathConstraint::kTraversalCoherence, i, x,
                       "attaches only to elements before the current breadth-first frontier");
    }
    last_parent = *parent;
    positions.push_back(x);
    prefix.insert(x);
  }
  return std::nullopt;
}

PathCollection make_path(const SystemState& state, InstanceId origin, std::vector<InstanceId> elements) {
  if (auto v = validate_path(state, origin, elements)) throw PathViolationError(*v);
  return PathCollection{origin, std::move(elements)};
}

PathCollection path_query(const SystemState& state, InstanceId origin, const PathPredicate& pred, bool include_edges,
                          Direction d) {
  if (!state.is_node(origin)) throw PathError("path query origin #" + to_string(origin) + " is not a live node");
  PathCollection out{origin, {}};
  std::set<InstanceId> visited{origin};
  std::deque<InstanceId> frontier{origin};
  if (pred(state, origin)) out.elements.push_back(origin);
  while (!frontier.empty()) {
    const InstanceId x = frontier.front();
    frontier.pop_front();
    for (InstanceId e : state.edges_at(x, d)) {
      const InstanceId y = state.next_node(e, x);
      if (visited.count(y) || !pred(state, y)) continue;
      if (include_edges && !pred(state, e)) continue;
      visited.insert(y);
      if (include_edges) out.elements.push_back(e);
      out.elements.push_back(y);
      frontier.push_back(y);
    }
  }
  return out;
}

PathCollection path_concat(const SystemState& state, const PathCollection& p, const PathCollection& q) {
  std::vector<InstanceId> elements = p.elements;
  elements.insert(elements.end(), q.elements.begin(), q.elements.end());
  return make_path(state, p.origin, std::move(elements));
}

PathCollection path_slice(const SystemState& state, const PathCollection& p, size_t begin, size_t end) {
  end = std::min(end, p.elements.size());
  begin = std::min(begin, end);
  std::vector<InstanceId> elements(p.elements.begin() + static_cast<std::ptrdiff_t>(begin),
                                   p.elements.begin() + static_cast<std::ptrdiff_t>(end));
  return make_path(state, p.origin, std::move(elements));
}

PathCollection path_filter(const SystemState& state, const PathCollection& p, const PathPredicate& pred) {
  std::vector<InstanceId> elements;
  for (InstanceId x : p.elements) {
    if (pred(state, x)) elements.push_back(x);
  }
  return make_path(state, p.origin, std::move(elements));
}

namespace {

// Shortest undirected node route from `from` to any node in `targets`,
// excluding `from`, including the reached target.
std::optional<std::vector<InstanceId>> node_route(const SystemState& state, InstanceId from,
                                                  const std::set<InstanceId>& targets) {
  std::map<InstanceId, InstanceId> parent;
  std::set<InstanceId> seen{from};
  std::deque<InstanceId> frontier{from};
  while (!frontier.empty()) {
    const InstanceId x = frontier.front();
    frontier.pop_front();
    std::set<InstanceId> next;
    for (InstanceId e : state.edges_at(x, Direction::kAny)) next.insert(state.next_node(e, x));
    for (InstanceId y : next) {
      if (!seen.insert(y).second) continue;
      parent[y] = x;
      if (targets.count(y)) {
        std::vector<InstanceId> route{y};
        for (InstanceId cur = y; parent.at(cur) != from; cur = parent.at(cur)) route.push_back(parent.at(cur));
        std::reverse(route.begin(), route.end());
        return route;
      }
      frontier.push_back(y);
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<InstanceId> expand_path(const SystemState& state, const PathCollection& p, InstanceId start,
                                    std::optional<InstanceId> entry) {
  require_live(state, p.origin, p.elements);
  if (!state.is_node(start) && !state.is_edge(start)) {
    throw PathError("expansion start #" + to_string(start) + " is not a live node or edge");
  }
  std::vector<InstanceId> out;
  InstanceId prev = start;
  InstanceId prev_entry = entry.value_or(state.is_edge(start) ? state.endpoints(start).src : start);

  for (size_t i = 0; i < p.elements.size(); ++i) {
    const InstanceId x = p.elements[i];
    if (i == 0 && x == start) continue;

    if (state.is_edge(prev)) {
      const InstanceId far = state.next_node(prev, prev_entry);
      out.push_back(far);
      prev = far;
      if (x == far) continue;
    }

    if (state.is_node(x)) {
      if (x != prev && !state.adjacent(prev, x)) {
        auto route = node_route(state, prev, {x});
        if (!route) throw PathError("cannot expand path: no route from #" + to_string(prev) + " to #" + to_string(x));
        route->pop_back();
        out.insert(out.end(), route->begin(), route->end());
      }
      out.push_back(x);
      prev = x;
    } else {
      const auto& ends = state.endpoints(x);
      InstanceId via = prev;
      if (ends.src != prev && ends.dst != prev) {
        auto route = node_route(state, prev, {ends.src, ends.dst});
        if (!route) throw PathError("cannot expand path: no route from #" + to_string(prev) + " to edge #" + to_string(x));
        out.insert(out.end(), route->begin(), route->end());
        via = route->back();
      }
      out.push_back(x);
      prev = x;
      prev_entry = via;
    }
  }
  return out;
}

std::vector<std::optional<InstanceId>> path_anchors(const SystemState& state, const PathCollection& p) {
  std::vector<std::optional<InstanceId>> anchors;
  std::vector<InstanceId> prefix_nodes{p.origin};
  for (InstanceId x : p.elements) {
    std::optional<InstanceId> anchor;
    for (InstanceId n : prefix_nodes) {
      if (connects(state, n, x)) {
        anchor = n;
        break;
      }
    }
    anchors.push_back(anchor);
    if (state.is_node(x)) prefix_nodes.push_back(x);
  }
  return anchors;
}

}  // namespace osp
