#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "osp/error.h"
#include "osp/system_state.h"

namespace osp {

// An ordered sequence of node/edge ids anchored at an origin node. Values
// of this type are produced only through validation; topology may change
// afterwards, so consumers revalidate before use.
struct PathCollection {
  InstanceId origin;
  std::vector<InstanceId> elements;

  friend bool operator==(const PathCollection&, const PathCollection&) = default;
};

enum class PathConstraint {
  kOriginConnectivity = 1,
  kSequentialConnectivity = 2,
  kPathCompleteness = 3,
  kTraversalCoherence = 4,
};

std::string_view constraint_name(PathConstraint c);

struct PathViolation {
  PathConstraint constraint;
  size_t index;  // offending element, 0-based
  std::string message;

  friend bool operator==(const PathViolation& a, const PathViolation& b) {
    return a.constraint == b.constraint && a.index == b.index;
  }
};

class PathViolationError : public PathError {
 public:
  explicit PathViolationError(PathViolation v) : PathError(v.message), violation_(std::move(v)) {}
  const PathViolation& violation() const { return violation_; }

 private:
  PathViolation violation_;
};

// Validity rules. The origin counts as element 0 of every prefix, and a hop
// between two nodes joined by some edge crosses that edge implicitly.
//  1. p1 is the origin, an edge incident to it, or a node joined to it.
//  2. every later node is joined to a prefix node or is an endpoint of a
//     prefix edge; every later edge has an endpoint among the prefix nodes.
//  3. a route from the origin reaches each element using only prefix
//     elements as intermediates.
//  4. each element can be given a parent (a prefix element it connects to,
//     per rules 1-2) such that parent positions never decrease along the
//     sequence, i.e. the order is one some breadth-first exploration yields.
//
// Returns the first violation by (index, constraint). Throws PathError when
// the origin or an element is not a live node/edge.
std::optional<PathViolation> validate_path(const SystemState& state, InstanceId origin,
                                           const std::vector<InstanceId>& elements);

// Validates and wraps; throws PathViolationError.
PathCollection make_path(const SystemState& state, InstanceId origin, std::vector<InstanceId> elements);

using PathPredicate = std::function<bool(const SystemState&, InstanceId)>;

// Breadth-first construction from `origin`, following edges whose direction
// relative to the expanding node is `d`. A node is taken (and expanded)
// only when the predicate accepts it; with `include_edges` the crossing edge
// must be accepted as well and is placed immediately before its far node.
// Frontier ties break by ascending edge id. The origin is listed only when
// the predicate accepts it.
PathCollection path_query(const SystemState& state, InstanceId origin, const PathPredicate& pred, bool include_edges,
                          Direction d);

PathCollection path_concat(const SystemState& state, const PathCollection& p, const PathCollection& q);
// Half-open [begin, end).
PathCollection path_slice(const SystemState& state, const PathCollection& p, size_t begin, size_t end);
PathCollection path_filter(const SystemState& state, const PathCollection& p, const PathPredicate& pred);

// Physically traversable queue form of `p` starting from `start` (with
// `entry` as the node an edge start was entered from). Gaps between
// non-adjacent elements are filled with the intermediate nodes of a
// shortest undirected hop route (ascending-id tie break). A first element
// equal to `start` is omitted. Throws PathError naming an unbridgeable gap.
std::vector<InstanceId> expand_path(const SystemState& state, const PathCollection& p, InstanceId start,
                                    std::optional<InstanceId> entry = std::nullopt);

// For each element, the prefix node a walker replaying the path directly
// (spawn on path) may justify the hop from; nullopt when the element is
// only reachable through a prefix edge.
std::vector<std::optional<InstanceId>> path_anchors(const SystemState& state, const PathCollection& p);

}  // namespace osp
