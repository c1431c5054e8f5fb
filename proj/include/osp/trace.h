#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "osp/value.h"

namespace osp {

enum class TraceKind { kSpawn, kArrive, kAbility, kDepart, kMove, kAutoQueue, kSkip, kDisengage, kExhaust, kReport, kError };

std::string_view trace_kind_name(TraceKind kind);

struct TraceEvent {
  uint64_t seq = 0;
  TraceKind kind = TraceKind::kSpawn;
  std::optional<InstanceId> walker;
  std::optional<InstanceId> location;
  std::string detail;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// `<seq> <kind> w=<id|none> loc=<id|none> <detail>`; the detail and its
// separating space are omitted when empty.
std::string format_event(const TraceEvent& event);

using TraceSink = std::function<void(const TraceEvent&)>;

}  // namespace osp
