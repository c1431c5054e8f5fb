#include "osp/trace.h"

namespace osp {

std::string_view trace_kind_name(TraceKind kind) {
  switch (kind) {
    case TraceKind::kSpawn: return "spawn";
    case TraceKind::kArrive: return "arrive";
    case TraceKind::kAbility: return "ability";
    case TraceKind::kDepart: return "depart";
    case TraceKind::kMove: return "move";
    case TraceKind::kAutoQueue: return "autoqueue";
    case TraceKind::kSkip: return "skip";
    case TraceKind::kDisengage: return "disengage";
    case TraceKind::kExhaust: return "exhaust";
    case TraceKind::kReport: return "report";
    case TraceKind::kError: return "error";
  }
  return "?";
}

std::string format_event(const TraceEvent& event) {
  auto id_text = [](const std::optional<InstanceId>& id) { return id ? to_string(*id) : std::string("none"); };
  std::string line = std::to_string(event.seq) + " " + std::string(trace_kind_name(event.kind)) +
                     " w=" + id_text(event.walker) + " loc=" + id_text(event.location);
  if (!event.detail.empty()) line += " " + event.detail;
  return line;
}

}  // namespace osp
