#pragma once

#include <vector>

#include "osp/archetype.h"
#include "osp/system_state.h"

namespace osp {

// Abilities of `owner` for `phase` whose trigger is the counterpart's
// archetype or one of its ancestors. Order: the owner's lineage root first,
// each archetype's abilities in declaration order.
std::vector<const AbilityDef*> matching_abilities(const SystemState& state, InstanceId owner, InstanceId counterpart,
                                                  Phase phase);

}  // namespace osp
