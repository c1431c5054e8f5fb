#include "osp/ability.h"

namespace osp {

std::vector<const AbilityDef*> matching_abilities(const SystemState& state, InstanceId owner, InstanceId counterpart,
                                                  Phase phase) {
  const ArchetypeDef& owner_arch = state.archetype_of(owner);
  const ArchetypeDef& other_arch = state.archetype_of(counterpart);
  std::vector<const AbilityDef*> out;
  for (const ArchetypeDef* arch : owner_arch.lineage()) {
    for (const AbilityDef& a : arch->own_abilities()) {
      if (a.phase == phase && other_arch.is_a(*a.trigger)) out.push_back(&a);
    }
  }
  return out;
}

}  // namespace osp
