#include "osp/archetype.h"

#include <algorithm>

#include "osp/error.h"

namespace osp {

std::string_view archetype_kind_name(ArchetypeKind kind) {
  switch (kind) {
    case ArchetypeKind::kObject: return "object";
    case ArchetypeKind::kNode: return "node";
    case ArchetypeKind::kEdge: return "edge";
    case ArchetypeKind::kWalker: return "walker";
  }
  return "?";
}

std::string_view phase_name(Phase phase) { return phase == Phase::kEntry ? "entry" : "exit"; }

bool ArchetypeDef::is_a(const ArchetypeDef& other) const {
  for (const ArchetypeDef* a = this; a != nullptr; a = a->parent_) {
    if (a == &other) return true;
  }
  return false;
}

std::vector<const ArchetypeDef*> ArchetypeDef::lineage() const {
  std::vector<const ArchetypeDef*> chain;
  for (const ArchetypeDef* a = this; a != nullptr; a = a->parent_) chain.push_back(a);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::vector<FieldDef> ArchetypeDef::all_fields() const {
  std::vector<FieldDef> out;
  for (const ArchetypeDef* a : lineage()) out.insert(out.end(), a->fields_.begin(), a->fields_.end());
  return out;
}

const FieldDef* ArchetypeDef::find_field(std::string_view name) const {
  for (const ArchetypeDef* a = this; a != nullptr; a = a->parent_) {
    for (const auto& f : a->fields_) {
      if (f.name == name) return &f;
    }
  }
  return nullptr;
}

ArchetypeDef& ArchetypeRegistry::define(std::string name, ArchetypeKind kind, const ArchetypeDef* parent) {
  if (find(name)) throw GraphError("archetype '" + name + "' is already defined");
  if (parent && parent->kind() != kind) {
    throw GraphError("archetype '" + name + "' cannot extend '" + parent->name() + "' of a different kind");
  }
  defs_.push_back(std::make_unique<ArchetypeDef>(std::move(name), kind, parent));
  return *defs_.back();
}

void ArchetypeRegistry::add_field(ArchetypeDef& arch, FieldDef field) {
  if (arch.find_field(field.name)) {
    throw GraphError("field '" + field.name + "' is already declared on '" + arch.name() + "'");
  }
  auto coerced = coerce_to_field(field.type, field.default_value);
  if (!coerced) {
    throw GraphError("default for field '" + field.name + "' is not a " + std::string(field_type_name(field.type)));
  }
  field.default_value = std::move(*coerced);
  arch.fields_.push_back(std::move(field));
}

const ArchetypeDef* ArchetypeRegistry::find(std::string_view name) const {
  for (const auto& d : defs_) {
    if (d->name() == name) return d.get();
  }
  return nullptr;
}

const ArchetypeDef& ArchetypeRegistry::get(std::string_view name) const {
  const ArchetypeDef* def = find(name);
  if (!def) throw GraphError("unknown archetype '" + std::string(name) + "'");
  return *def;
}

void ArchetypeRegistry::register_ability(AbilityDef def) {
  if (!def.owner || !def.trigger) throw GraphError("ability '" + def.name + "' needs an owner and a trigger");
  ArchetypeDef* owner = nullptr;
  for (auto& d : defs_) {
    if (d.get() == def.owner) owner = d.get();
  }
  if (!owner) throw GraphError("ability '" + def.name + "' has an owner outside this registry");

  const ArchetypeKind trigger_kind = def.trigger->kind();
  switch (owner->kind()) {
    case ArchetypeKind::kObject:
      throw GraphError("object archetype '" + owner->name() + "' cannot have abilities");
    case ArchetypeKind::kNode:
    case ArchetypeKind::kEdge:
      if (trigger_kind != ArchetypeKind::kWalker) {
        throw GraphError(std::string(archetype_kind_name(owner->kind())) + " ability '" + def.name +
                         "' must be triggered by a walker archetype, not " +
                         std::string(archetype_kind_name(trigger_kind)) + " '" + def.trigger->name() + "'");
      }
      break;
    case ArchetypeKind::kWalker:
      if (trigger_kind != ArchetypeKind::kNode && trigger_kind != ArchetypeKind::kEdge) {
        throw GraphError("walker ability '" + def.name + "' must be triggered by a node or edge archetype, not " +
                         std::string(archetype_kind_name(trigger_kind)) + " '" + def.trigger->name() + "'");
      }
      break;
  }
  owner->abilities_.push_back(std::move(def));
}

}  // namespace osp
