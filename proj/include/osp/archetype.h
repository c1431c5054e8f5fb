#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osp/value.h"

namespace osp {

enum class ArchetypeKind { kObject, kNode, kEdge, kWalker };
enum class Phase { kEntry, kExit };

std::string_view archetype_kind_name(ArchetypeKind kind);
std::string_view phase_name(Phase phase);

class ExecutionContext;
class ArchetypeDef;

using AbilityBody = std::function<void(ExecutionContext&)>;

// An implicitly triggered behaviour. `owner` hosts the ability; `trigger` is
// the counterpart archetype (a walker type for node/edge abilities, a node or
// edge type for walker abilities).
struct AbilityDef {
  std::string name;
  const ArchetypeDef* owner = nullptr;
  const ArchetypeDef* trigger = nullptr;
  Phase phase = Phase::kEntry;
  AbilityBody body;
};

struct FieldDef {
  std::string name;
  FieldType type = FieldType::kInt;
  PropertyValue default_value;
};

class ArchetypeDef {
 public:
  ArchetypeDef(std::string name, ArchetypeKind kind, const ArchetypeDef* parent)
      : name_(std::move(name)), kind_(kind), parent_(parent) {}

  const std::string& name() const { return name_; }
  ArchetypeKind kind() const { return kind_; }
  const ArchetypeDef* parent() const { return parent_; }

  // True when `other` is this archetype or one of its ancestors.
  bool is_a(const ArchetypeDef& other) const;

  // Root ancestor first, this archetype last.
  std::vector<const ArchetypeDef*> lineage() const;

  const std::vector<FieldDef>& own_fields() const { return fields_; }
  // Inherited fields first, in declaration order.
  std::vector<FieldDef> all_fields() const;
  const FieldDef* find_field(std::string_view name) const;

  const std::vector<AbilityDef>& own_abilities() const { return abilities_; }

 private:
  friend class ArchetypeRegistry;

  std::string name_;
  ArchetypeKind kind_;
  const ArchetypeDef* parent_;
  std::vector<FieldDef> fields_;
  std::vector<AbilityDef> abilities_;
};

// Owns every archetype definition. Pointers handed out stay valid for the
// registry's lifetime.
class ArchetypeRegistry {
 public:
  ArchetypeDef& define(std::string name, ArchetypeKind kind, const ArchetypeDef* parent = nullptr);
  void add_field(ArchetypeDef& arch, FieldDef field);

  const ArchetypeDef* find(std::string_view name) const;
  const ArchetypeDef& get(std::string_view name) const;

  // Appends to the owner's ordered ability list. Throws GraphError when the
  // owner cannot host abilities or the trigger kind does not fit the owner.
  void register_ability(AbilityDef def);

  const std::deque<std::unique_ptr<ArchetypeDef>>& all() const { return defs_; }

 private:
  std::deque<std::unique_ptr<ArchetypeDef>> defs_;
};

}  // namespace osp
