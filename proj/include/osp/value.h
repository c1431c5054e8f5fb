#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace osp {

// Instance ids are handed out from a monotonically increasing counter and are
// never reused within one SystemState.
struct InstanceId {
  uint64_t value = 0;

  friend auto operator<=>(const InstanceId&, const InstanceId&) = default;
};

std::string to_string(InstanceId id);

class PropertyValue;

// Insertion-ordered identifier -> value map.
class PropertyMap {
 public:
  const PropertyValue* find(std::string_view key) const;
  PropertyValue* find(std::string_view key);
  void set(std::string key, PropertyValue value);
  bool erase(std::string_view key);

  size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  const std::vector<std::string>& keys() const { return keys_; }
  const std::vector<PropertyValue>& values() const { return values_; }

  friend bool operator==(const PropertyMap&, const PropertyMap&);

 private:
  std::vector<std::string> keys_;
  std::vector<PropertyValue> values_;
};

using PropertyList = std::vector<PropertyValue>;

enum class ValueKind { kNull, kInt, kFloat, kStr, kBool, kList, kMap, kRef };

std::string_view value_kind_name(ValueKind kind);

class PropertyValue {
 public:
  PropertyValue() = default;
  PropertyValue(std::nullptr_t) {}
  PropertyValue(int64_t v) : data_(v) {}
  PropertyValue(int v) : data_(int64_t{v}) {}
  PropertyValue(double v) : data_(v) {}
  PropertyValue(std::string v) : data_(std::move(v)) {}
  PropertyValue(const char* v) : data_(std::string(v)) {}
  PropertyValue(bool v) : data_(v) {}
  PropertyValue(PropertyList v) : data_(std::move(v)) {}
  PropertyValue(PropertyMap v) : data_(std::move(v)) {}
  PropertyValue(InstanceId v) : data_(v) {}

  ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }

  bool is_null() const { return kind() == ValueKind::kNull; }
  bool is_int() const { return kind() == ValueKind::kInt; }
  bool is_float() const { return kind() == ValueKind::kFloat; }
  bool is_number() const { return is_int() || is_float(); }
  bool is_str() const { return kind() == ValueKind::kStr; }
  bool is_bool() const { return kind() == ValueKind::kBool; }
  bool is_list() const { return kind() == ValueKind::kList; }
  bool is_map() const { return kind() == ValueKind::kMap; }
  bool is_ref() const { return kind() == ValueKind::kRef; }

  int64_t as_int() const { return std::get<int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_float(); }
  const std::string& as_str() const { return std::get<std::string>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const PropertyList& as_list() const { return std::get<PropertyList>(data_); }
  PropertyList& as_list() { return std::get<PropertyList>(data_); }
  const PropertyMap& as_map() const { return std::get<PropertyMap>(data_); }
  PropertyMap& as_map() { return std::get<PropertyMap>(data_); }
  InstanceId as_ref() const { return std::get<InstanceId>(data_); }

  friend bool operator==(const PropertyValue&, const PropertyValue&) = default;

 private:
  std::variant<std::monostate, int64_t, double, std::string, bool, PropertyList, PropertyMap, InstanceId> data_;
};

// Canonical text form: strings quoted and escaped, refs as `#<id>`,
// lists `[a,b]`, maps `{k:v}`. Floats always carry a `.` or exponent.
std::string render_value(const PropertyValue& value);
std::string render_float(double value);
std::string quote_string(std::string_view text);

// Declared type of an archetype field.
enum class FieldType { kInt, kFloat, kStr, kBool, kList, kMap, kRef };

std::optional<FieldType> parse_field_type(std::string_view name);
std::string_view field_type_name(FieldType type);
PropertyValue default_for(FieldType type);

// Returns the value coerced to the field type (int widens to float, null is
// accepted for refs), or nullopt when the kinds do not match.
std::optional<PropertyValue> coerce_to_field(FieldType type, const PropertyValue& value);

}  // namespace osp
