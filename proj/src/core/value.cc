#include "osp/value.h"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace osp {

std::string to_string(InstanceId id) { return std::to_string(id.value); }

const PropertyValue* PropertyMap::find(std::string_view key) const {
  for (size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return &values_[i];
  }
  return nullptr;
}

PropertyValue* PropertyMap::find(std::string_view key) {
  for (size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return &values_[i];
  }
  return nullptr;
}

void PropertyMap::set(std::string key, PropertyValue value) {
  if (auto* slot = find(key)) {
    *slot = std::move(value);
    return;
  }
  keys_.push_back(std::move(key));
  values_.push_back(std::move(value));
}

bool PropertyMap::erase(std::string_view key) {
  for (size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) {
      keys_.erase(keys_.begin() + static_cast<std::ptrdiff_t>(i));
      values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
  }
  return false;
}

bool operator==(const PropertyMap& a, const PropertyMap& b) { return a.keys_ == b.keys_ && a.values_ == b.values_; }

std::string_view value_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::kNull: return "none";
    case ValueKind::kInt: return "int";
    case ValueKind::kFloat: return "float";
    case ValueKind::kStr: return "str";
    case ValueKind::kBool: return "bool";
    case ValueKind::kList: return "list";
    case ValueKind::kMap: return "map";
    case ValueKind::kRef: return "ref";
  }
  return "?";
}

std::string render_float(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string out(buf, end);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char esc[8];
          std::snprintf(esc, sizeof(esc), "\\x%02x", static_cast<unsigned char>(c));
          out += esc;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string render_value(const PropertyValue& value) {
  switch (value.kind()) {
    case ValueKind::kNull: return "none";
    case ValueKind::kInt: return std::to_string(value.as_int());
    case ValueKind::kFloat: return render_float(value.as_float());
    case ValueKind::kStr: return quote_string(value.as_str());
    case ValueKind::kBool: return value.as_bool() ? "true" : "false";
    case ValueKind::kRef: return "#" + to_string(value.as_ref());
    case ValueKind::kList: {
      std::string out = "[";
      const auto& list = value.as_list();
      for (size_t i = 0; i < list.size(); ++i) {
        if (i) out += ',';
        out += render_value(list[i]);
      }
      return out + "]";
    }
    case ValueKind::kMap: {
      std::string out = "{";
      const auto& map = value.as_map();
      for (size_t i = 0; i < map.size(); ++i) {
        if (i) out += ',';
        out += map.keys()[i] + ":" + render_value(map.values()[i]);
      }
      return out + "}";
    }
  }
  return "?";
}

std::optional<FieldType> parse_field_type(std::string_view name) {
  if (name == "int") return FieldType::kInt;
  if (name == "float") return FieldType::kFloat;
  if (name == "str") return FieldType::kStr;
  if (name == "bool") return FieldType::kBool;
  if (name == "list") return FieldType::kList;
  if (name == "map") return FieldType::kMap;
  if (name == "ref") return FieldType::kRef;
  return std::nullopt;
}

std::string_view field_type_name(FieldType type) {
  switch (type) {
    case FieldType::kInt: return "int";
    case FieldType::kFloat: return "float";
    case FieldType::kStr: return "str";
    case FieldType::kBool: return "bool";
    case FieldType::kList: return "list";
    case FieldType::kMap: return "map";
    case FieldType::kRef: return "ref";
  }
  return "?";
}

PropertyValue default_for(FieldType type) {
  switch (type) {
    case FieldType::kInt: return int64_t{0};
    case FieldType::kFloat: return 0.0;
    case FieldType::kStr: return std::string();
    case FieldType::kBool: return false;
    case FieldType::kList: return PropertyList{};
    case FieldType::kMap: return PropertyMap{};
    case FieldType::kRef: return nullptr;
  }
  return nullptr;
}

std::optional<PropertyValue> coerce_to_field(FieldType type, const PropertyValue& value) {
  switch (type) {
    case FieldType::kInt:
      if (value.is_int()) return value;
      break;
    case FieldType::kFloat:
      if (value.is_float()) return value;
      if (value.is_int()) return PropertyValue(static_cast<double>(value.as_int()));
      break;
    case FieldType::kStr:
      if (value.is_str()) return value;
      break;
    case FieldType::kBool:
      if (value.is_bool()) return value;
      break;
    case FieldType::kList:
      if (value.is_list()) return value;
      break;
    case FieldType::kMap:
      if (value.is_map()) return value;
      break;
    case FieldType::kRef:
      if (value.is_ref() || value.is_null()) return value;
      break;
  }
  return std::nullopt;
}

}  // namespace osp
