#include "osp/dsl/builtins.h"

#include <algorithm>
#include <array>
#include <vector>

namespace osp::dsl {

namespace {

constexpr std::array<BuiltinSignature, 30> kBuiltins{{
    {"len", 1, 1},          {"str", 1, 1},           {"int", 1, 1},          {"float", 1, 1},
    {"search_tweets", 2, 2}, {"is", 2, 2},           {"archetype", 1, 1},    {"id", 1, 1},
    {"out", 1, 3},          {"in", 1, 3},            {"any", 1, 3},          {"out_edges", 1, 2},
    {"in_edges", 1, 2},     {"any_edges", 1, 2},     {"edges_between", 2, 3}, {"src", 1, 1},
    {"dst", 1, 1},          {"pathq", 4, 5},         {"path_of", 2, 2},      {"concat", 2, 2},
    {"slice", 3, 3},        {"filter", 2, 2},        {"elements", 1, 1},     {"origin", 1, 1},
    {"location_of", 1, 1},  {"is_active", 1, 1},    {"range", 1, 2},        {"keys", 1, 1},
    {"contains", 2, 2},     {"queue_of", 1, 1},
}};

}  // namespace

const BuiltinSignature* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

double lcs_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

}  // namespace osp::dsl
