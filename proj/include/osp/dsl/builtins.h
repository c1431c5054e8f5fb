#pragma once

#include <string_view>

namespace osp::dsl {

struct BuiltinSignature {
  std::string_view name;
  int min_args;
  int max_args;
};

const BuiltinSignature* find_builtin(std::string_view name);

// Normalized longest-common-subsequence ratio in [0, 1]; 1 for two empty
// strings.
double lcs_similarity(std::string_view a, std::string_view b);

}  // namespace osp::dsl
