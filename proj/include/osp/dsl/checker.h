#pragma once

#include <vector>

#include "osp/dsl/ast.h"
#include "osp/dsl/diagnostic.h"

namespace osp::dsl {

// Static checks: name resolution, archetype hierarchy, field schemas,
// ability trigger kinds, contextual reference legality, and kind rules for
// connect/spawn/visit operands where the operand kind is evident.
std::vector<Diagnostic> check(const Program& program);

}  // namespace osp::dsl
