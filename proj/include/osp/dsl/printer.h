#pragma once

#include <string>

#include "osp/dsl/ast.h"

namespace osp::dsl {

// Canonical source form. Declarations come first, then the driver; the
// output parses back to a structurally identical program.
std::string print_program(const Program& program);
std::string print_expr(const Expr& expr);

// Position-free S-expression of the tree, for structural comparison.
std::string sexpr(const Program& program);

}  // namespace osp::dsl
