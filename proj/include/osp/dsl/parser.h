#pragma once

#include <string_view>
#include <vector>

#include "osp/dsl/ast.h"
#include "osp/dsl/lexer.h"

namespace osp::dsl {

// Recursive descent over the token stream. Throws DiagnosticError at the
// first syntax error, naming what was expected.
Program parse(const std::vector<Token>& tokens);
Program parse_source(std::string_view source);

// Binding strength of a binary operator (higher binds tighter), 0 if unknown.
int binary_precedence(std::string_view op);

}  // namespace osp::dsl
