#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "osp/dsl/diagnostic.h"

namespace osp::dsl {

enum class TokenKind { kIdent, kKeyword, kInt, kFloat, kString, kPunct, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;  // keyword/punct spelling, identifier, literal source, or decoded string
  SourcePos pos;

  friend bool operator==(const Token&, const Token&) = default;
};

bool is_keyword(std::string_view word);

// Tokens followed by a single kEnd token. Throws DiagnosticError on an
// illegal character, bad escape, or unterminated string.
std::vector<Token> tokenize(std::string_view source);

}  // namespace osp::dsl
