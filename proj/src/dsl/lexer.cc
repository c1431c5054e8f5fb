#include "osp/dsl/lexer.h"

#include <array>
#include <cctype>

namespace osp::dsl {

namespace {

constexpr std::array kKeywords = {
    "node",  "edge",  "walker", "object",  "has",   "can",     "with",  "entry", "exit",
    "spawn", "visit", "skip",   "disengage", "del", "report",  "let",   "if",    "else",
    "for",   "in",    "connect", "true",    "false", "none",   "self",  "here",  "visitor",
    "path",
};

// Longest first so that greedy matching works.
constexpr std::array kPuncts = {
    "]->", "-[", "==", "!=", "<=", ">=", "&&", "||", "+=", "{", "}", "(", ")", "[", "]", ",",
    ";",   ":",  ".",  "=",  "<",  ">",  "+",  "-",  "*",  "/", "%", "!",
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      const SourcePos pos{line_, col_};
      if (at_end()) {
        out.push_back(Token{TokenKind::kEnd, "", pos});
        return out;
      }
      const char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) word += advance();
        out.push_back(Token{is_keyword(word) ? TokenKind::kKeyword : TokenKind::kIdent, word, pos});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(number(pos));
      } else if (c == '"') {
        out.push_back(string(pos));
      } else {
        out.push_back(punct(pos));
      }
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(size_t ahead = 0) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }
  char advance() {
    const char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void error(SourcePos pos, const std::string& message) {
    throw DiagnosticError(Diagnostic{Severity::kError, pos, message});
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  Token number(SourcePos pos) {
    std::string text;
    bool is_float = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      text += advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      const size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
      if (std::isdigit(static_cast<unsigned char>(peek(1 + sign)))) {
        is_float = true;
        text += advance();
        if (sign) text += advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
      }
    }
    return Token{is_float ? TokenKind::kFloat : TokenKind::kInt, text, pos};
  }

  Token string(SourcePos pos) {
    advance();
    std::string value;
    for (;;) {
      if (at_end() || peek() == '\n') error(pos, "unterminated string literal");
      const SourcePos here{line_, col_};
      const char c = advance();
      if (c == '"') break;
      if (c != '\\') {
        value += c;
        continue;
      }
      if (at_end()) error(pos, "unterminated string literal");
      const char e = advance();
      switch (e) {
        case '"': value += '"'; break;
        case '\\': value += '\\'; break;
        case 'n': value += '\n'; break;
        case 't': value += '\t'; break;
        case 'r': value += '\r'; break;
        case 'x': {
          std::string hex;
          for (int k = 0; k < 2 && std::isxdigit(static_cast<unsigned char>(peek())); ++k) hex += advance();
          if (hex.size() != 2) error(here, "\\x escape needs two hex digits");
          value += static_cast<char>(std::stoi(hex, nullptr, 16));
          break;
        }
        default: error(here, std::string("unknown escape sequence '\\") + e + "'");
      }
    }
    return Token{TokenKind::kString, value, pos};
  }

  Token punct(SourcePos pos) {
    for (std::string_view p : kPuncts) {
      if (src_.substr(i_, p.size()) == p) {
        for (size_t k = 0; k < p.size(); ++k) advance();
        return Token{TokenKind::kPunct, std::string(p), pos};
      }
    }
    error(pos, std::string("illegal character '") + peek() + "'");
  }

  std::string_view src_;
  size_t i_ = 0;
  uint32_t line_ = 1;
  uint32_t col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  return file + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " +
         (d.severity == Severity::kError ? "error" : "warning") + ": " + d.message;
}

}  // namespace osp::dsl
