#include "osp/dsl/parser.h"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace osp::dsl {

std::string_view context_ref_name(ContextRef ref) {
  switch (ref) {
    case ContextRef::kSelf: return "self";
    case ContextRef::kHere: return "here";
    case ContextRef::kVisitor: return "visitor";
    case ContextRef::kPath: return "path";
  }
  return "?";
}

int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=") return 3;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
  if (op == "+" || op == "-") return 5;
  if (op == "*" || op == "/" || op == "%") return 6;
  return 0;
}

namespace {

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::kEnd: return "end of input";
    case TokenKind::kString: return "string literal";
    case TokenKind::kInt:
    case TokenKind::kFloat: return "number '" + t.text + "'";
    case TokenKind::kIdent: return "identifier '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  Program program() {
    Program prog;
    while (!at_end()) {
      if (is_kw("node") || is_kw("edge") || is_kw("walker") || is_kw("object")) {
        prog.decls.push_back(archetype());
      } else {
        prog.driver.push_back(statement());
      }
    }
    return prog;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    const size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokenKind::kEnd; }
  const Token& advance() {
    const Token& t = peek();
    if (!at_end()) ++pos_;
    return t;
  }
  bool is_kw(std::string_view kw, size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::kKeyword && peek(ahead).text == kw;
  }
  bool is_punct(std::string_view p, size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::kPunct && peek(ahead).text == p;
  }
  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    advance();
    return true;
  }

  [[noreturn]] void error_expected(const std::string& what) {
    throw DiagnosticError(Diagnostic{Severity::kError, peek().pos, "expected " + what + ", found " + describe(peek())});
  }
  [[noreturn]] void error_at(SourcePos pos, const std::string& message) {
    throw DiagnosticError(Diagnostic{Severity::kError, pos, message});
  }

  const Token& expect_punct(std::string_view p) {
    if (!is_punct(p)) error_expected("'" + std::string(p) + "'");
    return advance();
  }
  const Token& expect_kw(std::string_view kw) {
    if (!is_kw(kw)) error_expected("'" + std::string(kw) + "'");
    return advance();
  }
  const Token& expect_ident(const std::string& what) {
    if (peek().kind != TokenKind::kIdent) error_expected(what);
    return advance();
  }

  ArchetypeDecl archetype() {
    ArchetypeDecl decl;
    const Token& kw = advance();
    decl.pos = kw.pos;
    if (kw.text == "node") decl.kind = ArchetypeKind::kNode;
    if (kw.text == "edge") decl.kind = ArchetypeKind::kEdge;
    if (kw.text == "walker") decl.kind = ArchetypeKind::kWalker;
    if (kw.text == "object") decl.kind = ArchetypeKind::kObject;
    decl.name = expect_ident("archetype name").text;
    if (accept_punct(":")) {
      decl.parent_pos = peek().pos;
      decl.parent = expect_ident("parent archetype name").text;
    }
    expect_punct("{");
    while (!is_punct("}")) {
      if (is_kw("has")) {
        decl.fields.push_back(field());
      } else if (is_kw("can")) {
        decl.abilities.push_back(ability());
      } else {
        error_expected("'has', 'can' or '}'");
      }
    }
    advance();
    return decl;
  }

  FieldDecl field() {
    FieldDecl f;
    f.pos = advance().pos;
    f.name = expect_ident("field name").text;
    expect_punct(":");
    f.type_name = expect_ident("field type").text;
    if (accept_punct("=")) f.default_value = expression();
    expect_punct(";");
    return f;
  }

  AbilityDecl ability() {
    AbilityDecl a;
    a.pos = advance().pos;
    a.name = expect_ident("ability name").text;
    expect_kw("with");
    a.trigger_pos = peek().pos;
    a.trigger = expect_ident("trigger archetype name").text;
    if (is_kw("entry")) {
      a.phase = Phase::kEntry;
    } else if (is_kw("exit")) {
      a.phase = Phase::kExit;
    } else {
      error_expected("'entry' or 'exit'");
    }
    advance();
    ++ability_depth_;
    a.body = block();
    --ability_depth_;
    return a;
  }

  Block block() {
    expect_punct("{");
    Block out;
    while (!is_punct("}")) {
      if (at_end()) error_expected("'}'");
      out.push_back(statement());
    }
    advance();
    return out;
  }

  StmtPtr make_stmt(SourcePos pos, auto node) {
    auto s = std::make_unique<Stmt>();
    s->pos = pos;
    s->node = std::move(node);
    return s;
  }

  void require_ability(const Token& kw) {
    if (ability_depth_ == 0) error_at(kw.pos, "'" + kw.text + "' is only allowed inside an ability body");
  }

  StmtPtr statement() {
    const Token& t = peek();
    const SourcePos pos = t.pos;
    if (t.kind == TokenKind::kKeyword) {
      if (t.text == "let") {
        advance();
        LetStmt s;
        s.name = expect_ident("variable name").text;
        expect_punct("=");
        s.value = expression();
        expect_punct(";");
        return make_stmt(pos, std::move(s));
      }
      if (t.text == "if") return if_statement();
      if (t.text == "for") {
        advance();
        ForStmt s;
        s.var = expect_ident("loop variable").text;
        expect_kw("in");
        s.iterable = expression();
        s.body = block();
        return make_stmt(pos, std::move(s));
      }
      if (t.text == "spawn") {
        advance();
        SpawnStmt s;
        s.walker = expression();
        expect_kw("in");
        s.target = expression();
        if (peek().kind == TokenKind::kIdent && peek().text == "via") {
          advance();
          s.via = expression();
        }
        expect_punct(";");
        return make_stmt(pos, std::move(s));
      }
      if (t.text == "visit") {
        require_ability(t);
        advance();
        VisitStmt s;
        s.target = expression();
        expect_punct(";");
        return make_stmt(pos, std::move(s));
      }
      if (t.text == "skip" || t.text == "disengage") {
        require_ability(t);
        const bool skip = advance().text == "skip";
        expect_punct(";");
        if (skip) return make_stmt(pos, SkipStmt{});
        return make_stmt(pos, DisengageStmt{});
      }
      if (t.text == "del") {
        advance();
        DelStmt s{expression()};
        expect_punct(";");
        return make_stmt(pos, std::move(s));
      }
      if (t.text == "report") {
        advance();
        ReportStmt s{expression()};
        expect_punct(";");
        return make_stmt(pos, std::move(s));
      }
    }
    ExprPtr e = expression();
    if (is_punct("=") || is_punct("+=")) {
      if (!assignable(*e)) error_at(e->pos, "left side of assignment is not assignable");
      AssignStmt s;
      s.op = advance().text;
      s.target = std::move(e);
      s.value = expression();
      expect_punct(";");
      return make_stmt(pos, std::move(s));
    }
    expect_punct(";");
    return make_stmt(pos, ExprStmt{std::move(e)});
  }

  static bool assignable(const Expr& e) {
    if (std::holds_alternative<NameExpr>(e.node) || std::holds_alternative<FieldExpr>(e.node) ||
        std::holds_alternative<IndexExpr>(e.node)) {
      return true;
    }
    if (auto* c = std::get_if<ContextExpr>(&e.node)) return c->ref == ContextRef::kPath;
    return false;
  }

  StmtPtr if_statement() {
    const SourcePos pos = advance().pos;
    IfStmt s;
    s.cond = expression();
    s.then_block = block();
    if (is_kw("else")) {
      advance();
      if (is_kw("if")) {
        s.else_block.push_back(if_statement());
      } else {
        s.else_block = block();
      }
    }
    return make_stmt(pos, std::move(s));
  }

  ExprPtr make_expr(SourcePos pos, auto node) {
    auto e = std::make_unique<Expr>();
    e->pos = pos;
    e->node = std::move(node);
    return e;
  }

  ExprPtr expression() { return binary(1); }

  ExprPtr binary(int min_prec) {
    ExprPtr lhs = unary();
    for (;;) {
      if (peek().kind != TokenKind::kPunct) return lhs;
      const int prec = binary_precedence(peek().text);
      if (prec == 0 || prec < min_prec) return lhs;
      const Token& op = advance();
      ExprPtr rhs = binary(prec + 1);
      const SourcePos pos = lhs->pos;
      lhs = make_expr(pos, BinaryExpr{op.text, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr unary() {
    if (is_punct("!") || is_punct("-")) {
      const Token& op = advance();
      ExprPtr operand = unary();
      return make_expr(op.pos, UnaryExpr{op.text, std::move(operand)});
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    for (;;) {
      if (is_punct(".")) {
        advance();
        const Token& name = expect_ident("field or method name");
        if (is_punct("(")) {
          MethodExpr m;
          m.object = std::move(e);
          m.method = name.text;
          m.args = positional_args();
          e = make_expr(name.pos, std::move(m));
        } else {
          e = make_expr(name.pos, FieldExpr{std::move(e), name.text});
        }
      } else if (is_punct("[")) {
        const SourcePos pos = advance().pos;
        ExprPtr index = expression();
        expect_punct("]");
        e = make_expr(pos, IndexExpr{std::move(e), std::move(index)});
      } else {
        return e;
      }
    }
  }

  std::vector<ExprPtr> positional_args() {
    expect_punct("(");
    std::vector<ExprPtr> args;
    if (!is_punct(")")) {
      do {
        args.push_back(expression());
      } while (accept_punct(","));
    }
    expect_punct(")");
    return args;
  }

  std::vector<NamedArg> named_inits(std::string_view close) {
    std::vector<NamedArg> out;
    if (is_punct(close)) return out;
    do {
      NamedArg a;
      a.pos = peek().pos;
      a.name = expect_ident("field name").text;
      expect_punct("=");
      a.value = expression();
      out.push_back(std::move(a));
    } while (accept_punct(","));
    return out;
  }

  ExprPtr call(const Token& name) {
    CallExpr c;
    c.callee = name.text;
    expect_punct("(");
    if (!is_punct(")")) {
      do {
        if (peek().kind == TokenKind::kIdent && is_punct("=", 1)) {
          NamedArg a;
          a.pos = peek().pos;
          a.name = advance().text;
          advance();
          a.value = expression();
          c.named.push_back(std::move(a));
        } else {
          if (!c.named.empty()) error_expected("named argument after named arguments");
          c.args.push_back(expression());
        }
      } while (accept_punct(","));
    }
    expect_punct(")");
    return make_expr(name.pos, std::move(c));
  }

  ExprPtr primary() {
    const Token& t = peek();
    const SourcePos pos = t.pos;
    switch (t.kind) {
      case TokenKind::kInt: {
        advance();
        int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc()) error_at(pos, "integer literal out of range");
        return make_expr(pos, LiteralExpr{PropertyValue(v)});
      }
      case TokenKind::kFloat: {
        advance();
        const double v = std::strtod(t.text.c_str(), nullptr);
        if (!std::isfinite(v)) error_at(pos, "float literal out of range");
        return make_expr(pos, LiteralExpr{PropertyValue(v)});
      }
      case TokenKind::kString:
        advance();
        return make_expr(pos, LiteralExpr{PropertyValue(t.text)});
      case TokenKind::kIdent:
        advance();
        if (is_punct("(")) return call(t);
        return make_expr(pos, NameExpr{t.text});
      case TokenKind::kKeyword:
        if (t.text == "true" || t.text == "false") {
          advance();
          return make_expr(pos, LiteralExpr{PropertyValue(t.text == "true")});
        }
        if (t.text == "none") {
          advance();
          return make_expr(pos, LiteralExpr{PropertyValue()});
        }
        if (t.text == "self") return context(ContextRef::kSelf);
        if (t.text == "here") return context(ContextRef::kHere);
        if (t.text == "visitor") return context(ContextRef::kVisitor);
        if (t.text == "path") return context(ContextRef::kPath);
        if (t.text == "in" && is_punct("(", 1)) {
          advance();
          return call(t);
        }
        if (t.text == "connect") return connect();
        break;
      case TokenKind::kPunct:
        if (t.text == "(") {
          advance();
          ExprPtr inner = expression();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") {
          advance();
          ListExpr list;
          if (!is_punct("]")) {
            do {
              list.items.push_back(expression());
            } while (accept_punct(","));
          }
          expect_punct("]");
          return make_expr(pos, std::move(list));
        }
        if (t.text == "{") {
          advance();
          MapExpr map;
          if (!is_punct("}")) {
            do {
              std::string key;
              if (peek().kind == TokenKind::kIdent || peek().kind == TokenKind::kString) {
                key = advance().text;
              } else {
                error_expected("map key");
              }
              expect_punct(":");
              map.entries.emplace_back(std::move(key), expression());
            } while (accept_punct(","));
          }
          expect_punct("}");
          return make_expr(pos, std::move(map));
        }
        break;
      default: break;
    }
    error_expected("expression");
  }

  ExprPtr context(ContextRef ref) {
    const SourcePos pos = advance().pos;
    return make_expr(pos, ContextExpr{ref});
  }

  ExprPtr connect() {
    const SourcePos pos = advance().pos;
    ConnectExpr c;
    c.src = postfix();
    expect_punct("-[");
    c.edge_type = expect_ident("edge archetype name").text;
    if (accept_punct("{")) {
      c.fields = named_inits("}");
      expect_punct("}");
    }
    expect_punct("]->");
    c.dst = postfix();
    return make_expr(pos, std::move(c));
  }

  const std::vector<Token>& toks_;
  size_t pos_ = 0;
  int ability_depth_ = 0;
};

}  // namespace

Program parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

Program parse_source(std::string_view source) { return parse(tokenize(source)); }

}  // namespace osp::dsl
