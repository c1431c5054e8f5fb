#include "osp/dsl/printer.h"

#include <cctype>

#include "osp/dsl/lexer.h"
#include "osp/dsl/parser.h"

namespace osp::dsl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string literal(const PropertyValue& v) { return render_value(v); }

std::string map_key(const std::string& key) {
  bool ident = !key.empty() && !is_keyword(key) && (std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_');
  for (char c : key) ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  return ident ? key : quote_string(key);
}

int expr_precedence(const Expr& e) {
  if (auto* b = std::get_if<BinaryExpr>(&e.node)) return binary_precedence(b->op);
  if (std::holds_alternative<UnaryExpr>(e.node)) return 7;
  if (auto* l = std::get_if<LiteralExpr>(&e.node)) {
    if (l->value.is_number() && l->value.as_number() < 0) return 7;
  }
  if (std::holds_alternative<ConnectExpr>(e.node)) return 0;
  return 8;
}

std::string wrap(const Expr& e, int min_prec) {
  const std::string text = print_expr(e);
  return expr_precedence(e) < min_prec ? "(" + text + ")" : text;
}

std::string args_text(const std::vector<ExprPtr>& args) {
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += print_expr(*args[i]);
  }
  return out;
}

std::string named_text(const std::vector<NamedArg>& named) {
  std::string out;
  for (size_t i = 0; i < named.size(); ++i) {
    if (i) out += ", ";
    out += named[i].name + "=" + print_expr(*named[i].value);
  }
  return out;
}

class Printer {
 public:
  std::string program(const Program& p) {
    for (size_t i = 0; i < p.decls.size(); ++i) {
      if (i) out_ += "\n";
      decl(p.decls[i]);
    }
    if (!p.decls.empty() && !p.driver.empty()) out_ += "\n";
    for (const auto& s : p.driver) stmt(*s);
    return out_;
  }

 private:
  void line(const std::string& text) { out_ += std::string(indent_ * 2, ' ') + text + "\n"; }

  void decl(const ArchetypeDecl& d) {
    std::string head = std::string(archetype_kind_name(d.kind)) + " " + d.name;
    if (d.parent) head += " : " + *d.parent;
    if (d.fields.empty() && d.abilities.empty()) {
      line(head + " {}");
      return;
    }
    line(head + " {");
    ++indent_;
    for (const auto& f : d.fields) {
      std::string text = "has " + f.name + ": " + f.type_name;
      if (f.default_value) text += " = " + print_expr(*f.default_value);
      line(text + ";");
    }
    for (const auto& a : d.abilities) {
      line("can " + a.name + " with " + a.trigger + " " + std::string(phase_name(a.phase)) + " {");
      body(a.body);
      line("}");
    }
    --indent_;
    line("}");
  }

  void body(const Block& b) {
    ++indent_;
    for (const auto& s : b) stmt(*s);
    --indent_;
  }

  void if_chain(const IfStmt& s, const std::string& lead) {
    line(lead + "if " + print_expr(*s.cond) + " {");
    body(s.then_block);
    if (s.else_block.empty()) {
      line("}");
      return;
    }
    if (s.else_block.size() == 1) {
      if (auto* nested = std::get_if<IfStmt>(&s.else_block[0]->node)) {
        if_chain(*nested, "} else ");
        return;
      }
    }
    line("} else {");
    body(s.else_block);
    line("}");
  }

  void stmt(const Stmt& s) {
    std::visit(Overloaded{
                   [&](const LetStmt& x) { line("let " + x.name + " = " + print_expr(*x.value) + ";"); },
                   [&](const AssignStmt& x) {
                     line(print_expr(*x.target) + " " + x.op + " " + print_expr(*x.value) + ";");
                   },
                   [&](const IfStmt& x) { if_chain(x, ""); },
                   [&](const ForStmt& x) {
                     line("for " + x.var + " in " + print_expr(*x.iterable) + " {");
                     body(x.body);
                     line("}");
                   },
                   [&](const SpawnStmt& x) {
                     std::string text = "spawn " + print_expr(*x.walker) + " in " + print_expr(*x.target);
                     if (x.via) text += " via " + print_expr(*x.via);
                     line(text + ";");
                   },
                   [&](const VisitStmt& x) { line("visit " + print_expr(*x.target) + ";"); },
                   [&](const SkipStmt&) { line("skip;"); },
                   [&](const DisengageStmt&) { line("disengage;"); },
                   [&](const DelStmt& x) { line("del " + print_expr(*x.target) + ";"); },
                   [&](const ReportStmt& x) { line("report " + print_expr(*x.value) + ";"); },
                   [&](const ExprStmt& x) { line(print_expr(*x.expr) + ";"); },
               },
               s.node);
  }

  std::string out_;
  int indent_ = 0;
};

void sx_expr(std::string& out, const Expr& e);

void sx_block(std::string& out, const Block& b);

void sx_args(std::string& out, const std::vector<ExprPtr>& args) {
  for (const auto& a : args) {
    out += " ";
    sx_expr(out, *a);
  }
}

void sx_named(std::string& out, const std::vector<NamedArg>& named) {
  for (const auto& n : named) {
    out += " (= " + n.name + " ";
    sx_expr(out, *n.value);
    out += ")";
  }
}

void sx_expr(std::string& out, const Expr& e) {
  std::visit(Overloaded{
                 [&](const LiteralExpr& x) {
                   out += "(lit " + std::string(value_kind_name(x.value.kind())) + " " + render_value(x.value) + ")";
                 },
                 [&](const NameExpr& x) { out += "(name " + x.name + ")"; },
                 [&](const ContextExpr& x) { out += "(" + std::string(context_ref_name(x.ref)) + ")"; },
                 [&](const ListExpr& x) {
                   out += "(list";
                   sx_args(out, x.items);
                   out += ")";
                 },
                 [&](const MapExpr& x) {
                   out += "(map";
                   for (const auto& [k, v] : x.entries) {
                     out += " (" + quote_string(k) + " ";
                     sx_expr(out, *v);
                     out += ")";
                   }
                   out += ")";
                 },
                 [&](const FieldExpr& x) {
                   out += "(field ";
                   sx_expr(out, *x.object);
                   out += " " + x.field + ")";
                 },
                 [&](const IndexExpr& x) {
                   out += "(index ";
                   sx_expr(out, *x.object);
                   out += " ";
                   sx_expr(out, *x.index);
                   out += ")";
                 },
                 [&](const CallExpr& x) {
                   out += "(call " + x.callee;
                   sx_args(out, x.args);
                   sx_named(out, x.named);
                   out += ")";
                 },
                 [&](const MethodExpr& x) {
                   out += "(method " + x.method + " ";
                   sx_expr(out, *x.object);
                   sx_args(out, x.args);
                   out += ")";
                 },
                 [&](const UnaryExpr& x) {
                   out += "(" + x.op + " ";
                   sx_expr(out, *x.operand);
                   out += ")";
                 },
                 [&](const BinaryExpr& x) {
                   out += "(" + x.op + " ";
                   sx_expr(out, *x.lhs);
                   out += " ";
                   sx_expr(out, *x.rhs);
                   out += ")";
                 },
                 [&](const ConnectExpr& x) {
                   out += "(connect " + x.edge_type + " ";
                   sx_expr(out, *x.src);
                   out += " ";
                   sx_expr(out, *x.dst);
                   sx_named(out, x.fields);
                   out += ")";
                 },
             },
             e.node);
}

void sx_stmt(std::string& out, const Stmt& s) {
  std::visit(Overloaded{
                 [&](const LetStmt& x) {
                   out += "(let " + x.name + " ";
                   sx_expr(out, *x.value);
                   out += ")";
                 },
                 [&](const AssignStmt& x) {
                   out += "(assign " + x.op + " ";
                   sx_expr(out, *x.target);
                   out += " ";
                   sx_expr(out, *x.value);
                   out += ")";
                 },
                 [&](const IfStmt& x) {
                   out += "(if ";
                   sx_expr(out, *x.cond);
                   out += " ";
                   sx_block(out, x.then_block);
                   out += " ";
                   sx_block(out, x.else_block);
                   out += ")";
                 },
                 [&](const ForStmt& x) {
                   out += "(for " + x.var + " ";
                   sx_expr(out, *x.iterable);
                   out += " ";
                   sx_block(out, x.body);
                   out += ")";
                 },
                 [&](const SpawnStmt& x) {
                   out += "(spawn ";
                   sx_expr(out, *x.walker);
                   out += " ";
                   sx_expr(out, *x.target);
                   if (x.via) {
                     out += " (via ";
                     sx_expr(out, *x.via);
                     out += ")";
                   }
                   out += ")";
                 },
                 [&](const VisitStmt& x) {
                   out += "(visit ";
                   sx_expr(out, *x.target);
                   out += ")";
                 },
                 [&](const SkipStmt&) { out += "(skip)"; },
                 [&](const DisengageStmt&) { out += "(disengage)"; },
                 [&](const DelStmt& x) {
                   out += "(del ";
                   sx_expr(out, *x.target);
                   out += ")";
                 },
                 [&](const ReportStmt& x) {
                   out += "(report ";
                   sx_expr(out, *x.value);
                   out += ")";
                 },
                 [&](const ExprStmt& x) {
                   out += "(expr ";
                   sx_expr(out, *x.expr);
                   out += ")";
                 },
             },
             s.node);
}

void sx_block(std::string& out, const Block& b) {
  out += "(block";
  for (const auto& s : b) {
    out += " ";
    sx_stmt(out, *s);
  }
  out += ")";
}

}  // namespace

std::string print_expr(const Expr& e) {
  return std::visit(
      Overloaded{
          [&](const LiteralExpr& x) { return literal(x.value); },
          [&](const NameExpr& x) { return x.name; },
          [&](const ContextExpr& x) { return std::string(context_ref_name(x.ref)); },
          [&](const ListExpr& x) { return "[" + args_text(x.items) + "]"; },
          [&](const MapExpr& x) {
            std::string out = "{";
            for (size_t i = 0; i < x.entries.size(); ++i) {
              if (i) out += ", ";
              out += map_key(x.entries[i].first) + ": " + print_expr(*x.entries[i].second);
            }
            return out + "}";
          },
          [&](const FieldExpr& x) { return wrap(*x.object, 8) + "." + x.field; },
          [&](const IndexExpr& x) { return wrap(*x.object, 8) + "[" + print_expr(*x.index) + "]"; },
          [&](const CallExpr& x) {
            std::string inner = args_text(x.args);
            if (!x.named.empty()) inner += (inner.empty() ? "" : ", ") + named_text(x.named);
            return x.callee + "(" + inner + ")";
          },
          [&](const MethodExpr& x) { return wrap(*x.object, 8) + "." + x.method + "(" + args_text(x.args) + ")"; },
          [&](const UnaryExpr& x) {
            // A space keeps `- -1` from reading as a different operand.
            const std::string operand = wrap(*x.operand, 7);
            return x.op + (operand.starts_with("-") ? " " : "") + operand;
          },
          [&](const BinaryExpr& x) {
            const int prec = binary_precedence(x.op);
            return wrap(*x.lhs, prec) + " " + x.op + " " + wrap(*x.rhs, prec + 1);
          },
          [&](const ConnectExpr& x) {
            std::string edge = x.edge_type;
            if (!x.fields.empty()) edge += "{" + named_text(x.fields) + "}";
            return "connect " + wrap(*x.src, 8) + " -[" + edge + "]-> " + wrap(*x.dst, 8);
          },
      },
      e.node);
}

std::string print_program(const Program& program) { return Printer().program(program); }

std::string sexpr(const Program& program) {
  std::string out = "(program";
  for (const auto& d : program.decls) {
    out += " (" + std::string(archetype_kind_name(d.kind)) + " " + d.name + " " + (d.parent ? *d.parent : "-");
    for (const auto& f : d.fields) {
      out += " (has " + f.name + " " + f.type_name;
      if (f.default_value) {
        out += " ";
        sx_expr(out, *f.default_value);
      }
      out += ")";
    }
    for (const auto& a : d.abilities) {
      out += " (can " + a.name + " " + a.trigger + " " + std::string(phase_name(a.phase)) + " ";
      sx_block(out, a.body);
      out += ")";
    }
    out += ")";
  }
  out += " ";
  sx_block(out, program.driver);
  return out + ")";
}

}  // namespace osp::dsl
