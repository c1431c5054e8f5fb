#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "osp/archetype.h"
#include "osp/error.h"
#include "osp/value.h"

namespace osp::dsl {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

enum class ContextRef { kSelf, kHere, kVisitor, kPath };

struct NamedArg {
  SourcePos pos;
  std::string name;
  ExprPtr value;
};

struct LiteralExpr {
  PropertyValue value;
};
struct NameExpr {
  std::string name;
};
struct ContextExpr {
  ContextRef ref;
};
struct ListExpr {
  std::vector<ExprPtr> items;
};
struct MapExpr {
  std::vector<std::pair<std::string, ExprPtr>> entries;
};
struct FieldExpr {
  ExprPtr object;
  std::string field;
};
struct IndexExpr {
  ExprPtr object;
  ExprPtr index;
};
// A builtin call, or instance creation when the callee names an archetype.
struct CallExpr {
  std::string callee;
  std::vector<ExprPtr> args;
  std::vector<NamedArg> named;
};
struct MethodExpr {
  ExprPtr object;
  std::string method;
  std::vector<ExprPtr> args;
};
struct UnaryExpr {
  std::string op;
  ExprPtr operand;
};
struct BinaryExpr {
  std::string op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct ConnectExpr {
  ExprPtr src;
  std::string edge_type;
  std::vector<NamedArg> fields;
  ExprPtr dst;
};

struct Expr {
  SourcePos pos;
  std::variant<LiteralExpr, NameExpr, ContextExpr, ListExpr, MapExpr, FieldExpr, IndexExpr, CallExpr, MethodExpr,
               UnaryExpr, BinaryExpr, ConnectExpr>
      node;
};

struct LetStmt {
  std::string name;
  ExprPtr value;
};
struct AssignStmt {
  ExprPtr target;
  std::string op;  // "=" or "+="
  ExprPtr value;
};
struct IfStmt {
  ExprPtr cond;
  Block then_block;
  Block else_block;
};
struct ForStmt {
  std::string var;
  ExprPtr iterable;
  Block body;
};
struct SpawnStmt {
  ExprPtr walker;
  ExprPtr target;
  ExprPtr via;  // optional entry node for an edge target
};
struct VisitStmt {
  ExprPtr target;
};
struct SkipStmt {};
struct DisengageStmt {};
struct DelStmt {
  ExprPtr target;
};
struct ReportStmt {
  ExprPtr value;
};
struct ExprStmt {
  ExprPtr expr;
};

struct Stmt {
  SourcePos pos;
  std::variant<LetStmt, AssignStmt, IfStmt, ForStmt, SpawnStmt, VisitStmt, SkipStmt, DisengageStmt, DelStmt, ReportStmt,
               ExprStmt>
      node;
};

struct FieldDecl {
  SourcePos pos;
  std::string name;
  std::string type_name;
  ExprPtr default_value;  // optional
};

struct AbilityDecl {
  SourcePos pos;
  std::string name;
  std::string trigger;
  SourcePos trigger_pos;
  Phase phase = Phase::kEntry;
  Block body;
};

struct ArchetypeDecl {
  SourcePos pos;
  ArchetypeKind kind = ArchetypeKind::kNode;
  std::string name;
  std::optional<std::string> parent;
  SourcePos parent_pos;
  std::vector<FieldDecl> fields;
  std::vector<AbilityDecl> abilities;
};

struct Program {
  std::vector<ArchetypeDecl> decls;
  Block driver;
};

std::string_view context_ref_name(ContextRef ref);

}  // namespace osp::dsl
