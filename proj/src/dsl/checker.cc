#include "osp/dsl/checker.h"

#include <map>
#include <set>

#include "osp/dsl/builtins.h"

namespace osp::dsl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// What is statically known about an expression's value.
struct Info {
  std::optional<ArchetypeKind> ref_kind;
  bool is_type = false;
};

std::string kind_text(ArchetypeKind k) { return std::string(archetype_kind_name(k)); }

class Checker {
 public:
  explicit Checker(const Program& p) : prog_(p) {}

  std::vector<Diagnostic> run() {
    collect();
    for (const auto& d : prog_.decls) check_decl(d);
    ability_ = nullptr;
    scopes_.assign(1, {});
    check_block(prog_.driver);
    return std::move(diags_);
  }

 private:
  void error(SourcePos pos, std::string message) {
    diags_.push_back(Diagnostic{Severity::kError, pos, std::move(message)});
  }

  void collect() {
    for (const auto& d : prog_.decls) {
      if (archetypes_.count(d.name)) {
        error(d.pos, "archetype '" + d.name + "' is already defined");
        continue;
      }
      if (find_builtin(d.name)) error(d.pos, "archetype '" + d.name + "' shadows a builtin function");
      archetypes_[d.name] = &d;
    }
    for (const auto& d : prog_.decls) {
      if (!d.parent) continue;
      auto it = archetypes_.find(*d.parent);
      if (it == archetypes_.end()) {
        error(d.parent_pos, "unknown parent archetype '" + *d.parent + "'");
      } else if (it->second->kind != d.kind) {
        error(d.parent_pos, kind_text(d.kind) + " '" + d.name + "' cannot extend " + kind_text(it->second->kind) +
                                " '" + *d.parent + "'");
      }
    }
    for (const auto& d : prog_.decls) {
      if (archetypes_.at(d.name) != &d) continue;
      std::set<std::string> seen;
      for (const ArchetypeDecl* a = &d; a && a->parent;) {
        if (!seen.insert(a->name).second) break;
        auto it = archetypes_.find(*a->parent);
        if (it == archetypes_.end()) break;
        if (it->second == &d) {
          error(d.pos, "archetype '" + d.name + "' inherits from itself");
          cyclic_.insert(d.name);
          break;
        }
        a = it->second;
      }
    }
  }

  // Root first; empty when the chain is cyclic.
  std::vector<const ArchetypeDecl*> lineage(const ArchetypeDecl& d) const {
    std::vector<const ArchetypeDecl*> chain;
    if (cyclic_.count(d.name)) return chain;
    for (const ArchetypeDecl* a = &d; a;) {
      chain.insert(chain.begin(), a);
      if (!a->parent) break;
      auto it = archetypes_.find(*a->parent);
      if (it == archetypes_.end() || chain.size() > archetypes_.size()) break;
      a = it->second;
    }
    return chain;
  }

  const FieldDecl* find_field(const ArchetypeDecl& d, const std::string& name) const {
    for (const ArchetypeDecl* a : lineage(d)) {
      for (const auto& f : a->fields) {
        if (f.name == name) return &f;
      }
    }
    return nullptr;
  }

  void check_decl(const ArchetypeDecl& d) {
    std::set<std::string> inherited;
    for (const ArchetypeDecl* a : lineage(d)) {
      if (a == &d) break;
      for (const auto& f : a->fields) inherited.insert(f.name);
    }
    std::set<std::string> own;
    for (const auto& f : d.fields) {
      if (!parse_field_type(f.type_name)) error(f.pos, "unknown field type '" + f.type_name + "'");
      if (inherited.count(f.name) || !own.insert(f.name).second) {
        error(f.pos, "field '" + f.name + "' is already declared on '" + d.name + "'");
      }
      if (f.default_value) {
        ability_ = nullptr;
        scopes_.assign(1, {});
        in_default_ = true;
        check_expr(*f.default_value);
        in_default_ = false;
      }
    }
    for (const auto& a : d.abilities) {
      if (d.kind == ArchetypeKind::kObject) {
        error(a.pos, "object archetype '" + d.name + "' cannot have abilities");
        continue;
      }
      auto it = archetypes_.find(a.trigger);
      if (it == archetypes_.end()) {
        error(a.trigger_pos, "unknown trigger archetype '" + a.trigger + "'");
      } else {
        const ArchetypeKind tk = it->second->kind;
        const bool walker_owner = d.kind == ArchetypeKind::kWalker;
        if (walker_owner && tk != ArchetypeKind::kNode && tk != ArchetypeKind::kEdge) {
          error(a.trigger_pos, "walker ability '" + a.name + "' must be triggered by a node or edge archetype, not " +
                                   kind_text(tk) + " '" + a.trigger + "'");
        }
        if (!walker_owner && tk != ArchetypeKind::kWalker) {
          error(a.trigger_pos, kind_text(d.kind) + " ability '" + a.name + "' must be triggered by a walker archetype, not " +
                                   kind_text(tk) + " '" + a.trigger + "'");
        }
      }
      ability_ = &d;
      scopes_.assign(1, {});
      check_block(a.body);
    }
    ability_ = nullptr;
  }

  void declare(const std::string& name, Info info) { scopes_.back()[name] = info; }

  const Info* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void check_block(const Block& b) {
    scopes_.emplace_back();
    for (const auto& s : b) check_stmt(*s);
    scopes_.pop_back();
  }

  void require_ref_kind(const Info& info, SourcePos pos, std::initializer_list<ArchetypeKind> allowed,
                        const std::string& what) {
    if (info.is_type) {
      error(pos, what + " must be an instance, not an archetype name");
      return;
    }
    if (!info.ref_kind) return;
    for (ArchetypeKind k : allowed) {
      if (*info.ref_kind == k) return;
    }
    error(pos, what + " cannot be a " + kind_text(*info.ref_kind));
  }

  void check_stmt(const Stmt& s) {
    std::visit(Overloaded{
                   [&](const LetStmt& x) { declare(x.name, check_expr(*x.value)); },
                   [&](const AssignStmt& x) {
                     const Info value = check_expr(*x.value);
                     if (auto* n = std::get_if<NameExpr>(&x.target->node)) {
                       if (!lookup(n->name)) {
                         error(x.target->pos, "assignment to undeclared variable '" + n->name + "'");
                       } else if (x.op == "=") {
                         for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
                           if (it->count(n->name)) {
                             (*it)[n->name] = value;
                             break;
                           }
                         }
                       }
                     } else {
                       check_expr(*x.target);
                     }
                   },
                   [&](const IfStmt& x) {
                     check_expr(*x.cond);
                     check_block(x.then_block);
                     check_block(x.else_block);
                   },
                   [&](const ForStmt& x) {
                     check_expr(*x.iterable);
                     scopes_.emplace_back();
                     declare(x.var, Info{});
                     check_block(x.body);
                     scopes_.pop_back();
                   },
                   [&](const SpawnStmt& x) {
                     require_ref_kind(check_expr(*x.walker), x.walker->pos, {ArchetypeKind::kWalker}, "spawned value");
                     const Info target = check_expr(*x.target);
                     require_ref_kind(target, x.target->pos, {ArchetypeKind::kNode, ArchetypeKind::kEdge},
                                      "spawn target");
                     if (x.via) {
                       require_ref_kind(check_expr(*x.via), x.via->pos, {ArchetypeKind::kNode}, "spawn entry node");
                       if (target.ref_kind && *target.ref_kind != ArchetypeKind::kEdge) {
                         error(x.via->pos, "'via' applies only to edge spawn targets");
                       }
                     }
                   },
                   [&](const VisitStmt& x) {
                     require_ref_kind(check_expr(*x.target), x.target->pos,
                                      {ArchetypeKind::kNode, ArchetypeKind::kEdge}, "visit target");
                   },
                   [&](const SkipStmt&) {},
                   [&](const DisengageStmt&) {},
                   [&](const DelStmt& x) {
                     const Info target = check_expr(*x.target);
                     if (target.is_type) error(x.target->pos, "cannot delete an archetype");
                   },
                   [&](const ReportStmt& x) { check_expr(*x.value); },
                   [&](const ExprStmt& x) { check_expr(*x.expr); },
               },
               s.node);
  }

  void check_inits(const ArchetypeDecl& arch, const std::vector<NamedArg>& inits) {
    std::set<std::string> seen;
    for (const auto& a : inits) {
      check_expr(*a.value);
      if (!seen.insert(a.name).second) error(a.pos, "field '" + a.name + "' is initialized twice");
      if (!find_field(arch, a.name) && !cyclic_.count(arch.name)) {
        error(a.pos, "archetype '" + arch.name + "' has no field '" + a.name + "'");
      }
    }
  }

  Info check_context(const ContextExpr& x, SourcePos pos) {
    const std::string name(context_ref_name(x.ref));
    if (!ability_) {
      error(pos, "'" + name + "' is only available inside an ability body");
      return {};
    }
    const bool walker_owner = ability_->kind == ArchetypeKind::kWalker;
    switch (x.ref) {
      case ContextRef::kSelf: return Info{ability_->kind};
      case ContextRef::kHere:
        if (!walker_owner) error(pos, "'here' is only available inside walker abilities");
        return {};
      case ContextRef::kVisitor:
        if (walker_owner) error(pos, "'visitor' is only available inside node and edge abilities");
        return Info{ArchetypeKind::kWalker};
      case ContextRef::kPath: return {};
    }
    return {};
  }

  Info check_call(const CallExpr& x, SourcePos pos) {
    auto arch = archetypes_.find(x.callee);
    if (arch != archetypes_.end()) {
      for (const auto& a : x.args) check_expr(*a);
      const ArchetypeDecl& d = *arch->second;
      if (d.kind == ArchetypeKind::kEdge) {
        error(pos, "edge archetype '" + d.name + "' is instantiated with connect, not called");
      }
      if (!x.args.empty()) error(x.args.front()->pos, "archetype instantiation takes only named field values");
      check_inits(d, x.named);
      return Info{d.kind};
    }
    const BuiltinSignature* sig = find_builtin(x.callee);
    for (const auto& a : x.args) check_expr(*a);
    for (const auto& a : x.named) check_expr(*a.value);
    if (!sig) {
      error(pos, "unknown function or archetype '" + x.callee + "'");
      return {};
    }
    if (!x.named.empty()) error(x.named.front().pos, "builtin '" + x.callee + "' takes no named arguments");
    const int n = static_cast<int>(x.args.size());
    if (n < sig->min_args || n > sig->max_args) {
      const std::string range = sig->min_args == sig->max_args
                                    ? std::to_string(sig->min_args)
                                    : std::to_string(sig->min_args) + " to " + std::to_string(sig->max_args);
      error(pos, "'" + x.callee + "' expects " + range + " argument(s), got " + std::to_string(n));
    }
    if (x.callee == "src" || x.callee == "dst") return Info{ArchetypeKind::kNode};
    return {};
  }

  Info check_expr(const Expr& e) {
    return std::visit(
        Overloaded{
            [&](const LiteralExpr&) { return Info{}; },
            [&](const NameExpr& x) {
              if (const Info* v = lookup(x.name)) return *v;
              if (archetypes_.count(x.name)) return Info{std::nullopt, true};
              error(e.pos, "unknown name '" + x.name + "'");
              return Info{};
            },
            [&](const ContextExpr& x) { return check_context(x, e.pos); },
            [&](const ListExpr& x) {
              for (const auto& i : x.items) check_expr(*i);
              return Info{};
            },
            [&](const MapExpr& x) {
              std::set<std::string> keys;
              for (const auto& [k, v] : x.entries) {
                if (!keys.insert(k).second) error(v->pos, "duplicate map key '" + k + "'");
                check_expr(*v);
              }
              return Info{};
            },
            [&](const FieldExpr& x) {
              const Info obj = check_expr(*x.object);
              if (obj.is_type) error(e.pos, "cannot read a field of an archetype name");
              return Info{};
            },
            [&](const IndexExpr& x) {
              check_expr(*x.object);
              check_expr(*x.index);
              return Info{};
            },
            [&](const CallExpr& x) {
              if (in_default_ && archetypes_.count(x.callee)) error(e.pos, "field defaults cannot create instances");
              return check_call(x, e.pos);
            },
            [&](const MethodExpr& x) {
              check_expr(*x.object);
              for (const auto& a : x.args) check_expr(*a);
              if (x.method != "append") {
                error(e.pos, "unknown method '" + x.method + "'");
              } else if (x.args.size() != 1) {
                error(e.pos, "'append' expects 1 argument, got " + std::to_string(x.args.size()));
              }
              const bool lvalue = std::holds_alternative<NameExpr>(x.object->node) ||
                                  std::holds_alternative<FieldExpr>(x.object->node) ||
                                  std::holds_alternative<IndexExpr>(x.object->node) ||
                                  (std::holds_alternative<ContextExpr>(x.object->node) &&
                                   std::get<ContextExpr>(x.object->node).ref == ContextRef::kPath);
              if (!lvalue) error(x.object->pos, "'append' needs a variable, field, element or path");
              return Info{};
            },
            [&](const UnaryExpr& x) {
              check_expr(*x.operand);
              return Info{};
            },
            [&](const BinaryExpr& x) {
              check_expr(*x.lhs);
              check_expr(*x.rhs);
              return Info{};
            },
            [&](const ConnectExpr& x) {
              if (in_default_) error(e.pos, "field defaults cannot create instances");
              require_ref_kind(check_expr(*x.src), x.src->pos, {ArchetypeKind::kNode}, "edge source");
              require_ref_kind(check_expr(*x.dst), x.dst->pos, {ArchetypeKind::kNode}, "edge destination");
              auto it = archetypes_.find(x.edge_type);
              if (it == archetypes_.end()) {
                error(e.pos, "unknown edge archetype '" + x.edge_type + "'");
                for (const auto& f : x.fields) check_expr(*f.value);
              } else if (it->second->kind != ArchetypeKind::kEdge) {
                error(e.pos, "'" + x.edge_type + "' is a " + kind_text(it->second->kind) + " archetype, not an edge");
                for (const auto& f : x.fields) check_expr(*f.value);
              } else {
                check_inits(*it->second, x.fields);
              }
              return Info{ArchetypeKind::kEdge};
            },
        },
        e.node);
  }

  const Program& prog_;
  std::vector<Diagnostic> diags_;
  std::map<std::string, const ArchetypeDecl*> archetypes_;
  std::set<std::string> cyclic_;
  const ArchetypeDecl* ability_ = nullptr;
  bool in_default_ = false;
  std::vector<std::map<std::string, Info>> scopes_;
};

}  // namespace

std::vector<Diagnostic> check(const Program& program) { return Checker(program).run(); }

}  // namespace osp::dsl
