#include "osp/dsl/interpreter.h"

#include <algorithm>
#include <cmath>
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

[[noreturn]] void fail(const std::string& message) { throw ScriptError(message); }

std::string describe(const Value& v) {
  if (std::holds_alternative<PathCollection>(v)) return "path";
  if (std::holds_alternative<const ArchetypeDef*>(v)) return "archetype";
  return std::string(value_kind_name(std::get<PropertyValue>(v).kind()));
}

const PropertyValue& prop(const Value& v, const char* what) {
  if (auto* p = std::get_if<PropertyValue>(&v)) return *p;
  fail(std::string(what) + " must be a value, got " + describe(v));
}

PropertyValue& prop(Value& v, const char* what) {
  if (auto* p = std::get_if<PropertyValue>(&v)) return *p;
  fail(std::string(what) + " must be a value, got " + describe(v));
}

InstanceId ref_of(const Value& v, const char* what) {
  const PropertyValue& p = prop(v, what);
  if (!p.is_ref()) fail(std::string(what) + " must be an instance reference, got " + describe(v));
  return p.as_ref();
}

const ArchetypeDef* type_of(const Value& v, const char* what, bool allow_none) {
  if (auto* t = std::get_if<const ArchetypeDef*>(&v)) return *t;
  if (allow_none) {
    if (auto* p = std::get_if<PropertyValue>(&v); p && p->is_null()) return nullptr;
  }
  fail(std::string(what) + " must be an archetype name, got " + describe(v));
}

bool truthy(const Value& v, const char* what) {
  const PropertyValue& p = prop(v, what);
  if (!p.is_bool()) fail(std::string(what) + " must be a bool, got " + describe(v));
  return p.as_bool();
}

int64_t int_of(const Value& v, const char* what) {
  const PropertyValue& p = prop(v, what);
  if (!p.is_int()) fail(std::string(what) + " must be an int, got " + describe(v));
  return p.as_int();
}

std::string plain_text(const Value& v) {
  if (auto* t = std::get_if<const ArchetypeDef*>(&v)) return (*t)->name();
  if (auto* p = std::get_if<PathCollection>(&v)) {
    std::string out = "path#" + to_string(p->origin) + "[";
    for (size_t i = 0; i < p->elements.size(); ++i) {
      if (i) out += ",";
      out += "#" + to_string(p->elements[i]);
    }
    return out + "]";
  }
  const PropertyValue& pv = std::get<PropertyValue>(v);
  return pv.is_str() ? pv.as_str() : render_value(pv);
}

bool values_equal(const Value& a, const Value& b) {
  auto* pa = std::get_if<PropertyValue>(&a);
  auto* pb = std::get_if<PropertyValue>(&b);
  if (pa && pb && pa->is_number() && pb->is_number()) return pa->as_number() == pb->as_number();
  return a == b;
}

PropertyValue arith(const std::string& op, const PropertyValue& a, const PropertyValue& b) {
  if (op == "+" && (a.is_str() || b.is_str())) {
    return PropertyValue(plain_text(Value(a)) + plain_text(Value(b)));
  }
  if (op == "+" && a.is_list() && b.is_list()) {
    PropertyList out = a.as_list();
    out.insert(out.end(), b.as_list().begin(), b.as_list().end());
    return PropertyValue(std::move(out));
  }
  if (!a.is_number() || !b.is_number()) {
    fail("operator '" + op + "' needs numbers, got " + std::string(value_kind_name(a.kind())) + " and " +
         std::string(value_kind_name(b.kind())));
  }
  if (a.is_int() && b.is_int()) {
    const int64_t x = a.as_int(), y = b.as_int();
    if (op == "+") return PropertyValue(x + y);
    if (op == "-") return PropertyValue(x - y);
    if (op == "*") return PropertyValue(x * y);
    if (y == 0) fail("integer division by zero");
    if (op == "/") return PropertyValue(x / y);
    return PropertyValue(x % y);
  }
  const double x = a.as_number(), y = b.as_number();
  if (op == "+") return PropertyValue(x + y);
  if (op == "-") return PropertyValue(x - y);
  if (op == "*") return PropertyValue(x * y);
  if (op == "/") return PropertyValue(x / y);
  return PropertyValue(std::fmod(x, y));
}

bool compare(const std::string& op, const PropertyValue& a, const PropertyValue& b) {
  int c = 0;
  if (a.is_number() && b.is_number()) {
    c = a.as_number() < b.as_number() ? -1 : (a.as_number() > b.as_number() ? 1 : 0);
  } else if (a.is_str() && b.is_str()) {
    c = a.as_str().compare(b.as_str());
  } else {
    fail("operator '" + op + "' needs two numbers or two strings");
  }
  if (op == "<") return c < 0;
  if (op == "<=") return c <= 0;
  if (op == ">") return c > 0;
  return c >= 0;
}

std::string expand_ref(const SystemState& state, InstanceId id) {
  if (!state.is_live(id)) return "#" + to_string(id);
  const Instance& inst = state.instance(id);
  std::string out = inst.archetype->name() + "#" + to_string(id) + "{";
  for (size_t i = 0; i < inst.props.size(); ++i) {
    if (i) out += ",";
    out += inst.props.keys()[i] + "=" + render_value(inst.props.values()[i]);
  }
  return out + "}";
}

std::string render_report_prop(const SystemState& state, const PropertyValue& v) {
  if (v.is_ref()) return expand_ref(state, v.as_ref());
  if (v.is_list()) {
    std::string out = "[";
    const auto& list = v.as_list();
    for (size_t i = 0; i < list.size(); ++i) {
      if (i) out += ",";
      out += render_report_prop(state, list[i]);
    }
    return out + "]";
  }
  if (v.is_map()) {
    std::string out = "{";
    const auto& map = v.as_map();
    for (size_t i = 0; i < map.size(); ++i) {
      if (i) out += ",";
      out += map.keys()[i] + ":" + render_report_prop(state, map.values()[i]);
    }
    return out + "}";
  }
  return render_value(v);
}

PropertyList refs(const std::vector<InstanceId>& ids) {
  PropertyList out;
  for (InstanceId id : ids) out.emplace_back(id);
  return out;
}

std::vector<InstanceId> ids_of(const PropertyValue& list, const char* what) {
  if (!list.is_list()) fail(std::string(what) + " must be a list of instance references");
  std::vector<InstanceId> out;
  for (const auto& v : list.as_list()) {
    if (!v.is_ref()) fail(std::string(what) + " must contain only instance references");
    out.push_back(v.as_ref());
  }
  return out;
}

}  // namespace

std::string render_report(const SystemState& state, const Value& value) {
  if (auto* p = std::get_if<PropertyValue>(&value)) return render_report_prop(state, *p);
  return plain_text(value);
}

Interpreter::Interpreter(const Program& program, uint64_t budget)
    : program_(program), engine_(state_, budget) {}

void Interpreter::load() {
  if (loaded_) return;
  loaded_ = true;
  define_archetypes();
}

void Interpreter::define_archetypes() {
  // Parents before children, otherwise source order.
  std::vector<const ArchetypeDecl*> pending;
  for (const auto& d : program_.decls) pending.push_back(&d);
  std::vector<std::pair<const ArchetypeDecl*, ArchetypeDef*>> ordered;
  while (!pending.empty()) {
    const size_t before = pending.size();
    for (auto it = pending.begin(); it != pending.end();) {
      const ArchetypeDecl& d = **it;
      const ArchetypeDef* parent = nullptr;
      if (d.parent) {
        parent = registry_.find(*d.parent);
        if (!parent) {
          ++it;
          continue;
        }
      }
      try {
        ordered.emplace_back(&d, &registry_.define(d.name, d.kind, parent));
      } catch (OspError& err) {
        err.set_pos_if_unset(d.pos);
        throw;
      }
      it = pending.erase(it);
    }
    if (pending.size() == before) {
      ScriptError err("archetype '" + pending.front()->name + "' has an unresolvable parent");
      err.set_pos_if_unset(pending.front()->parent_pos);
      throw err;
    }
  }

  Frame empty;
  empty.scopes.emplace_back();
  for (auto [d, def] : ordered) {
    for (const auto& f : d->fields) {
      try {
        const auto type = parse_field_type(f.type_name);
        if (!type) fail("unknown field type '" + f.type_name + "'");
        PropertyValue value = f.default_value ? eval_prop(*f.default_value, empty, "field default") : default_for(*type);
        registry_.add_field(*def, FieldDef{f.name, *type, std::move(value)});
      } catch (OspError& err) {
        err.set_pos_if_unset(f.pos);
        throw;
      }
    }
  }
  for (const auto& d : program_.decls) {
    const ArchetypeDef& owner = registry_.get(d.name);
    for (const auto& a : d.abilities) {
      try {
        const ArchetypeDef* trigger = registry_.find(a.trigger);
        if (!trigger) fail("unknown trigger archetype '" + a.trigger + "'");
        const Block* body = &a.body;
        registry_.register_ability(AbilityDef{a.name, &owner, trigger, a.phase, [this, body](ExecutionContext& ctx) {
                                                Frame f;
                                                f.ctx = &ctx;
                                                exec_block(*body, f);
                                              }});
      } catch (OspError& err) {
        err.set_pos_if_unset(a.pos);
        throw;
      }
    }
  }
}

void Interpreter::run() {
  load();
  Frame f;
  exec_block(program_.driver, f);
}

void Interpreter::exec_block(const Block& block, Frame& f) {
  f.scopes.emplace_back();
  struct Pop {
    Frame& f;
    ~Pop() { f.scopes.pop_back(); }
  } pop{f};
  for (const auto& s : block) exec(*s, f);
}

Value* Interpreter::lookup(const std::string& name, Frame& f) {
  for (auto it = f.scopes.rbegin(); it != f.scopes.rend(); ++it) {
    auto found = it->find(name);
    if (found != it->end()) return &found->second;
  }
  return nullptr;
}

SystemState::FieldInits Interpreter::inits(const std::vector<NamedArg>& named, Frame& f) {
  SystemState::FieldInits out;
  for (const auto& a : named) out.emplace_back(a.name, eval_prop(*a.value, f, "field value"));
  return out;
}

PropertyValue Interpreter::eval_prop(const Expr& e, Frame& f, const char* what) {
  Value v = eval(e, f);
  try {
    return prop(v, what);
  } catch (OspError& err) {
    err.set_pos_if_unset(e.pos);
    throw;
  }
}

void Interpreter::set_queue(Frame& f, const PropertyValue& targets) {
  const InstanceId w = f.ctx->walker();
  std::optional<InstanceId> anchor;
  if (auto loc = state_.location(w); loc && state_.is_node(*loc)) anchor = *loc;
  WalkerQueue queue;
  for (InstanceId id : ids_of(targets, "path")) {
    if (!state_.is_node(id) && !state_.is_edge(id)) fail("path entries must be live nodes or edges, got #" + to_string(id));
    queue.push_back(QueueEntry{id, anchor});
  }
  f.ctx->path() = std::move(queue);
}

void Interpreter::exec(const Stmt& s, Frame& f) {
  try {
    std::visit(
        Overloaded{
            [&](const LetStmt& x) {
              Value v = eval(*x.value, f);
              f.scopes.back()[x.name] = std::move(v);
            },
            [&](const AssignStmt& x) {
              Value v = eval(*x.value, f);
              if (x.op == "+=") {
                Value cur = eval(*x.target, f);
                v = arith("+", prop(cur, "left operand of '+='"), prop(v, "right operand of '+='"));
              }
              assign(*x.target, std::move(v), f);
            },
            [&](const IfStmt& x) {
              if (truthy(eval(*x.cond, f), "if condition")) {
                exec_block(x.then_block, f);
              } else {
                exec_block(x.else_block, f);
              }
            },
            [&](const ForStmt& x) {
              Value it = eval(*x.iterable, f);
              std::vector<Value> items;
              if (auto* p = std::get_if<PathCollection>(&it)) {
                for (InstanceId id : p->elements) items.emplace_back(PropertyValue(id));
              } else {
                const PropertyValue& pv = prop(it, "for iterable");
                if (pv.is_list()) {
                  for (const auto& v : pv.as_list()) items.emplace_back(v);
                } else if (pv.is_map()) {
                  for (const auto& k : pv.as_map().keys()) items.emplace_back(PropertyValue(k));
                } else {
                  fail("cannot iterate over " + describe(it));
                }
              }
              for (auto& item : items) {
                f.scopes.emplace_back();
                f.scopes.back()[x.var] = std::move(item);
                struct Pop {
                  Frame& f;
                  ~Pop() { f.scopes.pop_back(); }
                } pop{f};
                exec_block(x.body, f);
              }
            },
            [&](const SpawnStmt& x) {
              const InstanceId w = ref_of(eval(*x.walker, f), "spawned value");
              Value target = eval(*x.target, f);
              std::optional<InstanceId> via;
              if (x.via) via = ref_of(eval(*x.via, f), "spawn entry node");
              if (auto* p = std::get_if<PathCollection>(&target)) {
                if (via) fail("'via' applies only to edge spawn targets");
                engine_.spawn(w, SpawnOnPath{*p});
                return;
              }
              const InstanceId t = ref_of(target, "spawn target");
              if (state_.is_edge(t)) {
                if (via) {
                  engine_.spawn(w, SpawnOnEdgeFrom{t, *via});
                } else {
                  engine_.spawn(w, SpawnOnEdge{t});
                }
              } else {
                if (via) fail("'via' applies only to edge spawn targets");
                engine_.spawn(w, SpawnAtNode{t});
              }
            },
            [&](const VisitStmt& x) {
              Value target = eval(*x.target, f);
              if (auto* p = std::get_if<PathCollection>(&target)) {
                f.ctx->visit(VisitPath{*p});
                return;
              }
              const PropertyValue& pv = prop(target, "visit target");
              std::vector<InstanceId> ids;
              if (pv.is_list()) {
                ids = ids_of(pv, "visit target");
              } else {
                ids.push_back(ref_of(target, "visit target"));
              }
              for (InstanceId id : ids) {
                if (state_.is_edge(id)) {
                  f.ctx->visit(VisitEdge{id});
                } else {
                  f.ctx->visit(VisitNode{id});
                }
              }
            },
            [&](const SkipStmt&) { f.ctx->skip(); },
            [&](const DisengageStmt&) { f.ctx->disengage(); },
            [&](const DelStmt& x) {
              const PropertyValue target = eval_prop(*x.target, f, "deleted value");
              if (target.is_list()) {
                for (InstanceId id : ids_of(target, "deleted value")) {
                  if (state_.is_live(id)) state_.destroy(id);
                }
              } else {
                state_.destroy(ref_of(Value(target), "deleted value"));
              }
            },
            [&](const ReportStmt& x) {
              const std::string payload = render_report(state_, eval(*x.value, f));
              if (f.ctx) {
                f.ctx->report(payload);
              } else {
                engine_.report(payload);
              }
            },
            [&](const ExprStmt& x) { eval(*x.expr, f); },
        },
        s.node);
  } catch (OspError& err) {
    err.set_pos_if_unset(s.pos);
    throw;
  }
}

void Interpreter::assign(const Expr& target, Value value, Frame& f) {
  try {
    std::visit(Overloaded{
                   [&](const NameExpr& x) {
                     Value* slot = lookup(x.name, f);
                     if (!slot) fail("assignment to undeclared variable '" + x.name + "'");
                     *slot = std::move(value);
                   },
                   [&](const ContextExpr&) {
                     if (auto* p = std::get_if<PathCollection>(&value)) {
                       set_queue(f, PropertyValue(refs(p->elements)));
                     } else {
                       set_queue(f, prop(value, "path"));
                     }
                   },
                   [&](const FieldExpr& x) {
                     Value obj = eval(*x.object, f);
                     PropertyValue& owner = prop(obj, "field owner");
                     if (owner.is_ref()) {
                       state_.set_prop(owner.as_ref(), x.field, prop(value, "field value"));
                     } else if (owner.is_map()) {
                       owner.as_map().set(x.field, prop(value, "map value"));
                       assign(*x.object, std::move(obj), f);
                     } else {
                       fail("cannot set field '" + x.field + "' on " + describe(obj));
                     }
                   },
                   [&](const IndexExpr& x) {
                     Value obj = eval(*x.object, f);
                     PropertyValue& container = prop(obj, "indexed value");
                     const PropertyValue key = eval_prop(*x.index, f, "index");
                     if (container.is_list()) {
                       if (!key.is_int()) fail("list index must be an int");
                       auto& list = container.as_list();
                       if (key.as_int() < 0 || static_cast<size_t>(key.as_int()) >= list.size()) {
                         fail("list index " + std::to_string(key.as_int()) + " out of range");
                       }
                       list[static_cast<size_t>(key.as_int())] = prop(value, "list element");
                     } else if (container.is_map()) {
                       if (!key.is_str()) fail("map key must be a string");
                       container.as_map().set(key.as_str(), prop(value, "map value"));
                     } else {
                       fail("cannot assign an element of " + describe(obj));
                     }
                     assign(*x.object, std::move(obj), f);
                   },
                   [&](const auto&) { fail("expression is not assignable"); },
               },
               target.node);
  } catch (OspError& err) {
    err.set_pos_if_unset(target.pos);
    throw;
  }
}

Value Interpreter::eval(const Expr& e, Frame& f) {
  try {
    return std::visit(
        Overloaded{
            [&](const LiteralExpr& x) -> Value { return x.value; },
            [&](const NameExpr& x) -> Value {
              if (Value* v = lookup(x.name, f)) return *v;
              if (const ArchetypeDef* t = registry_.find(x.name)) return t;
              fail("unknown name '" + x.name + "'");
            },
            [&](const ContextExpr& x) -> Value {
              if (!f.ctx) fail("'" + std::string(context_ref_name(x.ref)) + "' outside an ability body");
              switch (x.ref) {
                case ContextRef::kSelf: return PropertyValue(f.ctx->self());
                case ContextRef::kHere:
                  if (!f.ctx->here()) fail("'here' is only available inside walker abilities");
                  return PropertyValue(*f.ctx->here());
                case ContextRef::kVisitor:
                  if (!f.ctx->visitor()) fail("'visitor' is only available inside node and edge abilities");
                  return PropertyValue(*f.ctx->visitor());
                case ContextRef::kPath: {
                  PropertyList out;
                  for (const auto& q : f.ctx->path()) out.emplace_back(q.target);
                  return PropertyValue(std::move(out));
                }
              }
              fail("bad context reference");
            },
            [&](const ListExpr& x) -> Value {
              PropertyList out;
              for (const auto& item : x.items) out.push_back(eval_prop(*item, f, "list element"));
              return PropertyValue(std::move(out));
            },
            [&](const MapExpr& x) -> Value {
              PropertyMap out;
              for (const auto& [k, v] : x.entries) out.set(k, eval_prop(*v, f, "map value"));
              return PropertyValue(std::move(out));
            },
            [&](const FieldExpr& x) -> Value {
              Value obj = eval(*x.object, f);
              const PropertyValue& owner = prop(obj, "field owner");
              if (owner.is_ref()) return state_.get_prop(owner.as_ref(), x.field);
              if (owner.is_map()) {
                const PropertyValue* v = owner.as_map().find(x.field);
                if (!v) fail("map has no key '" + x.field + "'");
                return *v;
              }
              fail("cannot read field '" + x.field + "' of " + describe(obj));
            },
            [&](const IndexExpr& x) -> Value {
              Value obj = eval(*x.object, f);
              const PropertyValue key = eval_prop(*x.index, f, "index");
              auto position = [&](size_t size) {
                if (!key.is_int()) fail("index must be an int");
                if (key.as_int() < 0 || static_cast<size_t>(key.as_int()) >= size) {
                  fail("index " + std::to_string(key.as_int()) + " out of range for length " + std::to_string(size));
                }
                return static_cast<size_t>(key.as_int());
              };
              if (auto* p = std::get_if<PathCollection>(&obj)) return PropertyValue(p->elements[position(p->elements.size())]);
              const PropertyValue& c = prop(obj, "indexed value");
              if (c.is_list()) return c.as_list()[position(c.as_list().size())];
              if (c.is_str()) return PropertyValue(std::string(1, c.as_str()[position(c.as_str().size())]));
              if (c.is_map()) {
                if (!key.is_str()) fail("map key must be a string");
                const PropertyValue* v = c.as_map().find(key.as_str());
                if (!v) fail("map has no key '" + key.as_str() + "'");
                return *v;
              }
              fail("cannot index " + describe(obj));
            },
            [&](const CallExpr& x) -> Value { return call(x, e, f); },
            [&](const MethodExpr& x) -> Value {
              if (x.method != "append" || x.args.size() != 1) fail("unknown method '" + x.method + "'");
              const PropertyValue item = eval_prop(*x.args[0], f, "appended value");
              if (auto* c = std::get_if<ContextExpr>(&x.object->node); c && c->ref == ContextRef::kPath) {
                if (!f.ctx) fail("'path' outside an ability body");
                const InstanceId id = ref_of(Value(item), "path entry");
                if (!state_.is_node(id) && !state_.is_edge(id)) fail("path entries must be live nodes or edges");
                std::optional<InstanceId> anchor;
                if (auto loc = state_.location(f.ctx->walker()); loc && state_.is_node(*loc)) anchor = *loc;
                f.ctx->path().push_back(QueueEntry{id, anchor});
                return PropertyValue();
              }
              Value obj = eval(*x.object, f);
              PropertyValue list = prop(obj, "append target");
              if (!list.is_list()) fail("'append' needs a list, got " + describe(obj));
              list.as_list().push_back(item);
              assign(*x.object, std::move(list), f);
              return PropertyValue();
            },
            [&](const UnaryExpr& x) -> Value {
              const PropertyValue v = eval_prop(*x.operand, f, "operand");
              if (x.op == "!") {
                if (!v.is_bool()) fail("operator '!' needs a bool");
                return PropertyValue(!v.as_bool());
              }
              if (v.is_int()) return PropertyValue(-v.as_int());
              if (v.is_float()) return PropertyValue(-v.as_float());
              fail("operator '-' needs a number");
            },
            [&](const BinaryExpr& x) -> Value {
              if (x.op == "&&" || x.op == "||") {
                const bool lhs = truthy(eval(*x.lhs, f), "logical operand");
                if (x.op == "&&" && !lhs) return PropertyValue(false);
                if (x.op == "||" && lhs) return PropertyValue(true);
                return PropertyValue(truthy(eval(*x.rhs, f), "logical operand"));
              }
              Value lhs = eval(*x.lhs, f);
              Value rhs = eval(*x.rhs, f);
              if (x.op == "==") return PropertyValue(values_equal(lhs, rhs));
              if (x.op == "!=") return PropertyValue(!values_equal(lhs, rhs));
              const PropertyValue& a = prop(lhs, "operand");
              const PropertyValue& b = prop(rhs, "operand");
              if (x.op == "<" || x.op == "<=" || x.op == ">" || x.op == ">=") return PropertyValue(compare(x.op, a, b));
              return arith(x.op, a, b);
            },
            [&](const ConnectExpr& x) -> Value {
              const InstanceId src = ref_of(eval(*x.src, f), "edge source");
              const InstanceId dst = ref_of(eval(*x.dst, f), "edge destination");
              const ArchetypeDef& arch = registry_.get(x.edge_type);
              return PropertyValue(state_.create_edge(arch, src, dst, inits(x.fields, f)));
            },
        },
        e.node);
  } catch (OspError& err) {
    err.set_pos_if_unset(e.pos);
    throw;
  }
}

Value Interpreter::call(const CallExpr& c, const Expr&, Frame& f) {
  if (!lookup(c.callee, f)) {
    if (const ArchetypeDef* arch = registry_.find(c.callee)) {
      if (arch->kind() == ArchetypeKind::kEdge) fail("edge archetype '" + arch->name() + "' is instantiated with connect");
      if (!c.args.empty()) fail("archetype instantiation takes only named field values");
      return PropertyValue(state_.create(*arch, inits(c.named, f)));
    }
  }
  const BuiltinSignature* sig = find_builtin(c.callee);
  if (!sig) fail("unknown function '" + c.callee + "'");
  const int n = static_cast<int>(c.args.size());
  if (n < sig->min_args || n > sig->max_args || !c.named.empty()) fail("bad arguments to '" + c.callee + "'");
  std::vector<Value> args;
  for (const auto& a : c.args) args.push_back(eval(*a, f));
  return builtin(c.callee, args, f);
}

Value Interpreter::builtin(const std::string& name, std::vector<Value>& args, Frame&) {
  auto node_arg = [&](size_t i) {
    const InstanceId id = ref_of(args[i], "node argument");
    if (!state_.is_node(id)) fail("'" + name + "' needs a live node, got #" + to_string(id));
    return id;
  };
  auto edge_arg = [&](size_t i) {
    const InstanceId id = ref_of(args[i], "edge argument");
    if (!state_.is_edge(id)) fail("'" + name + "' needs a live edge, got #" + to_string(id));
    return id;
  };
  auto opt_type = [&](size_t i) -> const ArchetypeDef* {
    return i < args.size() ? type_of(args[i], "type filter", true) : nullptr;
  };
  auto as_path = [&](const Value& v) -> const PathCollection* { return std::get_if<PathCollection>(&v); };
  auto element_filter = [&](const ArchetypeDef* t) {
    return [t](const SystemState& s, InstanceId id) { return s.archetype_of(id).is_a(*t); };
  };

  if (name == "len") {
    if (auto* p = as_path(args[0])) return PropertyValue(static_cast<int64_t>(p->elements.size()));
    const PropertyValue& v = prop(args[0], "len argument");
    if (v.is_list()) return PropertyValue(static_cast<int64_t>(v.as_list().size()));
    if (v.is_str()) return PropertyValue(static_cast<int64_t>(v.as_str().size()));
    if (v.is_map()) return PropertyValue(static_cast<int64_t>(v.as_map().size()));
    fail("len of " + describe(args[0]));
  }
  if (name == "str") return PropertyValue(plain_text(args[0]));
  if (name == "int") {
    const PropertyValue& v = prop(args[0], "int argument");
    if (v.is_int()) return v;
    if (v.is_float()) return PropertyValue(static_cast<int64_t>(v.as_float()));
    if (v.is_bool()) return PropertyValue(int64_t{v.as_bool() ? 1 : 0});
    fail("cannot convert " + describe(args[0]) + " to int");
  }
  if (name == "float") {
    const PropertyValue& v = prop(args[0], "float argument");
    if (v.is_number()) return PropertyValue(v.as_number());
    fail("cannot convert " + describe(args[0]) + " to float");
  }
  if (name == "search_tweets") {
    const PropertyValue& a = prop(args[0], "search text");
    const PropertyValue& b = prop(args[1], "search text");
    if (!a.is_str() || !b.is_str()) fail("search_tweets needs two strings");
    return PropertyValue(lcs_similarity(a.as_str(), b.as_str()));
  }
  if (name == "is") {
    const PropertyValue& v = prop(args[0], "is argument");
    const ArchetypeDef* t = type_of(args[1], "is type", false);
    if (!v.is_ref() || !state_.is_live(v.as_ref())) return PropertyValue(false);
    return PropertyValue(state_.archetype_of(v.as_ref()).is_a(*t));
  }
  if (name == "archetype") {
    const InstanceId id = ref_of(args[0], "archetype argument");
    return PropertyValue(state_.archetype_of(id).name());
  }
  if (name == "id") return PropertyValue(static_cast<int64_t>(ref_of(args[0], "id argument").value));
  if (name == "out" || name == "in" || name == "any") {
    const InstanceId n = node_arg(0);
    const Direction d = *parse_direction(name);
    const ArchetypeDef* node_type = opt_type(1);
    const ArchetypeDef* edge_type = opt_type(2);
    std::vector<InstanceId> out;
    std::set<InstanceId> seen;
    for (InstanceId e : state_.edges_at(n, d, edge_type)) {
      const InstanceId m = state_.next_node(e, n);
      if (node_type && !state_.archetype_of(m).is_a(*node_type)) continue;
      if (seen.insert(m).second) out.push_back(m);
    }
    return PropertyValue(refs(out));
  }
  if (name == "out_edges" || name == "in_edges" || name == "any_edges") {
    const InstanceId n = node_arg(0);
    const Direction d = *parse_direction(name.substr(0, name.find('_')));
    return PropertyValue(refs(state_.edges_at(n, d, opt_type(1))));
  }
  if (name == "edges_between") {
    const InstanceId a = node_arg(0);
    const InstanceId b = node_arg(1);
    std::vector<InstanceId> out;
    for (InstanceId e : state_.edges_at(a, Direction::kAny, opt_type(2))) {
      if (state_.next_node(e, a) == b) out.push_back(e);
    }
    return PropertyValue(refs(out));
  }
  if (name == "src") return PropertyValue(state_.endpoints(edge_arg(0)).src);
  if (name == "dst") return PropertyValue(state_.endpoints(edge_arg(0)).dst);
  if (name == "pathq") {
    const InstanceId origin = node_arg(0);
    const ArchetypeDef* node_type = type_of(args[1], "pathq node type", true);
    const bool include_edges = truthy(args[2], "pathq include_edges");
    const PropertyValue& dir = prop(args[3], "pathq direction");
    if (!dir.is_str() || !parse_direction(dir.as_str())) fail("pathq direction must be \"out\", \"in\" or \"any\"");
    const ArchetypeDef* edge_type = opt_type(4);
    auto pred = [node_type, edge_type](const SystemState& s, InstanceId id) {
      const ArchetypeDef* t = s.is_edge(id) ? edge_type : node_type;
      return t == nullptr || s.archetype_of(id).is_a(*t);
    };
    return path_query(state_, origin, pred, include_edges, *parse_direction(dir.as_str()));
  }
  if (name == "path_of") {
    const InstanceId origin = node_arg(0);
    return make_path(state_, origin, ids_of(prop(args[1], "path elements"), "path elements"));
  }
  if (name == "concat") {
    if (auto* p = as_path(args[0])) {
      auto* q = as_path(args[1]);
      if (!q) fail("concat of a path needs a second path");
      return path_concat(state_, *p, *q);
    }
    return arith("+", prop(args[0], "concat operand"), prop(args[1], "concat operand"));
  }
  if (name == "slice") {
    const int64_t i = int_of(args[1], "slice start");
    const int64_t j = int_of(args[2], "slice end");
    if (i < 0 || j < 0) fail("slice bounds must be non-negative");
    if (auto* p = as_path(args[0])) return path_slice(state_, *p, static_cast<size_t>(i), static_cast<size_t>(j));
    const PropertyValue& v = prop(args[0], "slice operand");
    if (!v.is_list()) fail("slice needs a path or a list");
    const auto& list = v.as_list();
    const size_t end = std::min(static_cast<size_t>(j), list.size());
    const size_t begin = std::min(static_cast<size_t>(i), end);
    return PropertyValue(PropertyList(list.begin() + static_cast<std::ptrdiff_t>(begin),
                                      list.begin() + static_cast<std::ptrdiff_t>(end)));
  }
  if (name == "filter") {
    const ArchetypeDef* t = type_of(args[1], "filter type", false);
    if (auto* p = as_path(args[0])) return path_filter(state_, *p, element_filter(t));
    PropertyList out;
    for (InstanceId id : ids_of(prop(args[0], "filter operand"), "filter operand")) {
      if (state_.is_live(id) && state_.archetype_of(id).is_a(*t)) out.emplace_back(id);
    }
    return PropertyValue(std::move(out));
  }
  if (name == "elements") {
    auto* p = as_path(args[0]);
    if (!p) fail("elements needs a path");
    return PropertyValue(refs(p->elements));
  }
  if (name == "origin") {
    auto* p = as_path(args[0]);
    if (!p) fail("origin needs a path");
    return PropertyValue(p->origin);
  }
  if (name == "location_of") {
    const InstanceId w = ref_of(args[0], "walker argument");
    if (!state_.is_walker(w)) fail("location_of needs a walker");
    auto loc = state_.location(w);
    return loc ? PropertyValue(*loc) : PropertyValue();
  }
  if (name == "is_active") {
    const InstanceId w = ref_of(args[0], "walker argument");
    if (!state_.is_walker(w)) fail("is_active needs a walker");
    return PropertyValue(state_.is_active(w));
  }
  if (name == "queue_of") {
    const InstanceId w = ref_of(args[0], "walker argument");
    if (!state_.is_walker(w)) fail("queue_of needs a walker");
    PropertyList out;
    for (const auto& q : state_.queue(w)) out.emplace_back(q.target);
    return PropertyValue(std::move(out));
  }
  if (name == "range") {
    int64_t lo = 0, hi = int_of(args[0], "range bound");
    if (args.size() == 2) {
      lo = hi;
      hi = int_of(args[1], "range bound");
    }
    if (hi - lo > 1000000) fail("range too large");
    PropertyList out;
    for (int64_t i = lo; i < hi; ++i) out.emplace_back(i);
    return PropertyValue(std::move(out));
  }
  if (name == "keys") {
    const PropertyValue& m = prop(args[0], "keys argument");
    if (!m.is_map()) fail("keys needs a map");
    PropertyList out;
    for (const auto& k : m.as_map().keys()) out.emplace_back(k);
    return PropertyValue(std::move(out));
  }
  if (name == "contains") {
    if (auto* p = as_path(args[0])) {
      const InstanceId id = ref_of(args[1], "contains item");
      return PropertyValue(std::find(p->elements.begin(), p->elements.end(), id) != p->elements.end());
    }
    const PropertyValue& c = prop(args[0], "contains container");
    if (c.is_list()) {
      for (const auto& v : c.as_list()) {
        if (values_equal(Value(v), args[1])) return PropertyValue(true);
      }
      return PropertyValue(false);
    }
    const PropertyValue& key = prop(args[1], "contains item");
    if (c.is_map() && key.is_str()) return PropertyValue(c.as_map().find(key.as_str()) != nullptr);
    if (c.is_str() && key.is_str()) return PropertyValue(c.as_str().find(key.as_str()) != std::string::npos);
    fail("contains needs a list, map, string or path");
  }
  fail("unknown function '" + name + "'");
}

}  // namespace osp::dsl
