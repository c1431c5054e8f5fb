#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "osp/dsl/ast.h"
#include "osp/dsl/diagnostic.h"
#include "osp/engine.h"

namespace osp::dsl {

using Value = std::variant<PropertyValue, PathCollection, const ArchetypeDef*>;

// Report payload form: instance refs expand to `Arch#id{k=v,...}`, at any
// depth of lists and maps; refs inside expanded props stay `#id`.
std::string render_report(const SystemState& state, const Value& value);

// Lowers a checked program onto the engine. The program must outlive the
// interpreter; ability bodies refer back into its AST.
class Interpreter {
 public:
  explicit Interpreter(const Program& program, uint64_t budget = Engine::kDefaultBudget);

  // Registers archetypes, fields and abilities. Called by run() if needed.
  void load();
  // Executes the driver statements top to bottom.
  void run();

  ArchetypeRegistry& registry() { return registry_; }
  SystemState& state() { return state_; }
  Engine& engine() { return engine_; }

 private:
  struct Frame {
    ExecutionContext* ctx = nullptr;
    std::vector<std::map<std::string, Value>> scopes;
  };

  void define_archetypes();
  void exec_block(const Block& block, Frame& f);
  void exec(const Stmt& s, Frame& f);
  Value eval(const Expr& e, Frame& f);
  PropertyValue eval_prop(const Expr& e, Frame& f, const char* what);
  Value call(const CallExpr& c, const Expr& e, Frame& f);
  Value builtin(const std::string& name, std::vector<Value>& args, Frame& f);
  void assign(const Expr& target, Value value, Frame& f);
  Value* lookup(const std::string& name, Frame& f);
  SystemState::FieldInits inits(const std::vector<NamedArg>& named, Frame& f);
  void set_queue(Frame& f, const PropertyValue& targets);

  const Program& program_;
  ArchetypeRegistry registry_;
  SystemState state_;
  Engine engine_;
  bool loaded_ = false;
};

}  // namespace osp::dsl
