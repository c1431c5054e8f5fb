// osp: run, dump or check an .osp program.
//
// Exit codes: 0 ok, 1 diagnostics, 2 runtime or I/O error (including a
// golden mismatch and bad usage), 3 step budget exhausted.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "osp/dsl/checker.h"
#include "osp/dsl/interpreter.h"
#include "osp/dsl/parser.h"

namespace {

enum Exit { kOk = 0, kDiagnostics = 1, kRuntime = 2, kBudget = 3 };

enum class Verbosity { kQuiet, kEvents, kFull };

struct RunConfig {
  std::string input;
  Verbosity trace = Verbosity::kEvents;
  uint64_t budget = osp::Engine::kDefaultBudget;
  bool dump = false;
  std::string golden;
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

std::string position(const std::string& file, const osp::OspError& err) {
  if (!err.pos()) return file;
  return file + ":" + std::to_string(err.pos()->line) + ":" + std::to_string(err.pos()->column);
}

// Loads and statically checks the program; prints diagnostics.
int front_end(const RunConfig& cfg, osp::dsl::Program& program) {
  std::string source;
  if (!read_file(cfg.input, source)) {
    std::cerr << "osp: cannot read '" << cfg.input << "'\n";
    return kRuntime;
  }
  try {
    program = osp::dsl::parse_source(source);
  } catch (const osp::dsl::DiagnosticError& err) {
    std::cerr << osp::dsl::format_diagnostic(err.diagnostic(), cfg.input) << "\n";
    return kDiagnostics;
  }
  const auto diags = osp::dsl::check(program);
  for (const auto& d : diags) std::cerr << osp::dsl::format_diagnostic(d, cfg.input) << "\n";
  return diags.empty() ? kOk : kDiagnostics;
}

int execute(const RunConfig& cfg, bool trace_output, bool snapshot) {
  osp::dsl::Program program;
  if (int rc = front_end(cfg, program); rc != kOk) return rc;

  std::string out;
  osp::dsl::Interpreter interp(program, cfg.budget);
  if (trace_output) {
    interp.engine().set_sink([&](const osp::TraceEvent& ev) {
      if (cfg.trace == Verbosity::kQuiet) {
        if (ev.kind == osp::TraceKind::kReport) out += ev.detail + "\n";
      } else if (cfg.trace == Verbosity::kFull || ev.kind != osp::TraceKind::kAbility) {
        out += osp::format_event(ev) + "\n";
      }
    });
  }

  int rc = kOk;
  try {
    interp.run();
  } catch (const osp::BudgetExceeded& err) {
    std::cerr << position(cfg.input, err) << ": budget exceeded: " << err.message() << "\n";
    rc = kBudget;
  } catch (const osp::OspError& err) {
    std::cerr << position(cfg.input, err) << ": runtime error: " << err.message() << "\n";
    rc = kRuntime;
  }
  if (snapshot && rc == kOk) out += interp.state().snapshot();
  std::cout << out << std::flush;
  if (rc != kOk || cfg.golden.empty()) return rc;

  std::string expected;
  if (!read_file(cfg.golden, expected)) {
    std::cerr << "osp: cannot read golden '" << cfg.golden << "'\n";
    return kRuntime;
  }
  if (expected != out) {
    std::cerr << "osp: output differs from golden '" << cfg.golden << "'\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-spatial program runner"};
  app.require_subcommand(1);
  RunConfig cfg;

  const std::map<std::string, Verbosity> levels{
      {"quiet", Verbosity::kQuiet}, {"events", Verbosity::kEvents}, {"full", Verbosity::kFull}};

  auto* run = app.add_subcommand("run", "Execute a program and print its trace");
  auto* dump = app.add_subcommand("dump", "Execute a program and print the final graph snapshot");
  auto* check = app.add_subcommand("check", "Parse and statically check a program");
  for (auto* cmd : {run, dump, check}) cmd->add_option("file", cfg.input, "Program source (.osp)")->required();
  for (auto* cmd : {run, dump}) {
    cmd->add_option("--budget", cfg.budget, "Maximum walker arrivals")->check(CLI::PositiveNumber);
    cmd->add_option("--golden", cfg.golden, "Compare output with this file");
  }
  run->add_option("--trace", cfg.trace, "quiet, events or full")->transform(CLI::CheckedTransformer(levels));
  run->add_flag("--dump", cfg.dump, "Append the final snapshot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kRuntime;
  }

  if (check->parsed()) {
    osp::dsl::Program program;
    return front_end(cfg, program);
  }
  if (dump->parsed()) return execute(cfg, false, true);
  return execute(cfg, true, cfg.dump);
}
