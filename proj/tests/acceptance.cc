// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "generators.h"
#include "osp/dsl/printer.h"
#include "path_oracle.h"
#include "support.h"

using namespace osp;
using osp::test::World;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

// 1. Ability ordering over random programs.
Outcome execution_order() {
  constexpr int kPrograms = 250;
  constexpr double kLimit = 10.0;
  const auto t0 = Clock::now();
  std::mt19937 rng(20240601);
  size_t violations = 0;
  size_t events = 0;
  int errors = 0;
  std::string first;
  for (int i = 0; i < kPrograms; ++i) {
    const auto g = test::random_program(rng);
    const auto r = test::audit_program(g);
    if (r.outcome == 1 || r.outcome == 3) {
      ++violations;
      if (first.empty()) first = "program " + std::to_string(i) + " did not run: " + r.error;
    }
    if (r.outcome == 2) ++errors;
    violations += r.violations.size();
    if (first.empty() && !r.violations.empty()) first = r.violations.front();
    events += r.events;
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = violations == 0 && dt < kLimit;
  o.detail = std::to_string(kPrograms) + " programs, " + std::to_string(events) + " events, " +
             std::to_string(errors) + " ended in runtime errors, " + std::to_string(violations) + " violations, " +
             fmt_seconds(dt) + " (limit 10s)";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// 2. Validator against the brute-force rules.
Outcome path_oracle() {
  constexpr double kLimit = 5.0;
  const auto t0 = Clock::now();
  World w;
  const InstanceId a = w.add_node();
  const InstanceId b = w.add_node();
  const InstanceId c = w.add_node();
  const InstanceId d = w.add_node();
  w.add_edge(a, b);
  w.add_edge(b, c);
  w.add_edge(c, a);
  w.add_edge(c, d);
  w.add_edge(d, d);
  test::OracleGraph g;
  for (InstanceId n : w.state.nodes()) g.nodes.push_back(n.value);
  for (InstanceId e : w.state.edges()) {
    const auto& ends = w.state.endpoints(e);
    g.edges.push_back({e.value, ends.src.value, ends.dst.value});
  }
  size_t cases = 0;
  size_t disagreements = 0;
  std::map<int, size_t> verdicts;
  for (uint64_t origin : g.nodes) {
    test::for_each_sequence(g.elements(), 4, [&](const std::vector<uint64_t>& seq) {
      std::vector<InstanceId> ids;
      for (uint64_t x : seq) ids.push_back(InstanceId{x});
      const auto got = validate_path(w.state, InstanceId{origin}, ids);
      const auto want = test::oracle_validate(g, origin, seq);
      ++cases;
      ++verdicts[want ? want->constraint : 0];
      const bool same = got.has_value() == want.has_value() &&
                        (!got || (static_cast<int>(got->constraint) == want->constraint && got->index == want->index));
      if (!same) ++disagreements;
    });
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = disagreements == 0 && cases == 4 * 7381 && dt < kLimit;
  o.detail = std::to_string(cases) + " sequences (" + std::to_string(verdicts[0]) + " valid, rule 1/2/3/4 failures " +
             std::to_string(verdicts[1]) + "/" + std::to_string(verdicts[2]) + "/" + std::to_string(verdicts[3]) +
             "/" + std::to_string(verdicts[4]) + "), " + std::to_string(disagreements) + " disagreements, " +
             fmt_seconds(dt) + " (limit 5s)";
  return o;
}

// 3. Cascade deletion against the incidence complement.
Outcome cascade() {
  constexpr double kLimit = 2.0;
  const auto t0 = Clock::now();
  std::mt19937 rng(4242);
  int failures = 0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    const std::string broken = test::cascade_round(rng);
    if (!broken.empty()) {
      ++failures;
      if (first.empty()) first = "graph " + std::to_string(i) + ": " + broken;
    }
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && dt < kLimit;
  o.detail = "100 graphs, " + std::to_string(failures) + " mismatches, " + fmt_seconds(dt) + " (limit 2s)";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// 4. Every edge crossed from each endpoint lands on the other one, with the
// entry node fixed for the whole stay.
Outcome edge_mechanics() {
  std::mt19937 rng(777);
  size_t crossings = 0;
  size_t violations = 0;
  std::string first;
  auto flag = [&](const std::string& why) {
    ++violations;
    if (first.empty()) first = why;
  };

  for (int fixture = 0; fixture < 40; ++fixture) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const int m = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<std::pair<int, int>> shape;
    for (int i = 0; i < m; ++i) {
      shape.emplace_back(std::uniform_int_distribution<int>(0, n - 1)(rng),
                         std::uniform_int_distribution<int>(0, n - 1)(rng));
    }
    for (int k = 0; k < m; ++k) {
      for (int side = 0; side < 2; ++side) {
        World w;
        std::vector<InstanceId> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back(w.add_node());
        std::vector<InstanceId> edges;
        for (const auto& [s, t] : shape) edges.push_back(w.add_edge(nodes[s], nodes[t]));
        const InstanceId e = edges[k];
        const InstanceId start = side == 0 ? w.state.endpoints(e).src : w.state.endpoints(e).dst;
        const InstanceId far = side == 0 ? w.state.endpoints(e).dst : w.state.endpoints(e).src;
        const InstanceId walker = w.add_walker();

        w.on(w.walker, w.node, Phase::kEntry, "go", [&](ExecutionContext& ctx) {
          if (ctx.state().get_prop(walker, "count").as_int() == 0) {
            ctx.state().set_prop(walker, "count", PropertyValue(1));
            ctx.visit(VisitEdge{e});
          }
        });
        auto watch = [&](ExecutionContext& ctx) {
          if (ctx.state().source(walker, ctx.location()) != start) flag("entry node changed while on the edge");
        };
        w.on(w.walker, w.edge, Phase::kEntry, "watch_in", watch);
        w.on(w.walker, w.edge, Phase::kExit, "watch_out", watch);
        w.on(w.edge, w.walker, Phase::kEntry, "edge_in", watch);
        w.on(w.edge, w.walker, Phase::kExit, "edge_out", watch);

        w.engine.spawn(walker, SpawnAtNode{start});
        ++crossings;

        std::vector<InstanceId> arrivals;
        for (const auto& ev : w.engine.events()) {
          if (ev.kind == TraceKind::kArrive) arrivals.push_back(*ev.location);
        }
        if (arrivals != std::vector<InstanceId>{start, e, far}) flag("unexpected arrival sequence: " + w.trace());
        for (size_t i = 1; i < arrivals.size(); ++i) {
          if (w.state.is_edge(arrivals[i]) && w.state.is_edge(arrivals[i - 1])) flag("consecutive edge locations");
        }
        if (w.state.location(walker) != far) flag("walker did not end on the far endpoint");
      }
    }
  }

  // Random programs: every edge stay leaves by the far side of its entry.
  std::mt19937 prog_rng(31337);
  for (int i = 0; i < 100; ++i) {
    const auto g = test::random_program(prog_rng);
    const auto r = test::audit_program(g);
    for (const auto& v : r.violations) flag(v);
  }

  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(crossings) + " fixture crossings plus 100 random programs, " + std::to_string(violations) +
             " violations";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// 5. Skip and disengage on hand-built fixtures with exact traces, plus the
// corpus golden.
Outcome skip_disengage() {
  std::vector<std::string> failures;

  {
    // Skip during entry at a: no depart and no exit abilities at a.
    World w;
    const InstanceId a = w.add_node("a");
    const InstanceId b = w.add_node("b");
    w.add_edge(a, b);
    const InstanceId walker = w.add_walker();
    w.on(w.walker, w.node, Phase::kEntry, "hop", [&](ExecutionContext& ctx) {
      if (ctx.location() == a) {
        ctx.visit(VisitNode{b});
        ctx.skip();
      }
    });
    w.on(w.walker, w.node, Phase::kExit, "leave", [](ExecutionContext&) {});
    w.on(w.node, w.walker, Phase::kExit, "farewell", [](ExecutionContext&) {});
    w.engine.spawn(walker, SpawnAtNode{a});
    const std::string want =
        "1 spawn w=4 loc=1 W\n"
        "2 arrive w=4 loc=1 N\n"
        "3 ability w=4 loc=1 W.hop/entry\n"
        "4 skip w=4 loc=1\n"
        "5 move w=4 loc=2 from=1\n"
        "6 arrive w=4 loc=2 N\n"
        "7 ability w=4 loc=2 W.hop/entry\n"
        "8 exhaust w=4 loc=2\n";
    if (w.trace() != want) failures.push_back("node skip trace:\n" + w.trace());
  }

  {
    // Skip while on an edge: exits suppressed there, walker still lands.
    World w;
    const InstanceId a = w.add_node("a");
    const InstanceId b = w.add_node("b");
    const InstanceId e = w.add_edge(a, b);
    const InstanceId walker = w.add_walker();
    w.on(w.edge, w.walker, Phase::kEntry, "toll", [](ExecutionContext& ctx) { ctx.skip(); });
    w.on(w.edge, w.walker, Phase::kExit, "gate", [](ExecutionContext&) {});
    w.on(w.walker, w.edge, Phase::kExit, "wave", [](ExecutionContext&) {});
    w.engine.spawn(walker, SpawnOnEdge{e});
    const std::string want =
        "1 spawn w=4 loc=3 W\n"
        "2 arrive w=4 loc=3 E\n"
        "3 ability w=4 loc=3 E.toll/entry\n"
        "4 skip w=4 loc=3\n"
        "5 move w=4 loc=2 from=3\n"
        "6 arrive w=4 loc=2 N\n"
        "7 exhaust w=4 loc=2\n";
    if (w.trace() != want) failures.push_back("edge skip trace:\n" + w.trace());
    if (w.state.location(walker) != b) failures.push_back("edge skip did not land on the far node");
  }

  {
    // Disengage with a pending queue: queue cleared, inactive, props kept.
    World w;
    const InstanceId a = w.add_node("a");
    const InstanceId b = w.add_node("b");
    const InstanceId c = w.add_node("c");
    w.add_edge(a, b);
    w.add_edge(a, c);
    const InstanceId walker = w.add_walker();
    w.state.set_prop(walker, "count", PropertyValue(7));
    w.on(w.walker, w.node, Phase::kEntry, "stop", [&](ExecutionContext& ctx) {
      ctx.visit(VisitNode{b});
      ctx.visit(VisitNode{c});
      ctx.disengage();
    });
    w.on(w.walker, w.node, Phase::kExit, "leave", [](ExecutionContext&) {});
    w.engine.spawn(walker, SpawnAtNode{a});
    const std::string want =
        "1 spawn w=6 loc=1 W\n"
        "2 arrive w=6 loc=1 N\n"
        "3 ability w=6 loc=1 W.stop/entry\n"
        "4 disengage w=6 loc=1\n";
    if (w.trace() != want) failures.push_back("disengage trace:\n" + w.trace());
    if (!w.state.queue(walker).empty()) failures.push_back("disengage left a queue");
    if (w.state.is_active(walker)) failures.push_back("disengage left the walker active");
    if (w.state.get_prop(walker, "count") != PropertyValue(7)) failures.push_back("disengage changed props");
  }

  const auto run = test::run_program(test::read_text(test::corpus_path("skip_disengage.osp")));
  if (run.outcome != 0) failures.push_back("corpus run failed: " + run.error);
  if (run.trace != test::read_text(test::golden_path("skip_disengage.trace"))) {
    failures.push_back("corpus trace differs from golden");
  }
  if (run.snapshot != test::read_text(test::golden_path("skip_disengage.dump"))) {
    failures.push_back("corpus snapshot differs from golden");
  }

  Outcome o;
  o.pass = failures.empty();
  o.detail = "3 fixtures plus corpus golden, " + std::to_string(failures.size()) + " failures";
  if (!failures.empty()) o.detail += "; first: " + failures.front();
  return o;
}

// Source up to (not including) the first line starting with `marker`.
std::string prefix_before(const std::string& src, const std::string& marker) {
  const auto at = src.find("\n" + marker);
  return at == std::string::npos ? src : src.substr(0, at + 1);
}

// Expected feed: the user's own tweets, then each followed user's tweets,
// following edge creation order. Computed directly from graph state.
std::vector<uint64_t> expected_feed(const SystemState& s, const std::string& username) {
  std::optional<InstanceId> user;
  for (InstanceId n : s.nodes()) {
    if (s.archetype_of(n).name() == "Profile" && s.get_prop(n, "username") == PropertyValue(username)) user = n;
  }
  if (!user) return {};
  auto targets = [&](InstanceId from, const std::string& edge_type) {
    std::vector<InstanceId> out;
    for (InstanceId e : s.edges()) {
      const auto& ends = s.endpoints(e);
      if (s.archetype_of(e).name() == edge_type && ends.src == from) out.push_back(ends.dst);
    }
    return out;
  };
  std::vector<uint64_t> feed;
  auto add_tweets = [&](InstanceId profile) {
    for (InstanceId t : targets(profile, "Post")) {
      if (s.archetype_of(t).name() == "Tweet") feed.push_back(t.value);
    }
  };
  add_tweets(*user);
  for (InstanceId followed : targets(*user, "Follow")) add_tweets(followed);
  return feed;
}

std::vector<uint64_t> reported_feed(const std::string& report) {
  static const std::regex tweet_id(R"(TweetInfo#\d+\{username="[^"]*",id=(\d+))");
  std::vector<uint64_t> ids;
  for (std::sregex_iterator it(report.begin(), report.end(), tweet_id), end; it != end; ++it) {
    ids.push_back(std::stoull((*it)[1]));
  }
  return ids;
}

std::string join(const std::vector<uint64_t>& xs) {
  std::string out;
  for (uint64_t x : xs) out += (out.empty() ? "" : ",") + std::to_string(x);
  return "[" + out + "]";
}

// 6. Social network end to end.
Outcome social() {
  constexpr double kLimit = 1.0;
  std::vector<std::string> failures;
  const std::string src = test::read_text(test::corpus_path("social.osp"));

  const auto t0 = Clock::now();
  const auto run = test::run_program(src);
  const double dt = seconds_since(t0);
  if (run.outcome != 0) failures.push_back("run failed: " + run.error);
  if (run.trace != test::read_text(test::golden_path("social.trace"))) failures.push_back("trace differs from golden");
  if (run.snapshot != test::read_text(test::golden_path("social.dump"))) {
    failures.push_back("snapshot differs from golden");
  }

  std::vector<std::vector<uint64_t>> feeds;
  for (const auto& r : run.reports) {
    if (r.find("TweetInfo#") != std::string::npos) feeds.push_back(reported_feed(r));
  }

  auto state_after = [&](const std::string& marker) {
    dsl::Program program = dsl::parse_source(prefix_before(src, marker));
    auto interp = std::make_unique<dsl::Interpreter>(program, Engine::kDefaultBudget);
    interp->run();
    return expected_feed(interp->state(), "alice");
  };
  std::vector<uint64_t> before;
  std::vector<uint64_t> after;
  try {
    before = state_after("let feed =");
    after = state_after("let smaller =");
  } catch (const OspError& e) {
    failures.push_back(std::string("prefix run failed: ") + e.what());
  }

  if (feeds.size() != 2) {
    failures.push_back("expected two feed reports, saw " + std::to_string(feeds.size()));
  } else {
    if (feeds[0] != before) failures.push_back("first feed " + join(feeds[0]) + " != expected " + join(before));
    if (feeds[1] != after) failures.push_back("second feed " + join(feeds[1]) + " != expected " + join(after));
    if (!(after.size() < before.size())) failures.push_back("unfollow did not shrink the feed");
  }
  if (dt >= kLimit) failures.push_back("run took " + fmt_seconds(dt));

  Outcome o;
  o.pass = failures.empty();
  o.detail = "feeds " + (feeds.size() == 2 ? join(feeds[0]) + " then " + join(feeds[1]) : std::string("?")) + ", " +
             fmt_seconds(dt) + " (limit 1s)";
  if (!failures.empty()) o.detail += "; first: " + failures.front();
  return o;
}

// 7. Walker-driven automaton against a direct simulation. Transitions
// mirror the corpus: q0-a->q1, q0-b->q0, q1-b->q2, q2-a->q1, q2-b->q2;
// q1 has no a-transition; only q2 accepts.
bool dfa_accepts(const std::string& word) {
  int q = 0;
  for (char ch : word) {
    if (q == 0) {
      q = ch == 'a' ? 1 : 0;
    } else if (q == 1) {
      if (ch == 'a') return false;
      q = 2;
    } else {
      q = ch == 'a' ? 1 : 2;
    }
  }
  return q == 2;
}

Outcome fsm() {
  const auto run = test::run_program(test::read_text(test::corpus_path("fsm.osp")));
  std::vector<std::string> failures;
  if (run.outcome != 0) failures.push_back("run failed: " + run.error);
  static const std::regex row(R"re(^\["([ab]*)",(true|false)\]$)re");
  std::set<std::string> seen;
  size_t length_five = 0;
  size_t agree = 0;
  for (const auto& r : run.reports) {
    std::smatch m;
    if (!std::regex_match(r, m, row)) {
      failures.push_back("unexpected report " + r);
      continue;
    }
    const std::string word = m[1];
    seen.insert(word);
    if (word.size() == 5) ++length_five;
    if ((m[2] == "true") == dfa_accepts(word)) {
      ++agree;
    } else {
      failures.push_back("disagreement on \"" + word + "\"");
    }
  }
  size_t expected_words = 0;
  for (int len = 0; len <= 5; ++len) expected_words += size_t{1} << len;
  if (seen.size() != expected_words) failures.push_back("covered " + std::to_string(seen.size()) + " words");
  if (length_five != 32) failures.push_back("covered " + std::to_string(length_five) + " length-5 words");

  Outcome o;
  o.pass = failures.empty();
  o.detail = std::to_string(agree) + "/" + std::to_string(run.reports.size()) + " words agree (" +
             std::to_string(length_five) + " of length 5)";
  if (!failures.empty()) o.detail += "; first: " + failures.front();
  return o;
}

// 8. Every corpus program twice.
Outcome determinism() {
  std::vector<std::string> failures;
  for (const auto& file : test::corpus_files()) {
    const std::string src = test::read_text(test::corpus_path(file));
    const uint64_t budget = file == "cycle.osp" ? 100 : Engine::kDefaultBudget;
    const auto a = test::run_program(src, budget);
    const auto b = test::run_program(src, budget);
    if (a.trace != b.trace || a.snapshot != b.snapshot || a.outcome != b.outcome) failures.push_back(file);
    if (a.trace.empty()) failures.push_back(file + " produced no trace");
  }
  Outcome o;
  o.pass = failures.empty();
  o.detail = std::to_string(test::corpus_files().size()) + " programs, " + std::to_string(failures.size()) +
             " differ";
  if (!failures.empty()) o.detail += "; first: " + failures.front();
  return o;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  lines.push_back(cur);
  return lines;
}

// 9. Printer round trip and diagnostic positions on mutated corpus text.
Outcome round_trip() {
  std::vector<std::string> failures;
  for (const auto& file : test::corpus_files()) {
    const std::string src = test::read_text(test::corpus_path(file));
    try {
      const dsl::Program first = dsl::parse_source(src);
      const std::string printed = dsl::print_program(first);
      const dsl::Program second = dsl::parse_source(printed);
      if (dsl::print_program(second) != printed) failures.push_back(file + " does not round-trip");
      if (!dsl::check(second).empty()) failures.push_back(file + " reprint has diagnostics");
    } catch (const OspError& e) {
      failures.push_back(file + ": " + e.what());
    }
  }

  std::mt19937 rng(9);
  const std::string noise = "{}()[];:=.,-><\"#x1 \n";
  size_t mutants = 0;
  size_t diagnosed = 0;
  for (const auto& file : test::corpus_files()) {
    const std::string src = test::read_text(test::corpus_path(file));
    for (int k = 0; k < 60; ++k) {
      std::string text = src;
      const int edits = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int j = 0; j < edits; ++j) {
        const size_t at = std::uniform_int_distribution<size_t>(0, text.size() - 1)(rng);
        switch (rng() % 3) {
          case 0:
            text.erase(at, 1);
            break;
          case 1:
            text.insert(at, 1, noise[rng() % noise.size()]);
            break;
          default:
            text[at] = noise[rng() % noise.size()];
        }
      }
      ++mutants;
      const auto lines = split_lines(text);
      auto valid = [&](const SourcePos& p) {
        return p.line >= 1 && static_cast<size_t>(p.line) <= lines.size() && p.column >= 1 &&
               static_cast<size_t>(p.column) <= lines[p.line - 1].size() + 1;
      };
      std::vector<dsl::Diagnostic> diags;
      try {
        const dsl::Program program = dsl::parse_source(text);
        diags = dsl::check(program);
      } catch (const dsl::DiagnosticError& e) {
        diags.push_back(e.diagnostic());
      } catch (const OspError& e) {
        failures.push_back(file + " mutant raised a non-diagnostic error: " + e.what());
      }
      if (!diags.empty()) ++diagnosed;
      for (const auto& d : diags) {
        if (!valid(d.pos)) {
          failures.push_back(file + " mutant diagnostic at " + std::to_string(d.pos.line) + ":" +
                             std::to_string(d.pos.column) + ": " + d.message);
        }
      }
    }
  }

  Outcome o;
  o.pass = failures.empty() && diagnosed > 0;
  o.detail = std::to_string(test::corpus_files().size()) + " corpus files round-trip; " + std::to_string(diagnosed) +
             "/" + std::to_string(mutants) + " mutants diagnosed, " + std::to_string(failures.size()) + " failures";
  if (!failures.empty()) o.detail += "; first: " + failures.front();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 execution order", execution_order},
      {"2 path validity oracle", path_oracle},
      {"3 cascade deletion", cascade},
      {"4 edge traversal", edge_mechanics},
      {"5 skip/disengage", skip_disengage},
      {"6 social feed", social},
      {"7 fsm equivalence", fsm},
      {"8 determinism", determinism},
      {"9 round trip and positions", round_trip},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
