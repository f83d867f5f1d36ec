#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "lockshift/flow_analysis.hpp"
#include "lockshift/pipeline.hpp"
#include "oracles.hpp"

namespace lockshift {
namespace {

using testing::function;

struct Analyzed {
  Program program;
  AnalysisResult result;

  explicit Analyzed(Program p) : program(std::move(p)), result(analyze(program)) {}
  const FunctionFlowFacts &facts(const std::string &f) const { return result.flow.facts.at(f); }
};

Analyzed fixture(const std::string &relative) { return Analyzed(testing::load(relative)); }

const Stmt &stmt_at(const FunctionDef &f, std::size_t index) { return f.body.children.at(index); }

TEST(BasicFlow, UnlockHasMelsM) {
  auto a = fixture("basics/unlock.mc");
  EXPECT_EQ(a.facts("unlock").mels, LockSet::of({"m"}));
  EXPECT_EQ(a.facts("unlock").mrls, LockSet{});
}

TEST(BasicFlow, MayUnlockHasMelsM) {
  auto a = fixture("basics/may_unlock.mc");
  EXPECT_EQ(a.facts("may_unlock").mels, LockSet::of({"m"}));
}

TEST(BasicFlow, LockHasMrlsM) {
  auto a = fixture("basics/lock.mc");
  EXPECT_EQ(a.facts("lock").mrls, LockSet::of({"m"}));
  EXPECT_EQ(a.facts("lock").mels, LockSet{});
}

TEST(BasicFlow, MayLockHasEmptyMrls) {
  auto a = fixture("basics/may_lock.mc");
  EXPECT_EQ(a.facts("may_lock").mrls, LockSet{});
}

TEST(BasicFlow, UnlockAndLockHasBoth) {
  auto a = fixture("basics/unlock_and_lock.mc");
  EXPECT_EQ(a.facts("unlock_and_lock").mels, LockSet::of({"m"}));
  EXPECT_EQ(a.facts("unlock_and_lock").mrls, LockSet::of({"m"}));
}

TEST(BasicFlow, CalleeMelsFlowsToCaller) {
  auto a = fixture("basics/unlock2.mc");
  EXPECT_EQ(a.facts("unlock2").mels, LockSet::of({"m"}));
}

TEST(BasicFlow, AliasedUnlockIsKilledByLock) {
  auto a = fixture("basics/lock_and_unlock.mc");
  EXPECT_EQ(a.facts("unlock").mels, LockSet::of({"a.m"}));
  EXPECT_EQ(a.facts("lock_and_unlock").mels, LockSet{});
}

TEST(BasicFlow, RecursiveUnlockConvergesInTwoRounds) {
  auto a = fixture("basics/recursive_unlock.mc");
  EXPECT_EQ(a.facts("unlock").mels, LockSet::of({"m"}));
  EXPECT_EQ(a.result.flow.iterations.at("unlock"), 2);
}

TEST(BasicFlow, RecursiveLockConvergesInTwoRounds) {
  auto a = fixture("basics/recursive_lock.mc");
  EXPECT_EQ(a.facts("lock").mrls, LockSet::of({"m"}));
  EXPECT_EQ(a.result.flow.iterations.at("lock"), 2);
}

TEST(Alias, ParameterPrefixIsReplaced) {
  std::vector<std::string> params{"a"};
  std::vector<Expr> args{Expr::var("b")};
  EXPECT_EQ(alias(LockPath::parse("a.m"), params, args)->str(), "b.m");
}

TEST(Alias, OtherPathsAreUnchanged) {
  std::vector<std::string> params{"a"};
  std::vector<Expr> args{Expr::var("b")};
  EXPECT_EQ(alias(LockPath::parse("m"), params, args)->str(), "m");
  EXPECT_EQ(alias(LockPath::parse("ab.m"), params, args)->str(), "ab.m");
}

TEST(Alias, ArrowArgumentAgreesWithTextualOracle) {
  std::vector<std::string> params{"x", "a"};
  std::vector<Expr> args{Expr::var("y"), Expr::field(Expr::var("s"), "t", true)};
  auto got = alias(LockPath::parse("a.m.k"), params, args);
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(got->str(), "s.t.m.k");
  EXPECT_EQ(testing::textual_alias("a.m.k", params, {"y", "s->t"}), "s.t.m.k");
}

TEST(Alias, NonPlaceArgumentIsUnaliasable) {
  std::vector<std::string> params{"a"};
  std::vector<Expr> args{Expr::binary(BinaryOp::Add, Expr::var("p"), Expr::int_lit(1))};
  EXPECT_FALSE(alias(LockPath::parse("a.m"), params, args).has_value());
  Diagnostics diags;
  LockSet out = alias(LockSet::of({"a.m", "g"}), params, args, &diags, "f", 3);
  EXPECT_EQ(out, LockSet::of({"g"}));
  EXPECT_EQ(diags.count("UnaliasableArgument"), 1u);
}

TEST(Alias, RandomArgumentsAgreeWithTextualOracle) {
  std::mt19937 rng(7);
  const std::vector<std::string> fields{"m", "t", "k", "in"};
  const std::vector<std::string> roots{"s", "y", "q"};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (int round = 0; round < 500; ++round) {
    // Random place argument with its spelling.
    std::string root = roots[pick(roots.size())];
    Expr e = Expr::var(root);
    std::string text = root;
    for (std::size_t depth = pick(3); depth > 0; --depth) {
      std::string f = fields[pick(fields.size())];
      switch (pick(3)) {
        case 0:
          e = Expr::field(std::move(e), f, true);
          text += "->" + f;
          break;
        case 1:
          e = Expr::field(std::move(e), f, false);
          text += "." + f;
          break;
        default:
          e = Expr::field(Expr::deref(std::move(e)), f, false);
          text = "(*" + text + ")." + f;
          break;
      }
    }
    if (pick(2)) {
      e = Expr::addr_of(std::move(e), pick(2) == 1);
      text = (e.mut ? "&mut " : "&") + text;
    }
    std::vector<std::string> params{"a", "b"};
    std::vector<Expr> args{Expr::var("z"), e};
    std::vector<std::string> arg_texts{"z", text};
    std::string path = params[pick(2)];
    for (std::size_t depth = pick(3); depth > 0; --depth) path += "." + fields[pick(fields.size())];
    if (pick(4) == 0) path = "g." + path;
    auto got = alias(LockPath::parse(path), params, args);
    ASSERT_TRUE(got.has_value()) << text;
    EXPECT_EQ(got->str(), testing::textual_alias(path, params, arg_texts)) << path << " with " << text;
  }
}

class TransferTest : public ::testing::Test {
 protected:
  Program program = parse(
      "struct s { mutex_t m; };\nmutex_t m;\nint x;\n"
      "void unlock(struct s *a) { pthread_mutex_unlock(&a->m); }\n"
      "int take() { pthread_mutex_lock(&m); return 1; }\n"
      "int give() { pthread_mutex_unlock(&m); return 1; }\n"
      "void f(struct s *b) {\n"
      "  pthread_mutex_unlock(&mut m);\n"
      "  unlock(b);\n"
      "  x = 1 + 2;\n"
      "  x = take() + give();\n"
      "  pthread_mutex_lock(&m);\n"
      "}\n");
  CalleeTable table{{"unlock", {LockSet::of({"a.m"}), LockSet{}, {"a"}}},
                    {"take", {LockSet{}, LockSet::of({"m"}), {}}},
                    {"give", {LockSet::of({"m"}), LockSet{}, {}}}};
  CalleeLookup lookup{&table};
  const FunctionDef &f = function(program, "f");
};

TEST_F(TransferTest, UnlockGeneratesLiveAndKillsAvailable) {
  GenKill gk = transfer_gen_kill(stmt_at(f, 0), lookup);
  EXPECT_EQ(gk.gen_live, LockSet::of({"m"}));
  EXPECT_EQ(gk.kill_avail, LockSet::of({"m"}));
  EXPECT_TRUE(gk.kill_live.empty());
  EXPECT_TRUE(gk.gen_avail.empty());
}

TEST_F(TransferTest, LockKillsLiveAndGeneratesAvailable) {
  GenKill gk = transfer_gen_kill(stmt_at(f, 4), lookup);
  EXPECT_EQ(gk.kill_live, LockSet::of({"m"}));
  EXPECT_EQ(gk.gen_avail, LockSet::of({"m"}));
  EXPECT_TRUE(gk.gen_live.empty());
  EXPECT_TRUE(gk.kill_avail.empty());
}

TEST_F(TransferTest, CallUsesAliasedCalleeFacts) {
  GenKill gk = transfer_gen_kill(stmt_at(f, 1), lookup);
  EXPECT_EQ(gk.gen_live, LockSet::of({"b.m"}));
  EXPECT_EQ(gk.kill_avail, LockSet::of({"b.m"}));
}

TEST_F(TransferTest, PlainStatementHasNoEffect) {
  GenKill gk = transfer_gen_kill(stmt_at(f, 2), lookup);
  EXPECT_TRUE(gk.gen_live.empty() && gk.kill_live.empty() && gk.gen_avail.empty() && gk.kill_avail.empty());
}

TEST_F(TransferTest, CallsInOneStatementComposeInOrder) {
  // take() acquires m, then give() releases it: nothing survives either way.
  GenKill gk = transfer_gen_kill(stmt_at(f, 3), lookup);
  EXPECT_TRUE(gk.gen_avail.empty());
  EXPECT_EQ(gk.kill_avail, LockSet::of({"m"}));
  EXPECT_TRUE(gk.gen_live.empty());
  EXPECT_EQ(gk.kill_live, LockSet::of({"m"}));
}

TEST(AnalyzeFunction, FactsSatisfyBoundaryEquations) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Analyzed a(parse(testing::read_text(path)));
    for (const auto &[name, facts] : a.result.flow.facts) {
      EXPECT_EQ(facts.mels, facts.in_live[FlowGraph::kEntry]);
      EXPECT_EQ(facts.mrls, facts.out_avail[FlowGraph::kRet]);
      EXPECT_EQ(facts.in_avail[FlowGraph::kEntry], facts.mels);
      EXPECT_TRUE(facts.out_live[FlowGraph::kRet].empty());
      EXPECT_TRUE(facts.mels.is_finite());
      EXPECT_TRUE(facts.mrls.is_finite());
    }
  }
}

TEST(AnalyzeFunction, LockAndUnlockSitesSeeTheirLock) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Analyzed a(parse(testing::read_text(path)));
    for (const auto &[name, g] : a.result.flow.graphs) {
      const auto &facts = a.facts(name);
      for (int n = 2; n < static_cast<int>(g.size()); ++n) {
        const Stmt &s = *g.stmt(n);
        if (s.kind != StmtKind::ExprStmt || s.value->kind != ExprKind::Call) continue;
        auto u = static_cast<std::size_t>(n);
        if (s.value->name == kMutexLock) EXPECT_TRUE(facts.out_avail[u].contains(lock_path_of(s.value->operands[0])));
        if (s.value->name == kMutexUnlock) EXPECT_TRUE(facts.in_live[u].contains(lock_path_of(s.value->operands[0])));
      }
    }
  }
}

TEST(AnalyzeFunction, RerunningOnConvergedFactsChangesNothing) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Analyzed a(parse(testing::read_text(path)));
    CalleeLookup lookup(&a.result.flow.callees);
    for (const FunctionDef *f : a.program.defined_functions()) {
      FunctionFlowFacts again = analyze_function(*f, a.result.flow.graphs.at(f->name), lookup);
      const auto &facts = a.facts(f->name);
      EXPECT_EQ(again.mels, facts.mels) << f->name;
      EXPECT_EQ(again.mrls, facts.mrls) << f->name;
      EXPECT_EQ(again.in_avail, facts.in_avail) << f->name;
      EXPECT_EQ(again.in_live, facts.in_live) << f->name;
    }
  }
}

TEST(AnalyzeScc, RecursiveUnlockHistory) {
  Program p = testing::load("basics/recursive_unlock.mc");
  std::map<std::string, FlowGraph, std::less<>> graphs;
  graphs.emplace("unlock", build_cfg(function(p, "unlock")));
  SccResult r = analyze_scc({&function(p, "unlock")}, graphs, {});
  ASSERT_EQ(r.iterations, 2);
  EXPECT_EQ(r.history[0].at("unlock").first, LockSet::of({"m"}));
  EXPECT_EQ(r.history[1].at("unlock").first, LockSet::of({"m"}));
}

TEST(AnalyzeScc, RecursiveLockHistory) {
  Program p = testing::load("basics/recursive_lock.mc");
  std::map<std::string, FlowGraph, std::less<>> graphs;
  graphs.emplace("lock", build_cfg(function(p, "lock")));
  SccResult r = analyze_scc({&function(p, "lock")}, graphs, {});
  ASSERT_EQ(r.iterations, 2);
  EXPECT_EQ(r.history[0].at("lock").second, LockSet::of({"m"}));
  EXPECT_EQ(r.history[1].at("lock").second, LockSet::of({"m"}));
}

TEST(AnalyzeScc, SingletonMatchesOneAnalysis) {
  Program p = testing::load("basics/unlock_and_lock.mc");
  const FunctionDef &f = function(p, "unlock_and_lock");
  std::map<std::string, FlowGraph, std::less<>> graphs;
  graphs.emplace(f.name, build_cfg(f));
  SccResult r = analyze_scc({&f}, graphs, {});
  EXPECT_EQ(r.iterations, 1);
  CalleeTable none;
  FunctionFlowFacts direct = analyze_function(f, graphs.at(f.name), CalleeLookup(&none));
  EXPECT_EQ(r.facts.at(f.name).mels, direct.mels);
  EXPECT_EQ(r.facts.at(f.name).mrls, direct.mrls);
  EXPECT_EQ(r.facts.at(f.name).in_avail, direct.in_avail);
}

TEST(AnalyzeScc, UnboundedLockPathsExhaustTheBudget) {
  Program p = testing::load("failures/recursive_nodes.mc");
  CallGraph cg = build_call_graph(p);
  FlowOptions options;
  options.iteration_budget = 20;
  try {
    analyze_flow(p, cg, options);
    FAIL() << "expected IterationBudgetExceeded";
  } catch (const IterationBudgetExceeded &e) {
    EXPECT_EQ(e.budget(), 20);
  }
}

TEST(AnalyzeScc, NonReturningRecursionIsWarned) {
  Program p = parse("mutex_t m;\nvoid spin() { pthread_mutex_lock(&m); spin(); }");
  Diagnostics diags;
  FlowResult flow = analyze_flow(p, build_call_graph(p), {}, &diags);
  EXPECT_TRUE(flow.facts.at("spin").mrls.is_finite());
  EXPECT_EQ(diags.count("NonReturning"), 1u);
}

TEST(AnalyzeSccProperty, MelsGrowsAndMrlsShrinks) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Program p = parse(testing::read_text(path));
    CallGraph cg = build_call_graph(p);
    FlowResult flow = analyze_flow(p, cg);
    for (std::size_t scc = 0; scc < cg.merged_nodes.size(); ++scc) {
      if (!cg.is_recursive(static_cast<int>(scc))) continue;
      std::vector<const FunctionDef *> members;
      for (const auto &name : cg.merged_nodes[scc]) members.push_back(p.find_function(name));
      SccResult r = analyze_scc(members, flow.graphs, flow.callees);
      for (std::size_t i = 1; i < r.history.size(); ++i) {
        for (const auto &[name, sets] : r.history[i]) {
          const auto &[mels_prev, mrls_prev] = r.history[i - 1].at(name);
          EXPECT_TRUE(mels_prev.subset_of(sets.first)) << name << " round " << i;
          EXPECT_TRUE(sets.second.subset_of(mrls_prev)) << name << " round " << i;
        }
      }
    }
  }
}

void expect_matches_paths(const Program &p, const FunctionDef &f) {
  auto oracle = testing::enumerate_paths(f);
  CalleeTable none;
  FlowGraph g = build_cfg(f);
  FunctionFlowFacts facts = analyze_function(f, g, CalleeLookup(&none));
  EXPECT_EQ(facts.mels, oracle.mels) << print_source(p);
  EXPECT_EQ(facts.mrls, oracle.mrls) << print_source(p);
  for (const auto &[id, live] : oracle.in_live)
    EXPECT_EQ(facts.in_live[static_cast<std::size_t>(id + 2)], live) << "stmt " << id << "\n" << print_source(p);
  for (const auto &[id, avail] : oracle.in_avail)
    EXPECT_EQ(facts.in_avail[static_cast<std::size_t>(id + 2)], avail) << "stmt " << id << "\n" << print_source(p);
}

TEST(PathOracle, SmallAcyclicFixturesMatch) {
  int checked = 0;
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Program p = parse(testing::read_text(path));
    for (const FunctionDef *f : p.defined_functions()) {
      if (!testing::is_acyclic_call_free(*f) || count_statements(f->body) + 2 > 12) continue;
      expect_matches_paths(p, *f);
      ++checked;
    }
  }
  EXPECT_GE(checked, 20);
}

TEST(PathOracle, RandomAcyclicFunctionsMatch) {
  std::mt19937 rng(2024);
  int checked = 0;
  while (checked < 400) {
    std::string src = testing::random_acyclic_program(rng, 10);
    Program p;
    try {
      p = parse(src);
    } catch (const SyntaxError &) {
      continue;  // both arms returned, leaving dead code
    }
    const FunctionDef &f = function(p, "f");
    ASSERT_LE(count_statements(f.body) + 2, 12);
    expect_matches_paths(p, f);
    ++checked;
  }
}

}  // namespace
}  // namespace lockshift
