#include <gtest/gtest.h>

#include <functional>

#include "fixtures.hpp"
#include "lockshift/guardcheck.hpp"
#include "lockshift/pipeline.hpp"
#include "lockshift/transform.hpp"

namespace lockshift {
namespace {

std::string transformed_text(const Program &p) { return print_guarded(transform(p, analyze(p).summary)); }

Program transformed(const Program &p) { return parse(transformed_text(p), Dialect::Guarded); }

// Visits every expression of a statement tree.
void each_expr(const Stmt &s, const std::function<void(const Expr &, int)> &fn) {
  std::function<void(const Expr &)> walk = [&](const Expr &e) {
    fn(e, s.line);
    for (const auto &op : e.operands) walk(op);
  };
  if (s.target) walk(*s.target);
  if (s.value) walk(*s.value);
  for (const auto &c : s.children) each_expr(c, fn);
}

TEST(Transform, SharedCounterMatchesGolden) {
  Program p = testing::load("golden/shared_counter.mc");
  EXPECT_EQ(transformed_text(p), testing::read_text(testing::fixture_dir() / "golden/shared_counter.gmc"));
}

TEST(Transform, SharedCounterHasGuardStructure) {
  Program g = transformed(testing::load("golden/shared_counter.mc"));
  const StructDef *m_data = g.find_struct("mData");
  ASSERT_NE(m_data, nullptr);
  ASSERT_EQ(m_data->fields.size(), 1u);
  EXPECT_EQ(m_data->fields[0].name, "n");
  ASSERT_NE(g.find_struct("smData"), nullptr);
  EXPECT_EQ(g.find_struct("s")->find("m")->type.kind, TypeKind::LockOwning);
  EXPECT_EQ(g.find_global("n"), nullptr);
  EXPECT_EQ(g.find_global("m")->type, Type::of(TypeKind::LockOwning, "mData"));

  const FunctionDef &unlock = testing::function(g, "unlock");
  ASSERT_EQ(unlock.params.size(), 1u);
  EXPECT_EQ(unlock.params[0].type, Type::of(TypeKind::Guard, "m"));
  EXPECT_EQ(testing::function(g, "lock").return_type, Type::of(TypeKind::Guard, "m"));

  bool g_binds = false, g_passes = false;
  each_expr(testing::function(g, "g").body, [&](const Expr &e, int) {
    if (e.kind != ExprKind::Call) return;
    if (e.name == "lock") g_binds = e.labels == std::vector<std::string>{"m_guard"};
    if (e.name == "unlock") g_passes = e.operands.size() == 1 && e.operands[0].name == "m_guard";
  });
  EXPECT_TRUE(g_binds);
  EXPECT_TRUE(g_passes);

  std::map<int, ExprKind> foo_access;
  each_expr(testing::function(g, "foo").body, [&](const Expr &e, int line) {
    if (e.kind == ExprKind::GetMut || e.kind == ExprKind::GuardDeref) foo_access[line] = e.kind;
  });
  EXPECT_EQ(foo_access, (std::map<int, ExprKind>{{14, ExprKind::GetMut}, {16, ExprKind::GuardDeref}}));
}

TEST(Transform, LockFreeProgramIsUnchanged) {
  Program p = testing::load("corpus/c14_unprotected.mc");
  Program plain = parse("int x;\nint f(int a) {\n  x = x + a;\n  while (x < 3) { x = x * 2; }\n  return x;\n}\n");
  for (const Program *q : {&plain}) {
    std::string out = print_guarded(transform(*q, LockSummary{}));
    EXPECT_EQ(parse(out), *q);
  }
  // Unused locks stay plain mutexes.
  EXPECT_EQ(parse(transformed_text(p)), p);
}

TEST(Transform, AcquireDropAndDerefSpelling) {
  std::string out = transformed_text(testing::load("corpus/c05_loop_around.mc"));
  EXPECT_NE(out.find("m_guard = m.acquire();"), std::string::npos);
  EXPECT_NE(out.find("drop(m_guard);"), std::string::npos);
  EXPECT_NE(out.find("(*m_guard).total"), std::string::npos);
}

TEST(Transform, GuardAndValueResultsAreTupled) {
  std::string out = transformed_text(testing::load("corpus/c15_lock_returns_value.mc"));
  EXPECT_NE(out.find("(int, guard<m>) lock_and_read()"), std::string::npos);
  EXPECT_NE(out.find("(v, m_guard) = lock_and_read();"), std::string::npos);
}

TEST(Transform, GuardParametersAreSortedByLockPath) {
  Program p = parse(
      "int a;\nint b;\nmutex_t mb;\nmutex_t ma;\n"
      "void both() { a = 1; b = 1; pthread_mutex_unlock(&mb); pthread_mutex_unlock(&ma); }\n"
      "void run() { pthread_mutex_lock(&ma); pthread_mutex_lock(&mb); a = 2; b = 2; both(); }\n");
  Program g = transformed(p);
  const auto &params = testing::function(g, "both").params;
  ASSERT_EQ(params.size(), 2u);
  EXPECT_EQ(params[0].name, "ma_guard");
  EXPECT_EQ(params[1].name, "mb_guard");
}

TEST(Transform, InitCallsOnOwnedLocksAreRemoved) {
  std::string out = transformed_text(testing::load("corpus/c02_struct_account.mc"));
  EXPECT_EQ(out.find("pthread_mutex_init"), std::string::npos);
}

TEST(Transform, SummaryNamingUnknownEntitiesIsAMismatch) {
  Program p = testing::load("golden/shared_counter.mc");
  EXPECT_THROW(transform(p, read_summary(R"({"global_lock_map": {"ghost": "m"}})")), SummaryMismatch);
  EXPECT_THROW(transform(p, read_summary(R"({"function_map": {"foo": {"entry_lock": ["q"]}}})")), SummaryMismatch);
}

TEST(Transform, ConditionalAcquisitionTransformsButFailsTheCheck) {
  Program g = transformed(testing::load("failures/cond_acq.mc"));
  auto errors = check(g);
  ASSERT_FALSE(errors.empty());
  EXPECT_EQ(errors.front().kind, OwnershipErrorKind::UseOfUninit);
  EXPECT_EQ(errors.front().function, "main");
}

TEST(Transform, PathDivergentLockingFailsTheCheck) {
  Program g = transformed(testing::load("failures/path_divergent.mc"));
  auto errors = check(g);
  ASSERT_FALSE(errors.empty());
  for (const auto &e : errors) EXPECT_EQ(e.kind, OwnershipErrorKind::ConflictingPaths);
}

TEST(TransformProperty, NoLockCallsRemain) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    std::string out = transformed_text(parse(testing::read_text(path)));
    EXPECT_EQ(out.find("pthread_mutex_lock"), std::string::npos);
    EXPECT_EQ(out.find("pthread_mutex_unlock"), std::string::npos);
  }
}

TEST(TransformProperty, AccessesArePreserved) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Program p = parse(testing::read_text(path));
    EXPECT_EQ(datum_accesses(transformed(p)), datum_accesses(p));
  }
}

TEST(TransformProperty, DroppedGuardNamesTheAcquiredLock) {
  for (const auto &path : testing::analyzable_fixtures()) {
    SCOPED_TRACE(path.string());
    Program g = transformed(parse(testing::read_text(path)));
    for (const FunctionDef *f : g.defined_functions()) {
      std::function<void(const Stmt &)> walk = [&](const Stmt &s) {
        if (s.kind == StmtKind::Acquire) EXPECT_EQ(s.name, guard_name(*canonical_path(*s.target)));
        for (const auto &c : s.children) walk(c);
      };
      walk(f->body);
    }
  }
}

TEST(TransformProperty, TransformIsDeterministic) {
  for (const auto &path : testing::analyzable_fixtures()) {
    Program p = parse(testing::read_text(path));
    EXPECT_EQ(transformed_text(p), transformed_text(p)) << path;
  }
}

}  // namespace
}  // namespace lockshift
