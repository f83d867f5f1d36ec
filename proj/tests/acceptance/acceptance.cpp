// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"
#include "lockshift/guardcheck.hpp"
#include "lockshift/pipeline.hpp"
#include "lockshift/transform.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace lockshift {
namespace {

using testing::function;

/// Collects the reasons a criterion fails.
class Verdict {
 public:
  void expect(bool ok, const std::string &what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  bool passed() const { return failures_.empty() && checks_ > 0; }
  int checks() const { return checks_; }
  const std::vector<std::string> &failures() const { return failures_; }
  std::string note;

 private:
  int checks_ = 0;
  std::vector<std::string> failures_;
};

struct Analyzed {
  Program program;
  AnalysisResult result;
  explicit Analyzed(Program p) : program(std::move(p)), result(analyze(program)) {}
};

Program transformed(const Program &p, const LockSummary &s) {
  return parse(print_guarded(transform(p, s)), Dialect::Guarded);
}

void basic_flow_examples(Verdict &v) {
  struct Case {
    const char *file;
    const char *fn;
    std::optional<LockSet> mels, mrls;
    int max_rounds;
  };
  const std::vector<Case> cases = {
      {"basics/unlock.mc", "unlock", LockSet::of({"m"}), std::nullopt, 0},
      {"basics/may_unlock.mc", "may_unlock", LockSet::of({"m"}), std::nullopt, 0},
      {"basics/lock.mc", "lock", std::nullopt, LockSet::of({"m"}), 0},
      {"basics/may_lock.mc", "may_lock", std::nullopt, LockSet{}, 0},
      {"basics/unlock_and_lock.mc", "unlock_and_lock", LockSet::of({"m"}), LockSet::of({"m"}), 0},
      {"basics/unlock2.mc", "unlock2", LockSet::of({"m"}), std::nullopt, 0},
      {"basics/lock_and_unlock.mc", "lock_and_unlock", LockSet{}, std::nullopt, 0},
      {"basics/recursive_unlock.mc", "unlock", LockSet::of({"m"}), std::nullopt, 2},
      {"basics/recursive_lock.mc", "lock", std::nullopt, LockSet::of({"m"}), 2},
  };
  for (const auto &c : cases) {
    Analyzed a(testing::load(c.file));
    const auto &facts = a.result.flow.facts.at(c.fn);
    if (c.mels) v.expect(facts.mels == *c.mels, std::string(c.file) + ": MELS " + facts.mels.str());
    if (c.mrls) v.expect(facts.mrls == *c.mrls, std::string(c.file) + ": MRLS " + facts.mrls.str());
    if (c.max_rounds) {
      int rounds = a.result.flow.iterations.at(c.fn);
      v.expect(rounds <= c.max_rounds, std::string(c.file) + ": " + std::to_string(rounds) + " rounds");
    }
  }
  v.note = std::to_string(cases.size()) + " examples";
}

void golden_pipeline(Verdict &v) {
  Program p = testing::load("golden/shared_counter.mc");
  LockSummary s = analyze(p).summary;
  v.expect(s.global_lock_map == std::map<std::string, std::string>{{"n", "m"}}, "global_lock_map");
  v.expect(s.struct_lock_map == std::map<std::string, std::map<std::string, std::string>>{{"s", {{"n", "m"}}}},
           "struct_lock_map");
  auto info = [&](const std::string &fn) {
    auto it = s.function_map.find(fn);
    return it == s.function_map.end() ? FunctionLockInfo{} : it->second;
  };
  v.expect(info("unlock").entry_lock == std::vector<std::string>{"m"}, "unlock.entry_lock");
  v.expect(info("unlock").return_lock.empty(), "unlock.return_lock");
  v.expect(info("lock").entry_lock.empty(), "lock.entry_lock");
  v.expect(info("lock").return_lock == std::vector<std::string>{"m"}, "lock.return_lock");
  v.expect(info("foo").lock_line == std::map<std::string, std::vector<int>>{{"m", {16, 17}}}, "foo.lock_line");

  std::string text = print_guarded(transform(p, s));
  v.expect(text == testing::read_text(testing::fixture_dir() / "golden/shared_counter.gmc"), "golden shared_counter.gmc");
  Program g = parse(text, Dialect::Guarded);
  v.expect(g.find_struct("mData") && g.find_struct("smData"), "payload structs");
  const FunctionDef &unlock = function(g, "unlock");
  v.expect(unlock.params.size() == 1 && unlock.params[0].type == Type::of(TypeKind::Guard, "m"), "unlock guard param");
  v.expect(function(g, "lock").return_type == Type::of(TypeKind::Guard, "m"), "lock guard return");
  v.expect(text.find("m_guard = lock();") != std::string::npos && text.find("unlock(m_guard);") != std::string::npos,
           "guard threading in g");
  v.expect(text.find("m.get_mut().n += 1;") != std::string::npos, "get_mut in foo");
  v.expect(check(g).empty(), "transformed golden passes guardcheck");
}

void guardcheck_acceptance(Verdict &v) {
  auto corpus = testing::fixtures("corpus");
  v.expect(corpus.size() >= 25, "corpus has " + std::to_string(corpus.size()) + " programs");
  for (const auto &path : corpus) {
    Program p = parse(testing::read_text(path));
    auto errors = check(transformed(p, analyze(p).summary));
    v.expect(errors.empty(), path.filename().string() + (errors.empty() ? "" : ": " + errors.front().message()));
  }
  struct Failure {
    const char *file;
    OwnershipErrorKind kind;
  };
  for (const auto &f : {Failure{"failures/cond_acq.mc", OwnershipErrorKind::UseOfUninit},
                        Failure{"failures/path_divergent.mc", OwnershipErrorKind::ConflictingPaths}}) {
    Program p = testing::load(f.file);
    auto errors = check(transformed(p, analyze(p).summary));
    bool kinds_ok = !errors.empty();
    for (const auto &e : errors) kinds_ok = kinds_ok && e.kind == f.kind;
    v.expect(kinds_ok, std::string(f.file) + " expected " + std::string(to_string(f.kind)));
  }
  v.note = std::to_string(corpus.size()) + " corpus programs, 2 failure fixtures";
}

void oracle_equivalence(Verdict &v) {
  int functions = 0;
  std::size_t paths = 0;
  auto compare = [&](const std::string &where, const FunctionDef &f) {
    auto oracle = testing::enumerate_paths(f);
    CalleeTable none;
    FunctionFlowFacts facts = analyze_function(f, build_cfg(f), CalleeLookup(&none));
    bool same = facts.mels == oracle.mels && facts.mrls == oracle.mrls;
    for (const auto &[id, live] : oracle.in_live) same = same && facts.in_live[static_cast<std::size_t>(id + 2)] == live;
    for (const auto &[id, av] : oracle.in_avail) same = same && facts.in_avail[static_cast<std::size_t>(id + 2)] == av;
    v.expect(same, where + ":" + f.name);
    ++functions;
    paths += oracle.paths;
  };
  for (const auto &path : testing::analyzable_fixtures()) {
    Program p = parse(testing::read_text(path));
    for (const FunctionDef *f : p.defined_functions())
      if (testing::is_acyclic_call_free(*f) && count_statements(f->body) + 2 <= 12)
        compare(path.filename().string(), *f);
  }
  int fixture_functions = functions;
  std::mt19937 rng(4);
  int generated = 0;
  while (generated < 1000) {
    Program p;
    try {
      p = parse(testing::random_acyclic_program(rng, 10));
    } catch (const SyntaxError &) {
      continue;
    }
    compare("generated #" + std::to_string(generated), function(p, "f"));
    ++generated;
  }
  v.note = std::to_string(fixture_functions) + " fixture functions + " + std::to_string(generated) +
           " generated, " + std::to_string(paths) + " paths";
}

void structural_invariants(Verdict &v) {
  auto all = testing::analyzable_fixtures();
  for (const auto &path : all) {
    std::string name = path.filename().string();
    Analyzed a(parse(testing::read_text(path)));
    for (const auto &[fn, s] : a.result.functions) {
      v.expect(s.mels.subset_of(s.els), name + ":" + fn + " MELS ⊆ ELS");
      v.expect(s.mrls.subset_of(s.rls), name + ":" + fn + " MRLS ⊆ RLS");
      v.expect(s.els.minus(s.mels) == s.rls.minus(s.mrls), name + ":" + fn + " ELS−MELS = RLS−MRLS");
    }
    std::string text = print_guarded(transform(a.program, a.result.summary));
    v.expect(text.find("pthread_mutex_lock") == std::string::npos &&
                 text.find("pthread_mutex_unlock") == std::string::npos,
             name + ": lock calls remain");
    Program g = parse(text, Dialect::Guarded);
    v.expect(datum_accesses(g) == datum_accesses(a.program), name + ": access multiset");
    std::string json = write_summary(a.result.summary);
    v.expect(write_summary(read_summary(json)) == json, name + ": summary round trip");
  }
  v.note = std::to_string(all.size()) + " fixtures";
}

void performance(Verdict &v) {
  constexpr int kFunctions = 5000;
  std::string src = testing::synthetic_chain_program(kFunctions);
  auto start = std::chrono::steady_clock::now();
  Program p = parse(src);
  AnalysisResult r = analyze(p);
  std::string text = print_guarded(transform(p, r.summary));
  Program g = parse(text, Dialect::Guarded);
  auto errors = check(g);
  std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  v.expect(p.defined_functions().size() >= kFunctions, "program has " + std::to_string(p.functions.size()) + " functions");
  v.expect(elapsed.count() < 10.0, "took " + std::to_string(elapsed.count()) + " s");
  v.expect(errors.empty(), "synthetic program fails guardcheck");
  v.expect(r.summary.global_lock_map.size() == 8, "synthetic counters protected");
  std::ostringstream note;
  note.precision(3);
  note << std::fixed << p.defined_functions().size() << " functions, " << std::count(src.begin(), src.end(), '\n')
       << " lines in " << elapsed.count() << " s";
  v.note = note.str();
}

}  // namespace
}  // namespace lockshift

int main() {
  using namespace lockshift;
  struct Criterion {
    int number;
    const char *title;
    std::function<void(Verdict &)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "basic lock-flow examples: MELS/MRLS", basic_flow_examples},
      {2, "golden pipeline: summary and guarded output", golden_pipeline},
      {3, "guardcheck accepts corpus, rejects failure fixtures", guardcheck_acceptance},
      {4, "LGA/AGA equal path enumeration on small acyclic functions", oracle_equivalence},
      {5, "structural invariants on every fixture", structural_invariants},
      {6, "5000-function pipeline under 10 s", performance},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    Verdict v;
    try {
      c.run(v);
    } catch (const std::exception &e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << c.number << ": " << (v.passed() ? "PASS" : "FAIL") << "  " << c.title << " ("
              << v.checks() << " checks" << (v.note.empty() ? "" : "; " + v.note) << ")\n";
    for (const auto &f : v.failures()) std::cout << "    - " << f << '\n';
    failed += !v.passed();
  }
  return failed == 0 ? 0 : 1;
}
