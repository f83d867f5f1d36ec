#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lockshift/ast.hpp"
#include "lockshift/callgraph.hpp"
#include "lockshift/cfg.hpp"
#include "lockshift/error.hpp"
#include "lockshift/lockset.hpp"

namespace lockshift {

/// Per-function results of live guard analysis (backward, may) and available
/// guard analysis (forward, must). Vectors are indexed by FlowGraph node.
struct FunctionFlowFacts {
  LockSet mels;
  LockSet mrls;
  std::vector<LockSet> in_live, out_live;
  std::vector<LockSet> in_avail, out_avail;
};

/// What a caller needs to know about a callee.
struct CalleeFacts {
  LockSet mels;
  LockSet mrls;
  std::vector<std::string> params;
};

using CalleeTable = std::map<std::string, CalleeFacts, std::less<>>;

/// Looks callees up in `inner` first (current iterates of the SCC being
/// solved), then in `outer` (finished SCCs). Either may be null.
class CalleeLookup {
 public:
  CalleeLookup(const CalleeTable *outer, const CalleeTable *inner = nullptr) : outer_(outer), inner_(inner) {}
  const CalleeFacts *find(std::string_view name) const;

 private:
  const CalleeTable *outer_;
  const CalleeTable *inner_;
};

struct GenKill {
  LockSet gen_live, kill_live;
  LockSet gen_avail, kill_avail;
};

/// Rewrites a parameter prefix of `path` into the canonical path of the
/// matching argument: alias(a.m, [a], [b]) = b.m. Paths without a parameter
/// prefix are returned unchanged. Returns nothing when the matching argument
/// is not a place.
std::optional<LockPath> alias(const LockPath &path, std::span<const std::string> params,
                              std::span<const Expr> args);

/// Elementwise alias. Unaliasable paths are dropped and reported as
/// UnaliasableArgument warnings when `diags` is given.
LockSet alias(const LockSet &set, std::span<const std::string> params, std::span<const Expr> args,
              Diagnostics *diags = nullptr, const std::string &function = {}, int line = 0);

/// Gen/kill sets of one statement. Several calls in one statement compose in
/// evaluation order.
GenKill transfer_gen_kill(const Stmt &s, const CalleeLookup &callees, Diagnostics *diags = nullptr,
                          const std::string &function = {});

/// Solves both analyses for one function against fixed callee facts.
FunctionFlowFacts analyze_function(const FunctionDef &f, const FlowGraph &g, const CalleeLookup &callees,
                                   Diagnostics *diags = nullptr);

struct FlowOptions {
  int iteration_budget = 1000;
};

struct SccResult {
  std::map<std::string, FunctionFlowFacts> facts;
  /// Rounds over the whole SCC, counting the final round that changed nothing.
  int iterations = 0;
  /// (MELS, MRLS) of every member after each round.
  std::vector<std::map<std::string, std::pair<LockSet, LockSet>>> history;
};

/// Solves one merged call-graph node. Recursive members start from MELS = ∅
/// and MRLS = ⊤ and are re-analyzed until no MELS or MRLS changes.
///
/// Throws IterationBudgetExceeded when no fixpoint is reached in time.
SccResult analyze_scc(const std::vector<const FunctionDef *> &members,
                      const std::map<std::string, FlowGraph, std::less<>> &graphs, const CalleeTable &external,
                      const FlowOptions &options = {}, Diagnostics *diags = nullptr);

struct FlowResult {
  std::map<std::string, FlowGraph, std::less<>> graphs;
  std::map<std::string, FunctionFlowFacts, std::less<>> facts;
  CalleeTable callees;
  /// Rounds used per SCC, keyed by the SCC's first member.
  std::map<std::string, int> iterations;
};

/// Bottom-up over the condensation of `cg`.
FlowResult analyze_flow(const Program &program, const CallGraph &cg, const FlowOptions &options = {},
                        Diagnostics *diags = nullptr);

}  // namespace lockshift
