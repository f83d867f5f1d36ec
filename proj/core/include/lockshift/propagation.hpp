#pragma once

#include <map>
#include <string>
#include <vector>

#include "lockshift/ast.hpp"
#include "lockshift/callgraph.hpp"
#include "lockshift/error.hpp"
#include "lockshift/flow_analysis.hpp"
#include "lockshift/lockset.hpp"

namespace lockshift {

/// One call from `caller` to a user-defined `callee`.
struct CallSiteFact {
  std::string caller;
  std::string callee;
  /// Guards available just before the call. When a statement makes several
  /// calls, effects of the earlier ones are included.
  LockSet available;
  std::vector<Expr> args;
  int line = 0;
};

struct FunctionFlowSummary {
  LockSet mels, mrls;
  LockSet els, pls, rls;
  /// Lock → sorted, duplicate-free lines of statements where it is held.
  std::map<LockPath, std::vector<int>> lock_line;
};

using FlowSummaries = std::map<std::string, FunctionFlowSummary, std::less<>>;

/// Call sites in declaration order of callers, then statement order.
std::vector<CallSiteFact> collect_call_facts(const Program &program, const FlowResult &flow);

/// Maps caller paths into the callee's namespace: the longest argument whose
/// canonical path prefixes `path` is replaced by its parameter name. Paths
/// rooted at globals pass through; other unmatched paths yield nothing.
std::optional<LockPath> reverse_alias(const LockPath &path, std::span<const Expr> args,
                                      std::span<const std::string> params, const Program &program);

/// Top-down ELS/PLS/RLS over the original call graph, solved to a fixpoint.
/// Functions in an SCC with no outside caller are roots: ELS = MELS.
FlowSummaries propagate(const Program &program, const CallGraph &cg, const std::vector<CallSiteFact> &facts,
                        const FlowResult &flow, Diagnostics *diags = nullptr);

}  // namespace lockshift
