#pragma once

#include <vector>

#include "lockshift/callgraph.hpp"
#include "lockshift/datalock.hpp"
#include "lockshift/error.hpp"
#include "lockshift/flow_analysis.hpp"
#include "lockshift/propagation.hpp"
#include "lockshift/summary.hpp"

namespace lockshift {

/// Everything the analysis phases produce for one program.
struct AnalysisResult {
  CallGraph callgraph;
  FlowResult flow;
  std::vector<CallSiteFact> call_facts;
  FlowSummaries functions;
  std::vector<AccessRecord> accesses;
  std::vector<ProtectionVerdict> verdicts;
  LockSummary summary;
  Diagnostics diagnostics;
};

/// Call graph, bottom-up flow analysis, top-down propagation, data-lock
/// identification and summary, in that order. `program` must outlive the result.
AnalysisResult analyze(const Program &program, const FlowOptions &options = {});

}  // namespace lockshift
