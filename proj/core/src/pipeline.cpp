#include "lockshift/pipeline.hpp"

namespace lockshift {

AnalysisResult analyze(const Program &program, const FlowOptions &options) {
  AnalysisResult r;
  r.callgraph = build_call_graph(program);
  r.flow = analyze_flow(program, r.callgraph, options, &r.diagnostics);
  r.call_facts = collect_call_facts(program, r.flow);
  r.functions = propagate(program, r.callgraph, r.call_facts, r.flow, &r.diagnostics);
  r.accesses = collect_accesses(program, r.flow, r.functions);
  r.verdicts = identify_data_locks(program, r.callgraph, r.accesses);
  r.summary = build_summary(r.verdicts, r.functions);
  return r;
}

}  // namespace lockshift
