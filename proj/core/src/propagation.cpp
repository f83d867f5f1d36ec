#include "lockshift/propagation.hpp"

#include <algorithm>
#include <deque>

#include "lockshift/frontend.hpp"

namespace lockshift {
namespace {

void collect_facts(const FunctionDef &f, const Stmt &s, const FlowResult &flow, std::vector<CallSiteFact> &out) {
  if (s.kind != StmtKind::Block) {
    const FunctionFlowFacts &facts = flow.facts.find(f.name)->second;
    LockSet held = facts.in_avail[static_cast<std::size_t>(s.id + 2)];
    for (const Expr *call : calls_in_order(s)) {
      if (call->name == kMutexLock) {
        held.insert(lock_path_of(call->operands.at(0)));
        continue;
      }
      if (call->name == kMutexUnlock) {
        held = held.minus(LockSet{lock_path_of(call->operands.at(0))});
        continue;
      }
      auto callee = flow.callees.find(call->name);
      if (callee == flow.callees.end()) continue;
      out.push_back({f.name, call->name, held, call->operands, s.line});
      const CalleeFacts &c = callee->second;
      held = held.minus(alias(c.mels, c.params, call->operands)).unite(alias(c.mrls, c.params, call->operands));
    }
  }
  for (const auto &child : s.children) collect_facts(f, child, flow, out);
}

}  // namespace

std::vector<CallSiteFact> collect_call_facts(const Program &program, const FlowResult &flow) {
  std::vector<CallSiteFact> out;
  for (const FunctionDef *f : program.defined_functions()) collect_facts(*f, f->body, flow, out);
  return out;
}

std::optional<LockPath> reverse_alias(const LockPath &path, std::span<const Expr> args,
                                      std::span<const std::string> params, const Program &program) {
  std::optional<std::size_t> best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < args.size() && i < params.size(); ++i) {
    auto arg = canonical_path(args[i]);
    if (!arg || !path.has_prefix(*arg) || arg->size() <= best_len) continue;
    best = i;
    best_len = arg->size();
  }
  if (best) return path.replace_prefix(*canonical_path(args[*best]), LockPath({params[*best]}));
  if (program.find_global(path.root())) return path;
  return std::nullopt;
}

FlowSummaries propagate(const Program &program, const CallGraph &cg, const std::vector<CallSiteFact> &facts,
                        const FlowResult &flow, Diagnostics *diags) {
  // Facts grouped by callee, then caller.
  std::map<std::string, std::map<std::string, std::vector<const CallSiteFact *>>> incoming;
  for (const auto &fact : facts) incoming[fact.callee][fact.caller].push_back(&fact);

  FunctionIndex functions(program);
  std::map<std::string, LockSet> els;
  std::map<std::string, bool> root;
  for (const auto &name : cg.nodes) {
    const FunctionFlowFacts &ff = flow.facts.find(name)->second;
    root[name] = cg.is_source_scc(cg.scc_of.at(name));
    els[name] = root[name] ? ff.mels : LockSet::top();
  }

  auto adjust = [&](const std::string &g, LockSet prop, Diagnostics *sink) {
    const FunctionFlowFacts &ff = flow.facts.find(g)->second;
    if (prop.is_top()) return prop;
    LockSet forced = prop.unite(ff.mels).minus(ff.mrls.minus(ff.mels));
    if (sink && !(forced == prop)) {
      const FunctionDef *f = functions.find(g);
      sink->warn("EntryLockAdjusted", g, f->first_line,
                 "callers propagate " + prop.str() + "; entry lock set taken as " + forced.str());
    }
    return forced;
  };

  auto compute = [&](const std::string &g, Diagnostics *sink) {
    const FunctionDef *callee = functions.find(g);
    std::vector<std::string> params = callee->param_names();
    LockSet result = LockSet::top();
    auto it = incoming.find(g);
    if (it == incoming.end()) return adjust(g, result, sink);
    for (const auto &[caller, sites] : it->second) {
      for (const CallSiteFact *site : sites) {
        LockSet given = site->available.unite(els[caller]);
        if (given.is_top()) continue;
        LockSet mapped;
        for (const auto &p : given.paths()) {
          if (auto q = reverse_alias(p, site->args, params, program)) {
            mapped.insert(std::move(*q));
          } else if (sink) {
            sink->note("UnmappedLock", caller, site->line,
                       "lock " + p.str() + " has no name in `" + g + "`; not propagated");
          }
        }
        result = result.intersect(mapped);
      }
    }
    return adjust(g, result, sink);
  };

  // Callers before callees converges in one sweep on acyclic graphs.
  std::deque<std::string> work;
  std::set<std::string> queued;
  for (auto it = cg.post_order.rbegin(); it != cg.post_order.rend(); ++it)
    for (const auto &name : cg.merged_nodes[static_cast<std::size_t>(*it)])
      if (!root[name]) {
        work.push_back(name);
        queued.insert(name);
      }
  while (!work.empty()) {
    std::string g = std::move(work.front());
    work.pop_front();
    queued.erase(g);
    LockSet next = compute(g, nullptr);
    if (next == els[g]) continue;
    els[g] = std::move(next);
    for (const auto &callee : cg.edges.at(g))
      if (!root[callee] && queued.insert(callee).second) work.push_back(callee);
  }

  FlowSummaries out;
  for (const auto &name : cg.nodes) {
    const FunctionFlowFacts &ff = flow.facts.find(name)->second;
    FunctionFlowSummary s;
    s.mels = ff.mels;
    s.mrls = ff.mrls;
    s.els = root[name] ? ff.mels : compute(name, diags);
    if (s.els.is_top()) s.els = ff.mels;
    s.pls = s.els.minus(s.mels);
    s.rls = s.mrls.unite(s.pls);
    const FlowGraph &g = flow.graphs.find(name)->second;
    std::map<LockPath, std::set<int>> lines;
    for (std::size_t node = 2; node < g.size(); ++node) {
      LockSet held = ff.in_avail[node].unite(s.pls);
      for (const auto &p : held.paths()) lines[p].insert(g.line(static_cast<int>(node)));
    }
    for (auto &[p, ls] : lines) s.lock_line[p] = {ls.begin(), ls.end()};
    out.emplace(name, std::move(s));
  }
  return out;
}

}  // namespace lockshift
