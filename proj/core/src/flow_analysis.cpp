#include "lockshift/flow_analysis.hpp"

#include <deque>

#include "lockshift/frontend.hpp"

namespace lockshift {

const CalleeFacts *CalleeLookup::find(std::string_view name) const {
  if (inner_) {
    auto it = inner_->find(name);
    if (it != inner_->end()) return &it->second;
  }
  if (outer_) {
    auto it = outer_->find(name);
    if (it != outer_->end()) return &it->second;
  }
  return nullptr;
}

std::optional<LockPath> alias(const LockPath &path, std::span<const std::string> params,
                              std::span<const Expr> args) {
  for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) {
    if (path.root() != params[i]) continue;
    auto arg = canonical_path(args[i]);
    if (!arg) return std::nullopt;
    return path.replace_prefix(LockPath({params[i]}), *arg);
  }
  return path;
}

LockSet alias(const LockSet &set, std::span<const std::string> params, std::span<const Expr> args,
              Diagnostics *diags, const std::string &function, int line) {
  if (set.is_top()) return set;
  LockSet out;
  for (const auto &p : set.paths()) {
    if (auto q = alias(p, params, args)) {
      out.insert(std::move(*q));
    } else if (diags) {
      diags->warn("UnaliasableArgument", function, line,
                  "argument for `" + p.root() + "` is not a place; dropping lock " + p.str());
    }
  }
  return out;
}

GenKill transfer_gen_kill(const Stmt &s, const CalleeLookup &callees, Diagnostics *diags,
                          const std::string &function) {
  GenKill gk;
  // Statement effects run in evaluation order. Forward: gen = (g1 − k2) ∪ g2.
  // Backward: the earlier call sees the later one's result, gen = g1 ∪ (g2 − k1).
  auto forward = [](LockSet &gen, LockSet &kill, const LockSet &g2, const LockSet &k2) {
    gen = gen.minus(k2).unite(g2);
    kill = kill.unite(k2);
  };
  auto backward = [](LockSet &gen, LockSet &kill, const LockSet &g2, const LockSet &k2) {
    gen = gen.unite(g2.minus(kill));
    kill = kill.unite(k2);
  };
  for (const Expr *call : calls_in_order(s)) {
    if (call->name == kMutexLock || call->name == kMutexUnlock) {
      LockSet p{lock_path_of(call->operands.at(0))};
      if (call->name == kMutexUnlock) {
        backward(gk.gen_live, gk.kill_live, p, {});
        forward(gk.gen_avail, gk.kill_avail, {}, p);
      } else {
        backward(gk.gen_live, gk.kill_live, {}, p);
        forward(gk.gen_avail, gk.kill_avail, p, {});
      }
      continue;
    }
    const CalleeFacts *callee = callees.find(call->name);
    if (!callee) continue;
    LockSet entry = alias(callee->mels, callee->params, call->operands, diags, function, s.line);
    LockSet ret = alias(callee->mrls, callee->params, call->operands, diags, function, s.line);
    backward(gk.gen_live, gk.kill_live, entry, ret);
    forward(gk.gen_avail, gk.kill_avail, ret, entry);
  }
  return gk;
}

namespace {

void solve_live(const FlowGraph &g, const std::vector<GenKill> &gk, FunctionFlowFacts &facts) {
  const std::size_t n = g.size();
  facts.in_live.assign(n, {});
  facts.out_live.assign(n, {});
  std::deque<int> work;
  std::vector<bool> queued(n, true);
  for (std::size_t i = n; i-- > 0;) work.push_back(static_cast<int>(i));
  while (!work.empty()) {
    int node = work.front();
    work.pop_front();
    auto u = static_cast<std::size_t>(node);
    queued[u] = false;
    LockSet out;
    for (int s : g.succ(node)) out = out.unite(facts.in_live[static_cast<std::size_t>(s)]);
    LockSet in = out.minus(gk[u].kill_live).unite(gk[u].gen_live);
    facts.out_live[u] = std::move(out);
    if (in == facts.in_live[u]) continue;
    facts.in_live[u] = std::move(in);
    for (int p : g.pred(node))
      if (!queued[static_cast<std::size_t>(p)]) {
        queued[static_cast<std::size_t>(p)] = true;
        work.push_back(p);
      }
  }
}

void solve_avail(const FlowGraph &g, const std::vector<GenKill> &gk, FunctionFlowFacts &facts) {
  const std::size_t n = g.size();
  facts.in_avail.assign(n, LockSet::top());
  facts.out_avail.assign(n, LockSet::top());
  std::deque<int> work;
  std::vector<bool> queued(n, true);
  for (std::size_t i = 0; i < n; ++i) work.push_back(static_cast<int>(i));
  while (!work.empty()) {
    int node = work.front();
    work.pop_front();
    auto u = static_cast<std::size_t>(node);
    queued[u] = false;
    LockSet in = LockSet::top();
    if (node == FlowGraph::kEntry) {
      in = facts.mels;
    } else {
      for (int p : g.pred(node)) in = in.intersect(facts.out_avail[static_cast<std::size_t>(p)]);
    }
    LockSet out = in.minus(gk[u].kill_avail).unite(gk[u].gen_avail);
    facts.in_avail[u] = std::move(in);
    if (out == facts.out_avail[u]) continue;
    facts.out_avail[u] = std::move(out);
    for (int s : g.succ(node))
      if (!queued[static_cast<std::size_t>(s)]) {
        queued[static_cast<std::size_t>(s)] = true;
        work.push_back(s);
      }
  }
}

}  // namespace

FunctionFlowFacts analyze_function(const FunctionDef &f, const FlowGraph &g, const CalleeLookup &callees,
                                   Diagnostics *diags) {
  std::vector<GenKill> gk(g.size());
  for (std::size_t node = 2; node < g.size(); ++node)
    gk[node] = transfer_gen_kill(*g.stmt(static_cast<int>(node)), callees, diags, f.name);
  FunctionFlowFacts facts;
  solve_live(g, gk, facts);
  facts.mels = facts.in_live[FlowGraph::kEntry];
  solve_avail(g, gk, facts);
  facts.mrls = facts.out_avail[FlowGraph::kRet];
  return facts;
}

namespace {

std::string join_names(const std::vector<const FunctionDef *> &members) {
  std::string out;
  for (const FunctionDef *f : members) out += (out.empty() ? "" : ", ") + f->name;
  return out;
}

// A Top left at a node after the fixpoint can only come from a callee that
// never returns; nothing is available there in any real execution.
void finitize(std::vector<LockSet> &sets) {
  for (auto &s : sets)
    if (s.is_top()) s = {};
}

bool calls_any(const Stmt &s, const std::vector<const FunctionDef *> &members) {
  for (const Expr *call : calls_in_order(s))
    for (const FunctionDef *f : members)
      if (call->name == f->name) return true;
  for (const auto &child : s.children)
    if (calls_any(child, members)) return true;
  return false;
}

}  // namespace

SccResult analyze_scc(const std::vector<const FunctionDef *> &members,
                      const std::map<std::string, FlowGraph, std::less<>> &graphs, const CalleeTable &external,
                      const FlowOptions &options, Diagnostics *diags) {
  SccResult result;
  bool recursive = false;
  for (const FunctionDef *f : members) recursive = recursive || calls_any(f->body, members);
  if (!recursive) {
    for (const FunctionDef *f : members)
      result.facts[f->name] = analyze_function(*f, graphs.at(f->name), CalleeLookup(&external), diags);
    result.iterations = 1;
    std::map<std::string, std::pair<LockSet, LockSet>> snapshot;
    for (const auto &[name, facts] : result.facts) snapshot[name] = {facts.mels, facts.mrls};
    result.history.push_back(std::move(snapshot));
    return result;
  }
  CalleeTable current;
  for (const FunctionDef *f : members) current[f->name] = {{}, LockSet::top(), f->param_names()};
  CalleeLookup lookup(&external, &current);

  // Diagnostics from intermediate rounds would repeat; only the last round reports.
  auto round = [&](Diagnostics *sink) {
    bool changed = false;
    for (const FunctionDef *f : members) {
      FunctionFlowFacts facts = analyze_function(*f, graphs.at(f->name), lookup, sink);
      CalleeFacts &cur = current[f->name];
      if (!(facts.mels == cur.mels) || !(facts.mrls == cur.mrls)) changed = true;
      cur.mels = facts.mels;
      cur.mrls = facts.mrls;
      result.facts[f->name] = std::move(facts);
    }
    std::map<std::string, std::pair<LockSet, LockSet>> snapshot;
    for (const FunctionDef *f : members) snapshot[f->name] = {current[f->name].mels, current[f->name].mrls};
    result.history.push_back(std::move(snapshot));
    return changed;
  };

  bool forced = false;
  while (true) {
    if (result.iterations >= options.iteration_budget)
      throw IterationBudgetExceeded(join_names(members), options.iteration_budget);
    ++result.iterations;
    if (round(nullptr)) continue;
    // A member whose MRLS is still ⊤ never returns; treat it as returning nothing.
    bool any_top = false;
    for (const FunctionDef *f : members) {
      CalleeFacts &cur = current[f->name];
      if (!cur.mrls.is_top()) continue;
      any_top = true;
      cur.mrls = {};
      if (diags && !forced)
        diags->warn("NonReturning", f->name, f->first_line, "no path returns; return lock set taken as empty");
    }
    forced = forced || any_top;
    if (!any_top) break;
  }
  for (const FunctionDef *f : members) {
    FunctionFlowFacts facts = analyze_function(*f, graphs.at(f->name), lookup, diags);
    if (facts.mrls.is_top()) facts.mrls = {};
    finitize(facts.in_avail);
    finitize(facts.out_avail);
    result.facts[f->name] = std::move(facts);
  }
  return result;
}

FlowResult analyze_flow(const Program &program, const CallGraph &cg, const FlowOptions &options,
                        Diagnostics *diags) {
  FlowResult result;
  FunctionIndex functions(program);
  for (const FunctionDef *f : program.defined_functions()) result.graphs.emplace(f->name, build_cfg(*f));
  for (int scc : cg.post_order) {
    std::vector<const FunctionDef *> members;
    for (const auto &name : cg.merged_nodes[static_cast<std::size_t>(scc)])
      members.push_back(functions.find(name));
    SccResult r = analyze_scc(members, result.graphs, result.callees, options, diags);
    result.iterations[members.front()->name] = r.iterations;
    for (auto &[name, facts] : r.facts) {
      result.callees[name] = {facts.mels, facts.mrls, functions.find(name)->param_names()};
      result.facts.emplace(name, std::move(facts));
    }
  }
  return result;
}

}  // namespace lockshift
