#include "lockshift/callgraph.hpp"

#include <algorithm>
#include <functional>

namespace lockshift {
namespace {

void collect_calls(const Expr &e, const FunctionIndex &p, std::set<std::string> &callees,
                   std::set<std::string> &spawned) {
  for (const auto &operand : e.operands) collect_calls(operand, p, callees, spawned);
  if (e.kind != ExprKind::Call) return;
  if (e.name == kThreadCreate && e.operands.size() == 2) {
    spawned.insert(e.operands[1].name);
    return;
  }
  if (is_lock_api(e.name)) return;
  const FunctionDef *f = p.find(e.name);
  if (f && f->has_body) callees.insert(e.name);
}

void collect_calls(const Stmt &s, const FunctionIndex &p, std::set<std::string> &callees,
                   std::set<std::string> &spawned) {
  if (s.target) collect_calls(*s.target, p, callees, spawned);
  if (s.value) collect_calls(*s.value, p, callees, spawned);
  for (const auto &child : s.children) collect_calls(child, p, callees, spawned);
}

// Iterative Tarjan; components come out in post-order of the condensation.
std::vector<std::vector<int>> tarjan(const std::vector<std::vector<int>> &adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(adj.size(), -1), low(adj.size(), 0);
  std::vector<bool> on_stack(adj.size(), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  struct Frame {
    int node;
    std::size_t next_edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      Frame &fr = frames.back();
      auto v = static_cast<std::size_t>(fr.node);
      if (fr.next_edge < adj[v].size()) {
        int w = adj[v][fr.next_edge++];
        auto wi = static_cast<std::size_t>(w);
        if (index[wi] == -1) {
          index[wi] = low[wi] = counter++;
          stack.push_back(w);
          on_stack[wi] = true;
          frames.push_back({w, 0});
        } else if (on_stack[wi]) {
          low[v] = std::min(low[v], index[wi]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<int> component;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          component.push_back(w);
        } while (w != fr.node);
        out.push_back(std::move(component));
      }
      int finished = fr.node;
      frames.pop_back();
      if (!frames.empty()) {
        auto parent = static_cast<std::size_t>(frames.back().node);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
      }
    }
  }
  return out;
}

}  // namespace

CallGraph build_call_graph(const Program &program) {
  CallGraph cg;
  std::map<std::string, int> index;
  for (const FunctionDef *f : program.defined_functions()) {
    index[f->name] = static_cast<int>(cg.nodes.size());
    cg.nodes.push_back(f->name);
    cg.edges[f->name];
    cg.callers[f->name];
  }
  FunctionIndex functions(program);
  for (const FunctionDef *f : program.defined_functions()) {
    std::set<std::string> callees;
    collect_calls(f->body, functions, callees, cg.thread_entries);
    for (const auto &g : callees) {
      cg.edges[f->name].insert(g);
      cg.callers[g].insert(f->name);
    }
  }
  std::vector<std::vector<int>> adj(cg.nodes.size());
  for (std::size_t i = 0; i < cg.nodes.size(); ++i)
    for (const auto &g : cg.edges[cg.nodes[i]]) adj[i].push_back(index[g]);

  for (auto &component : tarjan(adj)) {
    std::vector<std::string> names;
    for (int v : component) names.push_back(cg.nodes[static_cast<std::size_t>(v)]);
    std::sort(names.begin(), names.end());
    int id = static_cast<int>(cg.merged_nodes.size());
    for (const auto &name : names) cg.scc_of[name] = id;
    cg.post_order.push_back(id);
    cg.merged_nodes.push_back(std::move(names));
  }
  cg.merged_edges.resize(cg.merged_nodes.size());
  for (const auto &[f, callees] : cg.edges)
    for (const auto &g : callees)
      if (cg.scc_of[f] != cg.scc_of[g]) cg.merged_edges[static_cast<std::size_t>(cg.scc_of[f])].insert(cg.scc_of[g]);
  return cg;
}

bool CallGraph::has_self_edge(const std::string &f) const {
  auto it = edges.find(f);
  return it != edges.end() && it->second.count(f);
}

bool CallGraph::is_recursive(int scc) const {
  const auto &members = merged_nodes[static_cast<std::size_t>(scc)];
  return members.size() > 1 || has_self_edge(members.front());
}

bool CallGraph::is_source_scc(int scc) const {
  for (const auto &f : merged_nodes[static_cast<std::size_t>(scc)])
    for (const auto &caller : callers.at(f))
      if (scc_of.at(caller) != scc) return false;
  return true;
}

std::set<std::string> CallGraph::reachable_from(const std::set<std::string> &roots) const {
  std::set<std::string> seen;
  std::vector<std::string> work;
  for (const auto &r : roots)
    if (edges.count(r) && seen.insert(r).second) work.push_back(r);
  while (!work.empty()) {
    std::string f = std::move(work.back());
    work.pop_back();
    for (const auto &g : edges.at(f))
      if (seen.insert(g).second) work.push_back(g);
  }
  return seen;
}

std::string CallGraph::to_dot() const {
  std::string out = "digraph callgraph {\n";
  for (const auto &f : nodes) out += "  \"" + f + "\";\n";
  for (const auto &[f, callees] : edges)
    for (const auto &g : callees) out += "  \"" + f + "\" -> \"" + g + "\";\n";
  out += "}\ndigraph merged {\n";
  for (std::size_t i = 0; i < merged_nodes.size(); ++i) {
    std::string label;
    for (const auto &f : merged_nodes[i]) label += (label.empty() ? "" : ", ") + f;
    out += "  scc" + std::to_string(i) + " [label=\"{" + label + "}\"];\n";
  }
  for (std::size_t i = 0; i < merged_edges.size(); ++i)
    for (int j : merged_edges[i]) out += "  scc" + std::to_string(i) + " -> scc" + std::to_string(j) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace lockshift
