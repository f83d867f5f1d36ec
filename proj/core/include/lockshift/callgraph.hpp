#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lockshift/ast.hpp"

namespace lockshift {

/// Call graph over user-defined functions plus its SCC condensation.
///
/// Library functions (prototypes and the pthread API) never appear. A
/// function passed to pthread_create is a thread entry, not a callee.
struct CallGraph {
  /// Defined functions in declaration order.
  std::vector<std::string> nodes;
  std::map<std::string, std::set<std::string>> edges;
  std::map<std::string, std::set<std::string>> callers;
  /// Functions spawned through pthread_create.
  std::set<std::string> thread_entries;

  /// Strongly connected components; merged_nodes[i] is sorted by name.
  std::vector<std::vector<std::string>> merged_nodes;
  std::vector<std::set<int>> merged_edges;
  /// Every SCC index once, callees before callers.
  std::vector<int> post_order;
  std::map<std::string, int> scc_of;

  bool has_self_edge(const std::string &f) const;
  /// True when some member of the SCC calls a member of the same SCC.
  bool is_recursive(int scc) const;
  /// SCCs with no caller outside themselves.
  bool is_source_scc(int scc) const;
  /// Functions reachable from `roots` over original edges, roots included.
  std::set<std::string> reachable_from(const std::set<std::string> &roots) const;

  /// DOT text holding two digraphs: the original graph and the condensation.
  std::string to_dot() const;
};

CallGraph build_call_graph(const Program &program);

}  // namespace lockshift
