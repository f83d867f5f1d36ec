#pragma once

#include <string>
#include <vector>

#include "lockshift/ast.hpp"

namespace lockshift {

/// Statement-level control-flow graph of one function.
///
/// Node 0 is `entry`, node 1 is `ret`, and node `id + 2` is the statement
/// whose pre-order id is `id`. Blocks are not nodes. If and While conditions
/// are nodes of their own. The graph points into the FunctionDef it was built
/// from and must not outlive it.
class FlowGraph {
 public:
  static constexpr int kEntry = 0;
  static constexpr int kRet = 1;

  std::size_t size() const { return succ_.size(); }
  const std::vector<int> &succ(int node) const { return succ_[static_cast<std::size_t>(node)]; }
  const std::vector<int> &pred(int node) const { return pred_[static_cast<std::size_t>(node)]; }
  /// Statement of a node; nullptr for entry and ret.
  const Stmt *stmt(int node) const { return stmts_[static_cast<std::size_t>(node)]; }
  int line(int node) const;
  const FunctionDef &function() const { return *function_; }

  /// Graphviz rendering, one node per statement.
  std::string to_dot() const;

 private:
  friend FlowGraph build_cfg(const FunctionDef &f);

  const FunctionDef *function_ = nullptr;
  std::vector<const Stmt *> stmts_;
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
};

/// `f` must come from a resolved Program (statement ids assigned).
FlowGraph build_cfg(const FunctionDef &f);

/// One-line rendering of a statement for labels and dumps (`if (b)`, `x = 1`).
std::string stmt_label(const Stmt &s);

}  // namespace lockshift
