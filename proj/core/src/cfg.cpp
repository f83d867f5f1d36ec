#include "lockshift/cfg.hpp"

#include <algorithm>

#include "lockshift/frontend.hpp"

namespace lockshift {
namespace {

class Builder {
 public:
  Builder(std::vector<const Stmt *> &stmts, std::vector<std::vector<int>> &succ)
      : stmts_(stmts), succ_(succ) {}

  // Wires `preds` into `s` and returns the nodes that fall through past it.
  std::vector<int> build(const Stmt &s, std::vector<int> preds) {
    if (s.kind == StmtKind::Block) {
      for (const auto &child : s.children) preds = build(child, std::move(preds));
      return preds;
    }
    int node = s.id + 2;
    stmts_[static_cast<std::size_t>(node)] = &s;
    for (int p : preds) edge(p, node);
    switch (s.kind) {
      case StmtKind::Return:
        edge(node, FlowGraph::kRet);
        return {};
      case StmtKind::If: {
        auto exits = build(s.children[0], {node});
        if (s.children.size() > 1) {
          auto else_exits = build(s.children[1], {node});
          exits.insert(exits.end(), else_exits.begin(), else_exits.end());
        } else {
          exits.push_back(node);
        }
        return exits;
      }
      case StmtKind::While: {
        for (int back : build(s.children[0], {node})) edge(back, node);
        return {node};
      }
      default: return {node};
    }
  }

  void edge(int from, int to) { succ_[static_cast<std::size_t>(from)].push_back(to); }

 private:
  std::vector<const Stmt *> &stmts_;
  std::vector<std::vector<int>> &succ_;
};

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

FlowGraph build_cfg(const FunctionDef &f) {
  FlowGraph g;
  g.function_ = &f;
  std::size_t n = static_cast<std::size_t>(count_statements(f.body)) + 2;
  g.stmts_.assign(n, nullptr);
  g.succ_.assign(n, {});
  g.pred_.assign(n, {});
  Builder b(g.stmts_, g.succ_);
  for (int exit : b.build(f.body, {FlowGraph::kEntry})) b.edge(exit, FlowGraph::kRet);
  for (std::size_t from = 0; from < n; ++from) {
    auto &out = g.succ_[from];
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int to : out) g.pred_[static_cast<std::size_t>(to)].push_back(static_cast<int>(from));
  }
  return g;
}

int FlowGraph::line(int node) const {
  if (node == kEntry) return function_->first_line;
  if (node == kRet) return function_->last_line;
  return stmt(node)->line;
}

std::string stmt_label(const Stmt &s) {
  // Render just this statement (children elided) through the printer.
  Stmt shallow = s;
  for (auto &child : shallow.children) {
    child = Stmt{};
    child.kind = StmtKind::Block;
  }
  Program p;
  FunctionDef f;
  f.name = "_";
  f.return_type = Type::of(TypeKind::Void);
  f.body.kind = StmtKind::Block;
  shallow.line = 1;
  for (auto &child : shallow.children) child.line = child.end_line = 1;
  f.body.children.push_back(std::move(shallow));
  f.first_line = f.body.line = f.body.end_line = 1;
  p.functions.push_back(std::move(f));
  p.order.push_back({ItemKind::Function, 0});
  std::string text = print_source(p);
  // Strip "void _() {" and the closing "}".
  auto open = text.find('{');
  auto close = text.rfind('}');
  std::string body = text.substr(open + 1, close - open - 1);
  auto first = body.find_first_not_of(' ');
  auto last = body.find_last_not_of(" \n");
  if (first == std::string::npos) return {};
  body = body.substr(first, last - first + 1);
  if (s.kind == StmtKind::If || s.kind == StmtKind::While) {
    auto brace = body.find(" {");
    if (brace != std::string::npos) body = body.substr(0, brace);
  } else if (!body.empty() && body.back() == ';') {
    body.pop_back();
  }
  return body;
}

std::string FlowGraph::to_dot() const {
  std::string out = "digraph \"" + escape(function_->name) + "\" {\n";
  for (std::size_t n = 0; n < size(); ++n) {
    std::string label = n == kEntry ? "entry" : n == kRet ? "ret"
                                                          : "L" + std::to_string(stmts_[n]->line) + ": " +
                                                                stmt_label(*stmts_[n]);
    out += "  n" + std::to_string(n) + " [label=\"" + escape(label) + "\"];\n";
  }
  for (std::size_t n = 0; n < size(); ++n)
    for (int s : succ_[n]) out += "  n" + std::to_string(n) + " -> n" + std::to_string(s) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace lockshift
