#include "lockshift/guardcheck.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>

#include "lockshift/cfg.hpp"

namespace lockshift {

std::string_view to_string(OwnershipErrorKind kind) {
  switch (kind) {
    case OwnershipErrorKind::UseOfUninit: return "UseOfUninit";
    case OwnershipErrorKind::UseAfterMove: return "UseAfterMove";
    case OwnershipErrorKind::ConflictingPaths: return "ConflictingPaths";
  }
  return "?";
}

std::string OwnershipError::message() const {
  std::string what;
  switch (kind) {
    case OwnershipErrorKind::UseOfUninit: what = "is used before it is initialized"; break;
    case OwnershipErrorKind::UseAfterMove: what = "is used after it was moved"; break;
    case OwnershipErrorKind::ConflictingPaths: what = "is possibly uninitialized or moved here"; break;
  }
  return std::string(to_string(kind)) + ": guard `" + guard + "` in `" + function + "` " + what + " (line " +
         std::to_string(line) + ")";
}

namespace {

// Variables absent from a state have not been declared on any path yet.
using State = std::map<std::string, OwnState>;

State join(const State &a, const State &b) {
  State out = a;
  for (const auto &[var, s] : b) {
    auto [it, fresh] = out.emplace(var, s);
    if (!fresh && it->second != s) it->second = OwnState::Conflict;
  }
  return out;
}

class Transfer {
 public:
  Transfer(const FunctionDef &f, std::vector<OwnershipError> *errors) : f_(f), errors_(errors) {}

  void apply(const Stmt &s, State &st) {
    line_ = s.line;
    switch (s.kind) {
      case StmtKind::Decl:
        if (s.value) expr(*s.value, st);
        if (s.decl_type.is_guard()) st[s.name] = OwnState::Uninit;
        return;
      case StmtKind::Acquire:
        expr(*s.target, st);
        st[s.name] = OwnState::Owned;
        return;
      case StmtKind::Drop:
        consume(s.name, st);
        return;
      case StmtKind::Assign:
        expr(*s.value, st);
        expr(*s.target, st);
        return;
      case StmtKind::Return:
        if (s.value) expr(*s.value, st);
        return;
      case StmtKind::ExprStmt:
      case StmtKind::If:
      case StmtKind::While:
        if (s.value) expr(*s.value, st);
        return;
      case StmtKind::Block: return;
    }
  }

 private:
  void require(const std::string &guard, const State &st) {
    auto it = st.find(guard);
    OwnState s = it == st.end() ? OwnState::Uninit : it->second;
    if (s == OwnState::Owned || !errors_) return;
    OwnershipErrorKind kind = s == OwnState::Moved      ? OwnershipErrorKind::UseAfterMove
                              : s == OwnState::Conflict ? OwnershipErrorKind::ConflictingPaths
                                                        : OwnershipErrorKind::UseOfUninit;
    errors_->push_back({kind, f_.name, line_, guard});
  }

  void consume(const std::string &guard, State &st) {
    require(guard, st);
    st[guard] = OwnState::Moved;
  }

  void expr(const Expr &e, State &st) {
    switch (e.kind) {
      case ExprKind::GuardDeref: require(e.name, st); return;
      case ExprKind::Var:
        // A guard named as a value (argument or returned) is moved.
        if (e.type.is_guard()) consume(e.name, st);
        return;
      case ExprKind::Call:
        for (const auto &arg : e.operands) expr(arg, st);
        for (const auto &label : e.labels) st[label] = OwnState::Owned;
        return;
      default:
        for (const auto &operand : e.operands) expr(operand, st);
        return;
    }
  }

  const FunctionDef &f_;
  std::vector<OwnershipError> *errors_;
  int line_ = 0;
};

void check_function(const FunctionDef &f, std::vector<OwnershipError> &errors) {
  FlowGraph g = build_cfg(f);
  std::vector<std::optional<State>> in(g.size()), out(g.size());
  State entry;
  for (const auto &p : f.params)
    if (p.type.is_guard()) entry[p.name] = OwnState::Owned;
  in[FlowGraph::kEntry] = entry;

  Transfer silent(f, nullptr);
  std::deque<int> work{FlowGraph::kEntry};
  std::vector<bool> queued(g.size(), false);
  queued[FlowGraph::kEntry] = true;
  while (!work.empty()) {
    int node = work.front();
    work.pop_front();
    auto u = static_cast<std::size_t>(node);
    queued[u] = false;
    State st = *in[u];
    if (const Stmt *s = g.stmt(node)) silent.apply(*s, st);
    if (out[u] && *out[u] == st) continue;
    out[u] = st;
    for (int succ : g.succ(node)) {
      auto v = static_cast<std::size_t>(succ);
      State merged = in[v] ? join(*in[v], st) : st;
      if (in[v] && *in[v] == merged && out[v]) continue;
      in[v] = std::move(merged);
      if (!queued[v]) {
        queued[v] = true;
        work.push_back(succ);
      }
    }
  }

  Transfer reporting(f, &errors);
  for (std::size_t node = 2; node < g.size(); ++node) {
    if (!in[node]) continue;
    State st = *in[node];
    reporting.apply(*g.stmt(static_cast<int>(node)), st);
  }
}

}  // namespace

std::vector<OwnershipError> check(const Program &guarded) {
  std::vector<OwnershipError> errors;
  for (const FunctionDef *f : guarded.defined_functions()) check_function(*f, errors);
  std::set<OwnershipError> unique(errors.begin(), errors.end());
  return {unique.begin(), unique.end()};
}

}  // namespace lockshift
