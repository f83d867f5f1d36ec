#include "lockshift/datalock.hpp"

#include <map>
#include <set>

#include "lockshift/frontend.hpp"

namespace lockshift {
namespace {

bool is_data_type(const Type &t) {
  if (t.is_lock() || t.is_guard()) return false;
  if (t.kind == TypeKind::Thread && t.pointers == 0) return false;
  if (t.kind == TypeKind::Struct && t.pointers == 0) return false;
  return t.kind != TypeKind::Tuple && !t.is_void();
}

using Visitor = std::function<void(const Expr &, AccessKind)>;

bool is_access(const Expr &e) {
  return e.kind == ExprKind::GuardDeref || e.kind == ExprKind::GetMut || datum_of(e).has_value();
}

void walk(const Expr &e, AccessKind kind, const Visitor &visit);

// Everything a place reads on the way to its location (bases, pointers).
void walk_inside(const Expr &place, const Visitor &visit) {
  switch (place.kind) {
    case ExprKind::Field:
    case ExprKind::Deref:
    case ExprKind::GetMut: walk(place.operands[0], AccessKind::Read, visit); break;
    default: break;
  }
}

void walk(const Expr &e, AccessKind kind, const Visitor &visit) {
  switch (e.kind) {
    case ExprKind::Var:
    case ExprKind::Field:
    case ExprKind::GuardDeref:
    case ExprKind::GetMut:
      if (is_access(e)) visit(e, kind);
      walk_inside(e, visit);
      return;
    case ExprKind::Call:
      if (is_lock_api(e.name)) return;
      for (const auto &arg : e.operands) walk(arg, AccessKind::Read, visit);
      return;
    case ExprKind::Acquire: return;
    default:
      for (const auto &operand : e.operands) walk(operand, AccessKind::Read, visit);
      return;
  }
}

}  // namespace

std::optional<DataTarget> datum_of(const Expr &place) {
  if (!is_data_type(place.type)) return std::nullopt;
  if (place.kind == ExprKind::Var && place.scope == VarScope::Global) return DataTarget{DataTarget::Kind::Global, place.name, {}, {}};
  if (place.kind == ExprKind::Field) {
    auto sname = place.operands[0].type.struct_name();
    if (!sname) return std::nullopt;
    return DataTarget{DataTarget::Kind::Field, *sname, canonical_path(place.operands[0]).value_or(LockPath{}),
                      place.member};
  }
  return std::nullopt;
}

void visit_accesses(const Stmt &s, const Visitor &visit) {
  switch (s.kind) {
    case StmtKind::Assign:
      walk(*s.value, AccessKind::Read, visit);
      if (s.assign_op != AssignOp::Set) {
        walk(*s.target, AccessKind::Read, visit);
        if (is_access(*s.target)) visit(*s.target, AccessKind::Write);
      } else {
        if (is_access(*s.target)) visit(*s.target, AccessKind::Write);
        walk_inside(*s.target, visit);
      }
      return;
    case StmtKind::ExprStmt:
    case StmtKind::If:
    case StmtKind::While:
    case StmtKind::Return:
    case StmtKind::Decl:
      if (s.value) walk(*s.value, AccessKind::Read, visit);
      return;
    default: return;
  }
}

namespace {

void collect(const FunctionDef &f, const Stmt &s, const FunctionFlowFacts &facts, const LockSet &pls,
             std::vector<AccessRecord> &out) {
  if (s.kind != StmtKind::Block) {
    LockSet held = facts.in_avail[static_cast<std::size_t>(s.id + 2)].unite(pls);
    visit_accesses(s, [&](const Expr &place, AccessKind kind) {
      if (auto target = datum_of(place)) out.push_back({f.name, s.line, s.id, held, *target, kind});
    });
  }
  for (const auto &child : s.children) collect(f, child, facts, pls, out);
}

bool is_global_mutex(const LockPath &p, const Program &program) {
  if (p.size() != 1) return false;
  const GlobalDecl *g = program.find_global(p.root());
  return g && g->type.is_lock();
}

void find_inits(const Stmt &s, std::set<LockPath> &out) {
  for (const Expr *call : calls_in_order(s))
    if (call->name == kMutexInit) out.insert(lock_path_of(call->operands.at(0)));
  for (const auto &child : s.children) find_inits(child, out);
}

bool holds(const DataTarget &target, const std::string &candidate, const AccessRecord &a) {
  if (target.kind == DataTarget::Kind::Global) return a.held.contains(LockPath({candidate}));
  return !a.target.base.empty() && a.held.contains(a.target.base.child(candidate));
}

}  // namespace

std::vector<AccessRecord> collect_accesses(const Program &program, const FlowResult &flow,
                                           const FlowSummaries &summaries) {
  std::vector<AccessRecord> out;
  for (const FunctionDef *f : program.defined_functions()) {
    const LockSet &pls = summaries.find(f->name)->second.pls;
    collect(*f, f->body, flow.facts.find(f->name)->second, pls, out);
  }
  return out;
}

std::optional<std::string> candidate_lock(const DataTarget &target, const std::vector<AccessRecord> &accesses,
                                          const Program &program) {
  std::map<std::string, int> counts;
  if (target.kind == DataTarget::Kind::Global) {
    for (const auto &a : accesses)
      for (const auto &p : a.held.paths())
        if (is_global_mutex(p, program)) ++counts[p.root()];
  } else {
    const StructDef *sd = program.find_struct(target.name);
    if (!sd) return std::nullopt;
    for (const auto &field : sd->fields) {
      if (!field.type.is_lock()) continue;
      for (const auto &a : accesses)
        if (holds(target, field.name, a)) ++counts[field.name];
    }
  }
  std::optional<std::string> best;
  int best_count = 0;
  for (const auto &[name, n] : counts)
    if (n > best_count) {
      best = name;
      best_count = n;
    }
  return best;
}

ProtectionVerdict judge_protection(const DataTarget &target, const std::optional<std::string> &candidate,
                                   const std::vector<AccessRecord> &accesses, const Program &program,
                                   const CallGraph &cg) {
  ProtectionVerdict v;
  v.target = target;
  v.candidate = candidate;
  if (!candidate) {
    v.unsafe_accesses = accesses;
    return v;
  }
  std::set<std::string> concurrent = cg.reachable_from(cg.thread_entries);
  std::map<std::string, std::set<LockPath>> inits;
  bool safe_write = false;
  bool all_unsafe_sequential = true;
  for (const auto &a : accesses) {
    if (holds(target, *candidate, a)) {
      safe_write = safe_write || a.kind == AccessKind::Write;
      v.safe_accesses.push_back(a);
      continue;
    }
    v.unsafe_accesses.push_back(a);
    bool sequential = !concurrent.count(a.function);
    if (!sequential && target.kind == DataTarget::Kind::Field && !a.target.base.empty()) {
      auto it = inits.find(a.function);
      if (it == inits.end()) {
        it = inits.emplace(a.function, std::set<LockPath>{}).first;
        find_inits(program.find_function(a.function)->body, it->second);
      }
      sequential = it->second.count(a.target.base.child(*candidate)) > 0;
    }
    all_unsafe_sequential = all_unsafe_sequential && sequential;
  }
  v.protected_ = safe_write && all_unsafe_sequential;
  return v;
}

std::vector<ProtectionVerdict> identify_data_locks(const Program &program, const CallGraph &cg,
                                                   const std::vector<AccessRecord> &accesses) {
  std::map<std::string, std::pair<DataTarget, std::vector<AccessRecord>>> groups;
  for (const auto &a : accesses) {
    auto &group = groups[a.target.key()];
    if (group.second.empty()) group.first = DataTarget{a.target.kind, a.target.name, {}, a.target.field};
    group.second.push_back(a);
  }
  std::vector<ProtectionVerdict> out;
  for (const auto &[key, group] : groups) {
    auto candidate = candidate_lock(group.first, group.second, program);
    out.push_back(judge_protection(group.first, candidate, group.second, program, cg));
  }
  return out;
}

}  // namespace lockshift
