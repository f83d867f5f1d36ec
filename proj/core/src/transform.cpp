#include "lockshift/transform.hpp"

#include <algorithm>
#include <map>

#include "lockshift/callgraph.hpp"
#include "lockshift/flow_analysis.hpp"
#include "lockshift/frontend.hpp"

namespace lockshift {

std::set<std::string> entry_points(const Program &program) {
  std::set<std::string> out = build_call_graph(program).thread_entries;
  if (program.find_function("main")) out.insert("main");
  return out;
}

std::string print_guarded(const Program &guarded) { return print_source(guarded); }

namespace {

struct Signature {
  std::vector<LockPath> params;
  std::vector<LockPath> returns;
};

Type guard_type(const LockPath &p) { return Type::of(TypeKind::Guard, p.str()); }

Expr guard_var(const LockPath &p) { return Expr::var(guard_name(p), VarScope::Local); }

std::vector<LockPath> to_paths(const std::vector<std::string> &texts) {
  std::vector<LockPath> out;
  for (const auto &t : texts) out.push_back(LockPath::parse(t));
  std::sort(out.begin(), out.end());
  return out;
}

void collect_names(const Stmt &s, std::set<std::string> &out) {
  if (s.kind == StmtKind::Decl) out.insert(s.name);
  for (const auto &child : s.children) collect_names(child, out);
}

// Program-wide facts shared by every function rewrite.
struct Plan {
  const Program &program;
  const LockSummary &summary;
  Diagnostics *diags;
  /// Protected global → its lock.
  std::map<std::string, std::string> global_owner;
  /// Struct → protected field → lock field.
  std::map<std::string, std::map<std::string, std::string>> field_owner;
  std::map<std::string, Signature> signatures;
  std::set<std::string> entries;
  /// Globals and functions.
  std::set<std::string> top_level_names;
  std::map<std::string, const FunctionDef *, std::less<>> functions;

  const FunctionDef *function(std::string_view name) const {
    auto it = functions.find(name);
    return it == functions.end() ? nullptr : it->second;
  }

  const FunctionLockInfo *info(const std::string &f) const {
    auto it = summary.function_map.find(f);
    return it == summary.function_map.end() ? nullptr : &it->second;
  }
};

class FunctionRewriter {
 public:
  FunctionRewriter(const Plan &plan, FunctionDef &f) : plan_(plan), f_(f), info_(plan.info(f.name)) {
    for (const auto &p : f.params) taken_.insert(p.name);
    collect_names(f.body, taken_);
    params_ = f.param_names();
  }

  void run() {
    const Signature &sig = plan_.signatures.at(f_.name);
    std::set<LockPath> owned(sig.params.begin(), sig.params.end());
    for (const auto &p : sig.returns) used_.insert(p);

    std::vector<Stmt> body;
    rewrite_children(f_.body, body);
    f_.body.children = std::move(body);

    if (!sig.returns.empty() && can_complete_normally(f_.body)) {
      Stmt ret;
      ret.kind = StmtKind::Return;
      ret.line = f_.last_line;
      if (!f_.return_type.is_void()) ret.value = Expr::int_lit(0);
      add_guard_results(ret);
      f_.body.children.push_back(std::move(ret));
    }

    for (const auto &p : sig.params) f_.params.push_back({guard_name(p), guard_type(p)});
    if (!sig.returns.empty()) {
      std::vector<Type> elements;
      if (!f_.return_type.is_void()) elements.push_back(f_.return_type);
      for (const auto &p : sig.returns) elements.push_back(guard_type(p));
      f_.return_type = elements.size() == 1 ? elements.front() : Type::tuple(std::move(elements));
    }

    std::vector<Stmt> decls;
    for (const auto &p : used_) {
      if (owned.count(p)) continue;
      Stmt d;
      d.kind = StmtKind::Decl;
      d.line = f_.first_line;
      d.name = guard_name(p);
      d.decl_type = guard_type(p);
      decls.push_back(std::move(d));
    }
    f_.body.children.insert(f_.body.children.begin(), std::make_move_iterator(decls.begin()),
                            std::make_move_iterator(decls.end()));
  }

 private:
  bool held_at(const LockPath &lock, int line) const {
    if (!info_) return false;
    auto it = info_->lock_line.find(lock.str());
    return it != info_->lock_line.end() && std::binary_search(it->second.begin(), it->second.end(), line);
  }

  std::string fresh_name(const std::string &stem) {
    for (int i = 0;; ++i) {
      std::string name = stem + std::to_string(i);
      if (!plan_.top_level_names.count(name) && taken_.insert(name).second) return name;
    }
  }

  // Guard variable names the caller uses for a callee's guard slots.
  std::vector<std::string> guards_at_call(const std::vector<LockPath> &slots, const FunctionDef &callee,
                                          const std::vector<Expr> &args, int line) {
    std::vector<std::string> out;
    std::vector<std::string> params = callee.param_names();
    for (const auto &q : slots) {
      auto mine = alias(q, params, args);
      if (!mine) {
        if (plan_.diags)
          plan_.diags->warn("UnaliasableArgument", f_.name, line,
                            "guard for " + q.str() + " in call to `" + callee.name + "` has no caller-side name");
        mine = q;
      }
      used_.insert(*mine);
      out.push_back(guard_name(*mine));
    }
    return out;
  }

  // Adds guard arguments to a user call and binds its guard results.
  // Returns true when the call yields guards that must be bound by a statement.
  bool thread_call(Expr &call, int line) {
    const FunctionDef *callee = plan_.function(call.name);
    auto sig = plan_.signatures.find(call.name);
    if (!callee || sig == plan_.signatures.end()) return false;
    std::vector<Expr> original = call.operands;
    for (const auto &g : guards_at_call(sig->second.params, *callee, original, line))
      call.operands.push_back(Expr::var(g, VarScope::Local));
    call.labels = guards_at_call(sig->second.returns, *callee, original, line);
    call.returns_value = !call.labels.empty() && !callee->return_type.is_void();
    return !call.labels.empty();
  }

  // Replaces protected data accesses inside `e`. Calls returning guards that
  // are not bound directly by the statement are hoisted into `hoisted` when
  // given.
  void rewrite_expr(Expr &e, int line, std::vector<Stmt> *hoisted) {
    if (e.kind == ExprKind::Var && e.scope == VarScope::Global) {
      auto owner = plan_.global_owner.find(e.name);
      if (owner != plan_.global_owner.end()) {
        e = access(LockPath({owner->second}), Expr::var(owner->second, VarScope::Global), e.name, line);
        return;
      }
    }
    if (e.kind == ExprKind::Field) {
      if (auto sname = e.operands[0].type.struct_name()) {
        auto fields = plan_.field_owner.find(*sname);
        if (fields != plan_.field_owner.end()) {
          auto lock_field = fields->second.find(e.member);
          if (lock_field != fields->second.end()) {
            auto base = canonical_path(e.operands[0]);
            Expr base_expr = std::move(e.operands[0]);
            rewrite_expr(base_expr, line, hoisted);
            Expr lock_place = Expr::field(std::move(base_expr), lock_field->second, e.arrow);
            std::string member = e.member;
            if (base)
              e = access(base->child(lock_field->second), std::move(lock_place), member, line);
            else
              e = get_mut(std::move(lock_place), member);
            return;
          }
        }
      }
    }
    for (auto &operand : e.operands) rewrite_expr(operand, line, hoisted);
    if (e.kind == ExprKind::Call && !is_lock_api(e.name) && thread_call(e, line)) {
      if (!hoisted) {
        if (plan_.diags)
          plan_.diags->warn("UnboundGuardResult", f_.name, line,
                            "guards returned by `" + e.name + "` in a loop condition are not bound");
        e.labels.clear();
        e.returns_value = false;
        return;
      }
      const FunctionDef *callee = plan_.function(e.name);
      std::string tmp = fresh_name("ret");
      Stmt decl;
      decl.kind = StmtKind::Decl;
      decl.line = line;
      decl.name = tmp;
      decl.decl_type = callee->return_type;
      hoisted->push_back(std::move(decl));
      Stmt bind;
      bind.kind = StmtKind::Assign;
      bind.line = line;
      bind.target = Expr::var(tmp, VarScope::Local);
      bind.value = std::move(e);
      hoisted->push_back(std::move(bind));
      e = Expr::var(tmp, VarScope::Local);
    }
  }

  Expr get_mut(Expr lock_place, const std::string &member) {
    Expr out;
    out.kind = ExprKind::GetMut;
    out.member = member;
    out.operands.push_back(std::move(lock_place));
    return out;
  }

  Expr access(const LockPath &lock, Expr lock_place, const std::string &member, int line) {
    if (!held_at(lock, line)) return get_mut(std::move(lock_place), member);
    used_.insert(lock);
    Expr out;
    out.kind = ExprKind::GuardDeref;
    out.name = guard_name(lock);
    out.member = member;
    return out;
  }

  void add_guard_results(Stmt &ret) {
    const Signature &sig = plan_.signatures.at(f_.name);
    if (sig.returns.empty()) return;
    std::vector<Expr> items;
    if (ret.value) items.push_back(std::move(*ret.value));
    for (const auto &p : sig.returns) items.push_back(guard_var(p));
    if (items.size() == 1) {
      ret.value = std::move(items.front());
    } else {
      Expr tuple;
      tuple.kind = ExprKind::Tuple;
      tuple.operands = std::move(items);
      ret.value = std::move(tuple);
    }
  }

  bool is_user_call(const Expr &e) const {
    return e.kind == ExprKind::Call && !is_lock_api(e.name) && plan_.signatures.count(e.name);
  }

  // Rewrites a direct call so the enclosing statement binds its guards.
  void rewrite_direct_call(Expr &call, int line, std::vector<Stmt> &out) {
    for (auto &arg : call.operands) rewrite_expr(arg, line, &out);
    thread_call(call, line);
  }

  void rewrite_children(const Stmt &block, std::vector<Stmt> &out) {
    for (const auto &child : block.children) rewrite_stmt(child, out);
  }

  // A nested statement (if/while branch) must stay a single statement.
  Stmt rewrite_nested(const Stmt &s) {
    std::vector<Stmt> out;
    rewrite_stmt(s, out);
    if (out.size() == 1) return std::move(out.front());
    Stmt block;
    block.kind = StmtKind::Block;
    block.line = s.line;
    block.end_line = s.kind == StmtKind::Block ? s.end_line : s.line;
    block.children = std::move(out);
    return block;
  }

  void rewrite_stmt(Stmt s, std::vector<Stmt> &out) {
    switch (s.kind) {
      case StmtKind::Block: {
        std::vector<Stmt> children;
        rewrite_children(s, children);
        s.children = std::move(children);
        out.push_back(std::move(s));
        return;
      }
      case StmtKind::If:
        rewrite_expr(*s.value, s.line, &out);
        for (auto &child : s.children) child = rewrite_nested(child);
        out.push_back(std::move(s));
        return;
      case StmtKind::While:
        rewrite_expr(*s.value, s.line, nullptr);
        for (auto &child : s.children) child = rewrite_nested(child);
        out.push_back(std::move(s));
        return;
      case StmtKind::ExprStmt: {
        Expr &call = *s.value;
        if (call.kind == ExprKind::Call && (call.name == kMutexLock || call.name == kMutexUnlock)) {
          LockPath lock = lock_path_of(call.operands[0]);
          used_.insert(lock);
          Stmt r;
          r.line = s.line;
          r.name = guard_name(lock);
          if (call.name == kMutexLock) {
            r.kind = StmtKind::Acquire;
            r.target = std::move(call.operands[0].operands[0]);
            rewrite_expr(*r.target, s.line, &out);
          } else {
            r.kind = StmtKind::Drop;
          }
          out.push_back(std::move(r));
          return;
        }
        if (call.kind == ExprKind::Call && call.name == kMutexInit) return;
        if (is_user_call(call))
          rewrite_direct_call(call, s.line, out);
        else
          rewrite_expr(call, s.line, &out);
        out.push_back(std::move(s));
        return;
      }
      case StmtKind::Assign:
        if (s.assign_op == AssignOp::Set && is_user_call(*s.value))
          rewrite_direct_call(*s.value, s.line, out);
        else
          rewrite_expr(*s.value, s.line, &out);
        rewrite_expr(*s.target, s.line, &out);
        out.push_back(std::move(s));
        return;
      case StmtKind::Decl:
        if (s.value && is_user_call(*s.value)) {
          Expr call = std::move(*s.value);
          s.value.reset();
          rewrite_direct_call(call, s.line, out);
          if (!call.labels.empty()) {
            Stmt bind;
            bind.kind = StmtKind::Assign;
            bind.line = s.line;
            bind.target = Expr::var(s.name, VarScope::Local);
            bind.value = std::move(call);
            out.push_back(std::move(s));
            out.push_back(std::move(bind));
            return;
          }
          s.value = std::move(call);
        } else if (s.value) {
          rewrite_expr(*s.value, s.line, &out);
        }
        out.push_back(std::move(s));
        return;
      case StmtKind::Return:
        if (s.value) rewrite_expr(*s.value, s.line, &out);
        add_guard_results(s);
        out.push_back(std::move(s));
        return;
      default: out.push_back(std::move(s)); return;
    }
  }

  const Plan &plan_;
  FunctionDef &f_;
  const FunctionLockInfo *info_;
  std::vector<std::string> params_;
  std::set<std::string> taken_;
  std::set<LockPath> used_;
};

Plan make_plan(const Program &program, const LockSummary &summary, Diagnostics *diags) {
  Plan plan{program, summary, diags, {}, {}, {}, entry_points(program), {}, {}};
  for (const auto &g : program.globals) plan.top_level_names.insert(g.name);
  for (const auto &fn : program.functions) {
    plan.top_level_names.insert(fn.name);
    plan.functions.emplace(fn.name, &fn);
  }
  for (const auto &[global, lock] : summary.global_lock_map) plan.global_owner[global] = lock;
  for (const auto &[sname, fields] : summary.struct_lock_map)
    for (const auto &[field, lock] : fields) plan.field_owner[sname][field] = lock;
  for (const FunctionDef *f : program.defined_functions()) {
    Signature sig;
    if (!plan.entries.count(f->name))
      if (const FunctionLockInfo *info = plan.info(f->name)) {
        sig.params = to_paths(info->entry_lock);
        sig.returns = to_paths(info->return_lock);
      }
    plan.signatures[f->name] = std::move(sig);
  }
  return plan;
}

StructDef payload_struct(const std::string &name, int line) {
  StructDef sd;
  sd.name = name;
  sd.line = line;
  return sd;
}

}  // namespace

Program transform(const Program &program, const LockSummary &summary, Diagnostics *diags) {
  try {
    validate_summary(summary, program);
  } catch (const SchemaError &e) {
    throw SummaryMismatch(e.what());
  }
  Plan plan = make_plan(program, summary, diags);
  Program out;

  // Global pattern: lock → payload holding its protected globals.
  std::map<std::string, std::vector<const GlobalDecl *>> protected_by;
  for (const auto &g : program.globals) {
    auto owner = plan.global_owner.find(g.name);
    if (owner != plan.global_owner.end()) protected_by[owner->second].push_back(&g);
  }
  std::set<std::string> payload_emitted;

  auto emit_global_payload = [&](const std::string &lock, int line) {
    if (!payload_emitted.insert(lock).second) return;
    StructDef sd = payload_struct(lock + "Data", line);
    for (const GlobalDecl *g : protected_by[lock]) sd.fields.push_back({g->name, g->type});
    out.order.push_back({ItemKind::Struct, out.structs.size()});
    out.structs.push_back(std::move(sd));
  };

  for (const auto &item : program.order) {
    switch (item.kind) {
      case ItemKind::Global: {
        const GlobalDecl &g = program.globals[item.index];
        auto owner = plan.global_owner.find(g.name);
        if (owner != plan.global_owner.end()) {
          emit_global_payload(owner->second, g.line);
          break;
        }
        GlobalDecl copy = g;
        if (protected_by.count(g.name)) {
          emit_global_payload(g.name, g.line);
          copy.type = Type::of(TypeKind::LockOwning, g.name + "Data");
          Expr init;
          init.kind = ExprKind::StructLit;
          init.name = g.name + "Data";
          for (const GlobalDecl *d : protected_by[g.name]) {
            init.labels.push_back(d->name);
            init.operands.push_back(d->init ? *d->init : Expr::int_lit(0));
          }
          copy.init = std::move(init);
        }
        out.order.push_back({ItemKind::Global, out.globals.size()});
        out.globals.push_back(std::move(copy));
        break;
      }
      case ItemKind::Struct: {
        StructDef sd = program.structs[item.index];
        auto fields = plan.field_owner.find(sd.name);
        if (fields != plan.field_owner.end()) {
          std::vector<FieldDecl> kept;
          std::map<std::string, StructDef> payloads;
          for (const auto &fd : sd.fields) {
            auto lock = fields->second.find(fd.name);
            if (lock == fields->second.end()) {
              kept.push_back(fd);
              continue;
            }
            auto [it, fresh] = payloads.try_emplace(lock->second, payload_struct(sd.name + lock->second + "Data", sd.line));
            it->second.fields.push_back(fd);
          }
          for (auto &fd : kept)
            if (payloads.count(fd.name)) fd.type = Type::of(TypeKind::LockOwning, payloads.at(fd.name).name);
          sd.fields = std::move(kept);
          for (auto &[lock, payload] : payloads) {
            out.order.push_back({ItemKind::Struct, out.structs.size()});
            out.structs.push_back(std::move(payload));
          }
        }
        out.order.push_back({ItemKind::Struct, out.structs.size()});
        out.structs.push_back(std::move(sd));
        break;
      }
      case ItemKind::Function: {
        FunctionDef f = program.functions[item.index];
        if (f.has_body) {
          FunctionRewriter(plan, f).run();
          number_statements(f);
        }
        out.order.push_back({ItemKind::Function, out.functions.size()});
        out.functions.push_back(std::move(f));
        break;
      }
    }
  }
  return out;
}

namespace {

void guard_locks(const Stmt &s, std::map<std::string, LockPath> &out) {
  if (s.kind == StmtKind::Decl && s.decl_type.is_guard()) out[s.name] = LockPath::parse(s.decl_type.name);
  for (const auto &child : s.children) guard_locks(child, out);
}

std::string data_key(const LockPath &lock, const std::string &member) {
  if (lock.size() == 1) return member;
  return lock.parent().str() + "." + member;
}

void accesses_of(const FunctionDef &f, const Stmt &s, const std::map<std::string, LockPath> &guards,
                 std::vector<DatumAccess> &out) {
  visit_accesses(s, [&](const Expr &place, AccessKind kind) {
    std::string key;
    if (place.kind == ExprKind::GuardDeref) {
      auto it = guards.find(place.name);
      key = it == guards.end() ? "?." + place.member : data_key(it->second, place.member);
    } else if (place.kind == ExprKind::GetMut) {
      auto lock = canonical_path(place.operands[0]);
      key = lock ? data_key(*lock, place.member) : "?." + place.member;
    } else if (place.kind == ExprKind::Var) {
      key = place.name;
    } else {
      auto base = canonical_path(place.operands[0]);
      key = (base ? base->str() : std::string("?")) + "." + place.member;
    }
    out.push_back({f.name, std::move(key), kind, s.line});
  });
  for (const auto &child : s.children) accesses_of(f, child, guards, out);
}

}  // namespace

std::vector<DatumAccess> datum_accesses(const Program &program) {
  std::vector<DatumAccess> out;
  for (const FunctionDef *f : program.defined_functions()) {
    std::map<std::string, LockPath> guards;
    for (const auto &p : f->params)
      if (p.type.is_guard()) guards[p.name] = LockPath::parse(p.type.name);
    guard_locks(f->body, guards);
    accesses_of(*f, f->body, guards, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lockshift
