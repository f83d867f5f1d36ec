#include "lockshift/ast.hpp"

namespace lockshift {

bool is_lock_api(std::string_view name) {
  return name == kMutexLock || name == kMutexUnlock || name == kMutexInit || name == kThreadCreate;
}

std::optional<std::string> Type::struct_name() const {
  if (kind == TypeKind::Struct && pointers <= 1) return name;
  return std::nullopt;
}

Type Type::pointee() const {
  Type t = *this;
  if (t.pointers > 0) --t.pointers;
  return t;
}

Type Type::pointer_to() const {
  Type t = *this;
  ++t.pointers;
  return t;
}

std::string Type::str() const {
  std::string out;
  switch (kind) {
    case TypeKind::Int: out = "int"; break;
    case TypeKind::Void: out = "void"; break;
    case TypeKind::Mutex: out = "mutex_t"; break;
    case TypeKind::Thread: out = "thread_t"; break;
    case TypeKind::Struct: out = "struct " + name; break;
    case TypeKind::LockOwning: out = "mutex<" + name + ">"; break;
    case TypeKind::Guard: out = "guard<" + name + ">"; break;
    case TypeKind::Tuple:
      out = "(";
      for (std::size_t i = 0; i < elements.size(); ++i) {
        if (i) out += ", ";
        out += elements[i].str();
      }
      out += ")";
      break;
  }
  if (pointers > 0) {
    out += ' ';
    out.append(static_cast<std::size_t>(pointers), '*');
  }
  return out;
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
  }
  return "?";
}

Expr Expr::int_lit(std::int64_t value) {
  Expr e;
  e.kind = ExprKind::IntLit;
  e.value = value;
  e.type = Type::of(TypeKind::Int);
  return e;
}

Expr Expr::var(std::string name, VarScope scope) {
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  e.scope = scope;
  return e;
}

Expr Expr::field(Expr base, std::string member, bool arrow) {
  Expr e;
  e.kind = ExprKind::Field;
  e.member = std::move(member);
  e.arrow = arrow;
  e.operands.push_back(std::move(base));
  return e;
}

Expr Expr::addr_of(Expr place, bool mut) {
  Expr e;
  e.kind = ExprKind::AddrOf;
  e.mut = mut;
  e.type = place.type.pointer_to();
  e.operands.push_back(std::move(place));
  return e;
}

Expr Expr::deref(Expr pointer) {
  Expr e;
  e.kind = ExprKind::Deref;
  e.type = pointer.type.pointee();
  e.operands.push_back(std::move(pointer));
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.op = op;
  e.type = Type::of(TypeKind::Int);
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::call(std::string callee, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::Call;
  e.name = std::move(callee);
  e.operands = std::move(args);
  return e;
}

bool Expr::is_place() const {
  switch (kind) {
    case ExprKind::Var: return scope != VarScope::Function;
    case ExprKind::Field: return operands[0].kind == ExprKind::Deref || operands[0].is_place() || arrow;
    case ExprKind::Deref:
    case ExprKind::GuardDeref:
    case ExprKind::GetMut: return true;
    default: return false;
  }
}

const FieldDecl *StructDef::find(std::string_view field) const {
  for (const auto &f : fields)
    if (f.name == field) return &f;
  return nullptr;
}

std::vector<std::string> FunctionDef::param_names() const {
  std::vector<std::string> names;
  names.reserve(params.size());
  for (const auto &p : params) names.push_back(p.name);
  return names;
}

const Param *FunctionDef::find_param(std::string_view param) const {
  for (const auto &p : params)
    if (p.name == param) return &p;
  return nullptr;
}

const GlobalDecl *Program::find_global(std::string_view name) const {
  for (const auto &g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

const StructDef *Program::find_struct(std::string_view name) const {
  for (const auto &s : structs)
    if (s.name == name) return &s;
  return nullptr;
}

const FunctionDef *Program::find_function(std::string_view name) const {
  for (const auto &f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

FunctionIndex::FunctionIndex(const Program &program) {
  for (const auto &f : program.functions) by_name_.emplace(f.name, &f);
}

const FunctionDef *FunctionIndex::find(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::vector<const FunctionDef *> Program::defined_functions() const {
  std::vector<const FunctionDef *> out;
  for (const auto &f : functions)
    if (f.has_body) out.push_back(&f);
  return out;
}

namespace {

void number(Stmt &s, int &next) {
  if (s.kind == StmtKind::Block) {
    s.id = -1;
  } else {
    s.id = next++;
  }
  for (auto &child : s.children) number(child, next);
}

void collect_calls(const Expr &e, std::vector<const Expr *> &out) {
  for (const auto &operand : e.operands) collect_calls(operand, out);
  if (e.kind == ExprKind::Call) out.push_back(&e);
}

}  // namespace

std::vector<const Expr *> calls_in_order(const Stmt &stmt) {
  std::vector<const Expr *> out;
  if (stmt.value) collect_calls(*stmt.value, out);
  if (stmt.target) collect_calls(*stmt.target, out);
  return out;
}

int number_statements(FunctionDef &f) {
  int next = 0;
  number(f.body, next);
  return next;
}

int count_statements(const Stmt &stmt) {
  int n = stmt.kind == StmtKind::Block ? 0 : 1;
  for (const auto &child : stmt.children) n += count_statements(child);
  return n;
}

bool can_complete_normally(const Stmt &stmt) {
  switch (stmt.kind) {
    case StmtKind::Return: return false;
    case StmtKind::Block:
      for (const auto &child : stmt.children)
        if (!can_complete_normally(child)) return false;
      return true;
    case StmtKind::If:
      if (stmt.children.size() < 2) return true;
      return can_complete_normally(stmt.children[0]) || can_complete_normally(stmt.children[1]);
    default: return true;
  }
}

}  // namespace lockshift
