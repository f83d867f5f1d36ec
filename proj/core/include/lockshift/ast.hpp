#pragma once

// Abstract syntax shared by Mini-C input programs and the guarded dialect the
// transformer emits. Guarded-only forms are marked below; the Mini-C parser
// never produces them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lockshift {

inline constexpr std::string_view kMutexLock = "pthread_mutex_lock";
inline constexpr std::string_view kMutexUnlock = "pthread_mutex_unlock";
inline constexpr std::string_view kMutexInit = "pthread_mutex_init";
inline constexpr std::string_view kThreadCreate = "pthread_create";
inline constexpr std::string_view kDrop = "drop";

bool is_lock_api(std::string_view name);

enum class TypeKind {
  Int,
  Void,
  Mutex,       // mutex_t
  Thread,      // thread_t
  Struct,
  LockOwning,  // guarded: mutex<Payload>
  Guard,       // guarded: guard<lock.path>
  Tuple,       // guarded: (T, U, ...) as a return type
};

struct Type {
  TypeKind kind = TypeKind::Int;
  /// Struct name, payload struct name (LockOwning) or lock path text (Guard).
  std::string name;
  int pointers = 0;
  std::vector<Type> elements;

  static Type of(TypeKind kind, std::string name = {}) { return Type{kind, std::move(name), 0, {}}; }
  static Type tuple(std::vector<Type> elements) { return Type{TypeKind::Tuple, {}, 0, std::move(elements)}; }

  bool is_void() const { return kind == TypeKind::Void && pointers == 0; }
  bool is_lock() const { return pointers == 0 && (kind == TypeKind::Mutex || kind == TypeKind::LockOwning); }
  bool is_guard() const { return pointers == 0 && kind == TypeKind::Guard; }
  /// Struct name when this is a struct value or a pointer to one.
  std::optional<std::string> struct_name() const;
  Type pointee() const;
  Type pointer_to() const;
  std::string str() const;

  bool operator==(const Type &) const = default;
};

enum class VarScope { Unresolved, Global, Param, Local, Function };

enum class BinaryOp { Add, Sub, Mul, Eq, Ne, Lt, Le };
std::string_view to_string(BinaryOp op);

enum class ExprKind {
  IntLit,
  Var,
  Field,       // operands[0] is the base; `arrow` when spelled `->`
  AddrOf,      // `&p` or `&mut p`
  Deref,
  Binary,
  Call,        // name is the callee; operands are the arguments
  GuardDeref,  // guarded: (*name).member
  GetMut,      // guarded: operands[0].get_mut().member
  Tuple,       // guarded
  StructLit,   // guarded: name { labels[i]: operands[i], ... }
  Acquire,     // guarded, transient: operands[0].acquire(); only valid as `g = lock.acquire();`
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  std::int64_t value = 0;
  std::string name;
  std::string member;
  BinaryOp op = BinaryOp::Add;
  bool arrow = false;
  bool mut = false;
  VarScope scope = VarScope::Unresolved;
  std::vector<Expr> operands;
  /// Call: guard variables bound from the callee's guard results. StructLit: field names.
  std::vector<std::string> labels;
  /// Call with guard results: the callee also yields an ordinary value.
  bool returns_value = false;
  Type type;

  static Expr int_lit(std::int64_t value);
  static Expr var(std::string name, VarScope scope = VarScope::Unresolved);
  static Expr field(Expr base, std::string member, bool arrow);
  static Expr addr_of(Expr place, bool mut = false);
  static Expr deref(Expr pointer);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(std::string callee, std::vector<Expr> args);

  bool is_place() const;

  bool operator==(const Expr &) const = default;
};

enum class StmtKind {
  Assign,
  ExprStmt,
  If,
  While,
  Return,
  Block,
  Decl,     // local variable declaration; guard variables in the guarded dialect
  Acquire,  // guarded: name = target.acquire();
  Drop,     // guarded: drop(name);
};

enum class AssignOp { Set, Add, Sub };

struct Stmt {
  StmtKind kind = StmtKind::Block;
  int line = 0;
  /// Block: line of the closing brace.
  int end_line = 0;
  /// Pre-order index among the non-Block statements of the function; -1 for blocks.
  int id = -1;
  AssignOp assign_op = AssignOp::Set;
  /// Assign: the place written. Acquire: the lock place.
  std::optional<Expr> target;
  /// Assign: right-hand side. ExprStmt: the expression. If/While: condition.
  /// Return: optional result. Decl: optional initializer.
  std::optional<Expr> value;
  /// Block: statements. If: {then, else?}. While: {body}.
  std::vector<Stmt> children;
  /// Decl: variable name. Acquire/Drop: guard variable.
  std::string name;
  Type decl_type;

  bool operator==(const Stmt &) const = default;
};

struct GlobalDecl {
  std::string name;
  Type type;
  std::optional<Expr> init;
  int line = 0;
  bool operator==(const GlobalDecl &) const = default;
};

struct FieldDecl {
  std::string name;
  Type type;
  bool operator==(const FieldDecl &) const = default;
};

struct StructDef {
  std::string name;
  std::vector<FieldDecl> fields;
  int line = 0;

  const FieldDecl *find(std::string_view field) const;
  bool operator==(const StructDef &) const = default;
};

struct Param {
  std::string name;
  Type type;
  bool operator==(const Param &) const = default;
};

struct FunctionDef {
  std::string name;
  Type return_type;
  std::vector<Param> params;
  /// False for prototypes of external (library) functions.
  bool has_body = true;
  Stmt body;
  int first_line = 0;
  int last_line = 0;

  std::vector<std::string> param_names() const;
  const Param *find_param(std::string_view param) const;
  bool operator==(const FunctionDef &) const = default;
};

enum class ItemKind { Global, Struct, Function };

struct ItemRef {
  ItemKind kind = ItemKind::Global;
  std::size_t index = 0;
  bool operator==(const ItemRef &) const = default;
};

struct Program {
  std::vector<GlobalDecl> globals;
  std::vector<StructDef> structs;
  std::vector<FunctionDef> functions;
  /// Source order of the top-level items across the three lists.
  std::vector<ItemRef> order;

  const GlobalDecl *find_global(std::string_view name) const;
  const StructDef *find_struct(std::string_view name) const;
  const FunctionDef *find_function(std::string_view name) const;
  /// Functions with bodies, in declaration order.
  std::vector<const FunctionDef *> defined_functions() const;

  bool operator==(const Program &) const = default;
};

/// Constant-time function lookup by name. Valid while the program's function
/// list is not modified.
class FunctionIndex {
 public:
  explicit FunctionIndex(const Program &program);
  const FunctionDef *find(std::string_view name) const;

 private:
  std::unordered_map<std::string_view, const FunctionDef *> by_name_;
};

/// Assigns pre-order ids to the non-Block statements of `f` and returns their count.
int number_statements(FunctionDef &f);

/// Number of non-Block statements in a statement tree.
int count_statements(const Stmt &stmt);

/// Calls made by a statement's own expressions (not its child statements),
/// in evaluation order: arguments before the call, left to right, and for an
/// assignment the right-hand side before the target.
std::vector<const Expr *> calls_in_order(const Stmt &stmt);

/// Whether control can reach the end of `stmt` (only `return` cannot complete).
bool can_complete_normally(const Stmt &stmt);

}  // namespace lockshift
