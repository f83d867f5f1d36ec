#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

#include "lockshift/frontend.hpp"

namespace lockshift {
namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

const std::set<std::string, std::less<>> kKeywords = {"int",  "struct", "void", "mutex_t", "thread_t",
                                                      "if",   "else",   "while", "return"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char *const kTwoChar[] = {"->", "==", "!=", "<=", "+=", "-=", "=>"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int start_line = line, start_col = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) throw SyntaxError(start_line, start_col, "unterminated comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range &) {
        throw SyntaxError(line, col, "integer literal out of range");
      }
      advance(j - i);
    } else {
      t.kind = Tok::Punct;
      for (const char *two : kTwoChar) {
        if (src.substr(i, 2) == two) {
          t.text = two;
          break;
        }
      }
      if (t.text.empty()) {
        if (std::string_view("{}();,=<>+-*&.:").find(c) == std::string_view::npos)
          throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 1;
    case BinaryOp::Lt:
    case BinaryOp::Le: return 2;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 3;
    case BinaryOp::Mul: return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Syntax

class Parser {
 public:
  Parser(std::string_view src, Dialect dialect) : tokens_(lex(src)), dialect_(dialect) {}

  Program parse_program() {
    Program p;
    while (peek().kind != Tok::End) parse_item(p);
    return p;
  }

 private:
  const Token &peek(std::size_t k = 0) const {
    std::size_t idx = pos_ + k;
    return idx < tokens_.size() ? tokens_[idx] : tokens_.back();
  }
  Token next() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool at_ident(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }
  bool accept(std::string_view p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string &what) const {
    const Token &t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.line, t.col, what + ", found " + found);
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  std::string expect_name() {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text)) fail("expected identifier");
    return next().text;
  }
  bool guarded() const { return dialect_ == Dialect::Guarded; }

  bool at_guarded_type(std::size_t k = 0) const {
    return guarded() && (at_ident("mutex", k) || at_ident("guard", k)) && at_punct("<", k + 1);
  }

  bool at_type_start() const {
    if (peek().kind == Tok::Ident) {
      const auto &w = peek().text;
      if (w == "int" || w == "void" || w == "mutex_t" || w == "thread_t" || w == "struct") return true;
    }
    return at_guarded_type();
  }

  Type parse_type() {
    Type t;
    if (guarded() && at_punct("(")) {
      next();
      std::vector<Type> elements{parse_type()};
      while (accept(",")) elements.push_back(parse_type());
      expect(")");
      if (elements.size() < 2) fail("tuple type needs at least two elements");
      t = Type::tuple(std::move(elements));
    } else if (at_guarded_type()) {
      bool is_guard = next().text == "guard";
      expect("<");
      std::string name = expect_name();
      if (is_guard) {
        while (accept(".")) name += "." + expect_name();
        t = Type::of(TypeKind::Guard, name);
      } else {
        t = Type::of(TypeKind::LockOwning, name);
      }
      expect(">");
    } else {
      if (peek().kind != Tok::Ident) fail("expected type");
      std::string w = next().text;
      if (w == "int") {
        t = Type::of(TypeKind::Int);
      } else if (w == "void") {
        t = Type::of(TypeKind::Void);
      } else if (w == "mutex_t") {
        t = Type::of(TypeKind::Mutex);
      } else if (w == "thread_t") {
        t = Type::of(TypeKind::Thread);
      } else if (w == "struct") {
        t = Type::of(TypeKind::Struct, expect_name());
      } else {
        --pos_;
        fail("expected type");
      }
    }
    while (accept("*")) ++t.pointers;
    return t;
  }

  void parse_item(Program &p) {
    int line = peek().line;
    if (at_ident("struct") && peek(1).kind == Tok::Ident && at_punct("{", 2)) {
      next();
      StructDef s;
      s.line = line;
      s.name = expect_name();
      expect("{");
      while (!accept("}")) {
        FieldDecl f;
        f.type = parse_type();
        f.name = expect_name();
        expect(";");
        s.fields.push_back(std::move(f));
      }
      expect(";");
      p.order.push_back({ItemKind::Struct, p.structs.size()});
      p.structs.push_back(std::move(s));
      return;
    }
    if (!at_type_start() && !(guarded() && at_punct("("))) fail("expected declaration");
    Type type = parse_type();
    std::string name = expect_name();
    if (accept("(")) {
      FunctionDef f;
      f.name = std::move(name);
      f.return_type = std::move(type);
      f.first_line = line;
      if (!accept(")")) {
        do {
          Param param;
          param.type = parse_type();
          param.name = expect_name();
          f.params.push_back(std::move(param));
        } while (accept(","));
        expect(")");
      }
      if (accept(";")) {
        f.has_body = false;
        f.last_line = line;
      } else {
        if (!at_punct("{")) fail("expected '{' or ';'");
        f.body = parse_block();
        f.last_line = f.body.end_line;
      }
      p.order.push_back({ItemKind::Function, p.functions.size()});
      p.functions.push_back(std::move(f));
      return;
    }
    GlobalDecl g;
    g.line = line;
    g.name = std::move(name);
    g.type = std::move(type);
    if (accept("=")) g.init = parse_expr(true);
    expect(";");
    p.order.push_back({ItemKind::Global, p.globals.size()});
    p.globals.push_back(std::move(g));
  }

  Stmt parse_block() {
    Stmt b;
    b.kind = StmtKind::Block;
    b.line = peek().line;
    expect("{");
    while (!at_punct("}")) {
      if (peek().kind == Tok::End) fail("expected '}'");
      b.children.push_back(parse_stmt());
    }
    b.end_line = peek().line;
    next();
    return b;
  }

  Stmt parse_stmt() {
    int line = peek().line;
    if (at_punct("{")) return parse_block();
    Stmt s;
    s.line = line;
    if (at_ident("if")) {
      next();
      s.kind = StmtKind::If;
      expect("(");
      s.value = parse_expr();
      expect(")");
      s.children.push_back(parse_stmt());
      if (at_ident("else")) {
        next();
        s.children.push_back(parse_stmt());
      }
      return s;
    }
    if (at_ident("while")) {
      next();
      s.kind = StmtKind::While;
      expect("(");
      s.value = parse_expr();
      expect(")");
      s.children.push_back(parse_stmt());
      return s;
    }
    if (at_ident("return")) {
      next();
      s.kind = StmtKind::Return;
      if (!at_punct(";")) s.value = parse_expr();
      expect(";");
      return s;
    }
    if (at_ident("else")) fail("'else' without 'if'");
    if (at_type_start()) {
      s.kind = StmtKind::Decl;
      s.decl_type = parse_type();
      s.name = expect_name();
      if (accept("=")) s.value = parse_expr();
      expect(";");
      return s;
    }
    Expr e = parse_expr();
    if (at_punct("=") || at_punct("+=") || at_punct("-=")) {
      std::string op = next().text;
      s.kind = StmtKind::Assign;
      s.assign_op = op == "=" ? AssignOp::Set : op == "+=" ? AssignOp::Add : AssignOp::Sub;
      s.target = std::move(e);
      s.value = parse_expr();
    } else {
      s.kind = StmtKind::ExprStmt;
      s.value = std::move(e);
    }
    expect(";");
    return s;
  }

  Expr parse_expr(bool allow_struct_lit = false) { return parse_binary(1, allow_struct_lit); }

  std::optional<BinaryOp> peek_binary() const {
    if (peek().kind != Tok::Punct) return std::nullopt;
    const auto &t = peek().text;
    if (t == "+") return BinaryOp::Add;
    if (t == "-") return BinaryOp::Sub;
    if (t == "*") return BinaryOp::Mul;
    if (t == "==") return BinaryOp::Eq;
    if (t == "!=") return BinaryOp::Ne;
    if (t == "<") return BinaryOp::Lt;
    if (t == "<=") return BinaryOp::Le;
    return std::nullopt;
  }

  Expr parse_binary(int min_prec, bool allow_struct_lit) {
    Expr lhs = parse_unary(allow_struct_lit);
    while (auto op = peek_binary()) {
      int prec = precedence(*op);
      if (prec < min_prec) break;
      next();
      Expr rhs = parse_binary(prec + 1, false);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_unary(bool allow_struct_lit) {
    if (accept("*")) return Expr::deref(parse_unary(false));
    if (accept("&")) {
      bool mut = false;
      if (at_ident("mut") &&
          (peek(1).kind == Tok::Ident || at_punct("(", 1) || at_punct("*", 1))) {
        next();
        mut = true;
      }
      return Expr::addr_of(parse_unary(false), mut);
    }
    if (at_punct("-") && peek(1).kind == Tok::Int) {
      next();
      return Expr::int_lit(-next().value);
    }
    return parse_postfix(parse_primary(allow_struct_lit));
  }

  Expr parse_primary(bool allow_struct_lit) {
    if (peek().kind == Tok::Int) return Expr::int_lit(next().value);
    if (accept("(")) {
      Expr first = parse_expr();
      if (guarded() && at_punct(",")) {
        Expr tuple;
        tuple.kind = ExprKind::Tuple;
        tuple.operands.push_back(std::move(first));
        while (accept(",")) tuple.operands.push_back(parse_expr());
        expect(")");
        return tuple;
      }
      expect(")");
      return first;
    }
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) {
      std::string name = next().text;
      if (accept("(")) {
        std::vector<Expr> args;
        if (!accept(")")) {
          do {
            args.push_back(parse_expr());
          } while (accept(","));
          expect(")");
        }
        return Expr::call(std::move(name), std::move(args));
      }
      if (guarded() && allow_struct_lit && at_punct("{")) {
        next();
        Expr lit;
        lit.kind = ExprKind::StructLit;
        lit.name = std::move(name);
        if (!accept("}")) {
          do {
            lit.labels.push_back(expect_name());
            expect(":");
            lit.operands.push_back(parse_expr());
          } while (accept(","));
          expect("}");
        }
        return lit;
      }
      return Expr::var(std::move(name));
    }
    fail("expected expression");
  }

  Expr parse_postfix(Expr e) {
    for (;;) {
      if (accept(".")) {
        std::string member = expect_name();
        if (guarded() && member == "acquire" && at_punct("(") && at_punct(")", 1)) {
          next();
          next();
          Expr acq;
          acq.kind = ExprKind::Acquire;
          acq.operands.push_back(std::move(e));
          e = std::move(acq);
          continue;
        }
        if (guarded() && member == "get_mut" && at_punct("(") && at_punct(")", 1)) {
          next();
          next();
          expect(".");
          Expr gm;
          gm.kind = ExprKind::GetMut;
          gm.member = expect_name();
          gm.operands.push_back(std::move(e));
          e = std::move(gm);
          continue;
        }
        e = Expr::field(std::move(e), std::move(member), false);
      } else if (accept("->")) {
        e = Expr::field(std::move(e), expect_name(), true);
      } else if (guarded() && e.kind == ExprKind::Call && e.labels.empty() && at_punct("=>")) {
        next();
        expect("(");
        do {
          e.labels.push_back(expect_name());
        } while (accept(","));
        expect(")");
      } else {
        return e;
      }
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Dialect dialect_;
};

// ---------------------------------------------------------------------------
// Name and type resolution

class Resolver {
 public:
  Resolver(Program &p, Dialect dialect) : p_(p), dialect_(dialect) {}

  void run() {
    for (const auto &s : p_.structs) {
      if (!struct_names_.insert(s.name).second) error<TypeError>(s.line, "duplicate struct '" + s.name + "'");
      std::set<std::string> fields;
      for (const auto &f : s.fields)
        if (!fields.insert(f.name).second)
          error<TypeError>(s.line, "duplicate field '" + f.name + "' in struct " + s.name);
    }
    for (const auto &s : p_.structs)
      for (const auto &f : s.fields) check_type(f.type, s.line);
    for (const auto &g : p_.globals) {
      if (!values_.insert(g.name).second) error<TypeError>(g.line, "duplicate name '" + g.name + "'");
      check_type(g.type, g.line);
      globals_.emplace(g.name, &g);
    }
    for (const auto &f : p_.functions) {
      if (!values_.insert(f.name).second) error<TypeError>(f.first_line, "duplicate name '" + f.name + "'");
      functions_.emplace(f.name, &f);
      if (f.name == "_") error<SyntaxError>(f.first_line, "'_' is not a valid name");
    }
    for (auto &g : p_.globals) {
      if (!g.init) continue;
      line_ = g.line;
      fn_ = nullptr;
      scopes_.clear();
      resolve_expr(*g.init, false);
    }
    for (auto &f : p_.functions) resolve_function(f);
  }

 private:
  template <typename E>
  [[noreturn]] void error(int line, const std::string &msg) const {
    throw E(line, 0, msg);
  }

  bool guarded() const { return dialect_ == Dialect::Guarded; }

  void check_type(const Type &t, int line) const {
    if (t.kind == TypeKind::Struct && !struct_names_.count(t.name))
      error<UnknownIdentifier>(line, "unknown struct '" + t.name + "'");
    if (t.kind == TypeKind::LockOwning && !struct_names_.count(t.name))
      error<UnknownIdentifier>(line, "unknown payload struct '" + t.name + "'");
    for (const auto &e : t.elements) check_type(e, line);
  }

  struct Binding {
    Type type;
    VarScope scope = VarScope::Unresolved;
  };

  std::optional<Binding> lookup(const std::string &name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return Binding{found->second, VarScope::Local};
    }
    if (fn_)
      if (const Param *param = fn_->find_param(name)) return Binding{param->type, VarScope::Param};
    if (const GlobalDecl *g = find_global(name)) return Binding{g->type, VarScope::Global};
    if (const FunctionDef *f = find_function(name)) return Binding{f->return_type, VarScope::Function};
    return std::nullopt;
  }

  void declare_local(const std::string &name, const Type &type) {
    if (name == "_") error<SyntaxError>(line_, "'_' is not a valid name");
    if (lookup(name)) error<TypeError>(line_, "'" + name + "' shadows an existing name");
    scopes_.back()[name] = type;
  }

  void resolve_function(FunctionDef &f) {
    fn_ = &f;
    line_ = f.first_line;
    check_type(f.return_type, f.first_line);
    std::set<std::string> seen;
    for (const auto &param : f.params) {
      check_type(param.type, f.first_line);
      if (param.name == "_") error<SyntaxError>(f.first_line, "'_' is not a valid name");
      if (!seen.insert(param.name).second)
        error<TypeError>(f.first_line, "duplicate parameter '" + param.name + "'");
      if (find_global(param.name) || find_function(param.name))
        error<TypeError>(f.first_line, "parameter '" + param.name + "' shadows a global name");
    }
    if (f.has_body) {
      scopes_.clear();
      resolve_stmt(f.body);
      number_statements(f);
    }
    fn_ = nullptr;
  }

  bool is_guard_var(const Expr &e) const {
    if (e.kind != ExprKind::Var) return false;
    auto b = lookup(e.name);
    return b && b->type.is_guard() && b->scope != VarScope::Function;
  }

  bool is_user_call(const Expr &e) const {
    if (e.kind != ExprKind::Call || is_lock_api(e.name) || e.name == kDrop) return false;
    return find_function(e.name) != nullptr;
  }

  // Rewrites guarded-dialect statement sugar into the dedicated forms.
  void normalize_guarded(Stmt &s) {
    if (s.kind == StmtKind::Assign && s.assign_op == AssignOp::Set) {
      Expr &target = *s.target;
      Expr &value = *s.value;
      if (target.kind == ExprKind::Tuple) {
        if (!is_user_call(value) || !value.labels.empty())
          error<SyntaxError>(s.line, "tuple destructuring needs a function call on the right");
        std::vector<std::string> names;
        for (const auto &el : target.operands) {
          if (el.kind != ExprKind::Var) error<SyntaxError>(s.line, "tuple destructuring binds plain names only");
          names.push_back(el.name);
        }
        Expr call = std::move(value);
        if (names[0] == "_" || is_guard_var(target.operands[0])) {
          call.returns_value = names[0] == "_";
          if (call.returns_value) names.erase(names.begin());
          call.labels = std::move(names);
          s.kind = StmtKind::ExprStmt;
          s.target.reset();
          s.value = std::move(call);
        } else {
          Expr first = std::move(target.operands[0]);
          names.erase(names.begin());
          call.returns_value = true;
          call.labels = std::move(names);
          s.target = std::move(first);
          s.value = std::move(call);
        }
        return;
      }
      if (is_guard_var(target) && value.kind == ExprKind::Acquire) {
        s.kind = StmtKind::Acquire;
        s.name = target.name;
        Expr lock = std::move(value.operands[0]);
        s.target = std::move(lock);
        s.value.reset();
        return;
      }
      if (is_guard_var(target) && is_user_call(value) && value.labels.empty()) {
        Expr call = std::move(value);
        call.labels = {target.name};
        s.kind = StmtKind::ExprStmt;
        s.target.reset();
        s.value = std::move(call);
        return;
      }
    }
    if (s.kind == StmtKind::ExprStmt && s.value->kind == ExprKind::Call && s.value->name == kDrop) {
      const Expr &call = *s.value;
      if (call.operands.size() != 1 || !is_guard_var(call.operands[0]))
        error<TypeError>(s.line, "drop takes exactly one guard variable");
      s.kind = StmtKind::Drop;
      s.name = call.operands[0].name;
      s.value.reset();
    }
  }

  void resolve_stmt(Stmt &s) {
    line_ = s.line;
    if (guarded()) normalize_guarded(s);
    switch (s.kind) {
      case StmtKind::Block: {
        scopes_.emplace_back();
        for (std::size_t i = 0; i < s.children.size(); ++i) {
          if (i > 0 && !can_complete_normally(s.children[i - 1]))
            error<SyntaxError>(s.children[i].line, "unreachable statement");
          resolve_stmt(s.children[i]);
        }
        scopes_.pop_back();
        break;
      }
      case StmtKind::If:
      case StmtKind::While:
        resolve_expr(*s.value, false);
        for (auto &child : s.children) {
          scopes_.emplace_back();
          resolve_stmt(child);
          scopes_.pop_back();
        }
        break;
      case StmtKind::Return:
        if (s.value) resolve_expr(*s.value, false, true);
        break;
      case StmtKind::Decl:
        check_type(s.decl_type, s.line);
        if (s.value) resolve_expr(*s.value, false);
        declare_local(s.name, s.decl_type);
        break;
      case StmtKind::Assign:
        resolve_expr(*s.value, false);
        resolve_expr(*s.target, false);
        if (!s.target->is_place()) error<TypeError>(s.line, "left-hand side of assignment is not a place");
        if (s.target->type.is_lock() || s.target->type.is_guard())
          error<TypeError>(s.line, "locks and guards cannot be assigned directly");
        break;
      case StmtKind::ExprStmt:
        resolve_expr(*s.value, true);
        break;
      case StmtKind::Acquire: {
        resolve_expr(*s.target, false);
        if (!s.target->type.is_lock()) error<TypeError>(s.line, "acquire() needs a lock");
        if (!lookup(s.name) || !lookup(s.name)->type.is_guard())
          error<UnknownIdentifier>(s.line, "unknown guard variable '" + s.name + "'");
        break;
      }
      case StmtKind::Drop:
        if (!lookup(s.name)) error<UnknownIdentifier>(s.line, "unknown guard variable '" + s.name + "'");
        break;
    }
  }

  // Type of a dotted lock path in the current scope, used for guard<...> payloads.
  std::optional<Type> path_type(const LockPath &path) const {
    auto b = lookup(path.root());
    if (!b || b->scope == VarScope::Function) return std::nullopt;
    Type t = b->type;
    for (std::size_t i = 1; i < path.size(); ++i) {
      auto sname = t.struct_name();
      if (!sname) return std::nullopt;
      const StructDef *sd = p_.find_struct(*sname);
      const FieldDecl *fd = sd ? sd->find(path.segments()[i]) : nullptr;
      if (!fd) return std::nullopt;
      t = fd->type;
    }
    return t;
  }

  Type payload_field_type(const Type &lock, const std::string &member) const {
    if (lock.kind != TypeKind::LockOwning) error<TypeError>(line_, "lock carries no protected data");
    const StructDef *payload = p_.find_struct(lock.name);
    const FieldDecl *fd = payload ? payload->find(member) : nullptr;
    if (!fd) error<UnknownIdentifier>(line_, "no protected field '" + member + "' in " + lock.name);
    return fd->type;
  }

  void check_lock_arg(const Expr &call, const Expr &arg) const {
    if (arg.kind != ExprKind::AddrOf || !arg.operands[0].is_place() || !arg.operands[0].type.is_lock())
      error<TypeError>(line_, std::string(call.name) + " expects the address of a lock place");
  }

  void resolve_call(Expr &e, bool statement_level) {
    for (std::size_t i = 0; i < e.operands.size(); ++i) {
      allow_function_ref_ = e.name == kThreadCreate && i == 1;
      resolve_expr(e.operands[i], false);
      allow_function_ref_ = false;
    }
    if (is_lock_api(e.name)) {
      if (!statement_level) error<TypeError>(line_, e.name + " must be called as a statement");
      if (!e.labels.empty()) error<TypeError>(line_, e.name + " returns no guards");
      if (e.name == kThreadCreate) {
        if (e.operands.size() != 2) error<TypeError>(line_, "pthread_create takes (&thread, function)");
        const Expr &t = e.operands[0];
        if (t.kind != ExprKind::AddrOf || t.operands[0].type.kind != TypeKind::Thread ||
            t.operands[0].type.pointers != 0)
          error<TypeError>(line_, "pthread_create expects the address of a thread_t place");
        const Expr &fn = e.operands[1];
        if (fn.kind != ExprKind::Var || fn.scope != VarScope::Function)
          error<TypeError>(line_, "pthread_create expects a function name");
      } else {
        if (e.operands.size() != 1) error<TypeError>(line_, e.name + " takes exactly one argument");
        check_lock_arg(e, e.operands[0]);
      }
      e.type = Type::of(TypeKind::Int);
      return;
    }
    if (guarded() && e.name == kDrop) error<TypeError>(line_, "drop must be called as a statement");
    const FunctionDef *callee = find_function(e.name);
    if (!callee) error<UnknownIdentifier>(line_, "unknown function '" + e.name + "'");
    if (callee->params.size() != e.operands.size())
      error<TypeError>(line_, "'" + e.name + "' expects " + std::to_string(callee->params.size()) +
                                  " argument(s), got " + std::to_string(e.operands.size()));
    for (const auto &label : e.labels) {
      auto b = lookup(label);
      if (!b || !b->type.is_guard()) error<UnknownIdentifier>(line_, "unknown guard variable '" + label + "'");
    }
    e.type = callee->return_type;
    if (e.type.kind == TypeKind::Tuple && e.returns_value) {
      Type first = e.type.elements.front();
      e.type = std::move(first);
    }
  }

  void resolve_expr(Expr &e, bool statement_level, bool allow_tuple = false) {
    switch (e.kind) {
      case ExprKind::IntLit: e.type = Type::of(TypeKind::Int); return;
      case ExprKind::Var: {
        auto b = lookup(e.name);
        if (!b) error<UnknownIdentifier>(line_, "unknown identifier '" + e.name + "'");
        if (b->scope == VarScope::Function && !allow_function_ref_)
          error<TypeError>(line_, "function '" + e.name + "' used as a value");
        e.scope = b->scope;
        e.type = b->type;
        return;
      }
      case ExprKind::Field: {
        Expr &base = e.operands[0];
        if (guarded() && !e.arrow && base.kind == ExprKind::Deref && is_guard_var(base.operands[0])) {
          std::string guard = base.operands[0].name;
          std::string member = e.member;
          auto lock_type = path_type(LockPath::parse(lookup(guard)->type.name));
          if (!lock_type) error<UnknownIdentifier>(line_, "cannot resolve lock of guard '" + guard + "'");
          e = Expr{};
          e.kind = ExprKind::GuardDeref;
          e.name = std::move(guard);
          e.member = std::move(member);
          e.type = payload_field_type(*lock_type, e.member);
          return;
        }
        resolve_expr(base, false);
        const Type &bt = base.type;
        if (bt.kind != TypeKind::Struct || bt.pointers != (e.arrow ? 1 : 0))
          error<TypeError>(line_, std::string("'") + (e.arrow ? "->" : ".") + e.member +
                                      "' applied to non-struct operand of type " + bt.str());
        const StructDef *sd = p_.find_struct(bt.name);
        const FieldDecl *fd = sd ? sd->find(e.member) : nullptr;
        if (!fd) error<UnknownIdentifier>(line_, "struct " + bt.name + " has no field '" + e.member + "'");
        e.type = fd->type;
        return;
      }
      case ExprKind::AddrOf:
        resolve_expr(e.operands[0], false);
        if (!e.operands[0].is_place()) error<TypeError>(line_, "'&' needs a place operand");
        e.type = e.operands[0].type.pointer_to();
        return;
      case ExprKind::Deref:
        resolve_expr(e.operands[0], false);
        if (e.operands[0].type.pointers == 0)
          error<TypeError>(line_, "cannot dereference a value of type " + e.operands[0].type.str());
        e.type = e.operands[0].type.pointee();
        return;
      case ExprKind::Binary:
        resolve_expr(e.operands[0], false);
        resolve_expr(e.operands[1], false);
        e.type = Type::of(TypeKind::Int);
        return;
      case ExprKind::Call: resolve_call(e, statement_level); return;
      case ExprKind::GuardDeref: {
        auto b = lookup(e.name);
        if (!b || !b->type.is_guard()) error<UnknownIdentifier>(line_, "unknown guard variable '" + e.name + "'");
        auto lock_type = path_type(LockPath::parse(b->type.name));
        if (!lock_type) error<UnknownIdentifier>(line_, "cannot resolve lock of guard '" + e.name + "'");
        e.type = payload_field_type(*lock_type, e.member);
        return;
      }
      case ExprKind::GetMut:
        resolve_expr(e.operands[0], false);
        e.type = payload_field_type(e.operands[0].type, e.member);
        return;
      case ExprKind::Acquire: error<SyntaxError>(line_, "acquire() may only be assigned to a guard variable");
      case ExprKind::Tuple:
        if (!allow_tuple) error<SyntaxError>(line_, "tuples may only be returned or destructured");
        for (auto &el : e.operands) resolve_expr(el, false);
        return;
      case ExprKind::StructLit: {
        const StructDef *sd = p_.find_struct(e.name);
        if (!sd) error<UnknownIdentifier>(line_, "unknown struct '" + e.name + "'");
        for (std::size_t i = 0; i < e.labels.size(); ++i) {
          if (!sd->find(e.labels[i]))
            error<UnknownIdentifier>(line_, "struct " + e.name + " has no field '" + e.labels[i] + "'");
          resolve_expr(e.operands[i], false);
        }
        e.type = Type::of(TypeKind::Struct, e.name);
        return;
      }
    }
  }

  Program &p_;
  Dialect dialect_;
  std::set<std::string> struct_names_;
  std::set<std::string> values_;
  std::unordered_map<std::string_view, const GlobalDecl *> globals_;
  std::unordered_map<std::string_view, const FunctionDef *> functions_;

  const GlobalDecl *find_global(std::string_view name) const {
    auto it = globals_.find(name);
    return it == globals_.end() ? nullptr : it->second;
  }
  const FunctionDef *find_function(std::string_view name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : it->second;
  }
  const FunctionDef *fn_ = nullptr;
  std::vector<std::map<std::string, Type>> scopes_;
  int line_ = 0;
  bool allow_function_ref_ = false;
};

}  // namespace

Program parse(std::string_view source, Dialect dialect) {
  Parser parser(source, dialect);
  Program program = parser.parse_program();
  Resolver(program, dialect).run();
  return program;
}

std::optional<LockPath> canonical_path(const Expr &expr) {
  switch (expr.kind) {
    case ExprKind::Var:
      if (expr.scope == VarScope::Function || expr.name == "_") return std::nullopt;
      return LockPath({expr.name});
    case ExprKind::Field: {
      auto base = canonical_path(expr.operands[0]);
      if (!base) return std::nullopt;
      return base->child(expr.member);
    }
    case ExprKind::Deref:
    case ExprKind::AddrOf: return canonical_path(expr.operands[0]);
    default: return std::nullopt;
  }
}

LockPath lock_path_of(const Expr &arg) {
  if (arg.kind != ExprKind::AddrOf) throw NotALockPlace("argument is not an address-of expression");
  const Expr &place = arg.operands[0];
  if (!place.type.is_lock()) throw NotALockPlace("operand of '&' is not lock-typed");
  auto path = canonical_path(place);
  if (!path) throw NotALockPlace("operand of '&' is not a place");
  return *path;
}

}  // namespace lockshift
