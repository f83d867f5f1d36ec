#include "lockshift/frontend.hpp"

namespace lockshift {
namespace {

constexpr int kUnaryPrec = 5;
constexpr int kPostfixPrec = 6;

int binary_prec(BinaryOp op) {
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

int expr_prec(const Expr &e) {
  switch (e.kind) {
    case ExprKind::Binary: return binary_prec(e.op);
    case ExprKind::Deref:
    case ExprKind::AddrOf: return kUnaryPrec;
    case ExprKind::IntLit: return e.value < 0 ? kUnaryPrec : kPostfixPrec;
    default: return kPostfixPrec;
  }
}

std::string declarator(const Type &type, const std::string &name) {
  std::string t = type.str();
  return type.pointers > 0 ? t + name : t + " " + name;
}

void print_expr(std::string &out, const Expr &e, int min_prec = 0);

void print_list(std::string &out, const std::vector<Expr> &items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    print_expr(out, items[i]);
  }
}

void print_names(std::string &out, const std::vector<std::string> &names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
}

void print_call(std::string &out, const Expr &e, bool with_labels) {
  out += e.name;
  out += '(';
  print_list(out, e.operands);
  out += ')';
  if (with_labels && !e.labels.empty()) {
    out += " => (";
    print_names(out, e.labels);
    out += ')';
  }
}

void print_expr(std::string &out, const Expr &e, int min_prec) {
  bool parens = expr_prec(e) < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::IntLit: out += std::to_string(e.value); break;
    case ExprKind::Var: out += e.name; break;
    case ExprKind::Field:
      print_expr(out, e.operands[0], kPostfixPrec);
      out += e.arrow ? "->" : ".";
      out += e.member;
      break;
    case ExprKind::AddrOf:
      out += e.mut ? "&mut " : "&";
      print_expr(out, e.operands[0], kUnaryPrec);
      break;
    case ExprKind::Deref:
      out += '*';
      print_expr(out, e.operands[0], kUnaryPrec);
      break;
    case ExprKind::Binary: {
      int prec = binary_prec(e.op);
      print_expr(out, e.operands[0], prec);
      out += ' ';
      out += to_string(e.op);
      out += ' ';
      print_expr(out, e.operands[1], prec + 1);
      break;
    }
    case ExprKind::Call: print_call(out, e, true); break;
    case ExprKind::GuardDeref:
      out += "(*" + e.name + ")." + e.member;
      break;
    case ExprKind::GetMut:
      print_expr(out, e.operands[0], kPostfixPrec);
      out += ".get_mut()." + e.member;
      break;
    case ExprKind::Acquire:
      print_expr(out, e.operands[0], kPostfixPrec);
      out += ".acquire()";
      break;
    case ExprKind::Tuple:
      out += '(';
      print_list(out, e.operands);
      out += ')';
      break;
    case ExprKind::StructLit:
      out += e.name + " {";
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        out += i ? ", " : " ";
        out += e.labels[i] + ": ";
        print_expr(out, e.operands[i]);
      }
      out += e.operands.empty() ? "}" : " }";
      break;
  }
  if (parens) out += ')';
}

// Places each fragment on its recorded line, padding with newlines while the
// output is behind and continuing on the current line otherwise. Line 0 means
// "no recorded line" and always starts a new one.
class Writer {
 public:
  void at(int line) {
    if (out_.empty() && line <= 1) {
      line_start_ = true;
    } else if (line <= 0) {
      newline();
    } else {
      while (line_ < line) newline();
    }
    if (line_start_) {
      out_.append(static_cast<std::size_t>(depth_) * 4, ' ');
      line_start_ = false;
    } else {
      out_ += ' ';
    }
  }
  std::string &text() { return out_; }
  void indent() { ++depth_; }
  void dedent() { --depth_; }
  std::string finish() {
    if (!out_.empty() && out_.back() != '\n') out_ += '\n';
    return std::move(out_);
  }

 private:
  void newline() {
    out_ += '\n';
    ++line_;
    line_start_ = true;
  }

  std::string out_;
  int line_ = 1;
  int depth_ = 0;
  bool line_start_ = true;
};

void print_stmt(Writer &w, const Stmt &s);

void print_block(Writer &w, const Stmt &b) {
  w.at(b.line);
  w.text() += '{';
  w.indent();
  for (const auto &child : b.children) print_stmt(w, child);
  w.dedent();
  w.at(b.end_line);
  w.text() += '}';
}

void print_destructure(std::string &out, const std::optional<Expr> &place, const Expr &call) {
  std::vector<std::string> names;
  if (place) {
    std::string p;
    print_expr(p, *place);
    names.push_back(std::move(p));
  } else if (call.returns_value) {
    names.emplace_back("_");
  }
  names.insert(names.end(), call.labels.begin(), call.labels.end());
  if (names.size() == 1) {
    out += names[0];
  } else {
    out += '(';
    print_names(out, names);
    out += ')';
  }
  out += " = ";
  print_call(out, call, false);
}

void print_stmt(Writer &w, const Stmt &s) {
  if (s.kind == StmtKind::Block) {
    print_block(w, s);
    return;
  }
  w.at(s.line);
  std::string &out = w.text();
  switch (s.kind) {
    case StmtKind::Block: break;
    case StmtKind::If:
      out += "if (";
      print_expr(out, *s.value);
      out += ')';
      print_stmt(w, s.children[0]);
      if (s.children.size() > 1) {
        w.text() += " else";
        print_stmt(w, s.children[1]);
      }
      return;
    case StmtKind::While:
      out += "while (";
      print_expr(out, *s.value);
      out += ')';
      print_stmt(w, s.children[0]);
      return;
    case StmtKind::Return:
      out += "return";
      if (s.value) {
        out += ' ';
        print_expr(out, *s.value);
      }
      break;
    case StmtKind::Decl:
      out += declarator(s.decl_type, s.name);
      if (s.value) {
        out += " = ";
        print_expr(out, *s.value);
      }
      break;
    case StmtKind::Assign:
      if (s.assign_op == AssignOp::Set && s.value->kind == ExprKind::Call && !s.value->labels.empty()) {
        print_destructure(out, s.target, *s.value);
        break;
      }
      print_expr(out, *s.target);
      out += s.assign_op == AssignOp::Set ? " = " : s.assign_op == AssignOp::Add ? " += " : " -= ";
      print_expr(out, *s.value);
      break;
    case StmtKind::ExprStmt:
      if (s.value->kind == ExprKind::Call && !s.value->labels.empty()) {
        print_destructure(out, std::nullopt, *s.value);
      } else {
        print_expr(out, *s.value);
      }
      break;
    case StmtKind::Acquire:
      out += s.name + " = ";
      print_expr(out, *s.target, kPostfixPrec);
      out += ".acquire()";
      break;
    case StmtKind::Drop: out += "drop(" + s.name + ")"; break;
  }
  out += ';';
}

}  // namespace

std::string print_source(const Program &program) {
  Writer w;
  for (const auto &item : program.order) {
    switch (item.kind) {
      case ItemKind::Global: {
        const auto &g = program.globals[item.index];
        w.at(g.line);
        w.text() += declarator(g.type, g.name);
        if (g.init) {
          w.text() += " = ";
          print_expr(w.text(), *g.init);
        }
        w.text() += ';';
        break;
      }
      case ItemKind::Struct: {
        const auto &s = program.structs[item.index];
        w.at(s.line);
        w.text() += "struct " + s.name + " {";
        for (const auto &f : s.fields) w.text() += " " + declarator(f.type, f.name) + ";";
        w.text() += s.fields.empty() ? "};" : " };";
        break;
      }
      case ItemKind::Function: {
        const auto &f = program.functions[item.index];
        w.at(f.first_line);
        std::string header = declarator(f.return_type, f.name) + "(";
        for (std::size_t i = 0; i < f.params.size(); ++i) {
          if (i) header += ", ";
          header += declarator(f.params[i].type, f.params[i].name);
        }
        header += ')';
        w.text() += header;
        if (!f.has_body) {
          w.text() += ';';
        } else {
          print_block(w, f.body);
        }
        break;
      }
    }
  }
  return w.finish();
}

}  // namespace lockshift
