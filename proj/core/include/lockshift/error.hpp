#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lockshift {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &message) : std::runtime_error(message) {}
};

/// An error tied to a position in a source file.
class SourceError : public Error {
 public:
  SourceError(const std::string &kind, int line, int column, const std::string &message)
      : Error(kind + " at " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        kind_(kind), line_(line), column_(column), detail_(message) {}

  const std::string &kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string &detail() const { return detail_; }

 private:
  std::string kind_;
  int line_;
  int column_;
  std::string detail_;
};

class SyntaxError : public SourceError {
 public:
  SyntaxError(int line, int column, const std::string &message)
      : SourceError("SyntaxError", line, column, message) {}
};

class UnknownIdentifier : public SourceError {
 public:
  UnknownIdentifier(int line, int column, const std::string &message)
      : SourceError("UnknownIdentifier", line, column, message) {}
};

class TypeError : public SourceError {
 public:
  TypeError(int line, int column, const std::string &message)
      : SourceError("TypeError", line, column, message) {}
};

class NotALockPlace : public Error {
 public:
  explicit NotALockPlace(const std::string &message) : Error("NotALockPlace: " + message) {}
};

class IterationBudgetExceeded : public Error {
 public:
  IterationBudgetExceeded(const std::string &scc, int budget)
      : Error("IterationBudgetExceeded: no fixpoint for {" + scc + "} within " +
              std::to_string(budget) + " iterations (unbounded lock paths?)"),
        budget_(budget) {}
  int budget() const { return budget_; }

 private:
  int budget_;
};

/// Malformed or inconsistent lock summary. `path` is a JSON path such as
/// `$.function_map.foo.entry_lock[0]`.
class SchemaError : public Error {
 public:
  SchemaError(const std::string &path, const std::string &message)
      : Error("SchemaError at " + path + ": " + message), path_(path) {}
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

class SummaryMismatch : public Error {
 public:
  explicit SummaryMismatch(const std::string &message) : Error("SummaryMismatch: " + message) {}
};

enum class Severity { Note, Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Warning;
  std::string code;
  std::string function;
  int line = 0;
  std::string message;
};

/// Non-fatal findings accumulated across the analysis phases.
class Diagnostics {
 public:
  void add(Severity severity, std::string code, std::string function, int line, std::string message) {
    items_.push_back({severity, std::move(code), std::move(function), line, std::move(message)});
  }
  void warn(std::string code, std::string function, int line, std::string message) {
    add(Severity::Warning, std::move(code), std::move(function), line, std::move(message));
  }
  void note(std::string code, std::string function, int line, std::string message) {
    add(Severity::Note, std::move(code), std::move(function), line, std::move(message));
  }

  const std::vector<Diagnostic> &items() const { return items_; }
  bool empty() const { return items_.empty(); }
  std::size_t count(const std::string &code) const {
    std::size_t n = 0;
    for (const auto &d : items_) n += d.code == code;
    return n;
  }

 private:
  std::vector<Diagnostic> items_;
};

}  // namespace lockshift
