#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "lockshift/ast.hpp"
#include "lockshift/error.hpp"
#include "lockshift/lock_path.hpp"

namespace lockshift {

enum class Dialect {
  MiniC,    // `.mc` input programs
  Guarded,  // `.gmc` transformer output
};

/// Parses and resolves a whole program. Every statement carries the line its
/// first token appears on; statement ids are numbered per function.
///
/// Throws SyntaxError, UnknownIdentifier or TypeError.
Program parse(std::string_view source, Dialect dialect = Dialect::MiniC);

/// Renders a program so that each statement and top-level item lands on the
/// line recorded in the tree whenever the tree's lines are non-decreasing.
/// Works for both dialects.
std::string print_source(const Program &program);

/// Canonical lock path of a place expression: `&`, `*` and the `.`/`->`
/// distinction are stripped. Returns nothing for non-places.
std::optional<LockPath> canonical_path(const Expr &expr);

/// Lock path named by a lock-API argument such as `&mut (*b).m` (-> `b.m`).
/// Throws NotALockPlace unless `arg` takes the address of a lock-typed place.
LockPath lock_path_of(const Expr &arg);

}  // namespace lockshift
