#pragma once

#include <set>
#include <string>
#include <vector>

#include "lockshift/ast.hpp"
#include "lockshift/datalock.hpp"
#include "lockshift/error.hpp"
#include "lockshift/summary.hpp"

namespace lockshift {

/// Functions that nobody can hand a guard to: `main` and every function
/// passed to pthread_create. They keep their signatures; guards they would
/// have received become ordinary uninitialized guard variables.
std::set<std::string> entry_points(const Program &program);

/// Rewrites a Mini-C program into the guarded dialect:
///   - data protected by a lock moves into a payload struct the lock owns;
///   - lock/unlock become `g = l.acquire();` / `drop(g);`;
///   - protected accesses become `(*g).f` where the lock is held and
///     `l.get_mut().f` elsewhere;
///   - entry_lock/return_lock become guard parameters and results, threaded
///     through every call site.
/// The result carries no resolved types; print it and re-parse it with
/// Dialect::Guarded before checking.
///
/// Throws SummaryMismatch when the summary names something the program lacks.
Program transform(const Program &program, const LockSummary &summary, Diagnostics *diags = nullptr);

/// Guarded-dialect text of a transformed program.
std::string print_guarded(const Program &guarded);

/// One read or write of a datum. `datum` is `n` for a global and
/// `base.field` for a struct field, in either dialect.
struct DatumAccess {
  std::string function;
  std::string datum;
  AccessKind kind = AccessKind::Read;
  int line = 0;

  auto operator<=>(const DatumAccess &) const = default;
};

/// Sorted accesses of a resolved program (Mini-C or guarded).
std::vector<DatumAccess> datum_accesses(const Program &program);

}  // namespace lockshift
