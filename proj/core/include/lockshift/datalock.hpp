#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lockshift/ast.hpp"
#include "lockshift/callgraph.hpp"
#include "lockshift/flow_analysis.hpp"
#include "lockshift/lockset.hpp"
#include "lockshift/propagation.hpp"

namespace lockshift {

enum class AccessKind { Read, Write };

/// A datum that a lock may protect: a global variable, or field `field` of
/// struct type `struct_name` reached through `base`.
struct DataTarget {
  enum class Kind { Global, Field };
  Kind kind = Kind::Global;
  /// Global: variable name. Field: struct type name.
  std::string name;
  /// Field only: canonical path of the struct value; empty if not a place.
  LockPath base;
  std::string field;

  /// `n` for globals, `s::n` for fields; identifies the datum independent of base.
  std::string key() const { return kind == Kind::Global ? name : name + "::" + field; }
  bool operator==(const DataTarget &) const = default;
};

struct AccessRecord {
  std::string function;
  int line = 0;
  int stmt_id = -1;
  LockSet held;
  DataTarget target;
  AccessKind kind = AccessKind::Read;
};

/// Datum named by a place expression, if it is one: a non-lock global whose
/// type is not a struct value, or a non-lock, non-struct-valued field.
std::optional<DataTarget> datum_of(const Expr &place);

/// Calls `visit(place, kind)` for every datum access made by the statement's
/// own expressions, in evaluation order: places with a datum_of, and the
/// guarded forms `(*g).f` and `l.get_mut().f`. Lock-API calls are skipped.
void visit_accesses(const Stmt &s, const std::function<void(const Expr &, AccessKind)> &visit);

std::vector<AccessRecord> collect_accesses(const Program &program, const FlowResult &flow,
                                           const FlowSummaries &summaries);

/// Global targets: the global mutex most often held. Field targets: the
/// sibling lock field `l` with `base.l` most often held. Ties go to the
/// lexicographically least name. Returns the lock name (global) or field name.
std::optional<std::string> candidate_lock(const DataTarget &target, const std::vector<AccessRecord> &accesses,
                                          const Program &program);

struct ProtectionVerdict {
  DataTarget target;
  std::optional<std::string> candidate;
  bool protected_ = false;
  std::vector<AccessRecord> safe_accesses;
  std::vector<AccessRecord> unsafe_accesses;
};

/// `accesses` must all concern `target`'s datum.
ProtectionVerdict judge_protection(const DataTarget &target, const std::optional<std::string> &candidate,
                                   const std::vector<AccessRecord> &accesses, const Program &program,
                                   const CallGraph &cg);

/// One verdict per accessed datum, ordered by key.
std::vector<ProtectionVerdict> identify_data_locks(const Program &program, const CallGraph &cg,
                                                   const std::vector<AccessRecord> &accesses);

}  // namespace lockshift
