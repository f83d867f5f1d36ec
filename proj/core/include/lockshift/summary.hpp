#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lockshift/ast.hpp"
#include "lockshift/datalock.hpp"
#include "lockshift/propagation.hpp"

namespace lockshift {

struct FunctionLockInfo {
  std::vector<std::string> entry_lock;
  std::vector<std::string> return_lock;
  std::map<std::string, std::vector<int>> lock_line;

  bool empty() const { return entry_lock.empty() && return_lock.empty() && lock_line.empty(); }
  bool operator==(const FunctionLockInfo &) const = default;
};

/// Whole-program lock summary: which lock protects which datum, and which
/// locks each function holds where.
struct LockSummary {
  /// Global variable → global lock.
  std::map<std::string, std::string> global_lock_map;
  /// Struct → (field → sibling lock field).
  std::map<std::string, std::map<std::string, std::string>> struct_lock_map;
  std::map<std::string, FunctionLockInfo> function_map;

  bool operator==(const LockSummary &) const = default;
};

/// Functions whose three entries are all empty are left out of function_map.
LockSummary build_summary(const std::vector<ProtectionVerdict> &verdicts, const FlowSummaries &flow);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string write_summary(const LockSummary &summary);

/// Missing maps default to empty; lock lists and line lists are sorted and
/// deduplicated. Throws SchemaError naming the offending JSON path.
LockSummary read_summary(std::string_view json);

/// Checks every name in the summary against the program. Throws SchemaError.
void validate_summary(const LockSummary &summary, const Program &program);

}  // namespace lockshift
