#pragma once

#include <string>
#include <vector>

#include "lockshift/ast.hpp"

namespace lockshift {

enum class OwnState { Uninit, Owned, Moved, Conflict };

enum class OwnershipErrorKind { UseOfUninit, UseAfterMove, ConflictingPaths };

std::string_view to_string(OwnershipErrorKind kind);

struct OwnershipError {
  OwnershipErrorKind kind = OwnershipErrorKind::UseOfUninit;
  std::string function;
  int line = 0;
  std::string guard;

  std::string message() const;
  auto operator<=>(const OwnershipError &) const = default;
};

/// Path-insensitive ownership check of every guard variable in a resolved
/// guarded-dialect program. Guard parameters start owned; declarations start
/// uninitialized; `acquire` and call results make a guard owned; dropping,
/// passing or returning it moves it. Joins of different states conflict.
/// An empty result means the program is accepted.
std::vector<OwnershipError> check(const Program &guarded);

}  // namespace lockshift
