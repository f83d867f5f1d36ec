#pragma once

#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lockshift/lock_path.hpp"

namespace lockshift {

/// A finite set of lock paths, or Top: the set of every possible lock path.
///
/// Top is the must-analysis bottom for return lock sets while a recursive
/// component is being solved. Top ∩ S = S, Top − S = Top, S − Top = ∅.
class LockSet {
 public:
  LockSet() = default;
  LockSet(std::initializer_list<LockPath> paths) : paths_(paths) {}
  explicit LockSet(std::set<LockPath> paths) : paths_(std::move(paths)) {}

  static LockSet top() {
    LockSet s;
    s.top_ = true;
    return s;
  }
  /// Builds a set from dotted texts, e.g. of({"m", "x.m"}).
  static LockSet of(std::initializer_list<const char *> texts);

  bool is_top() const { return top_; }
  bool is_finite() const { return !top_; }
  /// Finite sets only.
  const std::set<LockPath> &paths() const { return paths_; }
  bool contains(const LockPath &p) const { return top_ || paths_.count(p) > 0; }
  bool empty() const { return !top_ && paths_.empty(); }
  std::size_t size() const { return paths_.size(); }

  void insert(LockPath p) {
    if (!top_) paths_.insert(std::move(p));
  }

  LockSet unite(const LockSet &other) const;
  LockSet intersect(const LockSet &other) const;
  LockSet minus(const LockSet &other) const;
  bool subset_of(const LockSet &other) const;

  /// Sorted dotted texts; Top renders as {"⊤"}.
  std::vector<std::string> texts() const;
  /// `{a, x.m}` or `⊤`.
  std::string str() const;

  bool operator==(const LockSet &) const = default;

 private:
  bool top_ = false;
  std::set<LockPath> paths_;
};

inline std::ostream &operator<<(std::ostream &os, const LockSet &s) { return os << s.str(); }

}  // namespace lockshift
