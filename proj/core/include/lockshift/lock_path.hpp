#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace lockshift {

/// Symbolic name of a lock: a root variable followed by struct field names.
/// `&mut (*a).m` and `&a->m` both name `a.m`.
///
/// Identifier characters all sort above '.', so segment-wise ordering agrees
/// with ordering by the dotted text.
class LockPath {
 public:
  LockPath() = default;
  explicit LockPath(std::vector<std::string> segments) : segments_(std::move(segments)) {}

  /// Splits dotted text (`x.m`). Empty segments are rejected by returning an empty path.
  static LockPath parse(std::string_view text);

  const std::vector<std::string> &segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }
  const std::string &root() const { return segments_.front(); }
  const std::string &last() const { return segments_.back(); }

  std::string str() const;

  LockPath child(const std::string &field) const;
  /// Path without its last segment.
  LockPath parent() const;
  bool has_prefix(const LockPath &prefix) const;
  /// `prefix` must satisfy has_prefix; returns `replacement` followed by the remaining segments.
  LockPath replace_prefix(const LockPath &prefix, const LockPath &replacement) const;

  auto operator<=>(const LockPath &) const = default;
  bool operator==(const LockPath &) const = default;

 private:
  std::vector<std::string> segments_;
};

/// Guard variable name for a lock: segments joined by `_`, plus `_guard`.
std::string guard_name(const LockPath &lock);

}  // namespace lockshift
