#include "lockshift/lock_path.hpp"

#include <algorithm>

namespace lockshift {

LockPath LockPath::parse(std::string_view text) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t dot = text.find('.', start);
    if (dot == std::string_view::npos) dot = text.size();
    if (dot == start) return {};
    segments.emplace_back(text.substr(start, dot - start));
    start = dot + 1;
  }
  return LockPath(std::move(segments));
}

std::string LockPath::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '.';
    out += segments_[i];
  }
  return out;
}

LockPath LockPath::child(const std::string &field) const {
  auto segments = segments_;
  segments.push_back(field);
  return LockPath(std::move(segments));
}

LockPath LockPath::parent() const {
  auto segments = segments_;
  if (!segments.empty()) segments.pop_back();
  return LockPath(std::move(segments));
}

bool LockPath::has_prefix(const LockPath &prefix) const {
  if (prefix.size() > size()) return false;
  return std::equal(prefix.segments_.begin(), prefix.segments_.end(), segments_.begin());
}

LockPath LockPath::replace_prefix(const LockPath &prefix, const LockPath &replacement) const {
  auto segments = replacement.segments_;
  segments.insert(segments.end(), segments_.begin() + static_cast<std::ptrdiff_t>(prefix.size()),
                  segments_.end());
  return LockPath(std::move(segments));
}

std::string guard_name(const LockPath &lock) {
  std::string out;
  for (std::size_t i = 0; i < lock.size(); ++i) {
    if (i) out += '_';
    out += lock.segments()[i];
  }
  return out + "_guard";
}

}  // namespace lockshift
