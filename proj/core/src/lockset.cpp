#include "lockshift/lockset.hpp"

#include <algorithm>
#include <iterator>

namespace lockshift {

LockSet LockSet::of(std::initializer_list<const char *> texts) {
  LockSet s;
  for (const char *t : texts) s.paths_.insert(LockPath::parse(t));
  return s;
}

LockSet LockSet::unite(const LockSet &other) const {
  if (top_ || other.top_) return top();
  LockSet out = *this;
  out.paths_.insert(other.paths_.begin(), other.paths_.end());
  return out;
}

LockSet LockSet::intersect(const LockSet &other) const {
  if (top_) return other;
  if (other.top_) return *this;
  LockSet out;
  std::set_intersection(paths_.begin(), paths_.end(), other.paths_.begin(), other.paths_.end(),
                        std::inserter(out.paths_, out.paths_.end()));
  return out;
}

LockSet LockSet::minus(const LockSet &other) const {
  if (other.top_) return {};
  if (top_) return top();
  LockSet out;
  std::set_difference(paths_.begin(), paths_.end(), other.paths_.begin(), other.paths_.end(),
                      std::inserter(out.paths_, out.paths_.end()));
  return out;
}

bool LockSet::subset_of(const LockSet &other) const {
  if (other.top_) return true;
  if (top_) return false;
  return std::includes(other.paths_.begin(), other.paths_.end(), paths_.begin(), paths_.end());
}

std::vector<std::string> LockSet::texts() const {
  if (top_) return {"⊤"};
  std::vector<std::string> out;
  for (const auto &p : paths_) out.push_back(p.str());
  return out;
}

std::string LockSet::str() const {
  if (top_) return "⊤";
  std::string out = "{";
  bool first = true;
  for (const auto &p : paths_) {
    if (!first) out += ", ";
    out += p.str();
    first = false;
  }
  return out + "}";
}

}  // namespace lockshift
