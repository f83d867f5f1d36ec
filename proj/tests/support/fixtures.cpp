#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lockshift::testing {

std::filesystem::path fixture_dir() { return LOCKSHIFT_FIXTURE_DIR; }

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> fixtures(const std::string &subdir, const std::string &ext) {
  std::vector<std::filesystem::path> out;
  for (const auto &entry : std::filesystem::directory_iterator(fixture_dir() / subdir))
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::filesystem::path> analyzable_fixtures() {
  std::vector<std::filesystem::path> out;
  for (const char *dir : {"corpus", "basics", "golden"})
    for (auto &p : fixtures(dir)) out.push_back(p);
  for (auto &p : fixtures("failures"))
    if (p.stem() != "recursive_nodes") out.push_back(p);
  return out;
}

Program load(const std::string &relative) {
  std::filesystem::path path = fixture_dir() / relative;
  return parse(read_text(path), path.extension() == ".gmc" ? Dialect::Guarded : Dialect::MiniC);
}

const FunctionDef &function(const Program &program, const std::string &name) {
  const FunctionDef *f = program.find_function(name);
  if (!f) throw std::runtime_error("no function " + name);
  return *f;
}

}  // namespace lockshift::testing
