#include "lockshift/summary.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "lockshift/error.hpp"

namespace lockshift {

using nlohmann::json;

LockSummary build_summary(const std::vector<ProtectionVerdict> &verdicts, const FlowSummaries &flow) {
  LockSummary s;
  for (const auto &v : verdicts) {
    if (!v.protected_) continue;
    if (v.target.kind == DataTarget::Kind::Global)
      s.global_lock_map[v.target.name] = *v.candidate;
    else
      s.struct_lock_map[v.target.name][v.target.field] = *v.candidate;
  }
  for (const auto &[name, fs] : flow) {
    FunctionLockInfo info;
    info.entry_lock = fs.els.texts();
    info.return_lock = fs.rls.texts();
    for (const auto &[lock, lines] : fs.lock_line) info.lock_line[lock.str()] = lines;
    if (!info.empty()) s.function_map[name] = std::move(info);
  }
  return s;
}

std::string write_summary(const LockSummary &summary) {
  json functions = json::object();
  for (const auto &[name, info] : summary.function_map) {
    json lines = json::object();
    for (const auto &[lock, ls] : info.lock_line) lines[lock] = ls;
    functions[name] = {{"entry_lock", info.entry_lock}, {"return_lock", info.return_lock}, {"lock_line", lines}};
  }
  json structs = json::object();
  for (const auto &[name, fields] : summary.struct_lock_map) structs[name] = fields;
  json root = {{"global_lock_map", json(summary.global_lock_map)},
               {"struct_lock_map", structs},
               {"function_map", functions}};
  return root.dump(2) + "\n";
}

namespace {

const json &expect_object(const json &j, const std::string &path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  return j;
}

std::string expect_string(const json &j, const std::string &path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  std::string s = j.get<std::string>();
  if (s.empty()) throw SchemaError(path, "empty name");
  return s;
}

void reject_unknown(const json &j, const std::string &path, std::initializer_list<std::string_view> allowed) {
  for (const auto &[key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SchemaError(path + "." + key, "unknown key");
}

std::vector<std::string> read_locks(const json &j, const std::string &path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of lock paths");
  std::set<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string text = expect_string(j[i], path + "[" + std::to_string(i) + "]");
    if (LockPath::parse(text).empty()) throw SchemaError(path + "[" + std::to_string(i) + "]", "malformed lock path");
    out.insert(std::move(text));
  }
  return {out.begin(), out.end()};
}

}  // namespace

LockSummary read_summary(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw SchemaError("$", e.what());
  }
  expect_object(root, "$");
  reject_unknown(root, "$", {"global_lock_map", "struct_lock_map", "function_map"});
  LockSummary s;
  if (root.contains("global_lock_map")) {
    const std::string base = "$.global_lock_map";
    for (const auto &[name, lock] : expect_object(root["global_lock_map"], base).items())
      s.global_lock_map[name] = expect_string(lock, base + "." + name);
  }
  if (root.contains("struct_lock_map")) {
    const std::string base = "$.struct_lock_map";
    for (const auto &[name, fields] : expect_object(root["struct_lock_map"], base).items()) {
      auto &entry = s.struct_lock_map[name];
      for (const auto &[field, lock] : expect_object(fields, base + "." + name).items())
        entry[field] = expect_string(lock, base + "." + name + "." + field);
    }
  }
  if (root.contains("function_map")) {
    const std::string base = "$.function_map";
    for (const auto &[name, fj] : expect_object(root["function_map"], base).items()) {
      const std::string fpath = base + "." + name;
      expect_object(fj, fpath);
      reject_unknown(fj, fpath, {"entry_lock", "return_lock", "lock_line"});
      FunctionLockInfo info;
      if (fj.contains("entry_lock")) info.entry_lock = read_locks(fj["entry_lock"], fpath + ".entry_lock");
      if (fj.contains("return_lock")) info.return_lock = read_locks(fj["return_lock"], fpath + ".return_lock");
      if (fj.contains("lock_line")) {
        for (const auto &[lock, lines] : expect_object(fj["lock_line"], fpath + ".lock_line").items()) {
          const std::string lpath = fpath + ".lock_line." + lock;
          if (LockPath::parse(lock).empty()) throw SchemaError(lpath, "malformed lock path");
          if (!lines.is_array()) throw SchemaError(lpath, "expected an array of line numbers");
          std::set<int> ls;
          for (std::size_t i = 0; i < lines.size(); ++i) {
            if (!lines[i].is_number_integer() || lines[i].get<long long>() < 1)
              throw SchemaError(lpath + "[" + std::to_string(i) + "]", "expected a positive line number");
            ls.insert(lines[i].get<int>());
          }
          info.lock_line[lock] = {ls.begin(), ls.end()};
        }
      }
      s.function_map[name] = std::move(info);
    }
  }
  return s;
}

namespace {

void collect_locals(const Stmt &s, std::map<std::string, Type> &out) {
  if (s.kind == StmtKind::Decl) out.emplace(s.name, s.decl_type);
  for (const auto &child : s.children) collect_locals(child, out);
}

// Type of a lock path rooted at a global, a parameter or a local of `f`.
std::optional<Type> resolve_path(const LockPath &path, const Program &program, const FunctionDef *f) {
  std::optional<Type> t;
  if (const GlobalDecl *g = program.find_global(path.root())) t = g->type;
  if (f) {
    if (const Param *p = f->find_param(path.root())) t = p->type;
    if (!t) {
      std::map<std::string, Type> locals;
      collect_locals(f->body, locals);
      if (auto it = locals.find(path.root()); it != locals.end()) t = it->second;
    }
  }
  if (!t) return std::nullopt;
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto sname = t->struct_name();
    const StructDef *sd = sname ? program.find_struct(*sname) : nullptr;
    const FieldDecl *fd = sd ? sd->find(path.segments()[i]) : nullptr;
    if (!fd) return std::nullopt;
    t = fd->type;
  }
  return t;
}

void expect_lock(const std::string &text, const Program &program, const FunctionDef *f, const std::string &path) {
  auto t = resolve_path(LockPath::parse(text), program, f);
  if (!t) throw SchemaError(path, "unknown lock `" + text + "`");
  if (!t->is_lock()) throw SchemaError(path, "`" + text + "` is not a lock");
}

}  // namespace

void validate_summary(const LockSummary &summary, const Program &program) {
  for (const auto &[name, lock] : summary.global_lock_map) {
    const std::string path = "$.global_lock_map." + name;
    const GlobalDecl *g = program.find_global(name);
    if (!g) throw SchemaError(path, "unknown global `" + name + "`");
    if (g->type.is_lock()) throw SchemaError(path, "a lock cannot be protected data");
    const GlobalDecl *l = program.find_global(lock);
    if (!l || !l->type.is_lock()) throw SchemaError(path, "`" + lock + "` is not a global lock");
  }
  for (const auto &[name, fields] : summary.struct_lock_map) {
    const std::string path = "$.struct_lock_map." + name;
    const StructDef *sd = program.find_struct(name);
    if (!sd) throw SchemaError(path, "unknown struct `" + name + "`");
    for (const auto &[field, lock] : fields) {
      const FieldDecl *fd = sd->find(field);
      if (!fd) throw SchemaError(path + "." + field, "unknown field `" + field + "`");
      if (fd->type.is_lock()) throw SchemaError(path + "." + field, "a lock cannot be protected data");
      const FieldDecl *ld = sd->find(lock);
      if (!ld || !ld->type.is_lock()) throw SchemaError(path + "." + field, "`" + lock + "` is not a lock field");
    }
  }
  FunctionIndex functions(program);
  for (const auto &[name, info] : summary.function_map) {
    const std::string path = "$.function_map." + name;
    const FunctionDef *f = functions.find(name);
    if (!f || !f->has_body) throw SchemaError(path, "unknown function `" + name + "`");
    for (std::size_t i = 0; i < info.entry_lock.size(); ++i)
      expect_lock(info.entry_lock[i], program, f, path + ".entry_lock[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < info.return_lock.size(); ++i)
      expect_lock(info.return_lock[i], program, f, path + ".return_lock[" + std::to_string(i) + "]");
    for (const auto &[lock, lines] : info.lock_line) {
      expect_lock(lock, program, f, path + ".lock_line." + lock);
      for (int line : lines)
        if (line < f->first_line || line > f->last_line)
          throw SchemaError(path + ".lock_line." + lock, "line " + std::to_string(line) + " is outside `" + name + "`");
    }
  }
}

}  // namespace lockshift
