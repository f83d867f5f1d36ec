#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lockshift/frontend.hpp"

namespace lockshift::testing {

std::filesystem::path fixture_dir();
std::string read_text(const std::filesystem::path &path);

/// Files with extension `ext` directly under fixture_dir()/`subdir`, sorted.
std::vector<std::filesystem::path> fixtures(const std::string &subdir, const std::string &ext = ".mc");

/// Every Mini-C fixture the analysis is expected to complete on: corpus,
/// basic lock-flow examples, the golden program and the guardcheck failure programs.
std::vector<std::filesystem::path> analyzable_fixtures();

/// Parses fixture_dir()/`relative`; `.gmc` files use the guarded dialect.
Program load(const std::string &relative);

/// Definition of `name`; fails the calling test when absent.
const FunctionDef &function(const Program &program, const std::string &name);

}  // namespace lockshift::testing
