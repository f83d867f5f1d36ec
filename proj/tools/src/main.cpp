#include <iostream>

#include "lockshift_cli/cli.hpp"

int main(int argc, char **argv) {
  int code = 0;
  auto config = lockshift::cli::parse_command_line(argc, argv, std::cout, std::cerr, code);
  if (!config) return code;
  return lockshift::cli::run(*config, std::cout, std::cerr);
}
