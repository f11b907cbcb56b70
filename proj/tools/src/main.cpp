#include <iostream>
#include <string>
#include <vector>

#include "netmf_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return netmf::cli::execute(args, std::cout, std::cerr);
}
