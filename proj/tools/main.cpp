#include <iostream>

#include "nodalcover/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nodalcover::run_cli(args, std::cout, std::cerr);
}
