#include <iostream>
#include <string>
#include <vector>

#include "edgeprune/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return edgeprune::run_cli(args, std::cout, std::cerr);
}
