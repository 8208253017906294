#include <iostream>
#include <string>
#include <vector>

#include "edg/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return edg::run_command(args, std::cout, std::cerr);
}
