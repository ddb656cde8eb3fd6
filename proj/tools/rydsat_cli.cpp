#include <iostream>
#include <string>
#include <vector>

#include "rydsat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rydsat::run_command(args, std::cout, std::cerr);
}
