#include <iostream>
#include <string>
#include <vector>

#include "contextum/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return contextum::cli::run(args, std::cout, std::cerr);
}
