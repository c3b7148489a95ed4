#include <iostream>

#include "jetscope/tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jetscope::cli::run(args, std::cout, std::cerr);
}
