#include <iostream>
#include <string>
#include <vector>

#include "seikit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sei::cli::run(args, std::cout, std::cerr);
}
