#include <iostream>
#include <string>
#include <vector>

#include "spadmm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spadmm::cli::run(args, std::cout, std::cerr);
}
