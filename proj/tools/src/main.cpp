#include <iostream>
#include <string>
#include <vector>

#include "zsworld/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return zsworld::cli::run(args, std::cout, std::cerr);
}
