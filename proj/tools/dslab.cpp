#include <iostream>
#include <string>
#include <vector>

#include "dslab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dslab::run(args, std::cout, std::cerr);
}
