#include <iostream>
#include <vector>

#include "flexgc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flexgc::run_cli(std::move(args), std::cout, std::cerr);
}
