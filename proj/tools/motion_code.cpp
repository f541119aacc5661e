#include <iostream>
#include <string>
#include <vector>

#include "motion_code/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return motion_code::cli::run_cli(args, std::cout, std::cerr);
}
