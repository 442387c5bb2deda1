#include <iostream>
#include <string>
#include <vector>

#include "agplan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return agplan::run_cli(args, std::cout, std::cerr, agplan::process_env());
}
