#include <iostream>
#include <string>
#include <vector>

#include "levelset/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return levelset::run_cli(args, std::cout, std::cerr);
}
