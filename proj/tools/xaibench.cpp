#include <iostream>
#include <string>
#include <vector>

#include "xaibench/cli.hpp"

int main(int argc, char** argv) {
  return xaibench::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
