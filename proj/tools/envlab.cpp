#include <iostream>
#include <string>
#include <vector>

#include "envlab/cli.hpp"

int main(int argc, char** argv) {
  return envlab::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
