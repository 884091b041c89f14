#include <iostream>

#include "lsl/cli.hpp"

int main(int argc, char** argv) {
  return lsl::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
