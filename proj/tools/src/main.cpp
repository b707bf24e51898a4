#include <iostream>

#include "cbmo_cli/cli.hpp"

int main(int argc, char** argv) {
  return cbmo::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
