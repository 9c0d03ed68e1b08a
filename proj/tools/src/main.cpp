#include <iostream>

#include "gfkchain/cli/commands.hpp"

int main(int argc, char** argv) {
  return gfkchain::cli::run(argc, argv, std::cout, std::cerr);
}
