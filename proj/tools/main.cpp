#include <iostream>

#include "crtpsim/cli.hpp"

int main(int argc, char** argv) {
  return crtpsim::cli_main(argc, argv, std::cout, std::cerr);
}
