#include "lorpl2/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return lorpl2::cli::run_cli(argc, argv, std::cout, std::cerr);
}
