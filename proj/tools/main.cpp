#include <iostream>

#include "geollm/cli.hpp"

int main(int argc, char** argv) {
  return geollm::cli::dispatch(argc, argv, std::cout, std::cerr, std::cin);
}
