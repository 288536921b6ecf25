#include <iostream>

#include "shapetree/cli.hpp"

int main(int argc, char** argv) {
  return shapetree::cli::run(argc, argv, std::cout, std::cerr);
}
