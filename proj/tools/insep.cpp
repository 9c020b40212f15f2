#include <iostream>

#include "insep/cli.hpp"

int main(int argc, char** argv) {
  return insep::cli::main_entry(argc, argv, std::cout, std::cerr);
}
