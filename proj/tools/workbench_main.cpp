#include <iostream>

#include "workbench/cli.hpp"

int main(int argc, char** argv) {
  return wb::runCli(argc, argv, std::cout, std::cerr);
}
