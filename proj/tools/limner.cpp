#include <iostream>

#include "limner/cli.hpp"

int main(int argc, char** argv) {
  return limner::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
