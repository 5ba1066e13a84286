#include <iostream>

#include "qcsolve/cli.hpp"

int main(int argc, char** argv) {
  return qcsolve::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
