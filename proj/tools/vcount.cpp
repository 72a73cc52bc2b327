#include <iostream>
#include <string>
#include <vector>

#include "vcount/cli.hpp"

int main(int argc, char** argv) {
  return vcount::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
