#include <iostream>
#include <string>
#include <vector>

#include "rffol/cli.hpp"

int main(int argc, char** argv) {
  return rffol::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
