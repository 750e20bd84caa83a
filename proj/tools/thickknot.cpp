#include <iostream>
#include <string>
#include <vector>

#include "thickknot/cli.hpp"

int main(int argc, char** argv) {
  return thickknot::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
