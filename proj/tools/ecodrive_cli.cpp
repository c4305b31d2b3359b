#include <iostream>
#include <string>
#include <vector>

#include "ecodrive/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ecodrive::cli::run(args, std::cout, std::cerr);
}
