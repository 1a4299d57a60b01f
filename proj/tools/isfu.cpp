#include <iostream>
#include <string>
#include <vector>

#include "isfu_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return isfu::cli::dispatch(args, std::cout, std::cerr);
}
