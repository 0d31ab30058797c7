#include <vector>

#include "socolab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return socolab::cli_main(args);
}
