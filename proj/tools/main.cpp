#include <string>
#include <vector>

#include "swarmsim/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return swarmsim::cli::cli_main(args);
}
