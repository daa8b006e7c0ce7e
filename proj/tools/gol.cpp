#include <string>
#include <vector>

#include "gol/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gol::cli::run_cli(args);
}
