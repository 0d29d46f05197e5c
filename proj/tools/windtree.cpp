#include <string>
#include <vector>

#include "windtree/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return windtree::run_cli(args);
}
