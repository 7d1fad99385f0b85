#include <string>
#include <vector>

#include "radlabel/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return radlabel::cli::run(std::move(args));
}
