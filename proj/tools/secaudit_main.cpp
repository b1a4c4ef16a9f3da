#include <string>
#include <vector>

#include "secaudit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return secaudit::cli::run_command(args);
}
