#include <string>
#include <vector>

#include "gridpss/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gridpss::run_command(args);
}
