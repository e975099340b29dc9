#include <iostream>
#include <string>
#include <vector>

#include "rankscope/report.hh"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rankscope::run_command(args, std::cout, std::cerr);
}
