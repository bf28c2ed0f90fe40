// phasecraft: command-line front end.

#include "phasecraft/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  const auto result = phasecraft::cli::run(args);
  std::cout << result.output;
  std::cerr << result.error;
  return result.exit_code;
}
