#include <iostream>

#include "slabres/cli.hpp"

int main(int argc, char** argv) {
  const auto outcome = slabres::run(std::vector<std::string>(argv + 1, argv + argc));
  (outcome.exit_code == 0 ? std::cout : std::cerr) << outcome.log;
  return outcome.exit_code;
}
