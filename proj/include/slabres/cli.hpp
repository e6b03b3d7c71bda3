#pragma once

#include <complex>
#include <string>
#include <vector>

namespace slabres {

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::string> artifacts;  // files written
  std::string log;
};

// Runs one slabres invocation. `args` excludes the program name.
CommandOutcome run(const std::vector<std::string>& args);

// "lo:hi:count" (inclusive, evenly spaced) or a comma-separated list. Empty text yields
// an empty grid.
std::vector<double> parse_grid(const std::string& text);

// "re", "re+imi", "re-imi" or "imi".
std::complex<double> parse_complex(const std::string& text);

}  // namespace slabres
