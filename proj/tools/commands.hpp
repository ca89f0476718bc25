#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wwbkit/optimizer.hpp"

namespace wwbkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g".
std::string format_number(double x);

/// "0.25,0.5,0.75".
std::vector<double> parse_list(const std::string& text);
/// "a:b:step", inclusive of b.
std::vector<double> parse_range(const std::string& text);
/// "min:max:count" (log-spaced |h|, both signs) or an explicit list "v1,v2,...".
HGridSpec parse_h_grid(const std::string& text);

/// Entry point shared by main() and the tests. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wwbkit::cli
