#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wwbkit {

/// One oracle comparison.
struct CheckResult {
  std::string operation;  // library operation under test
  std::string label;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const noexcept;
  std::size_t pass_count() const noexcept;
  double max_deviation() const noexcept;
  /// Distinct operations exercised, in first-seen order.
  std::vector<std::string> operations() const;
};

struct ValidationOptions {
  std::uint64_t seed = 1;
  int workers = 1;
};

/// appendix-c, appendix-d, eta-mc, prior-quadrature, closed-form-xcheck, s-stationarity.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name, const ValidationOptions& options = {});

/// Closed-form operation and the suite holding its oracle check.
struct OracleCoverage {
  std::string operation;
  std::string suite;
};

const std::vector<OracleCoverage>& oracle_manifest();

/// Summary line, per-operation maxima, then every failing check.
void print_report(std::ostream& out, const SuiteReport& report);

}  // namespace wwbkit
