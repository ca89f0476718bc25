#pragma once

#include <stdexcept>
#include <string>

namespace wwbkit {

/// Thrown when a likelihood-ratio moment diverges: the weighted combination of
/// inverse covariances is not positive definite for the requested (alpha, beta, u, v).
class InvalidRegion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A G matrix (or one of its entries) cannot be formed, e.g. a vanishing
/// denominator or a near-singular matrix at h -> 0.
class DegenerateConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario document problems. `path()` is the JSON pointer-like location of the
/// offending field, e.g. "prior[0].b".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)), detail_(what) {}

  const std::string& path() const noexcept { return path_; }
  /// Message without the field path.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string path_;
  std::string detail_;
};

}  // namespace wwbkit
