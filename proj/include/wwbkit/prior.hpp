#pragma once

#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace wwbkit {

struct UniformPrior {
  double a = -1.0;
  double b = 1.0;
  double length() const noexcept { return b - a; }
};

struct GaussianPrior {
  double mu = 0.0;
  double sigma2 = 1.0;
};

using PriorEntry = std::variant<UniformPrior, GaussianPrior>;

/// Independent per-parameter priors; the joint density is the product.
class PriorSpec {
 public:
  explicit PriorSpec(std::vector<PriorEntry> entries);
  static PriorSpec uniform(std::size_t q, double a = -1.0, double b = 1.0);

  std::size_t size() const noexcept { return entries_.size(); }
  const PriorEntry& operator[](std::size_t i) const { return entries_.at(i); }
  const std::vector<PriorEntry>& entries() const noexcept { return entries_; }
  bool all_uniform() const noexcept;

  /// Marginal density of parameter i.
  double density(std::size_t i, double x) const;
  double log_density(const Eigen::VectorXd& theta) const;
  bool contains(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd draw(std::mt19937_64& rng) const;

 private:
  std::vector<PriorEntry> entries_;
};

}  // namespace wwbkit
