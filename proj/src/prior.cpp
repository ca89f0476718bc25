#include "wwbkit/prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wwbkit {

PriorSpec::PriorSpec(std::vector<PriorEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("prior needs at least one parameter");
  for (const auto& e : entries_) {
    if (const auto* u = std::get_if<UniformPrior>(&e)) {
      if (!std::isfinite(u->a) || !std::isfinite(u->b) || !(u->a < u->b)) {
        throw std::invalid_argument("uniform prior needs finite a < b");
      }
    } else {
      const auto& g = std::get<GaussianPrior>(e);
      if (!std::isfinite(g.mu) || !(g.sigma2 > 0.0) || !std::isfinite(g.sigma2)) {
        throw std::invalid_argument("gaussian prior needs finite mu and sigma2 > 0");
      }
    }
  }
}

PriorSpec PriorSpec::uniform(std::size_t q, double a, double b) {
  return PriorSpec(std::vector<PriorEntry>(q, UniformPrior{a, b}));
}

bool PriorSpec::all_uniform() const noexcept {
  for (const auto& e : entries_) {
    if (!std::holds_alternative<UniformPrior>(e)) return false;
  }
  return true;
}

double PriorSpec::density(std::size_t i, double x) const {
  const auto& e = entries_.at(i);
  if (const auto* u = std::get_if<UniformPrior>(&e)) {
    return (x >= u->a && x <= u->b) ? 1.0 / u->length() : 0.0;
  }
  const auto& g = std::get<GaussianPrior>(e);
  const double d = x - g.mu;
  return std::exp(-0.5 * d * d / g.sigma2) / std::sqrt(2.0 * std::numbers::pi * g.sigma2);
}

double PriorSpec::log_density(const Eigen::VectorXd& theta) const {
  if (static_cast<std::size_t>(theta.size()) != entries_.size()) {
    throw std::invalid_argument("log_density: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double x = theta(static_cast<Eigen::Index>(i));
    if (const auto* u = std::get_if<UniformPrior>(&entries_[i])) {
      if (x < u->a || x > u->b) return -std::numeric_limits<double>::infinity();
      acc -= std::log(u->length());
    } else {
      const auto& g = std::get<GaussianPrior>(entries_[i]);
      const double d = x - g.mu;
      acc += -0.5 * d * d / g.sigma2 - 0.5 * std::log(2.0 * std::numbers::pi * g.sigma2);
    }
  }
  return acc;
}

bool PriorSpec::contains(const Eigen::VectorXd& theta) const {
  if (static_cast<std::size_t>(theta.size()) != entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double x = theta(static_cast<Eigen::Index>(i));
    if (!std::isfinite(x)) return false;
    if (const auto* u = std::get_if<UniformPrior>(&entries_[i])) {
      if (x < u->a || x > u->b) return false;
    }
  }
  return true;
}

Eigen::VectorXd PriorSpec::draw(std::mt19937_64& rng) const {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (const auto* u = std::get_if<UniformPrior>(&entries_[i])) {
      theta(static_cast<Eigen::Index>(i)) = std::uniform_real_distribution<double>(u->a, u->b)(rng);
    } else {
      const auto& g = std::get<GaussianPrior>(entries_[i]);
      theta(static_cast<Eigen::Index>(i)) = std::normal_distribution<double>(g.mu, std::sqrt(g.sigma2))(rng);
    }
  }
  return theta;
}

}  // namespace wwbkit
