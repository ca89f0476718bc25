#include "wwbkit/prior_integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace wwbkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kGaussianSpan = 10.0;

double entry_log_factor(const PriorEntry& e, double alpha, double beta, double u, double v) {
  if (const auto* p = std::get_if<UniformPrior>(&e)) {
    const double len = clipped_interval(*p, u, v).length();
    return len > 0.0 ? std::log(len / p->length()) : kNegInf;
  }
  const auto& g = std::get<GaussianPrior>(e);
  // sum w c^2 - (sum w c)^2 with weights (a, b, 1-a-b) on shifts (u, v, 0)
  const double mean = alpha * u + beta * v;
  const double spread = alpha * u * u + beta * v * v - mean * mean;
  return -spread / (2.0 * g.sigma2);
}

double center_of(const PriorEntry& e) {
  if (const auto* p = std::get_if<UniformPrior>(&e)) return 0.5 * (p->a + p->b);
  return std::get<GaussianPrior>(e).mu;
}

void check_dims(const PriorSpec& prior, const EtaArgs& args) {
  args.validate(static_cast<Eigen::Index>(prior.size()));
}

// Simpson nodes and weights on [lo, hi] with an odd node count.
void simpson_rule(double lo, double hi, int nodes, std::vector<double>& x, std::vector<double>& w) {
  if (nodes < 3) nodes = 3;
  if (nodes % 2 == 0) ++nodes;
  x.resize(static_cast<std::size_t>(nodes));
  w.resize(static_cast<std::size_t>(nodes));
  const double step = (hi - lo) / (nodes - 1);
  for (int i = 0; i < nodes; ++i) {
    x[static_cast<std::size_t>(i)] = (i == nodes - 1) ? hi : lo + i * step;
    const double c = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[static_cast<std::size_t>(i)] = c * step / 3.0;
  }
}

// log of the prior product p^a(x+u) p^b(x+v) p^{1-a-b}(x) for one parameter, inside the region.
double entry_log_weight(const PriorEntry& e, double alpha, double beta, double x, double u, double v) {
  if (const auto* p = std::get_if<UniformPrior>(&e)) return -std::log(p->length());
  const auto& g = std::get<GaussianPrior>(e);
  auto lp = [&](double t) {
    const double d = t - g.mu;
    return -0.5 * d * d / g.sigma2 - 0.5 * std::log(2.0 * std::numbers::pi * g.sigma2);
  };
  return alpha * lp(x + u) + beta * lp(x + v) + (1.0 - alpha - beta) * lp(x);
}

}  // namespace

ClippedInterval clipped_interval(const UniformPrior& prior, double u, double v) {
  const double lo_shift = std::min({0.0, u, v});
  const double hi_shift = std::max({0.0, u, v});
  return {prior.a - lo_shift, prior.b - hi_shift};
}

double uniform_log_factor(const PriorSpec& prior, const EtaArgs& args) {
  check_dims(prior, args);
  if (!prior.all_uniform()) throw std::invalid_argument("uniform_log_factor needs uniform priors");
  double acc = 0.0;
  for (std::size_t d = 0; d < prior.size(); ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    acc += entry_log_factor(prior[d], args.alpha, args.beta, args.u(i), args.v(i));
    if (acc == kNegInf) return acc;
  }
  return acc;
}

double gaussian_log_factor(const PriorSpec& prior, const EtaArgs& args) {
  check_dims(prior, args);
  double acc = 0.0;
  for (std::size_t d = 0; d < prior.size(); ++d) {
    if (!std::holds_alternative<GaussianPrior>(prior[d])) {
      throw std::invalid_argument("gaussian_log_factor needs gaussian priors");
    }
    const auto i = static_cast<Eigen::Index>(d);
    acc += entry_log_factor(prior[d], args.alpha, args.beta, args.u(i), args.v(i));
  }
  return acc;
}

double log_integrate_prior(const LogEtaPrimeFn& log_eta_prime, const PriorSpec& prior, const EtaArgs& args,
                           bool theta_independent, int nodes) {
  check_dims(prior, args);
  const std::size_t q = prior.size();

  if (theta_independent) {
    double factor = 0.0;
    Eigen::VectorXd theta(static_cast<Eigen::Index>(q));
    for (std::size_t d = 0; d < q; ++d) {
      const auto i = static_cast<Eigen::Index>(d);
      factor += entry_log_factor(prior[d], args.alpha, args.beta, args.u(i), args.v(i));
      theta(i) = center_of(prior[d]);
    }
    if (factor == kNegInf) return kNegInf;
    return log_eta_prime(theta) + factor;
  }

  std::vector<std::vector<double>> xs(q), ws(q);
  for (std::size_t d = 0; d < q; ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    double lo = 0.0, hi = 0.0;
    if (const auto* p = std::get_if<UniformPrior>(&prior[d])) {
      const ClippedInterval c = clipped_interval(*p, args.u(i), args.v(i));
      if (!(c.length() > 0.0)) return kNegInf;
      lo = c.lo;
      hi = c.hi;
    } else {
      const auto& g = std::get<GaussianPrior>(prior[d]);
      const double span = kGaussianSpan * std::sqrt(g.sigma2);
      lo = g.mu - span;
      hi = g.mu + span;
    }
    simpson_rule(lo, hi, nodes, xs[d], ws[d]);
  }

  // Tensor-product sum in log domain.
  std::vector<double> logs;
  std::vector<std::size_t> idx(q, 0);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(q));
  for (;;) {
    double lw = 0.0;
    for (std::size_t d = 0; d < q; ++d) {
      const auto i = static_cast<Eigen::Index>(d);
      const double x = xs[d][idx[d]];
      theta(i) = x;
      lw += std::log(ws[d][idx[d]]) + entry_log_weight(prior[d], args.alpha, args.beta, x, args.u(i), args.v(i));
    }
    logs.push_back(lw + log_eta_prime(theta));
    std::size_t d = 0;
    while (d < q && ++idx[d] == xs[d].size()) idx[d++] = 0;
    if (d == q) break;
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return peak + std::log(sum);
}

double integrate_prior_uniform(const LogEtaPrimeFn& log_eta_prime, const PriorSpec& prior, const EtaArgs& args,
                               bool theta_independent, int nodes) {
  if (!prior.all_uniform()) throw std::invalid_argument("integrate_prior_uniform needs uniform priors");
  return std::exp(log_integrate_prior(log_eta_prime, prior, args, theta_independent, nodes));
}

double integrate_prior_gaussian(double eta_prime_value, const PriorSpec& prior, const EtaArgs& args) {
  return eta_prime_value * std::exp(gaussian_log_factor(prior, args));
}

}  // namespace wwbkit
