#pragma once

#include <functional>

#include <Eigen/Dense>

#include "wwbkit/eta.hpp"
#include "wwbkit/prior.hpp"

namespace wwbkit {

/// log eta'_theta as a function of theta.
using LogEtaPrimeFn = std::function<double(const Eigen::VectorXd& theta)>;

inline constexpr int kDefaultPriorNodes = 513;

/// Integration interval of parameter d: the set of theta_d for which theta_d,
/// theta_d + u_d and theta_d + v_d all lie in [a, b]. Length clamped at 0.
struct ClippedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi > lo ? hi - lo : 0.0; }
};

ClippedInterval clipped_interval(const UniformPrior& prior, double u, double v);

/// log of prod_d |clipped interval_d| / (b_d - a_d); -inf when any interval is empty.
/// Every prior entry must be uniform.
double uniform_log_factor(const PriorSpec& prior, const EtaArgs& args);

/// log of prod_d exp(-(a(1-a) u^2 + b(1-b) v^2 - 2ab u v) / (2 sigma^2)), i.e. the
/// Gaussian integral of p^a(theta+u) p^b(theta+v) p^{1-a-b}(theta) per parameter.
/// Every prior entry must be Gaussian.
double gaussian_log_factor(const PriorSpec& prior, const EtaArgs& args);

/// log eta = log of the integral over the prior of eta'_theta
///   * p^a(theta+u) p^b(theta+v) p^{1-a-b}(theta).
/// With `theta_independent` the evaluator is called once and multiplied by the
/// analytic factors (mixed uniform/Gaussian entries allowed). Otherwise a
/// tensor composite Simpson rule with `nodes` points per parameter is applied
/// over the clipped region (uniform) or mu +- 10 sigma (Gaussian).
double log_integrate_prior(const LogEtaPrimeFn& log_eta_prime, const PriorSpec& prior, const EtaArgs& args,
                           bool theta_independent, int nodes = kDefaultPriorNodes);

/// Linear-domain wrappers restricted to one prior family.
double integrate_prior_uniform(const LogEtaPrimeFn& log_eta_prime, const PriorSpec& prior, const EtaArgs& args,
                               bool theta_independent, int nodes = kDefaultPriorNodes);
double integrate_prior_gaussian(double eta_prime_value, const PriorSpec& prior, const EtaArgs& args);

}  // namespace wwbkit
