#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wwbkit/eta.hpp"
#include "wwbkit/prior.hpp"
#include "wwbkit/prior_integration.hpp"

namespace wwbkit::oracle {

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// E_{Y ~ p(.;theta)} [ (p(Y;theta+u)/p(Y;theta))^a (p(Y;theta+v)/p(Y;theta))^b ]
/// by plain sampling from p(.;theta); likelihoods from explicit covariance or
/// mean, in log domain.
McEstimate mc_eta_prime(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                        const SignalModel& model, int samples, std::uint64_t seed, int workers = 1);

/// |sum_k w_k R_y^{-1}(theta_k)| from explicit matrices and LU factorizations.
LogDet dense_det_combo(const ArrayGeometry& geometry, const SignalModel& model, const std::vector<double>& weights,
                       const std::vector<Eigen::VectorXd>& thetas);

/// sum_t (D s(t))^H R_n^{-1} (D s(t)) with D = A(theta+mu) - A(theta+rho) and an
/// explicit inverse of R_n.
double zeta_direct(const ArrayGeometry& geometry, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& mu, const Eigen::VectorXd& rho);

inline constexpr int kReferenceNodes = 100000;

/// Composite trapezoid integral of eta'_theta * p^a(theta+u) p^b(theta+v)
/// p^{1-a-b}(theta) over the region where every factor is supported (uniform)
/// or mu +- 10 sigma (Gaussian). With `theta_independent` the integral is the
/// product of one-dimensional integrals; otherwise a tensor rule with `nodes`
/// points per parameter is used. Returns 0 for an empty region.
double quadrature_eta(const LogEtaPrimeFn& log_eta_prime, const PriorSpec& prior, const EtaArgs& args,
                      bool theta_independent, int nodes = kReferenceNodes);

}  // namespace wwbkit::oracle
