#pragma once

#include <Eigen/Dense>

#include "wwbkit/geometry.hpp"
#include "wwbkit/signal_model.hpp"

namespace wwbkit {

/// Arguments of eta(alpha, beta, u, v): the two likelihood exponents and the
/// two parameter displacements.
struct EtaArgs {
  double alpha = 0.0;
  double beta = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;

  /// Throws std::invalid_argument unless alpha, beta are in [0,1], u and v are
  /// finite and both have length q.
  void validate(Eigen::Index q) const;
};

/// Determinant as (log|det|, sign). Survives exponentiation by T.
struct LogDet {
  double log_abs = 0.0;
  int sign = 1;

  double value() const;
};

/// Tolerance on sum(m_k) = 1 for the determinant lemmas.
inline constexpr double kWeightSumTolerance = 1e-12;

/// |m1 R_y^{-1}(theta1) + m2 R_y^{-1}(theta2)| for the single-source white-noise
/// unconditional model, from the rank-2 determinant lemma. Requires m1 + m2 = 1.
LogDet det_combo2(const ArrayGeometry& geometry, const SignalModel& model, double m1, double m2,
                  const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2);

/// Three-term version, including the triple steering products. Requires
/// m1 + m2 + m3 = 1.
LogDet det_combo3(const ArrayGeometry& geometry, const SignalModel& model, double m1, double m2, double m3,
                  const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2,
                  const Eigen::VectorXd& theta3);

/// log eta'_theta for the parameterized-covariance Gaussian model:
///   |R(theta)|^{T(a+b-1)} / (|R(theta+u)|^{Ta} |R(theta+v)|^{Tb} |Gamma^{-1}|^T),
///   Gamma^{-1} = a R^{-1}(theta+u) + b R^{-1}(theta+v) - (a+b-1) R^{-1}(theta).
/// Single-source path through the determinant lemmas. Throws InvalidRegion when
/// Gamma^{-1} is not positive definite.
double log_eta_prime_cov(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                         const SignalModel& model);
double eta_prime_cov(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                     const SignalModel& model);

/// Multi-source Gaussian source model with arbitrary (full rank) noise covariance.
struct SourceCovarianceModel {
  Eigen::MatrixXcd source_cov;  // N x N
  Eigen::MatrixXcd noise_cov;   // M x M
  int snapshots = 1;

  static SourceCovarianceModel from(const SignalModel& model, std::size_t m);
};

/// Same quantity as log_eta_prime_cov, built from explicit covariance matrices
/// and Cholesky factorizations. Works for any number of sources.
double log_eta_prime_cov_dense(const EtaArgs& args, const Eigen::VectorXd& theta,
                               const ArrayGeometry& geometry, const SourceCovarianceModel& model);

/// Multi-source known waveforms with arbitrary noise covariance.
struct SourceWaveformModel {
  Eigen::MatrixXcd waveforms;  // N x T, row m is s_m(t)
  Eigen::MatrixXcd noise_cov;  // M x M

  static SourceWaveformModel from(const SignalModel& model, std::size_t m);
  Eigen::Index sources() const noexcept { return waveforms.rows(); }
};

/// zeta(mu, rho) = sum_t || R_n^{-1/2} (A(theta+mu) - A(theta+rho)) s(t) ||^2 for the
/// single-source white-noise model. mu and rho may each hold at most one nonzero
/// entry. The result does not depend on theta.
double zeta(const ArrayGeometry& geometry, const SignalModel& model, const Eigen::VectorXd& theta,
            const Eigen::VectorXd& mu, const Eigen::VectorXd& rho);

/// Multi-source zeta through the double sums over {R_n^{-1}}_{ij}; same-source
/// and cross-source cases are dispatched on the parameter blocks of the nonzero
/// entries of mu and rho.
double zeta_general(const ArrayGeometry& geometry, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& mu, const Eigen::VectorXd& rho);

/// Multi-source zeta assuming R_n = noise_cov(0,0) * I (single sums).
double zeta_white(const ArrayGeometry& geometry, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& mu, const Eigen::VectorXd& rho);

/// log eta'_theta for the parameterized-mean Gaussian model, single source:
///   -[a(1-a-b) zeta(u,0) + a b zeta(u,v) + b(1-a-b) zeta(v,0)].
double log_eta_prime_mean(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                          const SignalModel& model);
double eta_prime_mean(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                      const SignalModel& model);

/// Multi-source version; uses zeta_general when u and v are single-entry
/// displacements and direct evaluation otherwise.
double log_eta_prime_mean_general(const EtaArgs& args, const Eigen::VectorXd& theta,
                                  const ArrayGeometry& geometry, const SourceWaveformModel& model);

}  // namespace wwbkit
