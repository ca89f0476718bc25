#pragma once

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wwbkit/geometry.hpp"

namespace wwbkit {

/// Gaussian source with known power; angles enter the observation covariance.
struct Unconditional {
  double sigma_s2 = 1.0;
};

/// Known deterministic waveform; angles enter the observation mean.
struct Conditional {
  std::vector<cd> waveform;
};

/// Single-source observation model with white noise R_n = sigma_n2 * I.
class SignalModel {
 public:
  static SignalModel unconditional(double sigma_s2, double sigma_n2, int snapshots);
  static SignalModel conditional(std::vector<cd> waveform, double sigma_n2);
  /// Constant unit-amplitude waveform of length `snapshots`.
  static SignalModel conditional_constant(int snapshots, double sigma_n2);

  bool is_conditional() const noexcept { return std::holds_alternative<Conditional>(source_); }
  const std::variant<Unconditional, Conditional>& source() const noexcept { return source_; }

  /// Throws std::logic_error on a conditional model.
  double sigma_s2() const;
  /// Throws std::logic_error on an unconditional model.
  std::span<const cd> waveform() const;
  double sigma_n2() const noexcept { return sigma_n2_; }
  int snapshots() const noexcept { return snapshots_; }

  /// sigma_s^4 / (sigma_n^2 (M sigma_s^2 + sigma_n^2)).
  double u_snr(std::size_t m) const;
  /// sum_t |s(t)|^2 / sigma_n^2.
  double c_snr() const;
  /// Per-snapshot SNR: sigma_s2 / sigma_n2, or sum_t |s(t)|^2 / (T sigma_n2).
  double snr() const;
  /// Same noise level, source power (or waveform amplitude) rescaled so that snr() hits `db`.
  SignalModel with_snr_db(double db) const;

 private:
  SignalModel(std::variant<Unconditional, Conditional> source, double sigma_n2, int snapshots)
      : source_(std::move(source)), sigma_n2_(sigma_n2), snapshots_(snapshots) {}

  std::variant<Unconditional, Conditional> source_;
  double sigma_n2_;
  int snapshots_;
};

/// R_y(theta) = sigma_s2 a a^H + sigma_n2 I. Unconditional models only.
Eigen::MatrixXcd observation_covariance(const ArrayGeometry& geometry, const SignalModel& model,
                                        const Eigen::VectorXd& theta);

/// log |R_y(theta)| for the single-source white-noise model; theta-independent
/// because ||a||^2 = M.
double log_det_observation_covariance(std::size_t m, const SignalModel& model);

}  // namespace wwbkit
