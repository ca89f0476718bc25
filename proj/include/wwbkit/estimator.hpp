#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wwbkit/geometry.hpp"
#include "wwbkit/prior.hpp"
#include "wwbkit/scenario.hpp"
#include "wwbkit/signal_model.hpp"

namespace wwbkit {

/// Independent generator for one trial, derived from (seed, stream, trial), so
/// results do not depend on execution order.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

/// y(t) = a(theta) s(t) + n(t), s ~ CN(0, sigma_s2), n ~ CN(0, sigma_n2 I).
/// Zero powers are allowed here.
Eigen::MatrixXcd simulate_unconditional(const ArrayGeometry& geometry, const Eigen::VectorXd& theta, double sigma_s2,
                                        double sigma_n2, int snapshots, std::mt19937_64& rng);
/// y(t) = a(theta) s(t) + n(t) with a known waveform; sigma_n2 = 0 gives noiseless data.
Eigen::MatrixXcd simulate_conditional(const ArrayGeometry& geometry, const Eigen::VectorXd& theta,
                                      std::span<const cd> waveform, double sigma_n2, std::mt19937_64& rng);
Eigen::MatrixXcd simulate(const ArrayGeometry& geometry, const SignalModel& model, const Eigen::VectorXd& theta,
                          std::mt19937_64& rng);

/// Search lattice per parameter: uniform over [a, b] or mu +- 5 sigma.
struct MapGrid {
  std::vector<std::vector<double>> axes;

  static MapGrid over(const PriorSpec& prior, int points);
};

/// Grid MAP estimate with quadratic interpolation of the peak. Two-parameter
/// problems use a coarse sub-lattice followed by a fine search around the best
/// local maxima. Ties go to the lowest grid index.
class MapEstimator {
 public:
  MapEstimator(ArrayGeometry geometry, SignalModel model, PriorSpec prior, int points);

  Eigen::VectorXd estimate(const Eigen::MatrixXcd& y) const;
  /// log-likelihood (up to theta-independent terms) plus log prior.
  double objective(const Eigen::MatrixXcd& y, const Eigen::VectorXd& theta) const;
  const MapGrid& grid() const noexcept { return grid_; }

 private:
  struct Statistic;
  Statistic statistic(const Eigen::MatrixXcd& y) const;
  double eval(const Statistic& st, std::size_t iu, std::size_t iv) const;
  double eval_at(const Statistic& st, const Eigen::VectorXd& theta) const;

  ArrayGeometry geometry_;
  SignalModel model_;
  PriorSpec prior_;
  MapGrid grid_;
  // exp(j 2 pi dx_i g_k) and exp(j 2 pi dy_i g_k): rows are sensors, columns grid points.
  Eigen::MatrixXcd phase_x_;
  Eigen::MatrixXcd phase_y_;
  std::vector<std::vector<double>> log_prior_;
};

struct MseRow {
  double snr_db = 0.0;
  Eigen::VectorXd mse;
  Eigen::VectorXd std_error;
  int trials = 0;
};

struct MseOptions {
  int trials = 0;  // 0: use the scenario's value
  std::uint64_t seed = 0;
  bool seed_override = false;
  int workers = 1;
};

/// Global MSE of the MAP estimator at one SNR point; theta is drawn from the
/// prior in every trial.
MseRow mse_at(const Scenario& scenario, std::size_t snr_index, const MseOptions& options);

}  // namespace wwbkit
