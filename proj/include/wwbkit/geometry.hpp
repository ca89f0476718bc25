#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wwbkit {

using cd = std::complex<double>;

/// Sensor coordinates in wavelengths (d / lambda).
struct SensorPosition {
  double dx = 0.0;
  double dy = 0.0;
};

enum class ArrayKind {
  Linear,  // one parameter, theta = sin(elevation)
  Planar,  // two parameters, theta = [u, v] direction cosines
};

/// Sensor layout of an array of identical omnidirectional elements. Immutable
/// after construction.
class ArrayGeometry {
 public:
  ArrayGeometry(std::vector<SensorPosition> sensors, ArrayKind kind, std::string name = {});

  /// Linear array on the x axis.
  static ArrayGeometry linear(const std::vector<double>& dx, std::string name = {});
  /// Uniform linear array with positions (k-1) * spacing, k = 1..m.
  static ArrayGeometry ula(int m, double spacing);
  /// Uniform circular array; `spacing` is the chord between neighbouring sensors.
  static ArrayGeometry uca(int m, double spacing);
  /// Two uniform branches of `per_branch` sensors plus one sensor at the origin.
  /// The branches open by `delta_deg` and are symmetric about the +x axis.
  static ArrayGeometry v_shaped(int per_branch, double spacing, double delta_deg);

  std::size_t size() const noexcept { return sensors_.size(); }
  ArrayKind kind() const noexcept { return kind_; }
  /// Parameters per source: 1 for linear arrays, 2 for planar arrays.
  int parameter_count() const noexcept { return kind_ == ArrayKind::Linear ? 1 : 2; }
  const std::vector<SensorPosition>& sensors() const noexcept { return sensors_; }
  const std::string& name() const noexcept { return name_; }

  /// Projection r_i^T theta for one source block (length parameter_count()).
  double phase_term(std::size_t i, const double* block) const noexcept {
    const auto& s = sensors_[i];
    return kind_ == ArrayKind::Linear ? s.dx * block[0] : s.dx * block[0] + s.dy * block[1];
  }

 private:
  std::vector<SensorPosition> sensors_;
  ArrayKind kind_;
  std::string name_;
};

/// a(theta)_i = exp(j 2 pi r_i^T theta). `theta` must hold exactly
/// geometry.parameter_count() entries.
Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const Eigen::VectorXd& theta);

/// Steering matrix for N sources stacked in `theta` (N * parameter_count() entries).
Eigen::MatrixXcd steering_matrix(const ArrayGeometry& geometry, const Eigen::VectorXd& theta);

}  // namespace wwbkit
