#include "wwbkit/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wwbkit {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ArrayGeometry::ArrayGeometry(std::vector<SensorPosition> sensors, ArrayKind kind, std::string name)
    : sensors_(std::move(sensors)), kind_(kind), name_(std::move(name)) {
  if (sensors_.empty()) {
    throw std::invalid_argument("array geometry needs at least one sensor");
  }
  for (const auto& s : sensors_) {
    if (!std::isfinite(s.dx) || !std::isfinite(s.dy)) {
      throw std::invalid_argument("sensor coordinates must be finite");
    }
    if (kind_ == ArrayKind::Linear && s.dy != 0.0) {
      throw std::invalid_argument("linear array sensors must have dy = 0");
    }
  }
}

ArrayGeometry ArrayGeometry::linear(const std::vector<double>& dx, std::string name) {
  std::vector<SensorPosition> sensors;
  sensors.reserve(dx.size());
  for (double x : dx) sensors.push_back({x, 0.0});
  return ArrayGeometry(std::move(sensors), ArrayKind::Linear, std::move(name));
}

ArrayGeometry ArrayGeometry::ula(int m, double spacing) {
  if (m < 1) throw std::invalid_argument("ULA needs m >= 1");
  std::vector<double> dx(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) dx[static_cast<std::size_t>(k)] = k * spacing;
  return linear(dx, "ula");
}

ArrayGeometry ArrayGeometry::uca(int m, double spacing) {
  if (m < 1) throw std::invalid_argument("UCA needs m >= 1");
  std::vector<SensorPosition> sensors;
  sensors.reserve(static_cast<std::size_t>(m));
  if (m == 1) {
    sensors.push_back({0.0, 0.0});
  } else {
    const double radius = spacing / (2.0 * std::sin(std::numbers::pi / m));
    for (int k = 0; k < m; ++k) {
      const double angle = kTwoPi * k / m;
      sensors.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
  }
  return ArrayGeometry(std::move(sensors), ArrayKind::Planar, "uca");
}

ArrayGeometry ArrayGeometry::v_shaped(int per_branch, double spacing, double delta_deg) {
  if (per_branch < 1) throw std::invalid_argument("V-shaped array needs at least one sensor per branch");
  const double half = 0.5 * delta_deg * std::numbers::pi / 180.0;
  std::vector<SensorPosition> sensors;
  sensors.reserve(static_cast<std::size_t>(2 * per_branch + 1));
  sensors.push_back({0.0, 0.0});
  for (int k = 1; k <= per_branch; ++k) {
    sensors.push_back({k * spacing * std::cos(half), k * spacing * std::sin(half)});
  }
  for (int k = 1; k <= per_branch; ++k) {
    sensors.push_back({k * spacing * std::cos(half), -k * spacing * std::sin(half)});
  }
  return ArrayGeometry(std::move(sensors), ArrayKind::Planar, "v_shaped");
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geometry, const Eigen::VectorXd& theta) {
  if (theta.size() != geometry.parameter_count()) {
    throw std::invalid_argument("steering_vector: theta has " + std::to_string(theta.size()) +
                                " entries, geometry expects " +
                                std::to_string(geometry.parameter_count()));
  }
  const auto m = static_cast<Eigen::Index>(geometry.size());
  Eigen::VectorXcd a(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i) = std::polar(1.0, kTwoPi * geometry.phase_term(static_cast<std::size_t>(i), theta.data()));
  }
  return a;
}

Eigen::MatrixXcd steering_matrix(const ArrayGeometry& geometry, const Eigen::VectorXd& theta) {
  const int p = geometry.parameter_count();
  if (theta.size() == 0 || theta.size() % p != 0) {
    throw std::invalid_argument("steering_matrix: theta length is not a multiple of the per-source parameter count");
  }
  const Eigen::Index n = theta.size() / p;
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(geometry.size()), n);
  for (Eigen::Index src = 0; src < n; ++src) {
    a.col(src) = steering_vector(geometry, theta.segment(src * p, p));
  }
  return a;
}

}  // namespace wwbkit
