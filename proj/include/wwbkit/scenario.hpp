#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wwbkit/geometry.hpp"
#include "wwbkit/optimizer.hpp"
#include "wwbkit/prior.hpp"
#include "wwbkit/signal_model.hpp"

namespace wwbkit {

/// How the array was described in the scenario file; rebuilt on demand so a
/// document round-trips unchanged.
struct GeometrySpec {
  std::string kind = "ula";  // ula | uca | v_shaped | linear | planar
  int m = 2;                 // sensors (ula, uca) or sensors per branch (v_shaped)
  double spacing = 0.5;
  double delta_deg = 90.0;
  std::vector<SensorPosition> positions;  // linear and planar kinds

  ArrayGeometry build() const;
};

struct ModelSpec {
  bool conditional = false;
  double sigma_s2 = 1.0;
  double sigma_n2 = 1.0;
  int snapshots = 1;
  std::vector<cd> waveform;  // conditional; empty means constant unit samples

  SignalModel build() const;
};

struct Scenario {
  std::string name;
  GeometrySpec geometry_spec;
  ModelSpec model_spec;
  PriorSpec prior = PriorSpec::uniform(1);
  std::vector<double> theta_true_deg;  // elevation (and azimuth for planar arrays)
  std::vector<double> snr_db;
  OptimizerConfig optimizer;  // empty h_grid means "derive from the prior"
  int trials = 200;
  std::uint64_t seed = 1;
  int map_grid = 2048;

  ArrayGeometry geometry() const { return geometry_spec.build(); }
  SignalModel model() const { return model_spec.build(); }
  /// Base model rescaled to the given per-snapshot SNR.
  SignalModel model_at(double snr_db) const { return model().with_snr_db(snr_db); }
  /// Direction-cosine parameters of theta_true_deg.
  Eigen::VectorXd theta_true() const;
  /// Optimizer settings with the default h grid filled in from the prior.
  OptimizerConfig resolved_optimizer() const;
};

/// Elevation (and azimuth) in degrees to [sin el] or [sin el cos az, sin el sin az].
Eigen::VectorXd direction_cosines(const std::vector<double>& angles_deg, ArrayKind kind);

/// Parses and validates a scenario document. Throws ScenarioError naming the
/// offending field.
Scenario parse_scenario(const std::string& text);
/// Reads a file and parses it; I/O failures throw std::runtime_error naming the path.
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

}  // namespace wwbkit
