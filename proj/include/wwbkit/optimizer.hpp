#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wwbkit/g_matrix.hpp"

namespace wwbkit {

enum class SearchStrategy {
  Auto,                // exhaustive when the joint grid fits `joint_cap`, profile otherwise
  ExhaustiveJoint,
  PerParameterProfile,  // optimize one parameter at a time, others at their running best
};

/// Candidate test points: an explicit list or a log-spaced |h| range with both signs.
struct HGridSpec {
  double min_abs = 1e-3;
  double max_abs = 2.0 - 1e-3;
  int count = 200;
  std::vector<double> values;  // overrides the range when non-empty

  /// Sorted candidate list; never contains 0.
  std::vector<double> candidates() const;
  /// Default range for a support of the given length.
  static HGridSpec for_support(double length, int count = 200);
};

struct OptimizerConfig {
  std::vector<HGridSpec> h_grid;  // one per parameter; a single entry is reused for all
  std::vector<double> s_grid{0.5};
  SearchStrategy strategy = SearchStrategy::Auto;
  bool refine = false;
  std::size_t joint_cap = 250000;
  int profile_rounds = 2;
  double condition_cap = 1e12;
  int workers = 1;

  void validate(std::size_t q) const;
};

struct WwbResult {
  Eigen::MatrixXd bound;
  Eigen::VectorXd best_h;
  Eigen::VectorXd best_s;
  double objective = 0.0;
  Eigen::MatrixXd g;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Returns G for (h, s). May throw InvalidRegion / DegenerateConfiguration /
/// std::invalid_argument; such points are skipped.
using GEvaluator = std::function<Eigen::MatrixXd(const Eigen::VectorXd& h, const Eigen::VectorXd& s)>;

/// 2-norm condition number of a symmetric matrix (ratio of extreme |eigenvalues|).
double condition_number(const Eigen::MatrixXd& g);

/// H G^{-1} H^T with H = diag(h). The q = 2 case uses the explicit inverse.
/// Throws DegenerateConfiguration when G is singular or its condition number
/// exceeds `condition_cap`.
Eigen::MatrixXd wwb_from_g(const Eigen::VectorXd& h, const Eigen::MatrixXd& g, double condition_cap = 1e12);

/// Trace-maximizing grid search. Deterministic: ties go to the first point in
/// lexicographic grid order (parameter 0 slowest, h before s), regardless of
/// the worker count.
WwbResult maximize(const GEvaluator& evaluator, std::size_t q, const OptimizerConfig& config);

/// Run f(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& f);

}  // namespace wwbkit
