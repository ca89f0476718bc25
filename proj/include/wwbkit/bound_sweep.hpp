#pragma once

#include <vector>

#include "wwbkit/optimizer.hpp"
#include "wwbkit/scenario.hpp"

namespace wwbkit {

enum class BoundEngine {
  Auto,        // closed forms when the prior is uniform on [-1,1], general engine otherwise
  ClosedForm,
  General,
};

/// G evaluator for one SNR point.
GEvaluator make_g_evaluator(const ArrayGeometry& geometry, const SignalModel& model, const PriorSpec& prior,
                            BoundEngine engine = BoundEngine::Auto);

/// True when every prior entry is uniform on exactly [-1,1].
bool unit_uniform_prior(const PriorSpec& prior);

/// Optimized bound at one SNR point of the scenario.
WwbResult bound_at(const Scenario& scenario, double snr_db, const OptimizerConfig& config,
                   BoundEngine engine = BoundEngine::Auto);

}  // namespace wwbkit
