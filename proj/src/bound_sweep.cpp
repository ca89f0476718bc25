#include "wwbkit/bound_sweep.hpp"

#include <stdexcept>

#include "wwbkit/closed_form.hpp"
#include "wwbkit/g_matrix.hpp"

namespace wwbkit {

bool unit_uniform_prior(const PriorSpec& prior) {
  for (const auto& e : prior.entries()) {
    const auto* u = std::get_if<UniformPrior>(&e);
    if (!u || u->a != -1.0 || u->b != 1.0) return false;
  }
  return true;
}

GEvaluator make_g_evaluator(const ArrayGeometry& geometry, const SignalModel& model, const PriorSpec& prior,
                            BoundEngine engine) {
  if (prior.size() != static_cast<std::size_t>(geometry.parameter_count())) {
    throw std::invalid_argument("prior must have one entry per parameter");
  }
  const bool closed = engine == BoundEngine::ClosedForm || (engine == BoundEngine::Auto && unit_uniform_prior(prior));
  if (closed && !unit_uniform_prior(prior)) throw std::invalid_argument("closed forms need a uniform [-1,1] prior");

  if (!closed) {
    const LogEtaFn log_eta = general_log_eta(geometry, model, prior);
    return [log_eta](const Eigen::VectorXd& h, const Eigen::VectorXd& s) {
      return assemble_g(s, h, log_eta).entries;
    };
  }
  if (geometry.kind() == ArrayKind::Linear) {
    return [geometry, model](const Eigen::VectorXd& h, const Eigen::VectorXd& s) {
      return Eigen::MatrixXd::Constant(1, 1, linear_g(h(0), s(0), geometry, model));
    };
  }
  return [geometry, model](const Eigen::VectorXd& h, const Eigen::VectorXd& s) {
    const PlanarBoundInputs in{h(0), h(1), s(0), s(1)};
    return model.is_conditional() ? planar_g_cond(geometry, model, in).entries
                                  : planar_g_uncond(geometry, model, in).entries;
  };
}

WwbResult bound_at(const Scenario& scenario, double snr_db, const OptimizerConfig& config, BoundEngine engine) {
  const ArrayGeometry geometry = scenario.geometry();
  const SignalModel model = scenario.model_at(snr_db);
  return maximize(make_g_evaluator(geometry, model, scenario.prior, engine), scenario.prior.size(), config);
}

}  // namespace wwbkit
