#pragma once

#include <functional>

#include <Eigen/Dense>

#include "wwbkit/eta.hpp"
#include "wwbkit/geometry.hpp"
#include "wwbkit/prior.hpp"
#include "wwbkit/prior_integration.hpp"
#include "wwbkit/signal_model.hpp"

namespace wwbkit {

/// log eta(alpha, beta, u, v) after prior integration. May return -inf (empty
/// integration region) and may throw InvalidRegion.
using LogEtaFn = std::function<double(const EtaArgs&)>;

/// q x q G matrix with the test points h and exponents s it was built from.
struct GMatrix {
  Eigen::MatrixXd entries;
  Eigen::VectorXd h;
  Eigen::VectorXd s;
};

/// {G}_{k,l} = [eta(s_k,s_l,h_k,h_l) + eta(1-s_k,1-s_l,-h_k,-h_l)
///              - eta(s_k,1-s_l,h_k,-h_l) - eta(1-s_k,s_l,-h_k,h_l)]
///             / [eta(s_k,0,h_k,0) eta(0,s_l,0,h_l)]
/// where h_k stands for the displacement h_k e_k. Evaluated as a sum of
/// exp(log eta_i - log denominator). Throws DegenerateConfiguration when the
/// denominator vanishes.
double assemble_g_element(Eigen::Index k, Eigen::Index l, const Eigen::VectorXd& s, const Eigen::VectorXd& h,
                          const LogEtaFn& log_eta);

/// Full symmetric G from assemble_g_element.
GMatrix assemble_g(const Eigen::VectorXd& s, const Eigen::VectorXd& h, const LogEtaFn& log_eta);

/// Prior-integrated log eta for the single-source white-noise models; eta' is
/// theta-independent so the analytic prior factors apply.
LogEtaFn general_log_eta(const ArrayGeometry& geometry, const SignalModel& model, const PriorSpec& prior);

/// Multi-source evaluators; eta' depends on theta, so the prior is integrated
/// by quadrature with `nodes` points per parameter.
LogEtaFn general_log_eta(const ArrayGeometry& geometry, const SourceCovarianceModel& model, const PriorSpec& prior,
                         int nodes = kDefaultPriorNodes);
LogEtaFn general_log_eta(const ArrayGeometry& geometry, const SourceWaveformModel& model, const PriorSpec& prior,
                         int nodes = kDefaultPriorNodes);

/// G through the general pipeline (eta' engine, prior integration, assembly).
GMatrix general_g_matrix(const ArrayGeometry& geometry, const SignalModel& model, const PriorSpec& prior,
                         const Eigen::VectorXd& h, const Eigen::VectorXd& s);

}  // namespace wwbkit
