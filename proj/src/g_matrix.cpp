#include "wwbkit/g_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "wwbkit/error.hpp"

namespace wwbkit {

namespace {

Eigen::VectorXd unit(Eigen::Index q, Eigen::Index k, double value) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(q);
  e(k) = value;
  return e;
}

void check_hs(const Eigen::VectorXd& s, const Eigen::VectorXd& h) {
  if (s.size() != h.size() || h.size() == 0) throw std::invalid_argument("h and s must have q > 0 entries");
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (!(h(i) != 0.0) || !std::isfinite(h(i))) throw std::invalid_argument("test points must be finite and nonzero");
    if (!(s(i) > 0.0 && s(i) < 1.0)) throw std::invalid_argument("s must lie in (0,1)");
  }
}

}  // namespace

double assemble_g_element(Eigen::Index k, Eigen::Index l, const Eigen::VectorXd& s, const Eigen::VectorXd& h,
                          const LogEtaFn& log_eta) {
  check_hs(s, h);
  const Eigen::Index q = h.size();
  if (k < 0 || l < 0 || k >= q || l >= q) throw std::out_of_range("G index out of range");
  const double sk = s(k), sl = s(l);
  const Eigen::VectorXd uk = unit(q, k, h(k)), ul = unit(q, l, h(l));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(q);

  const double den = log_eta({sk, 0.0, uk, zero}) + log_eta({0.0, sl, zero, ul});
  if (!std::isfinite(den)) throw DegenerateConfiguration("G denominator vanishes");

  const double t1 = log_eta({sk, sl, uk, ul});
  const double t2 = log_eta({1.0 - sk, 1.0 - sl, -uk, -ul});
  const double t3 = log_eta({sk, 1.0 - sl, uk, -ul});
  const double t4 = log_eta({1.0 - sk, sl, -uk, ul});
  return std::exp(t1 - den) + std::exp(t2 - den) - std::exp(t3 - den) - std::exp(t4 - den);
}

GMatrix assemble_g(const Eigen::VectorXd& s, const Eigen::VectorXd& h, const LogEtaFn& log_eta) {
  check_hs(s, h);
  const Eigen::Index q = h.size();
  GMatrix g{Eigen::MatrixXd::Zero(q, q), h, s};
  for (Eigen::Index k = 0; k < q; ++k) {
    for (Eigen::Index l = k; l < q; ++l) {
      g.entries(k, l) = assemble_g_element(k, l, s, h, log_eta);
      g.entries(l, k) = g.entries(k, l);
    }
  }
  return g;
}

LogEtaFn general_log_eta(const ArrayGeometry& geometry, const SignalModel& model, const PriorSpec& prior) {
  if (prior.size() != static_cast<std::size_t>(geometry.parameter_count())) {
    throw std::invalid_argument("prior must have one entry per parameter");
  }
  return [geometry, model, prior](const EtaArgs& args) {
    const LogEtaPrimeFn lep = [&](const Eigen::VectorXd& theta) {
      return model.is_conditional() ? log_eta_prime_mean(args, theta, geometry, model)
                                    : log_eta_prime_cov(args, theta, geometry, model);
    };
    return log_integrate_prior(lep, prior, args, true);
  };
}

LogEtaFn general_log_eta(const ArrayGeometry& geometry, const SourceCovarianceModel& model, const PriorSpec& prior,
                         int nodes) {
  return [geometry, model, prior, nodes](const EtaArgs& args) {
    const LogEtaPrimeFn lep = [&](const Eigen::VectorXd& theta) {
      return log_eta_prime_cov_dense(args, theta, geometry, model);
    };
    return log_integrate_prior(lep, prior, args, false, nodes);
  };
}

LogEtaFn general_log_eta(const ArrayGeometry& geometry, const SourceWaveformModel& model, const PriorSpec& prior,
                         int nodes) {
  return [geometry, model, prior, nodes](const EtaArgs& args) {
    const LogEtaPrimeFn lep = [&](const Eigen::VectorXd& theta) {
      return log_eta_prime_mean_general(args, theta, geometry, model);
    };
    return log_integrate_prior(lep, prior, args, false, nodes);
  };
}

GMatrix general_g_matrix(const ArrayGeometry& geometry, const SignalModel& model, const PriorSpec& prior,
                         const Eigen::VectorXd& h, const Eigen::VectorXd& s) {
  return assemble_g(s, h, general_log_eta(geometry, model, prior));
}

}  // namespace wwbkit
