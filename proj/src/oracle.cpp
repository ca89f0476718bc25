#include "wwbkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "wwbkit/optimizer.hpp"

namespace wwbkit::oracle {

namespace {

constexpr int kBlock = 10000;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Likelihood {
  // Unconditional: inverse covariance and log-determinant.
  Eigen::MatrixXcd inv;
  double logdet = 0.0;
  // Conditional: steering vector.
  Eigen::VectorXcd a;
};

Likelihood likelihood_for(const ArrayGeometry& g, const SignalModel& model, const Eigen::VectorXd& theta) {
  Likelihood l;
  l.a = steering_vector(g, theta);
  if (!model.is_conditional()) {
    Eigen::MatrixXcd r = model.sigma_s2() * l.a * l.a.adjoint();
    r.diagonal().array() += model.sigma_n2();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(r);
    l.inv = lu.inverse();
    l.logdet = lu.matrixLU().diagonal().array().abs().log().sum();
  }
  return l;
}

double log_lik(const Likelihood& l, const SignalModel& model, const Eigen::MatrixXcd& y) {
  if (model.is_conditional()) {
    const auto w = model.waveform();
    double acc = 0.0;
    for (Eigen::Index t = 0; t < y.cols(); ++t) {
      acc += (y.col(t) - l.a * w[static_cast<std::size_t>(t)]).squaredNorm();
    }
    return -acc / model.sigma_n2();
  }
  double acc = 0.0;
  for (Eigen::Index t = 0; t < y.cols(); ++t) acc += y.col(t).dot(l.inv * y.col(t)).real();
  return -static_cast<double>(y.cols()) * l.logdet - acc;
}

double trapezoid(double lo, double hi, int nodes, const std::function<double(double)>& f) {
  if (!(hi > lo)) return 0.0;
  if (nodes < 2) nodes = 2;
  const double step = (hi - lo) / (nodes - 1);
  double acc = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < nodes - 1; ++i) acc += f(lo + i * step);
  return acc * step;
}

struct Region {
  double lo = 0.0;
  double hi = 0.0;
};

Region region_of(const PriorEntry& e, double u, double v) {
  if (const auto* p = std::get_if<UniformPrior>(&e)) {
    return {std::max({p->a, p->a - u, p->a - v}), std::min({p->b, p->b - u, p->b - v})};
  }
  const auto& g = std::get<GaussianPrior>(e);
  const double span = 10.0 * std::sqrt(g.sigma2);
  return {g.mu - span, g.mu + span};
}

// Uniform support tested with a small slack: region endpoints are computed as
// a - u, so x + u can land one ulp outside [a, b].
double density(const PriorSpec& prior, std::size_t d, double x) {
  if (const auto* p = std::get_if<UniformPrior>(&prior[d])) {
    const double slack = 1e-12 * p->length();
    return (x >= p->a - slack && x <= p->b + slack) ? 1.0 / p->length() : 0.0;
  }
  return prior.density(d, x);
}

double prior_weight(const PriorSpec& prior, std::size_t d, double alpha, double beta, double x, double u, double v) {
  const double w = 1.0 - alpha - beta;
  return std::pow(density(prior, d, x + u), alpha) * std::pow(density(prior, d, x + v), beta) *
         std::pow(density(prior, d, x), w);
}

}  // namespace

McEstimate mc_eta_prime(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                        const SignalModel& model, int samples, std::uint64_t seed, int workers) {
  if (samples < 2) throw std::invalid_argument("mc_eta_prime needs at least 2 samples");
  const Likelihood l0 = likelihood_for(geometry, model, theta);
  const Likelihood lu = likelihood_for(geometry, model, theta + args.u);
  const Likelihood lv = likelihood_for(geometry, model, theta + args.v);
  const auto m = static_cast<Eigen::Index>(geometry.size());
  const int t_count = model.snapshots();

  Eigen::MatrixXcd chol;
  if (!model.is_conditional()) {
    Eigen::MatrixXcd r = model.sigma_s2() * l0.a * l0.a.adjoint();
    r.diagonal().array() += model.sigma_n2();
    chol = Eigen::LLT<Eigen::MatrixXcd>(r).matrixL();
  }

  const std::size_t blocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
  std::vector<double> sums(blocks, 0.0), squares(blocks, 0.0);
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::mt19937_64 rng(mix(seed ^ mix(b + 1)));
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const int begin = static_cast<int>(b) * kBlock;
    const int end = std::min(samples, begin + kBlock);
    Eigen::MatrixXcd y(m, t_count);
    for (int k = begin; k < end; ++k) {
      for (int t = 0; t < t_count; ++t) {
        Eigen::VectorXcd w(m);
        for (Eigen::Index i = 0; i < m; ++i) {
          const double re = n(rng);
          const double im = n(rng);
          w(i) = cd{re, im};
        }
        if (model.is_conditional()) {
          y.col(t) = l0.a * model.waveform()[static_cast<std::size_t>(t)] + std::sqrt(model.sigma_n2()) * w;
        } else {
          y.col(t) = chol * w;
        }
      }
      const double base = log_lik(l0, model, y);
      double lr = 0.0;
      if (args.alpha != 0.0) lr += args.alpha * (log_lik(lu, model, y) - base);
      if (args.beta != 0.0) lr += args.beta * (log_lik(lv, model, y) - base);
      const double x = std::exp(lr);
      sums[b] += x;
      squares[b] += x * x;
    }
  });
  double sum = 0.0, sq = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    sum += sums[b];
    sq += squares[b];
  }
  const double n = samples;
  McEstimate out;
  out.estimate = sum / n;
  const double var = std::max(0.0, (sq - n * out.estimate * out.estimate) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  return out;
}

LogDet dense_det_combo(const ArrayGeometry& geometry, const SignalModel& model, const std::vector<double>& weights,
                       const std::vector<Eigen::VectorXd>& thetas) {
  if (weights.size() != thetas.size() || weights.empty() || weights.size() > 3) {
    throw std::invalid_argument("dense_det_combo takes 1 to 3 (weight, theta) pairs");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > kWeightSumTolerance) throw std::invalid_argument("weights must sum to 1");
  const auto m = static_cast<Eigen::Index>(geometry.size());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(m, m);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const Eigen::VectorXcd a = steering_vector(geometry, thetas[k]);
    Eigen::MatrixXcd r = model.sigma_s2() * a * a.adjoint();
    r.diagonal().array() += model.sigma_n2();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(r);
    if (!lu.isInvertible()) throw std::invalid_argument("singular covariance");
    sum += weights[k] * lu.inverse();
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sum);
  const cd det = lu.determinant();
  LogDet d;
  const double re = det.real();
  if (re == 0.0) {
    d.log_abs = -std::numeric_limits<double>::infinity();
    d.sign = 0;
    return d;
  }
  d.log_abs = lu.matrixLU().diagonal().array().abs().log().sum();
  d.sign = re > 0.0 ? 1 : -1;
  return d;
}

double zeta_direct(const ArrayGeometry& geometry, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
  const Eigen::MatrixXcd d = steering_matrix(geometry, theta + mu) - steering_matrix(geometry, theta + rho);
  const Eigen::MatrixXcd rinv = model.noise_cov.fullPivLu().inverse();
  double acc = 0.0;
  for (Eigen::Index t = 0; t < model.waveforms.cols(); ++t) {
    const Eigen::VectorXcd x = d * model.waveforms.col(t);
    acc += x.dot(rinv * x).real();
  }
  return acc;
}

double quadrature_eta(const LogEtaPrimeFn& log_eta_prime, const PriorSpec& prior, const EtaArgs& args,
                      bool theta_independent, int nodes) {
  args.validate(static_cast<Eigen::Index>(prior.size()));
  const std::size_t q = prior.size();
  if (q > 2) throw std::invalid_argument("quadrature_eta handles one or two parameters");
  std::vector<Region> regions;
  for (std::size_t d = 0; d < q; ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    regions.push_back(region_of(prior[d], args.u(i), args.v(i)));
    if (!(regions.back().hi > regions.back().lo)) return 0.0;
  }

  if (theta_independent) {
    Eigen::VectorXd center(static_cast<Eigen::Index>(q));
    double acc = 1.0;
    for (std::size_t d = 0; d < q; ++d) {
      const auto i = static_cast<Eigen::Index>(d);
      center(i) = 0.5 * (regions[d].lo + regions[d].hi);
      acc *= trapezoid(regions[d].lo, regions[d].hi, nodes, [&](double x) {
        return prior_weight(prior, d, args.alpha, args.beta, x, args.u(i), args.v(i));
      });
    }
    return acc * std::exp(log_eta_prime(center));
  }

  if (q == 1) {
    return trapezoid(regions[0].lo, regions[0].hi, nodes, [&](double x) {
      const Eigen::VectorXd t = Eigen::VectorXd::Constant(1, x);
      return std::exp(log_eta_prime(t)) * prior_weight(prior, 0, args.alpha, args.beta, x, args.u(0), args.v(0));
    });
  }
  return trapezoid(regions[0].lo, regions[0].hi, nodes, [&](double x) {
    return trapezoid(regions[1].lo, regions[1].hi, nodes, [&](double y) {
      const Eigen::Vector2d t(x, y);
      return std::exp(log_eta_prime(t)) * prior_weight(prior, 0, args.alpha, args.beta, x, args.u(0), args.v(0)) *
             prior_weight(prior, 1, args.alpha, args.beta, y, args.u(1), args.v(1));
    });
  });
}

}  // namespace wwbkit::oracle
