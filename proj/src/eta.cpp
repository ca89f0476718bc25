#include "wwbkit/eta.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "wwbkit/error.hpp"

namespace wwbkit {

namespace {

constexpr double kPi = std::numbers::pi;

void check_weight_sum(double sum) {
  if (!(std::abs(sum - 1.0) <= kWeightSumTolerance)) {
    throw std::invalid_argument("determinant lemma weights must sum to 1");
  }
}

void check_unconditional(const SignalModel& model) {
  if (model.is_conditional()) throw std::invalid_argument("determinant lemmas need an unconditional model");
}

LogDet make_logdet(double val, double log_scale) {
  LogDet d;
  if (val == 0.0) {
    d.log_abs = -std::numeric_limits<double>::infinity();
    d.sign = 0;
    return d;
  }
  d.log_abs = std::log(std::abs(val)) + log_scale;
  d.sign = val > 0.0 ? 1 : -1;
  return d;
}

struct LemmaTerms {
  double psi_sum = 0.0;  // sum m_k sigma_n2 / (sigma_s2 ||a_k||^2 + sigma_n2) = 1 - sum c_k ||a_k||^2
  std::vector<double> c;
  std::vector<double> n;
};

// Weighted inverse-covariance combination expressed through c_k = m_k phi_k.
// The first-order term 1 - sum c_k ||a_k||^2 is rewritten with sum m_k = 1 to
// avoid cancellation at high SNR.
LemmaTerms lemma_terms(const std::vector<Eigen::VectorXcd>& a, const std::vector<double>& m, double ss,
                       double sn) {
  LemmaTerms t;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double nk = a[k].squaredNorm();
    const double denom = ss * nk + sn;
    t.n.push_back(nk);
    t.c.push_back(m[k] * ss / denom);
    t.psi_sum += m[k] * sn / denom;
  }
  return t;
}

// 4 sin^2(x/2) = |e^{jx} - 1|^2 without cancellation at small x.
double chord2(double x) {
  const double s = std::sin(0.5 * x);
  return 4.0 * s * s;
}

int nonzero_index(const Eigen::VectorXd& x, const char* name) {
  int idx = -1;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) {
      if (idx >= 0) throw std::invalid_argument(std::string(name) + " has more than one nonzero entry");
      idx = static_cast<int>(i);
    }
  }
  return idx;
}

bool single_nonzero(const Eigen::VectorXd& x) {
  int count = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) count += x(i) != 0.0;
  return count <= 1;
}

void check_displacements(const ArrayGeometry& g, Eigen::Index sources, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
  const Eigen::Index q = sources * g.parameter_count();
  if (theta.size() != q || mu.size() != q || rho.size() != q) {
    throw std::invalid_argument("zeta: theta, mu, rho must have N * parameter_count entries");
  }
}

// Same-source white-noise kernel: sum_i |e^{-j2pi r.mu} - e^{-j2pi r.rho}|^2.
double same_source_white(const ArrayGeometry& g, const double* mu, const double* rho) {
  const int p = g.parameter_count();
  double diff[2] = {mu[0] - rho[0], p == 2 ? mu[1] - rho[1] : 0.0};
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += chord2(2.0 * kPi * g.phase_term(i, diff));
  return acc;
}

cd expj(double x) { return {std::cos(x), std::sin(x)}; }

// Column n of A(theta+mu) - A(theta+rho).
Eigen::VectorXcd column_difference(const ArrayGeometry& g, const double* theta, const double* mu,
                                   const double* rho) {
  const int p = g.parameter_count();
  double t1[2] = {theta[0] + mu[0], p == 2 ? theta[1] + mu[1] : 0.0};
  double t2[2] = {theta[0] + rho[0], p == 2 ? theta[1] + rho[1] : 0.0};
  Eigen::VectorXcd d(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x1 = 2.0 * kPi * g.phase_term(i, t1);
    const double x2 = 2.0 * kPi * g.phase_term(i, t2);
    // e^{jx1} - e^{jx2} = 2j sin((x1-x2)/2) e^{j(x1+x2)/2}
    d(static_cast<Eigen::Index>(i)) = cd{0.0, 2.0 * std::sin(0.5 * (x1 - x2))} * expj(0.5 * (x1 + x2));
  }
  return d;
}

double waveform_gram(const Eigen::MatrixXcd& s, Eigen::Index m) { return s.row(m).squaredNorm(); }

cd waveform_cross(const Eigen::MatrixXcd& s, Eigen::Index m, Eigen::Index n) {
  return s.row(m).dot(s.row(n));
}

double logdet_llt(const Eigen::MatrixXcd& r, const char* what) {
  Eigen::LLT<Eigen::MatrixXcd> llt(r);
  if (llt.info() != Eigen::Success) throw InvalidRegion(std::string(what) + " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
}

// Direct sum_t ||R^{-1/2} (A(theta+mu) - A(theta+rho)) s(t)||^2 for arbitrary displacements.
double zeta_dense(const ArrayGeometry& g, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
  const Eigen::MatrixXcd d = steering_matrix(g, theta + mu) - steering_matrix(g, theta + rho);
  const Eigen::MatrixXcd x = d * model.waveforms;
  Eigen::LLT<Eigen::MatrixXcd> llt(model.noise_cov);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("noise covariance is not positive definite");
  const Eigen::MatrixXcd w = llt.matrixL().solve(x);
  return w.squaredNorm();
}

}  // namespace

void EtaArgs::validate(Eigen::Index q) const {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("alpha and beta must lie in [0,1]");
  }
  if (u.size() != q || v.size() != q) throw std::invalid_argument("u and v must have q entries");
  if (!u.allFinite() || !v.allFinite()) throw std::invalid_argument("u and v must be finite");
}

double LogDet::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

LogDet det_combo2(const ArrayGeometry& geometry, const SignalModel& model, double m1, double m2,
                  const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2) {
  check_unconditional(model);
  check_weight_sum(m1 + m2);
  const std::vector<Eigen::VectorXcd> a{steering_vector(geometry, theta1), steering_vector(geometry, theta2)};
  const double sn = model.sigma_n2();
  const LemmaTerms t = lemma_terms(a, {m1, m2}, model.sigma_s2(), sn);
  const double g12 = std::norm(a[0].dot(a[1]));
  const double val = t.psi_sum + t.c[0] * t.c[1] * (t.n[0] * t.n[1] - g12);
  return make_logdet(val, -static_cast<double>(geometry.size()) * std::log(sn));
}

LogDet det_combo3(const ArrayGeometry& geometry, const SignalModel& model, double m1, double m2, double m3,
                  const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2,
                  const Eigen::VectorXd& theta3) {
  check_unconditional(model);
  check_weight_sum(m1 + m2 + m3);
  const std::vector<Eigen::VectorXcd> a{steering_vector(geometry, theta1), steering_vector(geometry, theta2),
                                        steering_vector(geometry, theta3)};
  const double sn = model.sigma_n2();
  const LemmaTerms t = lemma_terms(a, {m1, m2, m3}, model.sigma_s2(), sn);
  // g_kl = a_k^H a_l
  const cd g12 = a[0].dot(a[1]);
  const cd g13 = a[0].dot(a[2]);
  const cd g23 = a[1].dot(a[2]);
  const double n1 = t.n[0], n2 = t.n[1], n3 = t.n[2];
  const double c1 = t.c[0], c2 = t.c[1], c3 = t.c[2];
  const double pair = c1 * c2 * (n1 * n2 - std::norm(g12)) + c1 * c3 * (n1 * n3 - std::norm(g13)) +
                      c2 * c3 * (n2 * n3 - std::norm(g23));
  // a3^H a2 a1^H a3 a2^H a1 and its conjugate-ordered partner
  const cd triple = std::conj(g23) * g13 * std::conj(g12);
  const double gram = n1 * n2 * n3 - n1 * std::norm(g23) - n2 * std::norm(g13) - n3 * std::norm(g12) +
                      2.0 * triple.real();
  const double val = t.psi_sum + pair - c1 * c2 * c3 * gram;
  return make_logdet(val, -static_cast<double>(geometry.size()) * std::log(sn));
}

double log_eta_prime_cov(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                         const SignalModel& model) {
  check_unconditional(model);
  args.validate(geometry.parameter_count());
  if (theta.size() != geometry.parameter_count()) throw std::invalid_argument("theta dimension mismatch");
  const double a = args.alpha, b = args.beta;
  const LogDet d = det_combo3(geometry, model, a, b, 1.0 - a - b, theta + args.u, theta + args.v, theta);
  if (d.sign <= 0) throw InvalidRegion("combined inverse covariance is not positive definite");
  // |R| is theta-independent, so the exponents collapse to -T (log|R| + log|Gamma^{-1}|).
  const double ell = log_det_observation_covariance(geometry.size(), model);
  return -model.snapshots() * (ell + d.log_abs);
}

double eta_prime_cov(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                     const SignalModel& model) {
  return std::exp(log_eta_prime_cov(args, theta, geometry, model));
}

SourceCovarianceModel SourceCovarianceModel::from(const SignalModel& model, std::size_t m) {
  SourceCovarianceModel out;
  out.source_cov = Eigen::MatrixXcd::Constant(1, 1, model.sigma_s2());
  out.noise_cov = model.sigma_n2() * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(m),
                                                                  static_cast<Eigen::Index>(m));
  out.snapshots = model.snapshots();
  return out;
}

double log_eta_prime_cov_dense(const EtaArgs& args, const Eigen::VectorXd& theta,
                               const ArrayGeometry& geometry, const SourceCovarianceModel& model) {
  const Eigen::Index q = model.source_cov.rows() * geometry.parameter_count();
  args.validate(q);
  if (theta.size() != q) throw std::invalid_argument("theta dimension mismatch");

  auto cov = [&](const Eigen::VectorXd& t) {
    const Eigen::MatrixXcd a = steering_matrix(geometry, t);
    Eigen::MatrixXcd r = a * model.source_cov * a.adjoint() + model.noise_cov;
    return Eigen::MatrixXcd(0.5 * (r + r.adjoint()));
  };
  const Eigen::MatrixXcd r0 = cov(theta), ru = cov(theta + args.u), rv = cov(theta + args.v);
  const Eigen::Index m = r0.rows();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m, m);
  const double l0 = logdet_llt(r0, "R(theta)");
  const double lu = logdet_llt(ru, "R(theta+u)");
  const double lv = logdet_llt(rv, "R(theta+v)");
  const double a = args.alpha, b = args.beta;
  Eigen::MatrixXcd gamma = a * Eigen::LLT<Eigen::MatrixXcd>(ru).solve(eye) +
                           b * Eigen::LLT<Eigen::MatrixXcd>(rv).solve(eye) -
                           (a + b - 1.0) * Eigen::LLT<Eigen::MatrixXcd>(r0).solve(eye);
  gamma = 0.5 * (gamma + gamma.adjoint());
  const double lg = logdet_llt(gamma, "combined inverse covariance");
  return model.snapshots * ((a + b - 1.0) * l0 - a * lu - b * lv - lg);
}

SourceWaveformModel SourceWaveformModel::from(const SignalModel& model, std::size_t m) {
  SourceWaveformModel out;
  const auto w = model.waveform();
  out.waveforms.resize(1, static_cast<Eigen::Index>(w.size()));
  for (std::size_t t = 0; t < w.size(); ++t) out.waveforms(0, static_cast<Eigen::Index>(t)) = w[t];
  out.noise_cov = model.sigma_n2() * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(m),
                                                                  static_cast<Eigen::Index>(m));
  return out;
}

double zeta(const ArrayGeometry& geometry, const SignalModel& model, const Eigen::VectorXd& theta,
            const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
  if (!model.is_conditional()) throw std::invalid_argument("zeta needs a conditional model");
  check_displacements(geometry, 1, theta, mu, rho);
  nonzero_index(mu, "mu");
  nonzero_index(rho, "rho");
  return model.c_snr() * same_source_white(geometry, mu.data(), rho.data());
}

namespace {

enum class NoiseForm { White, General };

double zeta_blocks(const ArrayGeometry& g, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& mu, const Eigen::VectorXd& rho, NoiseForm form) {
  check_displacements(g, model.sources(), theta, mu, rho);
  const int p = g.parameter_count();
  const int im = nonzero_index(mu, "mu");
  const int ir = nonzero_index(rho, "rho");
  if (im < 0 && ir < 0) return 0.0;
  const Eigen::Index bm = (im >= 0 ? im : ir) / p;
  const Eigen::Index bn = (ir >= 0 ? ir : im) / p;
  const double* th = theta.data();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);

  if (form == NoiseForm::White) {
    const double s2 = model.noise_cov(0, 0).real();
    if (bm == bn) {
      return waveform_gram(model.waveforms, bm) / s2 *
             same_source_white(g, mu.data() + bm * p, rho.data() + bm * p);
    }
    const Eigen::VectorXcd kappa = column_difference(g, th + bm * p, mu.data() + bm * p, zero.data());
    const Eigen::VectorXcd varrho = column_difference(g, th + bn * p, zero.data(), rho.data() + bn * p);
    const double kk = same_source_white(g, mu.data() + bm * p, zero.data());
    const double rr = same_source_white(g, zero.data(), rho.data() + bn * p);
    const cd kr = kappa.dot(varrho);
    return (kk * waveform_gram(model.waveforms, bm) + rr * waveform_gram(model.waveforms, bn) +
            2.0 * (kr * waveform_cross(model.waveforms, bm, bn)).real()) /
           s2;
  }

  const Eigen::MatrixXcd rinv = model.noise_cov.llt().solve(
      Eigen::MatrixXcd::Identity(model.noise_cov.rows(), model.noise_cov.cols()));
  if (bm == bn) {
    const Eigen::VectorXcd d = column_difference(g, th + bm * p, mu.data() + bm * p, rho.data() + bm * p);
    return d.dot(rinv * d).real() * waveform_gram(model.waveforms, bm);
  }
  const Eigen::VectorXcd kappa = column_difference(g, th + bm * p, mu.data() + bm * p, zero.data());
  const Eigen::VectorXcd varrho = column_difference(g, th + bn * p, zero.data(), rho.data() + bn * p);
  const double kk = kappa.dot(rinv * kappa).real();
  const double rr = varrho.dot(rinv * varrho).real();
  const cd kr = kappa.dot(rinv * varrho);
  return kk * waveform_gram(model.waveforms, bm) + rr * waveform_gram(model.waveforms, bn) +
         2.0 * (kr * waveform_cross(model.waveforms, bm, bn)).real();
}

}  // namespace

double zeta_general(const ArrayGeometry& geometry, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
  return zeta_blocks(geometry, model, theta, mu, rho, NoiseForm::General);
}

double zeta_white(const ArrayGeometry& geometry, const SourceWaveformModel& model, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
  return zeta_blocks(geometry, model, theta, mu, rho, NoiseForm::White);
}

double log_eta_prime_mean(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                          const SignalModel& model) {
  if (!model.is_conditional()) throw std::invalid_argument("eta_prime_mean needs a conditional model");
  args.validate(geometry.parameter_count());
  if (theta.size() != geometry.parameter_count()) throw std::invalid_argument("theta dimension mismatch");
  const double a = args.alpha, b = args.beta, w = 1.0 - a - b;
  const double zero[2] = {0.0, 0.0};
  const double c = model.c_snr();
  double acc = 0.0;
  if (a * w != 0.0) acc += a * w * same_source_white(geometry, args.u.data(), zero);
  if (a * b != 0.0) acc += a * b * same_source_white(geometry, args.u.data(), args.v.data());
  if (b * w != 0.0) acc += b * w * same_source_white(geometry, args.v.data(), zero);
  return -c * acc;
}

double eta_prime_mean(const EtaArgs& args, const Eigen::VectorXd& theta, const ArrayGeometry& geometry,
                      const SignalModel& model) {
  return std::exp(log_eta_prime_mean(args, theta, geometry, model));
}

double log_eta_prime_mean_general(const EtaArgs& args, const Eigen::VectorXd& theta,
                                  const ArrayGeometry& geometry, const SourceWaveformModel& model) {
  const Eigen::Index q = model.sources() * geometry.parameter_count();
  args.validate(q);
  if (theta.size() != q) throw std::invalid_argument("theta dimension mismatch");
  const double a = args.alpha, b = args.beta, w = 1.0 - a - b;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(q);
  const bool closed = single_nonzero(args.u) && single_nonzero(args.v);
  auto z = [&](const Eigen::VectorXd& mu, const Eigen::VectorXd& rho) {
    return closed ? zeta_general(geometry, model, theta, mu, rho) : zeta_dense(geometry, model, theta, mu, rho);
  };
  double acc = 0.0;
  if (a * w != 0.0) acc += a * w * z(args.u, zero);
  if (a * b != 0.0) acc += a * b * z(args.u, args.v);
  if (b * w != 0.0) acc += b * w * z(args.v, zero);
  return -acc;
}

}  // namespace wwbkit
