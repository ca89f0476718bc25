#include "wwbkit/signal_model.hpp"

#include <cmath>
#include <stdexcept>

namespace wwbkit {

SignalModel SignalModel::unconditional(double sigma_s2, double sigma_n2, int snapshots) {
  if (!(sigma_s2 > 0.0) || !std::isfinite(sigma_s2)) throw std::invalid_argument("sigma_s2 must be > 0");
  if (!(sigma_n2 > 0.0) || !std::isfinite(sigma_n2)) throw std::invalid_argument("sigma_n2 must be > 0");
  if (snapshots < 1) throw std::invalid_argument("snapshots must be >= 1");
  return SignalModel(Unconditional{sigma_s2}, sigma_n2, snapshots);
}

SignalModel SignalModel::conditional(std::vector<cd> waveform, double sigma_n2) {
  if (waveform.empty()) throw std::invalid_argument("conditional waveform must be non-empty");
  if (!(sigma_n2 > 0.0) || !std::isfinite(sigma_n2)) throw std::invalid_argument("sigma_n2 must be > 0");
  double energy = 0.0;
  for (const auto& x : waveform) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw std::invalid_argument("waveform samples must be finite");
    }
    energy += std::norm(x);
  }
  if (!(energy > 0.0)) throw std::invalid_argument("conditional waveform has zero energy");
  const int t = static_cast<int>(waveform.size());
  return SignalModel(Conditional{std::move(waveform)}, sigma_n2, t);
}

SignalModel SignalModel::conditional_constant(int snapshots, double sigma_n2) {
  if (snapshots < 1) throw std::invalid_argument("snapshots must be >= 1");
  return conditional(std::vector<cd>(static_cast<std::size_t>(snapshots), cd{1.0, 0.0}), sigma_n2);
}

double SignalModel::sigma_s2() const {
  if (const auto* u = std::get_if<Unconditional>(&source_)) return u->sigma_s2;
  throw std::logic_error("sigma_s2 requested from a conditional model");
}

std::span<const cd> SignalModel::waveform() const {
  if (const auto* c = std::get_if<Conditional>(&source_)) return c->waveform;
  throw std::logic_error("waveform requested from an unconditional model");
}

double SignalModel::u_snr(std::size_t m) const {
  const double ss = sigma_s2();
  return ss * ss / (sigma_n2_ * (static_cast<double>(m) * ss + sigma_n2_));
}

double SignalModel::c_snr() const {
  double energy = 0.0;
  for (const auto& x : waveform()) energy += std::norm(x);
  return energy / sigma_n2_;
}

double SignalModel::snr() const {
  if (is_conditional()) return c_snr() / snapshots_;
  return sigma_s2() / sigma_n2_;
}

SignalModel SignalModel::with_snr_db(double db) const {
  const double target = std::pow(10.0, db / 10.0);
  if (!is_conditional()) return unconditional(target * sigma_n2_, sigma_n2_, snapshots_);
  const double scale = std::sqrt(target / snr());
  std::vector<cd> w(waveform().begin(), waveform().end());
  for (auto& x : w) x *= scale;
  return conditional(std::move(w), sigma_n2_);
}

Eigen::MatrixXcd observation_covariance(const ArrayGeometry& geometry, const SignalModel& model,
                                        const Eigen::VectorXd& theta) {
  if (model.is_conditional()) {
    throw std::invalid_argument("observation_covariance needs an unconditional model");
  }
  const Eigen::VectorXcd a = steering_vector(geometry, theta);
  Eigen::MatrixXcd r = model.sigma_s2() * (a * a.adjoint());
  r.diagonal().array() += model.sigma_n2();
  return r;
}

double log_det_observation_covariance(std::size_t m, const SignalModel& model) {
  const double md = static_cast<double>(m);
  return md * std::log(model.sigma_n2()) + std::log1p(model.sigma_s2() / model.sigma_n2() * md);
}

}  // namespace wwbkit
