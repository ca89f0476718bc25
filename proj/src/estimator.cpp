#include "wwbkit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wwbkit/optimizer.hpp"

namespace wwbkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCoarsePoints = 128;
constexpr std::size_t kPeakCandidates = 8;
constexpr double kGaussianGridSpan = 5.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

cd circular(std::mt19937_64& rng, double power) {
  if (power == 0.0) return {0.0, 0.0};
  std::normal_distribution<double> n(0.0, std::sqrt(0.5 * power));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

// Vertex offset of the parabola through (-1, fm), (0, f0), (1, fp), in [-0.5, 0.5].
double parabola_offset(double fm, double f0, double fp) {
  const double den = fm - 2.0 * f0 + fp;
  if (!(den < 0.0)) return 0.0;
  return std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
}

}  // namespace

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  const std::uint64_t k = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (trial * 0xD1B54A32D192ED03ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXcd simulate_unconditional(const ArrayGeometry& geometry, const Eigen::VectorXd& theta, double sigma_s2,
                                        double sigma_n2, int snapshots, std::mt19937_64& rng) {
  if (sigma_s2 < 0.0 || sigma_n2 < 0.0 || snapshots < 1) throw std::invalid_argument("invalid simulation powers");
  const Eigen::VectorXcd a = steering_vector(geometry, theta);
  const Eigen::Index m = a.size();
  Eigen::MatrixXcd y(m, snapshots);
  for (int t = 0; t < snapshots; ++t) {
    const cd s = circular(rng, sigma_s2);
    for (Eigen::Index i = 0; i < m; ++i) y(i, t) = a(i) * s + circular(rng, sigma_n2);
  }
  return y;
}

Eigen::MatrixXcd simulate_conditional(const ArrayGeometry& geometry, const Eigen::VectorXd& theta,
                                      std::span<const cd> waveform, double sigma_n2, std::mt19937_64& rng) {
  if (sigma_n2 < 0.0 || waveform.empty()) throw std::invalid_argument("invalid conditional simulation inputs");
  const Eigen::VectorXcd a = steering_vector(geometry, theta);
  const Eigen::Index m = a.size();
  const auto t_count = static_cast<Eigen::Index>(waveform.size());
  Eigen::MatrixXcd y(m, t_count);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (Eigen::Index i = 0; i < m; ++i) y(i, t) = a(i) * waveform[static_cast<std::size_t>(t)] + circular(rng, sigma_n2);
  }
  return y;
}

Eigen::MatrixXcd simulate(const ArrayGeometry& geometry, const SignalModel& model, const Eigen::VectorXd& theta,
                          std::mt19937_64& rng) {
  if (model.is_conditional()) return simulate_conditional(geometry, theta, model.waveform(), model.sigma_n2(), rng);
  return simulate_unconditional(geometry, theta, model.sigma_s2(), model.sigma_n2(), model.snapshots(), rng);
}

MapGrid MapGrid::over(const PriorSpec& prior, int points) {
  if (points < 3) throw std::invalid_argument("MAP grid needs at least 3 points per parameter");
  MapGrid g;
  for (const auto& e : prior.entries()) {
    double lo, hi;
    if (const auto* u = std::get_if<UniformPrior>(&e)) {
      lo = u->a;
      hi = u->b;
    } else {
      const auto& gp = std::get<GaussianPrior>(e);
      lo = gp.mu - kGaussianGridSpan * std::sqrt(gp.sigma2);
      hi = gp.mu + kGaussianGridSpan * std::sqrt(gp.sigma2);
    }
    std::vector<double> axis(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) axis[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    axis.back() = hi;
    g.axes.push_back(std::move(axis));
  }
  return g;
}

struct MapEstimator::Statistic {
  bool quadratic = false;
  Eigen::MatrixXcd s;  // sum_t y y^H
  Eigen::VectorXcd z;  // sum_t s*(t) y(t)
  double scale = 1.0;
};

MapEstimator::MapEstimator(ArrayGeometry geometry, SignalModel model, PriorSpec prior, int points)
    : geometry_(std::move(geometry)), model_(std::move(model)), prior_(std::move(prior)) {
  if (prior_.size() != static_cast<std::size_t>(geometry_.parameter_count())) {
    throw std::invalid_argument("prior must have one entry per parameter");
  }
  grid_ = MapGrid::over(prior_, points);
  const auto m = static_cast<Eigen::Index>(geometry_.size());
  const auto n = static_cast<Eigen::Index>(points);
  phase_x_.resize(m, n);
  phase_y_.resize(m, geometry_.parameter_count() == 2 ? n : 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = geometry_.sensors()[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      phase_x_(i, k) = std::polar(1.0, kTwoPi * p.dx * grid_.axes[0][static_cast<std::size_t>(k)]);
      if (phase_y_.cols() > 0) phase_y_(i, k) = std::polar(1.0, kTwoPi * p.dy * grid_.axes[1][static_cast<std::size_t>(k)]);
    }
  }
  for (std::size_t d = 0; d < prior_.size(); ++d) {
    std::vector<double> lp;
    for (double x : grid_.axes[d]) {
      const double px = prior_.density(d, x);
      lp.push_back(px > 0.0 ? std::log(px) : -std::numeric_limits<double>::infinity());
    }
    log_prior_.push_back(std::move(lp));
  }
}

MapEstimator::Statistic MapEstimator::statistic(const Eigen::MatrixXcd& y) const {
  Statistic st;
  const double sn = model_.sigma_n2();
  if (model_.is_conditional()) {
    const auto w = model_.waveform();
    if (static_cast<std::size_t>(y.cols()) != w.size()) throw std::invalid_argument("observation length mismatch");
    st.z = Eigen::VectorXcd::Zero(y.rows());
    for (Eigen::Index t = 0; t < y.cols(); ++t) st.z += std::conj(w[static_cast<std::size_t>(t)]) * y.col(t);
    st.scale = 2.0 / sn;
  } else {
    st.quadratic = true;
    st.s = y * y.adjoint();
    const double ss = model_.sigma_s2();
    st.scale = ss / (static_cast<double>(geometry_.size()) * ss + sn) / sn;
  }
  return st;
}

double MapEstimator::eval(const Statistic& st, std::size_t iu, std::size_t iv) const {
  const auto ku = static_cast<Eigen::Index>(iu), kv = static_cast<Eigen::Index>(iv);
  const Eigen::Index m = phase_x_.rows();
  double lp = log_prior_[0][iu];
  Eigen::VectorXcd a(m);
  if (phase_y_.cols() > 0) {
    a = phase_x_.col(ku).cwiseProduct(phase_y_.col(kv));
    lp += log_prior_[1][iv];
  } else {
    a = phase_x_.col(ku);
  }
  if (st.quadratic) return st.scale * a.dot(st.s * a).real() + lp;
  return st.scale * a.dot(st.z).real() + lp;
}

double MapEstimator::eval_at(const Statistic& st, const Eigen::VectorXd& theta) const {
  const Eigen::VectorXcd a = steering_vector(geometry_, theta);
  const double lp = prior_.log_density(theta);
  if (st.quadratic) return st.scale * a.dot(st.s * a).real() + lp;
  return st.scale * a.dot(st.z).real() + lp;
}

double MapEstimator::objective(const Eigen::MatrixXcd& y, const Eigen::VectorXd& theta) const {
  return eval_at(statistic(y), theta);
}

Eigen::VectorXd MapEstimator::estimate(const Eigen::MatrixXcd& y) const {
  if (y.rows() != static_cast<Eigen::Index>(geometry_.size())) throw std::invalid_argument("observation rows != M");
  const Statistic st = statistic(y);
  const std::size_t n = grid_.axes[0].size();
  auto step_of = [&](std::size_t d) { return grid_.axes[d][1] - grid_.axes[d][0]; };

  if (grid_.axes.size() == 1) {
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = eval(st, k, 0);
    const std::size_t best = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
    double x = grid_.axes[0][best];
    if (best > 0 && best + 1 < n) x += step_of(0) * parabola_offset(f[best - 1], f[best], f[best + 1]);
    return Eigen::VectorXd::Constant(1, x);
  }

  const std::size_t nv = grid_.axes[1].size();
  const std::size_t stride = std::max<std::size_t>(1, (n - 1 + kCoarsePoints - 2) / (kCoarsePoints - 1));
  std::vector<std::size_t> cu, cv;
  for (std::size_t k = 0; k < n; k += stride) cu.push_back(k);
  if (cu.back() != n - 1) cu.push_back(n - 1);
  for (std::size_t k = 0; k < nv; k += stride) cv.push_back(k);
  if (cv.back() != nv - 1) cv.push_back(nv - 1);

  const std::size_t nu_c = cu.size(), nv_c = cv.size();
  std::vector<double> coarse(nu_c * nv_c);
  for (std::size_t i = 0; i < nu_c; ++i) {
    for (std::size_t j = 0; j < nv_c; ++j) coarse[i * nv_c + j] = eval(st, cu[i], cv[j]);
  }
  // Local maxima of the coarse lattice, best first.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < nu_c; ++i) {
    for (std::size_t j = 0; j < nv_c; ++j) {
      const double c = coarse[i * nv_c + j];
      bool is_peak = true;
      for (int di = -1; di <= 1 && is_peak; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(nu_c) || jj >= static_cast<long>(nv_c)) continue;
          if (coarse[static_cast<std::size_t>(ii) * nv_c + static_cast<std::size_t>(jj)] > c) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) peaks.push_back(i * nv_c + j);
    }
  }
  if (peaks.empty()) {
    peaks.push_back(static_cast<std::size_t>(std::max_element(coarse.begin(), coarse.end()) - coarse.begin()));
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return coarse[a] > coarse[b]; });
  if (peaks.size() > kPeakCandidates) peaks.resize(kPeakCandidates);
  std::sort(peaks.begin(), peaks.end());

  double best_f = -std::numeric_limits<double>::infinity();
  std::size_t bu = 0, bv = 0;
  bool found = false;
  for (std::size_t p : peaks) {
    const std::size_t ci = cu[p / nv_c], cj = cv[p % nv_c];
    const std::size_t u0 = ci >= stride ? ci - stride : 0, u1 = std::min(n - 1, ci + stride);
    const std::size_t v0 = cj >= stride ? cj - stride : 0, v1 = std::min(nv - 1, cj + stride);
    for (std::size_t iu = u0; iu <= u1; ++iu) {
      for (std::size_t iv = v0; iv <= v1; ++iv) {
        const double f = eval(st, iu, iv);
        if (!found || f > best_f || (f == best_f && (iu < bu || (iu == bu && iv < bv)))) {
          best_f = f;
          bu = iu;
          bv = iv;
          found = true;
        }
      }
    }
  }
  double xu = grid_.axes[0][bu], xv = grid_.axes[1][bv];
  if (bu > 0 && bu + 1 < n) xu += step_of(0) * parabola_offset(eval(st, bu - 1, bv), best_f, eval(st, bu + 1, bv));
  if (bv > 0 && bv + 1 < nv) xv += step_of(1) * parabola_offset(eval(st, bu, bv - 1), best_f, eval(st, bu, bv + 1));
  return Eigen::Vector2d(xu, xv);
}

MseRow mse_at(const Scenario& scenario, std::size_t snr_index, const MseOptions& options) {
  if (snr_index >= scenario.snr_db.size()) throw std::out_of_range("SNR index out of range");
  const int trials = options.trials > 0 ? options.trials : scenario.trials;
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::uint64_t seed = options.seed_override ? options.seed : scenario.seed;
  const double db = scenario.snr_db[snr_index];
  const ArrayGeometry geometry = scenario.geometry();
  const SignalModel model = scenario.model_at(db);
  const MapEstimator map(geometry, model, scenario.prior, scenario.map_grid);
  const auto q = static_cast<Eigen::Index>(scenario.prior.size());

  std::vector<Eigen::VectorXd> sq(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), options.workers, [&](std::size_t t) {
    std::mt19937_64 rng = trial_rng(seed, snr_index, t);
    const Eigen::VectorXd theta = scenario.prior.draw(rng);
    const Eigen::MatrixXcd y = simulate(geometry, model, theta, rng);
    sq[t] = (map.estimate(y) - theta).array().square();
  });

  MseRow row;
  row.snr_db = db;
  row.trials = trials;
  row.mse = Eigen::VectorXd::Zero(q);
  for (const auto& e : sq) row.mse += e;
  row.mse /= trials;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(q);
  for (const auto& e : sq) var += (e - row.mse).array().square().matrix();
  row.std_error = trials > 1 ? Eigen::VectorXd((var / (trials - 1)).array().sqrt() / std::sqrt(double(trials)))
                             : Eigen::VectorXd::Zero(q);
  return row;
}

}  // namespace wwbkit
