#include "wwbkit/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include "wwbkit/closed_form.hpp"
#include "wwbkit/error.hpp"
#include "wwbkit/eta.hpp"
#include "wwbkit/g_matrix.hpp"
#include "wwbkit/oracle.hpp"
#include "wwbkit/prior_integration.hpp"

namespace wwbkit {

namespace {

constexpr double kDeterministicTol = 1e-10;
constexpr double kPriorTol = 1e-8;
constexpr double kStationarityTol = 1e-6;
constexpr double kStationarityStep = 1e-4;
constexpr double kMcSigmas = 3.0;
constexpr double kMcRelativeError = 0.01;
constexpr int kMcSamples = 1000000;

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  const double d = std::abs(a - b) / scale;
  return std::isnan(d) ? kInf : d;
}

double rel_dev(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return kInf;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, rel_dev(a(i), b(i)));
  return worst;
}

CheckResult check(std::string op, std::string label, double deviation, double tolerance) {
  return {std::move(op), std::move(label), deviation, tolerance, deviation <= tolerance};
}

std::mt19937_64 suite_rng(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

struct Draw {
  std::mt19937_64 rng;
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double sign() { return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }
  // |x| in [lo, hi], random sign
  double signed_mag(double lo, double hi) { return sign() * uniform(lo, hi); }
  cd complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

  ArrayGeometry geometry(int m, bool planar) {
    if (!planar) {
      std::vector<double> dx;
      for (int i = 0; i < m; ++i) dx.push_back(uniform(-1.5, 1.5));
      return ArrayGeometry::linear(dx);
    }
    std::vector<SensorPosition> s;
    for (int i = 0; i < m; ++i) s.push_back({uniform(-1.0, 1.0), uniform(-1.0, 1.0)});
    return ArrayGeometry(s, ArrayKind::Planar);
  }

  Eigen::VectorXd vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = uniform(lo, hi);
    return x;
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// determinant lemmas against explicit matrices

SuiteReport appendix_c(const ValidationOptions& opt) {
  SuiteReport r{"appendix-c", {}, 0.0};
  Draw d{suite_rng(opt.seed, 0xC)};
  for (int k = 0; k < 200; ++k) {
    const int m = 2 + k % 3;
    const ArrayGeometry g = d.geometry(m, k % 4 >= 2);
    const auto q = g.parameter_count();
    const auto model = SignalModel::unconditional(d.uniform(0.1, 3.1), d.uniform(0.1, 3.1), 1);
    const Eigen::VectorXd t1 = d.vector(q, -1.0, 1.0), t2 = d.vector(q, -1.0, 1.0), t3 = d.vector(q, -1.0, 1.0);
    LogDet lemma, dense;
    std::string op;
    if (k % 2 == 0) {
      const double m1 = d.uniform(-0.5, 1.5);
      lemma = det_combo2(g, model, m1, 1.0 - m1, t1, t2);
      dense = oracle::dense_det_combo(g, model, {m1, 1.0 - m1}, {t1, t2});
      op = "det_combo2";
    } else {
      const double m1 = d.uniform(0.0, 1.0), m2 = d.uniform(0.0, 1.0);
      const double m3 = 1.0 - m1 - m2;
      lemma = det_combo3(g, model, m1, m2, m3, t1, t2, t3);
      dense = oracle::dense_det_combo(g, model, {m1, m2, m3}, {t1, t2, t3});
      op = "det_combo3";
    }
    const double dev = lemma.sign != dense.sign ? kInf : std::abs(std::expm1(lemma.log_abs - dense.log_abs));
    r.checks.push_back(check(op, fmt("instance %.0f, M=%.0f", k, m), dev, kDeterministicTol));
  }
  return r;
}

// zeta closed forms against direct evaluation

Eigen::VectorXd single_entry(Draw& d, Eigen::Index n, Eigen::Index at) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (at >= 0) x(at) = d.signed_mag(0.05, 1.0);
  return x;
}

SuiteReport appendix_d(const ValidationOptions& opt) {
  SuiteReport r{"appendix-d", {}, 0.0};
  Draw d{suite_rng(opt.seed, 0xD)};

  for (int k = 0; k < 20; ++k) {
    const ArrayGeometry g = d.geometry(d.integer(2, 6), k % 2 == 1);
    const auto q = g.parameter_count();
    std::vector<cd> w;
    const int t_count = d.integer(1, 5);
    for (int t = 0; t < t_count; ++t) w.push_back(d.complex(1.0));
    const auto model = SignalModel::conditional(w, d.uniform(0.2, 2.0));
    const Eigen::VectorXd theta = d.vector(q, -1.0, 1.0);
    const Eigen::VectorXd mu = single_entry(d, q, d.integer(0, q - 1));
    const Eigen::VectorXd rho = single_entry(d, q, k % 3 == 0 ? -1 : d.integer(0, q - 1));
    const double closed = zeta(g, model, theta, mu, rho);
    const double direct = oracle::zeta_direct(g, SourceWaveformModel::from(model, g.size()), theta, mu, rho);
    r.checks.push_back(check("zeta", fmt("single source %.0f", k), rel_dev(closed, direct), kDeterministicTol));
  }

  for (int k = 0; k < 40; ++k) {
    const bool white = k < 20;
    const int m = d.integer(2, 6);
    const ArrayGeometry g = d.geometry(m, k % 2 == 1);
    const auto q = g.parameter_count();
    const int n = d.integer(1, 3);
    const int t_count = d.integer(1, 4);
    SourceWaveformModel model;
    model.waveforms.resize(n, t_count);
    for (Eigen::Index i = 0; i < model.waveforms.size(); ++i) model.waveforms(i) = d.complex(1.0);
    if (white) {
      model.noise_cov = d.uniform(0.2, 2.0) * Eigen::MatrixXcd::Identity(m, m);
    } else {
      Eigen::MatrixXcd b(m, m);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = d.complex(1.0);
      model.noise_cov = b * b.adjoint() + 0.5 * Eigen::MatrixXcd::Identity(m, m);
    }
    const Eigen::Index len = n * q;
    const Eigen::VectorXd theta = d.vector(len, -1.0, 1.0);
    const Eigen::Index i = d.integer(0, static_cast<int>(len) - 1);
    const Eigen::Index j = k % 4 == 0 ? -1 : d.integer(0, static_cast<int>(len) - 1);
    const Eigen::VectorXd mu = single_entry(d, len, i);
    const Eigen::VectorXd rho = single_entry(d, len, j);
    const double closed = white ? zeta_white(g, model, theta, mu, rho) : zeta_general(g, model, theta, mu, rho);
    const double direct = oracle::zeta_direct(g, model, theta, mu, rho);
    const bool cross = j >= 0 && i / q != j / q;
    r.checks.push_back(check(white ? "zeta_white" : "zeta_general",
                             fmt(cross ? "N=%.0f cross-source %.0f" : "N=%.0f same-source %.0f", n, k),
                             rel_dev(closed, direct), kDeterministicTol));
  }
  return r;
}

// eta' closed forms against Monte-Carlo likelihood ratios

SuiteReport eta_mc(const ValidationOptions& opt) {
  SuiteReport r{"eta-mc", {}, 0.0};
  struct Case {
    double alpha, beta, u, v;
  };
  const Case cases[] = {
      {0.5, 0.5, 0.15, -0.1}, {0.3, 0.4, 0.2, 0.05}, {0.5, 0.0, 0.25, 0.0}, {0.2, 0.6, -0.1, 0.1}, {0.4, 0.2, 0.3, -0.2},
  };
  const ArrayGeometry g = ArrayGeometry::ula(2, 0.5);
  const auto uncond = SignalModel::unconditional(1.0, 1.0, 1);
  const auto cond = SignalModel::conditional({cd{0.8, 0.6}}, 1.0);
  int index = 0;
  for (const auto* model : {&uncond, &cond}) {
    for (const auto& c : cases) {
      EtaArgs args{c.alpha, c.beta, Eigen::VectorXd::Constant(1, c.u), Eigen::VectorXd::Constant(1, c.v)};
      const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.1 * index - 0.3);
      const double closed = model->is_conditional() ? eta_prime_mean(args, theta, g, *model)
                                                     : eta_prime_cov(args, theta, g, *model);
      const auto mc = oracle::mc_eta_prime(args, theta, g, *model, kMcSamples, opt.seed + 7919u * index, opt.workers);
      const double sigmas = mc.std_error > 0.0 ? std::abs(mc.estimate - closed) / mc.std_error
                                               : (mc.estimate == closed ? 0.0 : kInf);
      const bool precise = mc.std_error <= kMcRelativeError * std::abs(mc.estimate);
      auto res = check(model->is_conditional() ? "eta_prime_mean" : "eta_prime_cov",
                       fmt("closed %.6g, mc %.6g +- %.2g", closed, mc.estimate, mc.std_error), sigmas, kMcSigmas);
      res.passed = res.passed && precise;
      r.checks.push_back(res);
      ++index;
    }
  }
  return r;
}

// prior factors against brute-force quadrature

PriorEntry random_entry(Draw& d, bool uniform) {
  if (uniform) {
    const double a = d.uniform(-2.0, 0.5);
    return UniformPrior{a, a + d.uniform(0.5, 3.0)};
  }
  return GaussianPrior{d.uniform(-1.0, 1.0), d.uniform(0.05, 1.0)};
}

double displacement(Draw& d, const PriorEntry& e) {
  if (const auto* u = std::get_if<UniformPrior>(&e)) return d.uniform(-0.6, 0.6) * u->length();
  return d.uniform(-2.0, 2.0) * std::sqrt(std::get<GaussianPrior>(e).sigma2);
}

SuiteReport prior_quadrature(const ValidationOptions& opt) {
  SuiteReport r{"prior-quadrature", {}, 0.0};
  Draw d{suite_rng(opt.seed, 0xF)};
  for (int k = 0; k < 20; ++k) {
    // 8 uniform, 8 Gaussian, 4 mixed
    const std::size_t q = k % 2 == 0 ? 1 : 2;
    std::vector<PriorEntry> entries;
    for (std::size_t i = 0; i < (k >= 16 ? 2 : q); ++i) {
      entries.push_back(random_entry(d, k < 8 || (k >= 16 && i == 0)));
    }
    const PriorSpec prior(entries);
    const auto n = static_cast<Eigen::Index>(prior.size());
    EtaArgs args;
    args.alpha = d.uniform(0.0, 1.0);
    args.beta = d.uniform(0.0, 1.0 - args.alpha);
    args.u.resize(n);
    args.v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      args.u(i) = displacement(d, entries[static_cast<std::size_t>(i)]);
      args.v(i) = k % 5 == 0 ? (k % 10 == 0 ? args.u(i) : -args.u(i))
                             : displacement(d, entries[static_cast<std::size_t>(i)]);
    }
    const double level = d.uniform(-2.0, 0.0);
    const LogEtaPrimeFn fn = [level](const Eigen::VectorXd&) { return level; };

    std::string op;
    double closed_log;
    if (k < 8) {
      op = "uniform_log_factor";
      closed_log = uniform_log_factor(prior, args);
    } else if (k < 16) {
      op = "gaussian_log_factor";
      closed_log = gaussian_log_factor(prior, args);
    } else {
      op = "log_integrate_prior";
      closed_log = log_integrate_prior(fn, prior, args, true) - level;
    }
    const double closed = std::exp(level + closed_log);
    const double brute = oracle::quadrature_eta(fn, prior, args, true);
    r.checks.push_back(check(op, fmt("tuple %.0f, q=%.0f", k, static_cast<double>(n)), rel_dev(closed, brute), kPriorTol));
  }

  // theta-dependent integrands, one parameter
  for (int k = 0; k < 5; ++k) {
    const PriorSpec prior({random_entry(d, k < 3)});
    EtaArgs args{0.0, 0.0, Eigen::VectorXd(1), Eigen::VectorXd(1)};
    args.alpha = d.uniform(0.0, 1.0);
    args.beta = d.uniform(0.0, 1.0 - args.alpha);
    args.u(0) = displacement(d, prior[0]);
    args.v(0) = displacement(d, prior[0]);
    const double c = d.uniform(0.2, 2.0), t0 = d.uniform(-0.5, 0.5);
    const LogEtaPrimeFn fn = [c, t0](const Eigen::VectorXd& t) { return -c * (t(0) - t0) * (t(0) - t0); };
    const double value = std::exp(log_integrate_prior(fn, prior, args, false));
    const double brute = oracle::quadrature_eta(fn, prior, args, false);
    r.checks.push_back(check("log_integrate_prior", fmt("theta-dependent %.0f", k), rel_dev(value, brute), kPriorTol));
  }
  return r;
}

// closed forms against the general engine

template <typename F>
bool throws(F&& f) {
  try {
    f();
    return false;
  } catch (const InvalidRegion&) {
    return true;
  } catch (const DegenerateConfiguration&) {
    return true;
  }
}

SuiteReport closed_form_xcheck(const ValidationOptions& opt) {
  SuiteReport r{"closed-form-xcheck", {}, 0.0};
  Draw d{suite_rng(opt.seed, 0xA)};
  const PriorSpec prior2 = PriorSpec::uniform(2);
  const PriorSpec prior1 = PriorSpec::uniform(1);
  constexpr int kAttempts = 200;

  for (int k = 0; k < 50; ++k) {
    const int m = 2 + k % 5;
    const ArrayGeometry g = d.geometry(m, true);
    const double snr_db = d.uniform(-15.0, 5.0);
    const int t_count = 1 + k % 10;
    const auto uncond = SignalModel::unconditional(std::pow(10.0, snr_db / 10.0), 1.0, t_count);
    const auto cond = SignalModel::conditional_constant(t_count, 1.0).with_snr_db(snr_db);

    for (const auto* model : {&uncond, &cond}) {
      const bool c = model->is_conditional();
      const std::string op = c ? "planar_g_cond" : "planar_g_uncond";
      for (int rep = 0; rep < 4; ++rep) {
        bool done = false;
        for (int attempt = 0; attempt < kAttempts && !done; ++attempt) {
          PlanarBoundInputs in{d.signed_mag(0.05, 1.9), d.signed_mag(0.05, 1.9), 0.5, 0.5};
          if (rep > 0) {
            in.s_u = d.uniform(0.1, 0.9);
            in.s_v = d.uniform(0.1, 0.9);
          }
          const Eigen::Vector2d h(in.h_u, in.h_v), s(in.s_u, in.s_v);
          Eigen::MatrixXd closed, general;
          const bool ct = throws([&] { closed = (c ? planar_g_cond(g, *model, in) : planar_g_uncond(g, *model, in)).entries; });
          const bool gt = throws([&] { general = general_g_matrix(g, *model, prior2, h, s).entries; });
          if (ct != gt) {
            r.checks.push_back(check(op, fmt("M=%.0f: only one engine rejects h=(%.4g, %.4g)", m, in.h_u, in.h_v), kInf,
                                     kDeterministicTol));
            done = true;
          } else if (!ct && closed.allFinite() && general.allFinite()) {
            const std::string label = fmt("M=%.0f h=(%.4g, %.4g)", m, in.h_u, in.h_v) + fmt(" s=(%.3g, %.3g)", in.s_u, in.s_v);
            r.checks.push_back(check(rep == 0 ? op : op + "_general_s", label, rel_dev(closed, general), kDeterministicTol));
            if (rep == 0) {
              const Eigen::MatrixXd slow =
                  (c ? planar_g_cond_general_s(g, *model, in) : planar_g_uncond_general_s(g, *model, in)).entries;
              r.checks.push_back(check(op + "_general_s", label + " vs s=1/2 path", rel_dev(closed, slow), kDeterministicTol));
            }
            done = true;
          }
        }
        if (!done) r.checks.push_back(check(op, fmt("M=%.0f: no valid draw", m), kInf, kDeterministicTol));
      }
    }
  }

  for (int k = 0; k < 20; ++k) {
    const ArrayGeometry g = d.geometry(d.integer(2, 8), false);
    const double snr_db = d.uniform(-15.0, 10.0);
    const int t_count = d.integer(1, 20);
    const auto uncond = SignalModel::unconditional(std::pow(10.0, snr_db / 10.0), 1.0, t_count);
    const auto cond = SignalModel::conditional_constant(t_count, 1.0).with_snr_db(snr_db);
    for (const auto* model : {&uncond, &cond}) {
      const bool c = model->is_conditional();
      for (int attempt = 0; attempt < kAttempts; ++attempt) {
        const double h = d.signed_mag(0.02, 1.9);
        const double s = attempt == 0 && k % 2 == 0 ? 0.5 : d.uniform(0.1, 0.9);
        double closed = 0.0;
        Eigen::MatrixXd general;
        const bool ct = throws([&] { closed = c ? linear_cwwb(h, s, g, *model) : linear_uwwb(h, s, g, *model); });
        const bool gt = throws([&] {
          general = general_g_matrix(g, *model, prior1, Eigen::VectorXd::Constant(1, h), Eigen::VectorXd::Constant(1, s))
                        .entries;
        });
        const std::string op = c ? "linear_cwwb" : "linear_uwwb";
        if (ct != gt) {
          r.checks.push_back(check(op, fmt("only one engine rejects h=%.4g s=%.3g", h, s), kInf, kDeterministicTol));
          break;
        }
        if (ct || !std::isfinite(closed) || !general.allFinite()) continue;
        const std::string label = fmt("h=%.4g s=%.3g", h, s);
        r.checks.push_back(check(op, label, rel_dev(closed, h * h / general(0, 0)), kDeterministicTol));
        r.checks.push_back(check("linear_g", label, rel_dev(linear_g(h, s, g, *model), general(0, 0)), kDeterministicTol));
        break;
      }
    }
  }
  return r;
}

// d(bound)/ds at s = 1/2 for linear arrays

SuiteReport s_stationarity(const ValidationOptions& opt) {
  SuiteReport r{"s-stationarity", {}, 0.0};
  Draw d{suite_rng(opt.seed, 0x5)};
  for (int cond = 0; cond < 2; ++cond) {
    for (int k = 0; k < 20; ++k) {
      const ArrayGeometry g = k % 2 == 0 ? ArrayGeometry::ula(d.integer(2, 12), 0.5) : d.geometry(d.integer(2, 8), false);
      const int t_count = d.integer(1, 20);
      for (int attempt = 0; attempt < 200; ++attempt) {
        const double h = d.signed_mag(0.01, 1.9);
        const double snr_db = d.uniform(-20.0, 10.0);
        const auto model = cond ? SignalModel::conditional_constant(t_count, 1.0).with_snr_db(snr_db)
                                : SignalModel::unconditional(std::pow(10.0, snr_db / 10.0), 1.0, t_count);
        const auto bound = [&](double s) { return cond ? linear_cwwb(h, s, g, model) : linear_uwwb(h, s, g, model); };
        double hi = 0.0, lo = 0.0;
        if (throws([&] {
              hi = bound(0.5 + kStationarityStep);
              lo = bound(0.5 - kStationarityStep);
            })) {
          continue;
        }
        if (!std::isfinite(hi) || !std::isfinite(lo)) continue;
        const double fd = (hi - lo) / (2.0 * kStationarityStep);
        const double dev = std::abs(fd);
        r.checks.push_back(check(cond ? "linear_cwwb" : "linear_uwwb",
                                 fmt("h=%.4g snr=%.2f dB", h, snr_db) + fmt(" M=%.0f T=%.0f", g.size(), t_count), dev,
                                 kStationarityTol));
        break;
      }
    }
  }
  return r;
}

using SuiteFn = SuiteReport (*)(const ValidationOptions&);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> suites{
      {"appendix-c", appendix_c},         {"appendix-d", appendix_d},
      {"eta-mc", eta_mc},                 {"prior-quadrature", prior_quadrature},
      {"closed-form-xcheck", closed_form_xcheck}, {"s-stationarity", s_stationarity},
  };
  return suites;
}

}  // namespace

bool SuiteReport::passed() const noexcept {
  return !checks.empty() && pass_count() == checks.size();
}

std::size_t SuiteReport::pass_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }));
}

double SuiteReport::max_deviation() const noexcept {
  double worst = 0.0;
  for (const auto& c : checks) worst = std::max(worst, c.deviation);
  return worst;
}

std::vector<std::string> SuiteReport::operations() const {
  std::vector<std::string> ops;
  for (const auto& c : checks) {
    if (std::find(ops.begin(), ops.end(), c.operation) == ops.end()) ops.push_back(c.operation);
  }
  return ops;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"appendix-c", "appendix-d", "eta-mc", "prior-quadrature",
                                              "closed-form-xcheck", "s-stationarity"};
  return names;
}

SuiteReport run_suite(const std::string& name, const ValidationOptions& options) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown validation suite '" + name + "'");
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report = it->second(options);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

const std::vector<OracleCoverage>& oracle_manifest() {
  static const std::vector<OracleCoverage> manifest{
      {"det_combo2", "appendix-c"},
      {"det_combo3", "appendix-c"},
      {"zeta", "appendix-d"},
      {"zeta_white", "appendix-d"},
      {"zeta_general", "appendix-d"},
      {"eta_prime_cov", "eta-mc"},
      {"eta_prime_mean", "eta-mc"},
      {"uniform_log_factor", "prior-quadrature"},
      {"gaussian_log_factor", "prior-quadrature"},
      {"log_integrate_prior", "prior-quadrature"},
      {"planar_g_uncond", "closed-form-xcheck"},
      {"planar_g_uncond_general_s", "closed-form-xcheck"},
      {"planar_g_cond", "closed-form-xcheck"},
      {"planar_g_cond_general_s", "closed-form-xcheck"},
      {"linear_g", "closed-form-xcheck"},
      {"linear_uwwb", "closed-form-xcheck"},
      {"linear_cwwb", "closed-form-xcheck"},
      {"linear_uwwb", "s-stationarity"},
      {"linear_cwwb", "s-stationarity"},
  };
  return manifest;
}

void print_report(std::ostream& out, const SuiteReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: %zu/%zu checks pass, max deviation %.3e, %.2f s -> %s\n", report.suite.c_str(),
                report.pass_count(), report.checks.size(), report.max_deviation(), report.seconds,
                report.passed() ? "PASS" : "FAIL");
  out << buf;
  for (const auto& op : report.operations()) {
    std::size_t n = 0;
    double worst = 0.0, tol = 0.0;
    for (const auto& c : report.checks) {
      if (c.operation != op) continue;
      ++n;
      worst = std::max(worst, c.deviation);
      tol = c.tolerance;
    }
    std::snprintf(buf, sizeof buf, "  %-26s %4zu checks, max deviation %.3e (tolerance %.1e)\n", op.c_str(), n, worst,
                  tol);
    out << buf;
  }
  for (const auto& c : report.checks) {
    if (c.passed) continue;
    std::snprintf(buf, sizeof buf, "  FAIL %s [%s]: deviation %.3e, tolerance %.1e\n", c.operation.c_str(),
                  c.label.c_str(), c.deviation, c.tolerance);
    out << buf;
  }
}

}  // namespace wwbkit
