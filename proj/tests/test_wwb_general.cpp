#include <doctest.h>

#include <cmath>
#include <random>

#include "wwbkit/error.hpp"
#include "wwbkit/eta.hpp"
#include "wwbkit/g_matrix.hpp"
#include "wwbkit/oracle.hpp"
#include "wwbkit/prior_integration.hpp"

using namespace wwbkit;

namespace {

Eigen::VectorXd one(double x) { return Eigen::VectorXd::Constant(1, x); }

EtaArgs args1(double a, double b, double u, double v) { return {a, b, one(u), one(v)}; }

}  // namespace

TEST_CASE("EtaArgs validation") {
  CHECK_NOTHROW(args1(0.3, 0.3, 0.1, 0.2).validate(1));
  CHECK_THROWS_AS(args1(1.2, 0.0, 0.1, 0.2).validate(1), std::invalid_argument);
  CHECK_THROWS_AS(args1(0.2, -0.1, 0.1, 0.2).validate(1), std::invalid_argument);
  CHECK_THROWS_AS(args1(0.2, 0.1, 0.1, 0.2).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(args1(0.2, 0.1, NAN, 0.2).validate(1), std::invalid_argument);
}

TEST_CASE("determinant lemma limits") {
  const auto g = ArrayGeometry::uca(5, 0.5);
  const auto m = SignalModel::unconditional(2.0, 0.5, 1);
  const Eigen::Vector2d t1(0.1, 0.2), t2(-0.3, 0.5), t3(0.7, -0.1);
  const double inv_det = -(5 * std::log(0.5) + std::log1p(5 * 2.0 / 0.5));
  CHECK(det_combo2(g, m, 0.4, 0.6, t1, t1).log_abs == doctest::Approx(inv_det).epsilon(1e-13));
  CHECK(det_combo2(g, m, 1.0, 0.0, t1, t2).log_abs == doctest::Approx(inv_det).epsilon(1e-13));
  CHECK(det_combo3(g, m, 0.2, 0.3, 0.5, t1, t1, t1).log_abs == doctest::Approx(inv_det).epsilon(1e-13));
  CHECK(det_combo3(g, m, 0.3, 0.7, 0.0, t1, t2, t3).log_abs ==
        doctest::Approx(det_combo2(g, m, 0.3, 0.7, t1, t2).log_abs).epsilon(1e-13));
  CHECK_THROWS_AS(det_combo2(g, m, 0.3, 0.6, t1, t2), std::invalid_argument);
}

TEST_CASE("determinant lemma agrees with the dense oracle, M=3") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ArrayGeometry g({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}, ArrayKind::Planar);
  const auto m = SignalModel::unconditional(1.3, 0.7, 1);
  const Eigen::Vector2d t1(u(rng), u(rng)), t2(u(rng), u(rng));
  const LogDet lemma = det_combo2(g, m, 0.3, 0.7, t1, t2);
  const LogDet dense = oracle::dense_det_combo(g, m, {0.3, 0.7}, {t1, t2});
  CHECK(lemma.sign == dense.sign);
  CHECK(std::abs(std::expm1(lemma.log_abs - dense.log_abs)) < 1e-10);
}

TEST_CASE("eta' trivial cases") {
  const auto g = ArrayGeometry::ula(4, 0.5);
  const auto uc = SignalModel::unconditional(1.0, 1.0, 3);
  const auto cc = SignalModel::conditional_constant(3, 0.5);
  for (double a : {0.2, 0.5, 0.9}) {
    CHECK(std::abs(log_eta_prime_cov(args1(a, 1.0 - a, 0.0, 0.0), one(0.1), g, uc)) < 1e-12);
    CHECK(std::abs(log_eta_prime_mean(args1(a, 1.0 - a, 0.0, 0.0), one(0.1), g, cc)) < 1e-12);
  }
  CHECK(std::abs(log_eta_prime_cov(args1(0.0, 0.0, 0.4, -0.7), one(0.1), g, uc)) < 1e-12);
  CHECK(std::abs(log_eta_prime_mean(args1(1.0, 0.0, 0.4, -0.7), one(0.1), g, cc)) < 1e-12);
}

TEST_CASE("dense covariance path matches the lemma path") {
  const auto g = ArrayGeometry::uca(6, 0.5);
  const auto m = SignalModel::unconditional(0.8, 1.1, 7);
  const EtaArgs a{0.4, 0.35, Eigen::Vector2d(0.3, 0.0), Eigen::Vector2d(0.0, -0.2)};
  const Eigen::Vector2d theta(0.05, -0.1);
  CHECK(log_eta_prime_cov_dense(a, theta, g, SourceCovarianceModel::from(m, g.size())) ==
        doctest::Approx(log_eta_prime_cov(a, theta, g, m)).epsilon(1e-11));
}

TEST_CASE("mean-model general path matches the single-source path") {
  const auto g = ArrayGeometry::v_shaped(3, 0.5, 70.0);
  const auto m = SignalModel::conditional({cd{1.0, 0.2}, cd{-0.5, 0.9}}, 0.7);
  const EtaArgs a{0.3, 0.5, Eigen::Vector2d(0.2, 0.0), Eigen::Vector2d(0.0, 0.4)};
  const Eigen::Vector2d theta(0.1, 0.3);
  CHECK(log_eta_prime_mean_general(a, theta, g, SourceWaveformModel::from(m, g.size())) ==
        doctest::Approx(log_eta_prime_mean(a, theta, g, m)).epsilon(1e-12));
}

TEST_CASE("zeta two-sensor example") {
  const auto g = ArrayGeometry::linear({0.0, 0.5});
  const auto m = SignalModel::conditional({cd{1.0, 0.0}}, 1.0);
  for (double h : {0.1, 0.7, -1.3}) {
    CHECK(zeta(g, m, one(0.2), one(h), one(0.0)) == doctest::Approx(2.0 - 2.0 * std::cos(std::numbers::pi * h)));
  }
  CHECK(zeta(g, m, one(0.2), one(0.4), one(0.4)) == 0.0);
  CHECK_THROWS_AS(zeta(g, SignalModel::unconditional(1, 1, 1), one(0), one(0.1), one(0)), std::invalid_argument);
}

TEST_CASE("zeta multi-source cross term against direct evaluation") {
  const auto g = ArrayGeometry::uca(5, 0.5);
  SourceWaveformModel m;
  m.waveforms.resize(2, 3);
  m.waveforms << cd{1, 0}, cd{0.3, -0.2}, cd{0, 1}, cd{-0.4, 0.5}, cd{0.8, 0.1}, cd{0.2, 0.2};
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Random(5, 5);
  m.noise_cov = b * b.adjoint() + Eigen::MatrixXcd::Identity(5, 5);
  Eigen::VectorXd theta(4), mu = Eigen::VectorXd::Zero(4), rho = Eigen::VectorXd::Zero(4);
  theta << 0.1, 0.2, -0.4, 0.3;
  mu(1) = 0.25;
  rho(2) = -0.3;
  CHECK(zeta_general(g, m, theta, mu, rho) ==
        doctest::Approx(oracle::zeta_direct(g, m, theta, mu, rho)).epsilon(1e-11));
}

TEST_CASE("uniform prior clipping") {
  const UniformPrior p{-1.0, 1.0};
  CHECK(clipped_interval(p, 0.3, -0.5).lo == doctest::Approx(-0.5));
  CHECK(clipped_interval(p, 0.3, -0.5).hi == doctest::Approx(0.7));
  CHECK(clipped_interval(p, 1.2, -1.2).length() == 0.0);

  const PriorSpec prior = PriorSpec::uniform(1);
  CHECK(std::isinf(uniform_log_factor(prior, args1(0.5, 0.5, 1.2, -1.2))));
  CHECK(std::exp(uniform_log_factor(prior, args1(0.5, 0.5, 0.4, 0.4))) == doctest::Approx(0.8));
  CHECK(std::exp(uniform_log_factor(prior, args1(0.5, 0.5, 0.4, -0.4))) == doctest::Approx(0.6));
  CHECK(uniform_log_factor(prior, args1(0.5, 0.5, 0.0, 0.0)) == 0.0);

  const PriorSpec two = PriorSpec::uniform(2);
  const EtaArgs distinct{0.3, 0.4, Eigen::Vector2d(0.5, 0.0), Eigen::Vector2d(0.0, -0.6)};
  CHECK(std::exp(uniform_log_factor(two, distinct)) == doctest::Approx(1.5 * 1.4 / 4.0));
}

TEST_CASE("gaussian prior factors") {
  const PriorSpec p({GaussianPrior{0.2, 0.09}});
  const double s = 0.3;
  CHECK(std::exp(gaussian_log_factor(p, args1(0.5, 0.5, s, -s))) == doctest::Approx(std::exp(-0.5)));
  CHECK(gaussian_log_factor(p, args1(0.5, 0.5, 0.0, 0.0)) == 0.0);
  CHECK(gaussian_log_factor(p, args1(1.0, 0.0, 0.7, 0.0)) == 0.0);
  CHECK(std::exp(gaussian_log_factor(p, args1(0.2, 0.3, 0.4, 0.4))) ==
        doctest::Approx(std::exp(-(0.5 * 0.5) * 0.16 / (2 * 0.09))));
  CHECK(integrate_prior_gaussian(2.0, p, args1(0.5, 0.5, s, -s)) == doctest::Approx(2.0 * std::exp(-0.5)));
}

TEST_CASE("theta-dependent quadrature over a clipped interval") {
  const PriorSpec p = PriorSpec::uniform(1);
  const auto fn = [](const Eigen::VectorXd& t) { return t(0); };
  // integral of e^t over [-0.7, 1] divided by the support length
  const double expected = (std::exp(1.0) - std::exp(-0.7)) / 2.0;
  CHECK(integrate_prior_uniform(fn, p, args1(0.5, 0.5, -0.3, 0.0), false) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(integrate_prior_uniform(fn, p, args1(0.5, 0.5, 1.2, -1.2), false) == 0.0);
}

TEST_CASE("G assembly symmetry and denominator") {
  const auto g = ArrayGeometry::uca(6, 0.5);
  const auto m = SignalModel::unconditional(0.5, 1.0, 5);
  const PriorSpec prior = PriorSpec::uniform(2);
  const LogEtaFn eta = general_log_eta(g, m, prior);
  const Eigen::Vector2d h(0.3, -0.45), s(0.4, 0.6);
  CHECK(assemble_g_element(0, 1, s, h, eta) == doctest::Approx(assemble_g_element(1, 0, s, h, eta)).epsilon(1e-13));
  const GMatrix gm = assemble_g(s, h, eta);
  CHECK(gm.entries(0, 1) == gm.entries(1, 0));
  CHECK(gm.entries(0, 0) > 0.0);
  CHECK_THROWS_AS(assemble_g(s, Eigen::Vector2d(0.0, 0.3), eta), std::invalid_argument);
  const LogEtaFn empty = [](const EtaArgs&) { return -std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(assemble_g_element(0, 0, s, h, empty), DegenerateConfiguration);
}

TEST_CASE("zero-information diagonal entry") {
  const auto g = ArrayGeometry::ula(4, 0.5);
  const auto m = SignalModel::unconditional(1e-12, 1.0, 1);
  const LogEtaFn eta = general_log_eta(g, m, PriorSpec::uniform(1));
  for (double h : {0.2, 0.66, 1.5}) {
    const double f1 = 1.0 - h / 2.0;
    const double expected = (2.0 * f1 - 2.0 * std::max(0.0, 1.0 - h)) / (f1 * f1);
    CHECK(assemble_g_element(0, 0, one(0.5), one(h), eta) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("multi-source evaluators integrate a theta-dependent eta'") {
  const auto g = ArrayGeometry::uca(4, 0.5);
  const auto m = SignalModel::unconditional(1.0, 1.0, 2);
  const PriorSpec prior = PriorSpec::uniform(2);
  const LogEtaFn closed = general_log_eta(g, m, prior);
  const LogEtaFn dense = general_log_eta(g, SourceCovarianceModel::from(m, g.size()), prior, 65);
  const EtaArgs a{0.5, 0.5, Eigen::Vector2d(0.3, 0.0), Eigen::Vector2d(0.0, 0.2)};
  CHECK(dense(a) == doctest::Approx(closed(a)).epsilon(1e-10));
  const auto cm = SignalModel::conditional_constant(2, 1.0);
  const LogEtaFn mean_closed = general_log_eta(g, cm, prior);
  const LogEtaFn mean_dense = general_log_eta(g, SourceWaveformModel::from(cm, g.size()), prior, 65);
  CHECK(mean_dense(a) == doctest::Approx(mean_closed(a)).epsilon(1e-10));
}
