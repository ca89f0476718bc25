#include <doctest.h>

#include <cmath>
#include <random>

#include "wwbkit/bound_sweep.hpp"
#include "wwbkit/closed_form.hpp"
#include "wwbkit/error.hpp"
#include "wwbkit/estimator.hpp"
#include "wwbkit/g_matrix.hpp"

using namespace wwbkit;

namespace {

ArrayGeometry random_planar(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  std::vector<SensorPosition> s;
  for (int i = 0; i < m; ++i) s.push_back({d(rng), d(rng)});
  return ArrayGeometry(s, ArrayKind::Planar);
}

SignalModel random_model(std::mt19937_64& rng, bool conditional) {
  const double db = std::uniform_real_distribution<double>(-25.0, 5.0)(rng);
  const int t = std::uniform_int_distribution<int>(1, 20)(rng);
  if (conditional) return SignalModel::conditional_constant(t, 1.0).with_snr_db(db);
  return SignalModel::unconditional(1.0, 1.0, t).with_snr_db(db);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_CASE("closed forms equal the general engine on random planar arrays") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> h(-1.9, 1.9), s(0.1, 0.9);
  const PriorSpec prior = PriorSpec::uniform(2);
  int compared = 0;
  for (int k = 0; k < 40; ++k) {
    const auto g = random_planar(rng, 2 + k % 5);
    const bool cond = k % 2 == 1;
    const auto m = random_model(rng, cond);
    const PlanarBoundInputs in{h(rng), h(rng), s(rng), s(rng)};
    try {
      const GMatrix a = cond ? planar_g_cond(g, m, in) : planar_g_uncond(g, m, in);
      const GMatrix b = general_g_matrix(g, m, prior, Eigen::Vector2d(in.h_u, in.h_v), Eigen::Vector2d(in.s_u, in.s_v));
      if (!a.entries.allFinite() || !b.entries.allFinite()) continue;
      for (Eigen::Index i = 0; i < 4; ++i) CHECK(rel(a.entries(i), b.entries(i)) < 1e-9);
      ++compared;
    } catch (const std::domain_error&) {
    }
  }
  CHECK(compared >= 30);
}

TEST_CASE("G is symmetric and the optimized bound is finite PSD") {
  std::mt19937_64 rng(202);
  OptimizerConfig c;
  HGridSpec grid;
  grid.count = 25;
  c.h_grid = {grid};
  for (int k = 0; k < 6; ++k) {
    const auto g = random_planar(rng, 3 + k);
    const auto m = random_model(rng, k % 2 == 0);
    const WwbResult r = maximize(make_g_evaluator(g, m, PriorSpec::uniform(2)), 2, c);
    CHECK(r.g(0, 1) == r.g(1, 0));
    CHECK(r.bound.allFinite());
    CHECK(r.bound(0, 1) == doctest::Approx(r.bound(1, 0)));
    CHECK(r.bound.trace() > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.bound);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * r.bound.trace());
    CHECK(r.bound.diagonal().maxCoeff() <= 4.0);
  }
}

TEST_CASE("UCA bound is the same for both coordinates") {
  for (int m : {8, 12, 16}) {
    const auto g = ArrayGeometry::uca(m, 0.5);
    for (double db : {-20.0, -10.0, 0.0}) {
      const auto model = SignalModel::unconditional(1.0, 1.0, 10).with_snr_db(db);
      for (double hh : {0.05, 0.6, 1.5}) {
        const GMatrix gm = planar_g_uncond(g, model, {hh, hh, 0.5, 0.5});
        CHECK(rel(gm.entries(0, 0), gm.entries(1, 1)) < 1e-10);
      }
    }
  }
}

TEST_CASE("linear G is stationary in s at one half") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> h(-1.8, 1.8), x(0.0, 3.0);
  int checked = 0;
  for (int k = 0; k < 30; ++k) {
    std::vector<double> dx{0.0};
    for (int i = 0; i < 4; ++i) dx.push_back(x(rng));
    const auto g = ArrayGeometry::linear(dx);
    const auto m = random_model(rng, k % 2 == 0);
    const double hh = h(rng), step = 1e-4;
    try {
      const double up = linear_g(hh, 0.5 + step, g, m), down = linear_g(hh, 0.5 - step, g, m);
      const double mid = linear_g(hh, 0.5, g, m);
      if (!std::isfinite(up) || !std::isfinite(down)) continue;
      CHECK(std::abs(up - down) / (2.0 * step) <= 1e-6 * std::max(1.0, std::abs(mid)));
      ++checked;
    } catch (const std::domain_error&) {
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("MAP estimates stay inside the prior support") {
  const auto g = ArrayGeometry::uca(6, 0.5);
  const auto m = SignalModel::unconditional(0.01, 1.0, 5);
  const PriorSpec prior = PriorSpec::uniform(2);
  const MapEstimator map(g, m, prior, 256);
  for (int t = 0; t < 30; ++t) {
    std::mt19937_64 rng = trial_rng(17, 0, t);
    const Eigen::VectorXd e = map.estimate(simulate(g, m, prior.draw(rng), rng));
    CHECK(prior.contains(e));
  }
}
