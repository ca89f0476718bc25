#include <doctest.h>

#include <atomic>
#include <cmath>

#include "wwbkit/bound_sweep.hpp"
#include "wwbkit/closed_form.hpp"
#include "wwbkit/error.hpp"
#include "wwbkit/optimizer.hpp"

using namespace wwbkit;

namespace {

OptimizerConfig default_config(std::size_t q) {
  OptimizerConfig c;
  c.h_grid.assign(q, HGridSpec::for_support(2.0));
  return c;
}

GEvaluator linear_eval(const ArrayGeometry& g, const SignalModel& m) {
  return [g, m](const Eigen::VectorXd& h, const Eigen::VectorXd& s) {
    return Eigen::MatrixXd::Constant(1, 1, linear_g(h(0), s(0), g, m));
  };
}

}  // namespace

TEST_CASE("h grid candidates") {
  HGridSpec g;
  g.min_abs = 0.01;
  g.max_abs = 1.0;
  g.count = 3;
  const auto c = g.candidates();
  REQUIRE(c.size() == 6);
  CHECK(c.front() == -1.0);
  CHECK(c[3] == doctest::Approx(0.01));
  CHECK(c[4] == doctest::Approx(0.1));
  CHECK(std::is_sorted(c.begin(), c.end()));
  HGridSpec bad;
  bad.values = {0.2, 0.0};
  CHECK_THROWS_AS(bad.candidates(), std::invalid_argument);
  const auto d = HGridSpec::for_support(2.0);
  CHECK(d.count == 200);
  CHECK(d.min_abs == 1e-3);
  CHECK(d.max_abs == doctest::Approx(2.0 - 1e-3));
}

TEST_CASE("config validation") {
  OptimizerConfig c = default_config(2);
  CHECK_NOTHROW(c.validate(2));
  c.s_grid = {0.0};
  CHECK_THROWS_AS(c.validate(2), std::invalid_argument);
  c = default_config(2);
  CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
}

TEST_CASE("wwb_from_g") {
  CHECK(wwb_from_g(Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 2.0))(0, 0) == 0.125);
  Eigen::MatrixXd diag = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  const Eigen::Vector2d h(0.5, 1.0);
  const Eigen::MatrixXd b = wwb_from_g(h, diag);
  CHECK(b(0, 0) == doctest::Approx(0.125));
  CHECK(b(1, 1) == doctest::Approx(0.25));
  CHECK(b(0, 1) == 0.0);

  Eigen::Matrix2d g;
  g << 3.0, 0.7, 0.7, 1.5;
  const Eigen::MatrixXd hm = h.asDiagonal();
  const Eigen::MatrixXd generic = hm * g.partialPivLu().solve(hm);
  CHECK((wwb_from_g(h, g) - generic).norm() < 1e-12 * generic.norm());

  Eigen::Matrix2d singular;
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(wwb_from_g(h, singular), DegenerateConfiguration);
}

TEST_CASE("zero-information linear optimum") {
  const auto g = ArrayGeometry::ula(8, 0.5);
  const auto m = SignalModel::unconditional(1e-14, 1.0, 10);
  const WwbResult r = maximize(linear_eval(g, m), 1, default_config(1));
  CHECK(r.objective == doctest::Approx(8.0 / 27.0).epsilon(1e-3));
  CHECK(std::abs(std::abs(r.best_h(0)) - 2.0 / 3.0) < 0.03);
}

TEST_CASE("s = 1/2 is optimal for linear arrays") {
  const auto g = ArrayGeometry::ula(6, 0.5);
  for (double snr_db : {-15.0, -5.0, 5.0}) {
    const auto m = SignalModel::conditional_constant(10, 1.0).with_snr_db(snr_db);
    OptimizerConfig half = default_config(1);
    OptimizerConfig wide = half;
    wide.s_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const double a = maximize(linear_eval(g, m), 1, half).objective;
    const double b = maximize(linear_eval(g, m), 1, wide).objective;
    CHECK(b == doctest::Approx(a).epsilon(1e-9));
  }
}

TEST_CASE("refinement never lowers the objective") {
  const auto g = ArrayGeometry::uca(8, 0.5);
  for (double snr_db : {-20.0, -10.0, 0.0}) {
    const auto m = SignalModel::unconditional(std::pow(10.0, snr_db / 10.0), 1.0, 20);
    OptimizerConfig c;
    HGridSpec coarse;
    coarse.count = 30;
    c.h_grid = {coarse};
    const auto eval = make_g_evaluator(g, m, PriorSpec::uniform(2));
    const WwbResult plain = maximize(eval, 2, c);
    c.refine = true;
    const WwbResult fine = maximize(eval, 2, c);
    CHECK(fine.objective >= plain.objective);
  }
}

TEST_CASE("profile search reaches the joint optimum on a symmetric problem") {
  const auto g = ArrayGeometry::uca(8, 0.5);
  const auto m = SignalModel::unconditional(0.1, 1.0, 20);
  const auto eval = make_g_evaluator(g, m, PriorSpec::uniform(2));
  OptimizerConfig c;
  HGridSpec coarse;
  coarse.count = 40;
  c.h_grid = {coarse};
  c.strategy = SearchStrategy::ExhaustiveJoint;
  const WwbResult joint = maximize(eval, 2, c);
  c.strategy = SearchStrategy::PerParameterProfile;
  const WwbResult profile = maximize(eval, 2, c);
  CHECK(profile.objective <= joint.objective);
  CHECK(profile.objective == doctest::Approx(joint.objective).epsilon(1e-2));
}

TEST_CASE("bound is symmetric PSD and deterministic across workers") {
  const auto g = ArrayGeometry::uca(8, 0.5);
  const auto m = SignalModel::unconditional(0.05, 1.0, 20);
  const auto eval = make_g_evaluator(g, m, PriorSpec::uniform(2));
  OptimizerConfig c = default_config(2);
  c.h_grid = {HGridSpec::for_support(2.0, 60)};
  const WwbResult one = maximize(eval, 2, c);
  c.workers = 4;
  const WwbResult four = maximize(eval, 2, c);
  CHECK(one.bound == four.bound);
  CHECK(one.best_h == four.best_h);
  CHECK(one.bound(0, 1) == one.bound(1, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one.bound);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("invalid points are skipped") {
  std::atomic<int> calls{0};
  const GEvaluator eval = [&](const Eigen::VectorXd& h, const Eigen::VectorXd&) {
    ++calls;
    if (h(0) > 0.0) throw InvalidRegion("positive h");
    return Eigen::MatrixXd::Constant(1, 1, 1.0 / std::abs(h(0)));
  };
  OptimizerConfig c;
  c.h_grid = {HGridSpec{0.1, 1.0, 10, {}}};
  const WwbResult r = maximize(eval, 1, c);
  CHECK(r.best_h(0) == doctest::Approx(-1.0));
  CHECK(r.skipped == 10);
  const GEvaluator never = [](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    throw InvalidRegion("nothing valid");
  };
  CHECK_THROWS_AS(maximize(never, 1, c), DegenerateConfiguration);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
}
