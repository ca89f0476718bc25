#include <doctest.h>

#include <cmath>
#include <random>

#include "wwbkit/closed_form.hpp"
#include "wwbkit/error.hpp"
#include "wwbkit/g_matrix.hpp"

using namespace wwbkit;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Off-diagonal deviations are scaled by sqrt(G_ii G_jj).
double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double w = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double scale = i == j ? std::max(std::abs(a(i, j)), std::abs(b(i, j))) : std::sqrt(std::abs(a(i, i) * a(j, j)));
      w = std::max(w, std::abs(a(i, j) - b(i, j)) / scale);
    }
  }
  return w;
}

}  // namespace

TEST_CASE("steering sum") {
  const auto g = ArrayGeometry::uca(7, 0.5);
  CHECK(std::abs(steering_sum(g, 0.0, 0.0) - cd{7.0, 0.0}) < 1e-14);
  const ArrayGeometry single({{0.0, 0.0}}, ArrayKind::Planar);
  CHECK(std::abs(steering_sum(single, 0.3, -0.8) - cd{1.0, 0.0}) < 1e-15);
  const ArrayGeometry pair({{0.0, 0.0}, {0.5, 0.0}}, ArrayKind::Planar);
  CHECK(std::abs(steering_sum(pair, 1.0, 0.0)) < 1e-15);
}

TEST_CASE("single sensor carries no information") {
  const ArrayGeometry single({{0.2, -0.1}}, ArrayKind::Planar);
  for (double snr : {0.01, 1.0, 100.0}) {
    const auto m = SignalModel::unconditional(snr, 1.0, 10);
    const GMatrix gm = planar_g_uncond(single, m, {0.7, -0.4, 0.5, 0.5});
    CHECK(gm.entries(0, 0) == doctest::Approx(0.7 / std::pow(1.0 - 0.35, 2)).epsilon(1e-12));
  }
}

TEST_CASE("conditional zero-SNR limit") {
  const auto g = ArrayGeometry::uca(8, 0.5);
  const auto m = SignalModel::conditional_constant(20, 1.0).with_snr_db(-200.0);
  const GMatrix gm = planar_g_cond(g, m, {-0.6, 1.1, 0.5, 0.5});
  CHECK(gm.entries(0, 0) == doctest::Approx(0.6 / std::pow(0.7, 2)).epsilon(1e-10));
  CHECK(gm.entries(1, 1) == doctest::Approx(0.9 / std::pow(0.45, 2)).epsilon(1e-10));
}

TEST_CASE("s = 1/2 dispatch agrees with the general-s expressions") {
  const auto g = ArrayGeometry::uca(16, 0.5);
  const auto u = SignalModel::unconditional(0.3, 1.0, 100);
  const auto c = SignalModel::conditional_constant(20, 1.0).with_snr_db(-8.0);
  for (const PlanarBoundInputs in : {PlanarBoundInputs{0.2, -0.3, 0.5, 0.5}, PlanarBoundInputs{-1.3, 0.05, 0.5, 0.5}}) {
    CHECK(max_rel(planar_g_uncond(g, u, in).entries, planar_g_uncond_general_s(g, u, in).entries) < 1e-12);
    CHECK(max_rel(planar_g_cond(g, c, in).entries, planar_g_cond_general_s(g, c, in).entries) < 1e-12);
  }
}

TEST_CASE("closed forms match the general engine on a random M=4 geometry") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<SensorPosition> s;
  for (int i = 0; i < 4; ++i) s.push_back({d(rng), d(rng)});
  const ArrayGeometry g(s, ArrayKind::Planar);
  const auto u = SignalModel::unconditional(0.2, 1.0, 3);
  const auto c = SignalModel::conditional_constant(3, 1.0).with_snr_db(-7.0);
  const PriorSpec prior = PriorSpec::uniform(2);
  const PlanarBoundInputs in{0.4, -0.9, 0.35, 0.6};
  const Eigen::Vector2d h(in.h_u, in.h_v), sv(in.s_u, in.s_v);
  CHECK(max_rel(planar_g_uncond(g, u, in).entries, general_g_matrix(g, u, prior, h, sv).entries) < 1e-10);
  CHECK(max_rel(planar_g_cond(g, c, in).entries, general_g_matrix(g, c, prior, h, sv).entries) < 1e-10);
}

TEST_CASE("planar G is symmetric and the UCA is x/y balanced") {
  const auto g = ArrayGeometry::uca(16, 0.5);
  const auto u = SignalModel::unconditional(0.5, 1.0, 100);
  const GMatrix gm = planar_g_uncond(g, u, {0.02, 0.02, 0.5, 0.5});
  CHECK(gm.entries(0, 1) == gm.entries(1, 0));
  CHECK(rel(gm.entries(0, 0), gm.entries(1, 1)) < 1e-12);
}

TEST_CASE("linear zero-information bound") {
  const auto g = ArrayGeometry::ula(8, 0.5);
  const auto u = SignalModel::unconditional(1e-14, 1.0, 10);
  const auto c = SignalModel::conditional_constant(10, 1.0).with_snr_db(-140.0);
  for (double h : {0.1, 2.0 / 3.0, -1.4}) {
    const double a = std::abs(h), f1 = 1.0 - a / 2.0;
    const double zero_info = h * h * f1 * f1 / (2.0 * f1 - 2.0 * std::max(0.0, 1.0 - a));
    CHECK(linear_uwwb(h, 0.5, g, u) == doctest::Approx(zero_info).epsilon(1e-9));
    CHECK(linear_cwwb(h, 0.5, g, c) == doctest::Approx(zero_info).epsilon(1e-9));
  }
  CHECK(linear_uwwb(2.0 / 3.0, 0.5, g, u) == doctest::Approx(8.0 / 27.0).epsilon(1e-9));
}

TEST_CASE("linear conditional bound equals the planar reduction with dy = 0") {
  const std::vector<double> dx{0.0, 0.4, 1.1, 1.7};
  const auto lin = ArrayGeometry::linear(dx);
  std::vector<SensorPosition> flat;
  for (double x : dx) flat.push_back({x, 0.0});
  const ArrayGeometry planar(flat, ArrayKind::Planar);
  const auto c = SignalModel::conditional_constant(5, 1.0).with_snr_db(-3.0);
  const double h = 0.35;
  const GMatrix gm = planar_g_cond(planar, c, {h, 0.5, 0.5, 0.5});
  CHECK(linear_cwwb(h, 0.5, lin, c) == doctest::Approx(h * h / gm.entries(0, 0)).epsilon(1e-12));
  CHECK(linear_g(h, 0.5, lin, c) == doctest::Approx(gm.entries(0, 0)).epsilon(1e-12));
}

TEST_CASE("ULA closed form: sum of cosines collapses") {
  const auto g = ArrayGeometry::ula(6, 0.5);
  const auto c = SignalModel::conditional_constant(4, 1.0).with_snr_db(0.0);
  const double csnr = c.c_snr();
  const double h = 0.3;
  auto gap = [&](double x) {
    double acc = 0.0;
    for (const auto& p : g.sensors()) acc += 1.0 - std::cos(2.0 * std::numbers::pi * p.dx * x);
    return acc;
  };
  const double f1 = 1.0 - h / 2.0, f3 = 1.0 - h;
  const double num = h * h * f1 * f1 * std::exp(-csnr * gap(h));
  const double den = 2.0 * f1 - 2.0 * f3 * std::exp(-0.5 * csnr * gap(2.0 * h));
  CHECK(linear_cwwb(h, 0.5, g, c) == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("argument checks") {
  const auto g = ArrayGeometry::ula(4, 0.5);
  const auto u = SignalModel::unconditional(1.0, 1.0, 1);
  CHECK_THROWS_AS(linear_uwwb(0.0, 0.5, g, u), DegenerateConfiguration);
  CHECK_THROWS_AS(linear_uwwb(2.0, 0.5, g, u), std::invalid_argument);
  CHECK_THROWS_AS(linear_uwwb(0.5, 1.0, g, u), std::invalid_argument);
  CHECK_THROWS_AS(linear_cwwb(0.5, 0.5, g, u), std::invalid_argument);
  CHECK_THROWS_AS(planar_g_cond(ArrayGeometry::uca(4, 0.5), u, {}), std::invalid_argument);
}

TEST_CASE("invalid region for large exponents") {
  const auto g = ArrayGeometry::ula(8, 0.5);
  const auto u = SignalModel::unconditional(100.0, 1.0, 10);
  bool seen = false;
  for (double s = 0.05; s < 1.0 && !seen; s += 0.05) {
    try {
      linear_uwwb(0.9, s, g, u);
    } catch (const InvalidRegion&) {
      seen = true;
    }
  }
  CHECK(seen);
}
