#include "wwbkit/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wwbkit/error.hpp"

namespace wwbkit {

namespace {

constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double u = 0.0;
  double v = 0.0;
};

Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
Vec2 operator-(Vec2 a) { return {-a.u, -a.v}; }

void check_test_point(double h, double s) {
  if (h == 0.0) throw DegenerateConfiguration("test point h = 0");
  if (!std::isfinite(h) || !(std::abs(h) < 2.0)) throw std::invalid_argument("test point must satisfy 0 < |h| < 2");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("s must lie in (0,1)");
}

// Length factors of the [-1,1] prior: same-sign pair and opposite-sign pair.
double half_factor(double h) { return 1.0 - std::abs(h) / 2.0; }
double full_factor(double h) { return std::max(0.0, 1.0 - std::abs(h)); }

// M^2 - |sum_k exp(-j2pi r_k.c)|^2. |S| is translation invariant, so phases are
// taken about the array centroid and the difference is expanded as
// (M - C)(M + C) - S_im^2 with M - C = sum 2 sin^2(x/2).
double ambiguity_gap(const ArrayGeometry& g, Vec2 c) {
  const double m = static_cast<double>(g.size());
  double cx = 0.0, cy = 0.0;
  for (const auto& p : g.sensors()) {
    cx += p.dx;
    cy += p.dy;
  }
  cx /= m;
  cy /= m;
  double low = 0.0, im = 0.0;
  for (const auto& p : g.sensors()) {
    const double x = 2.0 * kPi * ((p.dx - cx) * c.u + (p.dy - cy) * c.v);
    const double sh = std::sin(0.5 * x);
    low += 2.0 * sh * sh;
    im += std::sin(x);
  }
  return low * (2.0 * m - low) - im * im;
}

// 2 (M - sum_k cos(2 pi r_k.c)), summed as 4 sin^2 terms.
double cosine_gap(const ArrayGeometry& g, Vec2 c) {
  double acc = 0.0;
  for (const auto& p : g.sensors()) {
    const double sn = std::sin(kPi * (p.dx * c.u + p.dy * c.v));
    acc += 4.0 * sn * sn;
  }
  return acc;
}

double uncond_log_base(double b) {
  if (!(b > 0.0)) throw InvalidRegion("closed-form determinant base is not positive");
  return std::log(b);
}

// Base of eta' = base^{-T} for weights (a, b, 1-a-b) on displacements (x, y, 0).
double uncond_base(const ArrayGeometry& g, double usnr, double phi, double a, double b, Vec2 x, Vec2 y) {
  const double m = static_cast<double>(g.size());
  const double w = 1.0 - a - b;
  const cd sxy = steering_sum(g, x.u - y.u, x.v - y.v);
  const cd sx = steering_sum(g, x.u, x.v);
  const cd sy = steering_sum(g, y.u, y.v);
  const double gxy = m * m - std::norm(sxy);
  const double gx = m * m - std::norm(sx);
  const double gy = m * m - std::norm(sy);
  double val = 1.0 + usnr * (a * b * gxy + a * w * gx + b * w * gy);
  const double triple = a * b * w;
  if (triple != 0.0) {
    const double det = m * m * m - m * (std::norm(sxy) + std::norm(sx) + std::norm(sy)) +
                       2.0 * (sxy * sy * std::conj(sx)).real();
    val -= usnr * phi * triple * det;
  }
  return val;
}

double cond_log_eta(const ArrayGeometry& g, double csnr, double a, double b, Vec2 x, Vec2 y) {
  const double w = 1.0 - a - b;
  double acc = 0.0;
  if (a * w != 0.0) acc += a * w * cosine_gap(g, x);
  if (a * b != 0.0) acc += a * b * cosine_gap(g, x - y);
  if (b * w != 0.0) acc += b * w * cosine_gap(g, y);
  return -csnr * acc;
}

struct UncondConsts {
  double usnr;
  double phi;
  double t;
};

UncondConsts uncond_consts(const ArrayGeometry& g, const SignalModel& model) {
  if (model.is_conditional()) throw std::invalid_argument("unconditional closed form needs an unconditional model");
  const double m = static_cast<double>(g.size());
  return {model.u_snr(g.size()), model.sigma_s2() / (m * model.sigma_s2() + model.sigma_n2()),
          static_cast<double>(model.snapshots())};
}

double cond_consts(const SignalModel& model) {
  if (!model.is_conditional()) throw std::invalid_argument("conditional closed form needs a conditional model");
  return model.c_snr();
}

// Diagonal entry from the log eta' of the four numerator terms and the two
// (identical) denominator factors.
double diagonal_entry(double h, double l1, double l2, double l3, double l0) {
  const double f1 = half_factor(h), f3 = full_factor(h);
  const double first = (std::exp(l1 - 2.0 * l0) + std::exp(l2 - 2.0 * l0)) / f1;
  const double second = f3 > 0.0 ? 2.0 * f3 / (f1 * f1) * std::exp(l3 - 2.0 * l0) : 0.0;
  return first - second;
}

double uncond_diag_general(const ArrayGeometry& g, const UncondConsts& k, double h, double s, Vec2 e) {
  const Vec2 c{e.u * h, e.v * h};
  const Vec2 c2{2.0 * c.u, 2.0 * c.v};
  const double a1 = ambiguity_gap(g, c), a2 = ambiguity_gap(g, c2);
  const double l1 = -k.t * uncond_log_base(1.0 + k.usnr * 2.0 * s * (1.0 - 2.0 * s) * a1);
  const double l2 = -k.t * uncond_log_base(1.0 + k.usnr * 2.0 * (1.0 - s) * (2.0 * s - 1.0) * a1);
  const double l3 = -k.t * uncond_log_base(1.0 + k.usnr * s * (1.0 - s) * a2);
  const double l0 = -k.t * uncond_log_base(1.0 + k.usnr * s * (1.0 - s) * a1);
  return diagonal_entry(h, l1, l2, l3, l0);
}

double uncond_diag_half(const ArrayGeometry& g, const UncondConsts& k, double h, Vec2 e) {
  const double f1 = half_factor(h), f3 = full_factor(h);
  const double b0 = 1.0 + 0.25 * k.usnr * ambiguity_gap(g, {e.u * h, e.v * h});
  const double b3 = 1.0 + 0.25 * k.usnr * ambiguity_gap(g, {2.0 * e.u * h, 2.0 * e.v * h});
  const double lb0 = uncond_log_base(b0);
  const double second = f3 > 0.0 ? 2.0 * f3 * std::exp(-k.t * uncond_log_base(b3) + 2.0 * k.t * lb0) : 0.0;
  return (2.0 * f1 * std::exp(2.0 * k.t * lb0) - second) / (f1 * f1);
}

double uncond_cross_general(const ArrayGeometry& g, const UncondConsts& k, const PlanarBoundInputs& in) {
  const Vec2 u{in.h_u, 0.0}, v{0.0, in.h_v};
  const double su = in.s_u, sv = in.s_v;
  auto lb = [&](double a, double b, Vec2 x, Vec2 y) {
    return -k.t * uncond_log_base(uncond_base(g, k.usnr, k.phi, a, b, x, y));
  };
  const double l0 = lb(su, 0.0, u, {}) + lb(0.0, sv, {}, v);
  return std::exp(lb(su, sv, u, v) - l0) + std::exp(lb(1.0 - su, 1.0 - sv, -u, -v) - l0) -
         std::exp(lb(su, 1.0 - sv, u, -v) - l0) - std::exp(lb(1.0 - su, sv, -u, v) - l0);
}

double uncond_cross_half(const ArrayGeometry& g, const UncondConsts& k, const PlanarBoundInputs& in) {
  auto lb = [&](Vec2 c) { return -k.t * uncond_log_base(1.0 + 0.25 * k.usnr * ambiguity_gap(g, c)); };
  const double l0 = lb({in.h_u, 0.0}) + lb({0.0, in.h_v});
  return 2.0 * (std::exp(lb({in.h_u, -in.h_v}) - l0) - std::exp(lb({in.h_u, in.h_v}) - l0));
}

double cond_diag_general(const ArrayGeometry& g, double c, double h, double s, Vec2 e) {
  const double z1 = cosine_gap(g, {e.u * h, e.v * h});
  const double z2 = cosine_gap(g, {2.0 * e.u * h, 2.0 * e.v * h});
  const double l1 = -c * 2.0 * s * (1.0 - 2.0 * s) * z1;
  const double l2 = -c * 2.0 * (1.0 - s) * (2.0 * s - 1.0) * z1;
  const double l3 = -c * s * (1.0 - s) * z2;
  const double l0 = -c * s * (1.0 - s) * z1;
  return diagonal_entry(h, l1, l2, l3, l0);
}

double cond_diag_half(const ArrayGeometry& g, double c, double h, Vec2 e) {
  const double f1 = half_factor(h), f3 = full_factor(h);
  const double z1 = cosine_gap(g, {e.u * h, e.v * h});
  const double z2 = cosine_gap(g, {2.0 * e.u * h, 2.0 * e.v * h});
  const double second = f3 > 0.0 ? 2.0 * f3 * std::exp(c * (0.5 * z1 - 0.25 * z2)) : 0.0;
  return (2.0 * f1 * std::exp(0.5 * c * z1) - second) / (f1 * f1);
}

double cond_cross_general(const ArrayGeometry& g, double c, const PlanarBoundInputs& in) {
  const Vec2 u{in.h_u, 0.0}, v{0.0, in.h_v};
  const double su = in.s_u, sv = in.s_v;
  auto le = [&](double a, double b, Vec2 x, Vec2 y) { return cond_log_eta(g, c, a, b, x, y); };
  const double l0 = le(su, 0.0, u, {}) + le(0.0, sv, {}, v);
  return std::exp(le(su, sv, u, v) - l0) + std::exp(le(1.0 - su, 1.0 - sv, -u, -v) - l0) -
         std::exp(le(su, 1.0 - sv, u, -v) - l0) - std::exp(le(1.0 - su, sv, -u, v) - l0);
}

double cond_cross_half(const ArrayGeometry& g, double c, const PlanarBoundInputs& in) {
  const double l0 = -0.25 * c * (cosine_gap(g, {in.h_u, 0.0}) + cosine_gap(g, {0.0, in.h_v}));
  return 2.0 * (std::exp(-0.25 * c * cosine_gap(g, {in.h_u, -in.h_v}) - l0) -
                std::exp(-0.25 * c * cosine_gap(g, {in.h_u, in.h_v}) - l0));
}

GMatrix pack(double guu, double gvv, double guv, const PlanarBoundInputs& in) {
  GMatrix g;
  g.entries.resize(2, 2);
  g.entries << guu, guv, guv, gvv;
  g.h = Eigen::Vector2d(in.h_u, in.h_v);
  g.s = Eigen::Vector2d(in.s_u, in.s_v);
  return g;
}

void check_planar(const PlanarBoundInputs& in) {
  check_test_point(in.h_u, in.s_u);
  check_test_point(in.h_v, in.s_v);
}

bool is_half(const PlanarBoundInputs& in) { return in.s_u == 0.5 && in.s_v == 0.5; }

void check_linear(const ArrayGeometry& g) {
  if (g.kind() != ArrayKind::Linear) throw std::invalid_argument("linear closed form needs a linear array");
}

}  // namespace

cd steering_sum(const ArrayGeometry& geometry, double cu, double cv) {
  cd acc{0.0, 0.0};
  for (const auto& p : geometry.sensors()) {
    const double x = -2.0 * kPi * (p.dx * cu + p.dy * cv);
    acc += cd{std::cos(x), std::sin(x)};
  }
  return acc;
}

GMatrix planar_g_uncond_general_s(const ArrayGeometry& geometry, const SignalModel& model,
                                  const PlanarBoundInputs& in) {
  check_planar(in);
  const UncondConsts k = uncond_consts(geometry, model);
  return pack(uncond_diag_general(geometry, k, in.h_u, in.s_u, {1.0, 0.0}),
              uncond_diag_general(geometry, k, in.h_v, in.s_v, {0.0, 1.0}), uncond_cross_general(geometry, k, in),
              in);
}

GMatrix planar_g_uncond(const ArrayGeometry& geometry, const SignalModel& model, const PlanarBoundInputs& in) {
  if (!is_half(in)) return planar_g_uncond_general_s(geometry, model, in);
  check_planar(in);
  const UncondConsts k = uncond_consts(geometry, model);
  return pack(uncond_diag_half(geometry, k, in.h_u, {1.0, 0.0}), uncond_diag_half(geometry, k, in.h_v, {0.0, 1.0}),
              uncond_cross_half(geometry, k, in), in);
}

GMatrix planar_g_cond_general_s(const ArrayGeometry& geometry, const SignalModel& model,
                                const PlanarBoundInputs& in) {
  check_planar(in);
  const double c = cond_consts(model);
  return pack(cond_diag_general(geometry, c, in.h_u, in.s_u, {1.0, 0.0}),
              cond_diag_general(geometry, c, in.h_v, in.s_v, {0.0, 1.0}), cond_cross_general(geometry, c, in), in);
}

GMatrix planar_g_cond(const ArrayGeometry& geometry, const SignalModel& model, const PlanarBoundInputs& in) {
  if (!is_half(in)) return planar_g_cond_general_s(geometry, model, in);
  check_planar(in);
  const double c = cond_consts(model);
  return pack(cond_diag_half(geometry, c, in.h_u, {1.0, 0.0}), cond_diag_half(geometry, c, in.h_v, {0.0, 1.0}),
              cond_cross_half(geometry, c, in), in);
}

double linear_g(double h, double s, const ArrayGeometry& geometry, const SignalModel& model) {
  check_linear(geometry);
  check_test_point(h, s);
  if (model.is_conditional()) {
    const double c = model.c_snr();
    return s == 0.5 ? cond_diag_half(geometry, c, h, {1.0, 0.0}) : cond_diag_general(geometry, c, h, s, {1.0, 0.0});
  }
  const UncondConsts k = uncond_consts(geometry, model);
  return s == 0.5 ? uncond_diag_half(geometry, k, h, {1.0, 0.0}) : uncond_diag_general(geometry, k, h, s, {1.0, 0.0});
}

double linear_uwwb(double h, double s, const ArrayGeometry& geometry, const SignalModel& model) {
  if (model.is_conditional()) throw std::invalid_argument("linear_uwwb needs an unconditional model");
  return h * h / linear_g(h, s, geometry, model);
}

double linear_cwwb(double h, double s, const ArrayGeometry& geometry, const SignalModel& model) {
  if (!model.is_conditional()) throw std::invalid_argument("linear_cwwb needs a conditional model");
  return h * h / linear_g(h, s, geometry, model);
}

}  // namespace wwbkit
