#pragma once

#include <Eigen/Dense>

#include "wwbkit/g_matrix.hpp"
#include "wwbkit/geometry.hpp"
#include "wwbkit/signal_model.hpp"

namespace wwbkit {

/// Single-source planar closed-form inputs. The prior is uniform on [-1,1] for
/// both direction cosines.
struct PlanarBoundInputs {
  double h_u = 0.5;
  double h_v = 0.5;
  double s_u = 0.5;
  double s_v = 0.5;
};

/// sum_k exp(-j 2 pi (dx_k cu + dy_k cv)).
cd steering_sum(const ArrayGeometry& geometry, double cu, double cv);

/// Unconditional model, 2 x 2 G. Dispatches to the simplified expressions when
/// s_u = s_v = 1/2 exactly.
GMatrix planar_g_uncond(const ArrayGeometry& geometry, const SignalModel& model, const PlanarBoundInputs& in);
/// General-s expressions only (no s = 1/2 dispatch).
GMatrix planar_g_uncond_general_s(const ArrayGeometry& geometry, const SignalModel& model,
                                  const PlanarBoundInputs& in);

/// Conditional model, 2 x 2 G, same dispatch rule.
GMatrix planar_g_cond(const ArrayGeometry& geometry, const SignalModel& model, const PlanarBoundInputs& in);
GMatrix planar_g_cond_general_s(const ArrayGeometry& geometry, const SignalModel& model,
                                const PlanarBoundInputs& in);

/// Scalar G for a linear array (prior [-1,1]).
double linear_g(double h, double s, const ArrayGeometry& geometry, const SignalModel& model);

/// h^2 / G for a linear array, unconditional model.
double linear_uwwb(double h, double s, const ArrayGeometry& geometry, const SignalModel& model);
/// h^2 / G for a linear array, conditional model.
double linear_cwwb(double h, double s, const ArrayGeometry& geometry, const SignalModel& model);

}  // namespace wwbkit
