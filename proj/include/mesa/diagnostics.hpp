#pragma once

// Norms, bounds and residuals measured on State trajectories. Space-time
// integrals over Q_T use cell sums in space and the trapezoid rule over the
// snapshot times.

#include <span>
#include <vector>

#include "mesa/pme_solver.hpp"

namespace mesa {

/// w = Lap p + G(p).
Field ab_quantity(const Field& p, const GrowthLaw& law);
/// |f|_- = max(-f, 0) cellwise.
Field negative_part(const Field& f);

struct Residual {
  double integral = 0.0;
  double pointwise_max = 0.0;
};

/// Integral over the snapshot of |p (Lap p + Lap Phi + G(p))| and its max.
Residual complementarity_residual(const State& state, const ModelParams& params);

struct SaturationResidual {
  /// Integral of p (1 - n)_+.
  double integral = 0.0;
  double pointwise_max = 0.0;
  /// max |p^((1+gamma)/gamma) - n p| / max(1, n p).
  double identity_error = 0.0;
};

SaturationResidual saturation_residual(const State& state, double gamma);

struct DiagnosticsReport {
  double gamma = 0.0;
  double horizon = 0.0;
  double sup_n = 0.0;
  double sup_p = 0.0;
  std::vector<double> snapshot_times;
  /// Total variation of n, one entry per snapshot.
  std::vector<double> bv_space;
  /// max over snapshot intervals of ||n(t_k+1) - n(t_k)||_L1 / dt.
  double l1_dt_n = 0.0;
  /// Sum over snapshot intervals of ||p(t_k+1) - p(t_k)||_L1, i.e. ||dp/dt||_L1(Q_T).
  double l1_dt_p = 0.0;
  /// sum_i ||d_i p||_L1(Q_T).
  double grad_p_l1_qt = 0.0;
  double grad_p_l2_qt = 0.0;
  double grad_p_l4_qt = 0.0;
  double ab_l3 = 0.0;
  double lap_p_l1 = 0.0;
  double comp_residual = 0.0;
  double comp_residual_max = 0.0;
  double sat_residual = 0.0;
  double sat_residual_max = 0.0;
  double identity_residual = 0.0;
  std::vector<double> support_radius_series;
};

DiagnosticsReport space_time_norms(std::span<const State> trajectory, const ModelParams& params);

/// Largest distance from the origin of a cell centre where n > threshold.
double support_radius(const Field& n, double threshold = 1e-14);

/// Total variation of the piecewise-constant field, zero-extended.
double total_variation(const Field& f);

/// Number of cells with n >= threshold whose centre lies outside the ball
/// of radius sqrt(2 R(t)) from the supersolution.
long confinement_violations(const State& state, const ModelParams& params,
                            double threshold = 1e-14);

/// Trapezoid weights for the given (increasing) times.
std::vector<double> trapezoid_weights(std::span<const double> times);

}  // namespace mesa
