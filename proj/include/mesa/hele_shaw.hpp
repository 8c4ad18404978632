#pragma once

// Direct solvers for the incompressible (Hele-Shaw) limit:
//  - the stationary pressure problem -Lap p = Lap Phi + G(p) on a saturated
//    region with p = 0 on its boundary,
//  - 1D patch front tracking with boundary velocity -(p' + Phi'),
//  - a transport/projection scheme for the limit density with n <= 1.

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

#include "mesa/model.hpp"

namespace mesa {

/// Pressure on [a, b] sampled at m equally spaced nodes, endpoints included.
struct PressureProfile {
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd values;

  int nodes() const { return int(values.size()); }
  double spacing() const { return (b - a) / (nodes() - 1); }
  double node(int j) const { return a + j * spacing(); }
  /// Cubic interpolation between nodes; zero outside [a, b].
  double sample(double x) const;
  /// Second-order one-sided derivative at a (from the right) and b (from the left).
  double slope_left() const;
  double slope_right() const;
};

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
};

struct StationaryInfo {
  int iterations = 0;
  std::vector<double> residual_history;
  /// Cells or nodes where a slightly negative value (>= -1e-12) was set to 0.
  int clamped = 0;
};

/// Fourth-order compact (Numerov) finite differences on m nodes. Linear laws
/// are solved in one shot, others by damped Newton.
PressureProfile solve_stationary_pressure(double a, double b, int m, const Potential& phi,
                                          const GrowthLaw& law, const NewtonOptions& opts = {},
                                          StationaryInfo* info = nullptr);

/// Same problem on a set of grid cells (mask[k] true) with the (2d+1)-point
/// Laplacian and p = 0 on every other cell.
Field solve_stationary_pressure(const GridSpec& grid, const std::vector<bool>& saturated,
                                const Potential& phi, const GrowthLaw& law,
                                const NewtonOptions& opts = {}, StationaryInfo* info = nullptr);

/// Density n = p^(1/gamma) built from the stationary pressure on the ball of
/// the given radius: the saturated patch seen at finite gamma.
Field saturated_density(const GridSpec& grid, double radius, double gamma, const Potential& phi,
                        const GrowthLaw& law);

// ---------------------------------------------------------------- fronts

struct FrontState {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  PressureProfile profile;
};

struct FrontVelocity {
  double left = 0.0;
  double right = 0.0;
};

struct FrontOptions {
  int mesh = 2000;
  bool heun = true;
  /// Width below which the patch is considered extinct.
  double min_width = 1e-9;
};

FrontState make_front(double a, double b, double t, const Potential& phi, const GrowthLaw& law,
                      int mesh = 2000);

FrontVelocity front_velocity(const FrontState& front, const Potential& phi);

struct FrontStep {
  FrontState front;
  bool extinct = false;
};

FrontStep evolve_front(const FrontState& front, const Potential& phi, const GrowthLaw& law,
                       double dt, const FrontOptions& opts = {});

struct FrontTrajectory {
  std::vector<FrontState> states;
  std::vector<FrontVelocity> velocities;
  bool extinct = false;
};

/// Steps of size dt, shortened to land exactly on every time in `stops`
/// (the horizon is always a stop). Every step is recorded.
FrontTrajectory run_front(const FrontState& start, const Potential& phi, const GrowthLaw& law,
                          double dt, double horizon, std::span<const double> stops = {},
                          const FrontOptions& opts = {});

/// Front position reconstructed from the density: index of the outermost
/// cell with n >= 1/2, corrected by the deficit in it and the mass beyond.
struct FrontPositions {
  double left = 0.0;
  double right = 0.0;
};
FrontPositions density_fronts(const Field& n);

// ---------------------------------------------------------------- limit stepper

struct LimitState {
  double t = 0.0;
  Field n;
  Field p;

  /// Density in [0, 1]; the pressure is solved on the cells with n = 1.
  static LimitState initial(Field n0, const Potential& phi, const GrowthLaw& law);
};

enum class SweepOrder { forward, reverse };

struct LimitOptions {
  SweepOrder order = SweepOrder::forward;
  /// Bound on the natural complementarity residual |min(D p, 1 - n)|, raised
  /// to the roundoff floor 64 eps (2d dt/h^2) max p when that is larger.
  double tolerance = 1e-12;
  int max_sweeps = 10000;
  /// Over-relaxation factor; 0 picks the optimal value for the active box.
  double omega = 0.0;
};

struct LimitStepInfo {
  int sweeps = 0;
  double violation = 0.0;
  std::vector<double> violation_history;
  double mass_before = 0.0;
  double mass_after = 0.0;
  /// dt * integral of n G(p).
  double source = 0.0;
};

LimitState limit_step(const LimitState& state, const Potential& phi, const GrowthLaw& law,
                      double dt, const LimitOptions& opts = {}, LimitStepInfo* info = nullptr);

/// cfl * min(h, h / (2 sup|grad Phi|), 1 / (2 sup|G|)).
double limit_dt(const GridSpec& grid, const Potential& phi, const GrowthLaw& law,
                double cfl = 0.45);

struct LimitTrajectory {
  std::vector<LimitState> snapshots;
  long steps = 0;
  long total_sweeps = 0;
  double max_violation = 0.0;
  /// max over steps of |dmass - source| / mass.
  double max_balance_error = 0.0;
};

LimitTrajectory run_limit(const LimitState& start, const Potential& phi, const GrowthLaw& law,
                          double dt, double horizon, std::span<const double> stops = {},
                          const LimitOptions& opts = {});

}  // namespace mesa
