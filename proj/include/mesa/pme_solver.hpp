#pragma once

// Explicit finite-volume integration of
//   dn/dt = div(n grad p) + div(n grad Phi) + n G(p),   p = n^gamma.
// The pressure-driven flux is written as (gamma/(gamma+1)) grad n^(gamma+1),
// which makes the diffusion a plain Laplacian of n^(gamma+1) and the scheme
// conservative. Drift is first-order upwind with velocity -grad Phi.

#include <optional>
#include <vector>

#include "mesa/model.hpp"

namespace mesa {

struct State {
  double t = 0.0;
  Field n;
  Field p;

  /// State at time t with the pressure derived from n.
  static State from_density(double t, Field n, double gamma);
};

enum class ReactionTreatment { explicit_euler, semi_implicit };

struct SolverConfig {
  double cfl_safety = 0.45;
  ReactionTreatment reaction = ReactionTreatment::explicit_euler;
  /// Times at which run() records a State. The horizon is always recorded.
  std::vector<double> snapshot_times;
  /// Step used when nothing constrains the time step (n == 0, Phi == 0, G == 0).
  double max_dt = 1e-2;
  /// Keep per-step series in the RunLog.
  bool record_series = true;
};

/// Mass bookkeeping of a single step.
struct StepRecord {
  double dt = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;
  /// Quadrature of the reaction term actually applied, dt * sum(n G) h^d.
  double source = 0.0;
  /// Mass added back by clipping negative cells to zero.
  double clipped = 0.0;
  double max_n = 0.0;
  double max_p = 0.0;
};

struct RunLog {
  long steps = 0;
  std::vector<double> dt_series;
  std::vector<double> mass_series;
  std::vector<double> source_series;
  std::vector<double> clipped_series;
  std::vector<double> max_n_series;
  std::vector<double> max_p_series;
  double clipped_mass = 0.0;
  /// max over steps of |dmass - source| / mass.
  double max_balance_error = 0.0;
  /// max over steps of clipped / mass.
  double max_clip_fraction = 0.0;
  double wall_time_s = 0.0;
};

struct Trajectory {
  std::vector<State> snapshots;
  RunLog log;
};

class PmeSolver {
 public:
  PmeSolver(ModelParams params, SolverConfig config = {});

  const ModelParams& params() const { return params_; }
  const SolverConfig& config() const { return config_; }

  double stable_dt(const State& state) const;

  /// One explicit step. `support` may carry the bounding box of supp(n) to
  /// restrict the update; it is recomputed when absent.
  State step(const State& state, double dt, StepRecord* record = nullptr,
             std::optional<Box> support = std::nullopt, long step_index = 0) const;

  Trajectory run(const Field& n0, double horizon) const;

 private:
  double dt_limit(double max_n, double max_p) const;

  ModelParams params_;
  SolverConfig config_;
  // Drift velocity -dPhi/dx_axis at the faces; face i of a line sits left of cell i.
  std::vector<double> face_velocity_[2];
};

/// Upwind discretisation of div(n grad Phi) = -div(n u), u = -grad Phi,
/// restricted to `box`. Face velocities are laid out as in PmeSolver.
void add_upwind_drift(const Field& n, const std::vector<double> (&face_velocity)[2],
                      const Box& box, double scale, Field& out);

void face_velocities(const GridSpec& g, const Potential& phi, std::vector<double> (&out)[2]);

}  // namespace mesa
