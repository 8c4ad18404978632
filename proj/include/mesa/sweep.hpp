#pragma once

// gamma-ladders: one pme run per gamma, a reference limit solution, and the
// distances and verdicts comparing them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mesa/diagnostics.hpp"
#include "mesa/problem.hpp"

namespace mesa {

struct Distances {
  /// ||n_a(t_k) - n_b(t_k)||_L1 per snapshot.
  std::vector<double> l1;
  double l1_sup = 0.0;
  double l1_final = 0.0;
  /// ||grad p_a - grad p_b||_L2(Q_T), trapezoid in time.
  double grad_p_l2 = 0.0;
};

/// Runs must share grid and snapshot times.
Distances distance_metrics(std::span<const State> a, std::span<const State> b);

/// Limit density n_inf(0) for the problem: saturated profiles become the
/// indicator of their ball, anything else is clipped to 1.
Field limit_initial_density(const Problem& problem);

/// Reference trajectory sampled at t = 0 and the problem's snapshot times.
/// `fronts` receives the tracked (a, b) per snapshot for front tracking.
std::vector<State> reference_trajectory(const Problem& problem, Reference kind,
                                        std::vector<FrontPositions>* fronts = nullptr);

struct SweepRow {
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  DiagnosticsReport diagnostics;
  long steps = 0;
  double max_balance_error = 0.0;
  double max_clip_fraction = 0.0;
  long confinement_violations = 0;
  double d_l1_to_ref = 0.0;
  double d_l1_sup_to_ref = 0.0;
  double d_l2_gradp_to_ref = 0.0;
  /// max over snapshots of |right front - reference right front| / h (1D front tracking only).
  double front_error_cells = 0.0;
  double wall_time_s = 0.0;
};

struct SweepVerdicts {
  std::optional<bool> comp_residual_decay;
  std::optional<bool> sat_residual_decay;
  std::optional<bool> uniform_bounds;
  std::optional<bool> distance_decreasing;
  bool confinement = true;
  bool conservation = true;
};

struct SweepReport {
  std::string scenario;
  Reference reference = Reference::largest_gamma;
  std::vector<SweepRow> rows;
  SweepVerdicts verdicts;
  double reference_wall_time_s = 0.0;
  bool complete() const;
};

struct SweepOptions {
  /// Worker count; 0 reads MESA_LIMIT_THREADS, then the processor count.
  int threads = 0;
  /// Order in which ladder entries are started (indices); empty = ladder order.
  std::vector<std::size_t> execution_order;
};

SweepReport run_sweep(const Problem& problem, const SweepOptions& opts = {});

/// Verdicts from finished rows. Needs at least two successful rows.
SweepVerdicts sweep_verdicts(const std::vector<SweepRow>& rows, Reference reference);

int default_thread_count();

}  // namespace mesa
