#include "mesa/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

namespace mesa {

Distances distance_metrics(std::span<const State> a, std::span<const State> b) {
  if (a.size() != b.size()) throw InvalidArgument("runs have different snapshot counts");
  if (a.empty()) return {};
  const GridSpec& g = a.front().n.grid();
  std::vector<double> times;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k].n.grid() == g) || !(b[k].n.grid() == g))
      throw InvalidArgument("runs live on different grids");
    if (std::abs(a[k].t - b[k].t) > 1e-12 * std::max(1.0, std::abs(a[k].t)))
      throw InvalidArgument("snapshot times are not aligned");
    times.push_back(a[k].t);
  }
  const double vol = g.cell_volume();
  const auto w = trapezoid_weights(times);
  Distances d;
  double grad = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double l1 = (a[k].n.values() - b[k].n.values()).abs().sum() * vol;
    d.l1.push_back(l1);
    d.l1_sup = std::max(d.l1_sup, l1);
    const Field dp = a[k].p - b[k].p;
    for (int axis = 0; axis < g.dim(); ++axis)
      grad += w[k] * gradient(dp, axis).values().square().sum() * vol;
  }
  d.l1_final = d.l1.back();
  d.grad_p_l2 = std::sqrt(grad);
  return d;
}

Field limit_initial_density(const Problem& problem) {
  const GridSpec& g = problem.params.grid;
  if (problem.init_kind == "pressure-profile")
    return InitialData::patch(problem.init_radius, 1.0).density(g);
  const double gamma =
      std::isnan(problem.params.gamma) ? problem.ladder.back() : problem.params.gamma;
  Field n = problem.initial_density(gamma);
  n.values() = n.values().min(1.0);
  return n;
}

namespace {

std::vector<double> stop_times(const Problem& problem) { return problem.solver.snapshot_times; }

State rasterise(const FrontState& f, const GridSpec& g) {
  State s{f.t, Field(g), Field(g)};
  const double h = g.spacing();
  for (int i = 0; i < g.cells(0); ++i) {
    const double lo = g.face(0, i), hi = lo + h;
    s.n(i) = std::max(0.0, std::min(hi, f.b) - std::max(lo, f.a)) / h;
    s.p(i) = f.profile.sample(g.center(0, i));
  }
  return s;
}

}  // namespace

std::vector<State> reference_trajectory(const Problem& problem, Reference kind,
                                        std::vector<FrontPositions>* fronts) {
  const auto& prm = problem.params;
  const auto stops = stop_times(problem);
  std::vector<State> out;
  if (kind == Reference::front_tracking) {
    if (prm.grid.dim() != 1) throw InvalidArgument("front tracking needs a 1D problem");
    FrontOptions fo;
    fo.mesh = problem.front_mesh;
    const FrontState start =
        make_front(-problem.init_radius, problem.init_radius, 0.0, prm.potential, prm.growth,
                   problem.front_mesh);
    const FrontTrajectory traj =
        run_front(start, prm.potential, prm.growth, problem.front_dt, prm.horizon, stops, fo);
    // Keep t = 0 and the states landing on the stops.
    std::size_t next = 0;
    for (const auto& st : traj.states) {
      const bool keep = out.empty() || (next < stops.size() && st.t == stops[next]);
      if (!keep) continue;
      if (!out.empty()) ++next;
      out.push_back(rasterise(st, prm.grid));
      if (fronts) fronts->push_back({st.a, st.b});
    }
    if (traj.extinct)
      throw SolverError("reference front went extinct before the horizon");
    return out;
  }
  if (kind == Reference::limit_step) {
    LimitOptions lo;
    lo.tolerance = problem.limit_tolerance;
    const LimitState start =
        LimitState::initial(limit_initial_density(problem), prm.potential, prm.growth);
    const LimitTrajectory traj =
        run_limit(start, prm.potential, prm.growth, problem.limit_dt, prm.horizon, stops, lo);
    for (const auto& st : traj.snapshots) out.push_back(State{st.t, st.n, st.p});
    return out;
  }
  throw InvalidArgument("largest-gamma reference comes from the ladder itself");
}

int default_thread_count() {
  if (const char* env = std::getenv("MESA_LIMIT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

bool SweepReport::complete() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; });
}

SweepVerdicts sweep_verdicts(const std::vector<SweepRow>& rows, Reference reference) {
  SweepVerdicts v;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    v.confinement = v.confinement && r.confinement_violations == 0;
    v.conservation = v.conservation && r.max_balance_error <= 1e-8 && r.max_clip_fraction <= 1e-12;
  }
  std::vector<const SweepRow*> ok;
  for (const auto& r : rows)
    if (r.ok) ok.push_back(&r);
  if (ok.size() < 2) return v;

  // Baseline is gamma = 10 when the ladder has it, else its first entry.
  const SweepRow* base = ok.front();
  for (const SweepRow* r : ok)
    if (r->gamma == 10.0) base = r;
  const SweepRow* last = ok.back();
  v.comp_residual_decay = last->diagnostics.comp_residual <= 0.25 * base->diagnostics.comp_residual;
  v.sat_residual_decay = last->diagnostics.sat_residual <= 0.25 * base->diagnostics.sat_residual;

  bool uniform = true;
  for (auto metric : {&DiagnosticsReport::grad_p_l4_qt, &DiagnosticsReport::ab_l3,
                      &DiagnosticsReport::lap_p_l1}) {
    double lo = INFINITY, hi = 0.0;
    for (const SweepRow* r : ok) {
      if (r->gamma < base->gamma) continue;
      lo = std::min(lo, r->diagnostics.*metric);
      hi = std::max(hi, r->diagnostics.*metric);
    }
    uniform = uniform && hi <= 2.0 * lo;
  }
  v.uniform_bounds = uniform;

  std::vector<const SweepRow*> compared = ok;
  if (reference == Reference::largest_gamma) compared.pop_back();
  if (compared.size() >= 2) {
    bool dec = true;
    for (std::size_t k = 1; k < compared.size(); ++k)
      dec = dec && compared[k]->d_l1_to_ref < compared[k - 1]->d_l1_to_ref;
    v.distance_decreasing = dec;
  }
  return v;
}

namespace {

struct RunResult {
  SweepRow row;
  std::vector<State> snapshots;
};

RunResult run_one(const Problem& base, double gamma) {
  RunResult res;
  res.row.gamma = gamma;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Problem pr = base.with_gamma(gamma);
    SolverConfig cfg = pr.solver;
    cfg.record_series = false;
    const PmeSolver solver(pr.params, cfg);
    Trajectory traj = solver.run(pr.initial_density(), pr.params.horizon);
    res.row.diagnostics = space_time_norms(traj.snapshots, pr.params);
    res.row.steps = traj.log.steps;
    res.row.max_balance_error = traj.log.max_balance_error;
    res.row.max_clip_fraction = traj.log.max_clip_fraction;
    for (const auto& s : traj.snapshots)
      res.row.confinement_violations += confinement_violations(s, pr.params);
    res.snapshots = std::move(traj.snapshots);
    res.row.ok = true;
  } catch (const std::exception& e) {
    res.row.error = e.what();
  }
  res.row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace

SweepReport run_sweep(const Problem& problem, const SweepOptions& opts) {
  const auto& ladder = problem.ladder;
  if (ladder.empty()) throw InvalidArgument("sweep ladder is empty");
  SweepReport rep;
  rep.scenario = problem.scenario;
  rep.reference = problem.reference;

  std::vector<std::size_t> order = opts.execution_order;
  if (order.empty())
    for (std::size_t k = 0; k < ladder.size(); ++k) order.push_back(k);
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
      if (sorted[k] != k || sorted.size() != ladder.size())
        throw InvalidArgument("execution order must be a permutation of the ladder indices");
  }

  // Workers pull ladder indices and hand finished runs back through futures;
  // only this thread touches the report.
  std::vector<std::promise<RunResult>> outbox(ladder.size());
  std::vector<std::future<RunResult>> inbox;
  for (auto& p : outbox) inbox.push_back(p.get_future());
  std::atomic<std::size_t> cursor{0};
  const int threads =
      std::max(1, std::min<int>(opts.threads > 0 ? opts.threads : default_thread_count(),
                                int(ladder.size())));
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w)
    workers.emplace_back([&] {
      for (std::size_t slot = cursor++; slot < order.size(); slot = cursor++) {
        const std::size_t k = order[slot];
        outbox[k].set_value(run_one(problem, ladder[k]));
      }
    });

  std::vector<State> reference;
  std::vector<FrontPositions> fronts;
  std::string reference_error;
  const auto ref_start = std::chrono::steady_clock::now();
  if (problem.reference != Reference::largest_gamma) {
    try {
      reference = reference_trajectory(problem, problem.reference, &fronts);
    } catch (const std::exception& e) {
      reference_error = e.what();
    }
  }
  rep.reference_wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ref_start).count();

  std::vector<RunResult> results;
  for (auto& f : inbox) results.push_back(f.get());
  for (auto& t : workers) t.join();

  if (problem.reference == Reference::largest_gamma && results.back().row.ok)
    reference = results.back().snapshots;
  const double h = problem.params.grid.spacing();
  for (auto& r : results) {
    if (r.row.ok && !reference.empty()) {
      try {
        const Distances d = distance_metrics(r.snapshots, reference);
        r.row.d_l1_to_ref = d.l1_final;
        r.row.d_l1_sup_to_ref = d.l1_sup;
        r.row.d_l2_gradp_to_ref = d.grad_p_l2;
        for (std::size_t k = 0; k < fronts.size(); ++k)
          r.row.front_error_cells = std::max(
              r.row.front_error_cells,
              std::abs(density_fronts(r.snapshots[k].n).right - fronts[k].right) / h);
      } catch (const std::exception& e) {
        throw SolverError(std::string("internal: ") + e.what());
      }
    } else if (r.row.ok) {
      r.row.ok = false;
      r.row.error = "reference failed: " + reference_error;
    }
    rep.rows.push_back(std::move(r.row));
  }
  rep.verdicts = sweep_verdicts(rep.rows, rep.reference);
  return rep;
}

}  // namespace mesa
