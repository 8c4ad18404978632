#include "mesa/pme_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace mesa {

State State::from_density(double t, Field n, double gamma) {
  Field p = eval_pressure(n, gamma);
  return State{t, std::move(n), std::move(p)};
}

void face_velocities(const GridSpec& g, const Potential& phi, std::vector<double> (&out)[2]) {
  const int nx = g.cells(0), ny = g.cells(1);
  out[0].assign(std::size_t(nx + 1) * ny, 0.0);
  out[1].clear();
  if (phi.is_zero()) return;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Point x{g.face(0, i), g.dim() == 2 ? g.center(1, j) : 0.0};
      out[0][std::size_t(j) * (nx + 1) + i] = -phi.gradient(x).x();
    }
  if (g.dim() == 2) {
    out[1].assign(std::size_t(nx) * (ny + 1), 0.0);
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Point x{g.center(0, i), g.face(1, j)};
        out[1][std::size_t(j) * nx + i] = -phi.gradient(x).y();
      }
  }
}

void add_upwind_drift(const Field& n, const std::vector<double> (&face_velocity)[2],
                      const Box& box, double scale, Field& out) {
  const GridSpec& g = n.grid();
  if (face_velocity[0].empty() || box.empty()) return;
  const int nx = g.cells(0), ny = g.cells(1);
  const double inv_h = scale / g.spacing();
  auto flux = [](double u, double left, double right) {
    return std::max(u, 0.0) * left + std::min(u, 0.0) * right;
  };
  for (int j = box.lo[1]; j <= box.hi[1]; ++j) {
    for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
      const double c = n(i, j);
      const double* ux = face_velocity[0].data() + std::size_t(j) * (nx + 1);
      const double west = i > 0 ? n(i - 1, j) : 0.0;
      const double east = i < nx - 1 ? n(i + 1, j) : 0.0;
      double div = flux(ux[i + 1], c, east) - flux(ux[i], west, c);
      if (g.dim() == 2) {
        const auto& uy = face_velocity[1];
        const double south = j > 0 ? n(i, j - 1) : 0.0;
        const double north = j < ny - 1 ? n(i, j + 1) : 0.0;
        div += flux(uy[std::size_t(j + 1) * nx + i], c, north) -
               flux(uy[std::size_t(j) * nx + i], south, c);
      }
      out(i, j) -= div * inv_h;
    }
  }
}

PmeSolver::PmeSolver(ModelParams params, SolverConfig config)
    : params_(std::move(params)), config_(std::move(config)) {
  if (!(config_.cfl_safety > 0.0 && config_.cfl_safety <= 1.0))
    throw InvalidArgument("cfl_safety must lie in (0, 1]");
  if (!(params_.gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  face_velocities(params_.grid, params_.potential, face_velocity_);
}

double PmeSolver::stable_dt(const State& state) const {
  return dt_limit(state.n.values().maxCoeff(), state.p.values().maxCoeff());
}

double PmeSolver::dt_limit(double max_n, double max_p) const {
  const GridSpec& g = params_.grid;
  const double h = g.spacing();
  const double diffusivity = params_.gamma * std::pow(std::max(max_n, 0.0), params_.gamma);
  const double speed = params_.potential.sup_gradient();
  const double rate = params_.growth.sup_abs(std::max(params_.growth.p_max(), max_p));

  double limit = std::numeric_limits<double>::infinity();
  if (diffusivity > 0.0) limit = std::min(limit, h * h / (2.0 * g.dim() * diffusivity));
  if (speed > 0.0) limit = std::min(limit, h / (2.0 * speed));
  if (rate > 0.0) limit = std::min(limit, 1.0 / (2.0 * rate));
  if (std::isinf(limit)) return config_.max_dt;
  return std::min(config_.max_dt, config_.cfl_safety * limit);
}

State PmeSolver::step(const State& state, double dt, StepRecord* record,
                      std::optional<Box> support, long step_index) const {
  const GridSpec& g = params_.grid;
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const Box box = (support ? *support : support_box(state.n)).dilated(1, g);
  {
    double mn = 0.0, mp = 0.0;
    for (int j = box.lo[1]; j <= box.hi[1]; ++j)
      for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
        mn = std::max(mn, state.n(i, j));
        mp = std::max(mp, state.p(i, j));
      }
    const double limit = dt_limit(mn, mp);
    if (dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "time step " << dt << " exceeds the stable step " << limit;
      throw StabilityError(os.str());
    }
  }
  State next{state.t + dt, state.n, state.p};
  StepRecord rec;
  rec.dt = dt;
  if (box.empty()) {
    if (record) *record = rec;
    return next;
  }

  const int nx = g.cells(0), ny = g.cells(1);
  const double h = g.spacing();
  const double vol = g.cell_volume();
  const double coeff = params_.gamma / (params_.gamma + 1.0) / (h * h);
  const bool two_d = g.dim() == 2;
  const Field& n = state.n;
  const Field& p = state.p;
  // n^(gamma+1) = p n, zero outside the grid.
  auto u = [&](int i, int j) {
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    const Eigen::Index k = g.index(i, j);
    return p[k] * n[k];
  };

  Field drift(g);
  add_upwind_drift(n, face_velocity_, box, 1.0, drift);

  const GrowthLaw& G = params_.growth;
  const bool semi = config_.reaction == ReactionTreatment::semi_implicit;
  double mass_before = 0.0, mass_after = 0.0, source = 0.0, clipped = 0.0;
  for (int j = box.lo[1]; j <= box.hi[1]; ++j) {
    for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
      const Eigen::Index k = g.index(i, j);
      const double nk = n[k];
      const double uk = u(i, j);
      double lap = u(i - 1, j) + u(i + 1, j) - 2.0 * uk;
      if (two_d) lap += u(i, j - 1) + u(i, j + 1) - 2.0 * uk;
      const double transport = coeff * lap + drift[k];
      const double growth = nk == 0.0 ? 0.0 : G(p[k]);
      double v;
      if (semi) {
        const double gp = std::max(growth, 0.0), gm = std::max(-growth, 0.0);
        v = (nk + dt * (transport + nk * gp)) / (1.0 + dt * gm);
        source += dt * (nk * gp - v * gm);
      } else {
        v = nk + dt * (transport + nk * growth);
        source += dt * nk * growth;
      }
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite density at cell " << k << " in step " << step_index;
        throw DivergenceError(os.str(), step_index);
      }
      if (v < 0.0) {
        clipped -= v;
        v = 0.0;
      }
      mass_before += nk;
      mass_after += v;
      next.n[k] = v;
      next.p[k] = v == 0.0 ? 0.0 : std::pow(v, params_.gamma);
    }
  }

  if (record) {
    rec.mass_before = mass_before * vol;
    rec.mass_after = mass_after * vol;
    rec.source = source * vol;
    rec.clipped = clipped * vol;
    double mn = 0.0, mp = 0.0;
    for (int j = box.lo[1]; j <= box.hi[1]; ++j)
      for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
        mn = std::max(mn, next.n(i, j));
        mp = std::max(mp, next.p(i, j));
      }
    rec.max_n = mn;
    rec.max_p = mp;
    *record = rec;
  }
  return next;
}

namespace {

bool touches_edge(const Box& b, const GridSpec& g, int layers) {
  if (b.empty()) return false;
  for (int a = 0; a < g.dim(); ++a)
    if (b.lo[a] < layers || b.hi[a] > g.cells(a) - 1 - layers) return true;
  return false;
}

}  // namespace

Trajectory PmeSolver::run(const Field& n0, double horizon) const {
  const auto start = std::chrono::steady_clock::now();
  if (!(horizon >= 0.0)) throw InvalidArgument("horizon must be nonnegative");
  if (!(n0.grid() == params_.grid)) throw InvalidArgument("initial field is on a different grid");
  if (!params_.gamma_admissible()) {
    std::ostringstream os;
    os << "gamma = " << params_.gamma << " must exceed " << params_.gamma_lower_bound();
    throw InvalidArgument(os.str());
  }
  const GridSpec& g = params_.grid;
  if (horizon > 0.0) {
    const double bound = domain_bound(params_, horizon);
    for (int a = 0; a < g.dim(); ++a)
      if (std::min(-g.origin(a), g.origin(a) + g.extent(a)) < bound * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "grid half-extent along axis " << a << " is below the support bound " << bound;
        throw InvalidArgument(os.str());
      }
  }

  std::vector<double> targets;
  for (double s : config_.snapshot_times)
    if (s > 0.0 && s < horizon) targets.push_back(s);
  if (horizon > 0.0) targets.push_back(horizon);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Trajectory traj;
  State s = State::from_density(0.0, n0, params_.gamma);
  traj.snapshots.push_back(s);
  Box box = support_box(s.n);
  if (touches_edge(box, g, 3)) throw GridTooSmall("initial support reaches the grid edge");

  RunLog& log = traj.log;
  std::size_t next = 0;
  StepRecord rec;
  double max_n = s.n.values().maxCoeff(), max_p = s.p.values().maxCoeff();
  while (next < targets.size()) {
    const double target = targets[next];
    double dt = dt_limit(max_n, max_p);
    bool land = false;
    if (target - s.t <= dt * (1.0 + 1e-12)) {
      dt = target - s.t;
      land = true;
    }
    s = step(s, dt, &rec, box, log.steps);
    ++log.steps;
    max_n = rec.max_n;
    max_p = rec.max_p;
    if (land) {
      s.t = target;
      traj.snapshots.push_back(s);
      ++next;
    }
    box = support_box(s.n, box.dilated(1, g));
    if (touches_edge(box, g, 3)) {
      std::ostringstream os;
      os << "support reached the outermost cell layers at t = " << s.t;
      throw GridTooSmall(os.str());
    }

    const double mass = std::max(rec.mass_before, rec.mass_after);
    if (mass > 0.0) {
      const double imbalance = std::abs(rec.mass_after - rec.mass_before - rec.source);
      log.max_balance_error = std::max(log.max_balance_error, imbalance / mass);
      log.max_clip_fraction = std::max(log.max_clip_fraction, rec.clipped / mass);
    }
    log.clipped_mass += rec.clipped;
    if (config_.record_series) {
      log.dt_series.push_back(rec.dt);
      log.mass_series.push_back(rec.mass_after);
      log.source_series.push_back(rec.source);
      log.clipped_series.push_back(rec.clipped);
      log.max_n_series.push_back(rec.max_n);
      log.max_p_series.push_back(rec.max_p);
    }
  }
  log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

}  // namespace mesa
