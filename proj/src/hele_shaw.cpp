#include "mesa/hele_shaw.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mesa/pme_solver.hpp"

namespace mesa {

namespace {

// Thomas algorithm for a tridiagonal system; sub[0] and sup[n-1] are unused.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& sub, Eigen::VectorXd diag,
                                  const Eigen::VectorXd& sup, Eigen::VectorXd rhs) {
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  Eigen::VectorXd x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

[[noreturn]] void throw_newton_failure(const std::vector<double>& history) {
  std::ostringstream os;
  os << "stationary pressure Newton iteration did not converge in " << history.size()
     << " iterations (last residual " << (history.empty() ? 0.0 : history.back()) << ")";
  throw SolverError(os.str(), history);
}

void check_sign(Eigen::Ref<Eigen::VectorXd> p, StationaryInfo& info) {
  const double lowest = p.size() ? p.minCoeff() : 0.0;
  if (lowest < -1e-12) {
    std::ostringstream os;
    os << "stationary pressure is negative (" << lowest
       << "); Lap Phi + G(0) must be nonnegative on the saturated region";
    throw ModelingError(os.str());
  }
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p[k] < 0.0) {
      p[k] = 0.0;
      ++info.clamped;
    }
}

}  // namespace

// ---------------------------------------------------------------- profiles

double PressureProfile::sample(double x) const {
  const int m = nodes();
  if (m < 2 || x < a || x > b) return 0.0;
  const double d = spacing();
  if (m < 4) {
    const int j = std::min(int((x - a) / d), m - 2);
    const double s = (x - node(j)) / d;
    return (1.0 - s) * values[j] + s * values[j + 1];
  }
  int j = int(std::floor((x - a) / d));
  const int first = std::clamp(j - 1, 0, m - 4);
  double result = 0.0;
  for (int r = 0; r < 4; ++r) {
    double w = 1.0;
    const double xr = node(first + r);
    for (int q = 0; q < 4; ++q)
      if (q != r) w *= (x - node(first + q)) / (xr - node(first + q));
    result += w * values[first + r];
  }
  return result;
}

double PressureProfile::slope_left() const {
  return (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * spacing());
}

double PressureProfile::slope_right() const {
  const int m = nodes();
  return (3.0 * values[m - 1] - 4.0 * values[m - 2] + values[m - 3]) / (2.0 * spacing());
}

PressureProfile solve_stationary_pressure(double a, double b, int m, const Potential& phi,
                                          const GrowthLaw& law, const NewtonOptions& opts,
                                          StationaryInfo* info_out) {
  if (m < 3) throw InvalidArgument("pressure profile needs at least 3 nodes");
  if (!(b > a)) throw InvalidArgument("pressure domain [a, b] must be nonempty");
  PressureProfile prof{a, b, Eigen::VectorXd::Zero(m)};
  StationaryInfo info;
  const int k_int = m - 2;
  if (k_int > 0) {
    const double d = prof.spacing();
    const double inv_d2 = 1.0 / (d * d);
    Eigen::VectorXd lap_phi(m);
    for (int j = 0; j < m; ++j) lap_phi[j] = phi.laplacian(Point{prof.node(j), 0.0});
    Eigen::VectorXd& p = prof.values;

    // Numerov residual F_j = (p_{j-1} - 2 p_j + p_{j+1}) / d^2 + (f_{j-1} + 10 f_j + f_{j+1}) / 12,
    // f = Lap Phi + G(p).
    auto residual = [&](const Eigen::VectorXd& q) {
      Eigen::VectorXd f(m), r(k_int);
      for (int j = 0; j < m; ++j) f[j] = lap_phi[j] + law(q[j]);
      for (int j = 1; j <= k_int; ++j)
        r[j - 1] = (q[j - 1] - 2.0 * q[j] + q[j + 1]) * inv_d2 +
                   (f[j - 1] + 10.0 * f[j] + f[j + 1]) / 12.0;
      return r;
    };
    auto newton_step = [&](const Eigen::VectorXd& r) {
      Eigen::VectorXd sub(k_int), diag(k_int), sup(k_int);
      for (int j = 1; j <= k_int; ++j) {
        diag[j - 1] = -2.0 * inv_d2 + 10.0 * law.derivative(p[j]) / 12.0;
        sub[j - 1] = inv_d2 + law.derivative(p[j - 1]) / 12.0;
        sup[j - 1] = inv_d2 + law.derivative(p[j + 1]) / 12.0;
      }
      return solve_tridiagonal(sub, diag, sup, -r);
    };

    Eigen::VectorXd r = residual(p);
    double rn = r.lpNorm<Eigen::Infinity>();
    info.residual_history.push_back(rn);
    if (law.is_linear()) {
      p.segment(1, k_int) += newton_step(r);
      info.iterations = 1;
      info.residual_history.push_back(residual(p).lpNorm<Eigen::Infinity>());
    } else {
      while (rn > opts.tolerance) {
        if (info.iterations >= opts.max_iterations) throw_newton_failure(info.residual_history);
        const Eigen::VectorXd delta = newton_step(r);
        double theta = 1.0;
        Eigen::VectorXd trial = p;
        for (int halving = 0; halving < 12; ++halving) {
          trial.segment(1, k_int) = p.segment(1, k_int) + theta * delta;
          const double trial_norm = residual(trial).lpNorm<Eigen::Infinity>();
          if (trial_norm < rn || halving == 11) break;
          theta *= 0.5;
        }
        p = trial;
        ++info.iterations;
        r = residual(p);
        rn = r.lpNorm<Eigen::Infinity>();
        info.residual_history.push_back(rn);
        // Residual floor from cancellation in the d^-2 term.
        if ((theta * delta).lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, p.maxCoeff())) break;
      }
    }
    check_sign(p, info);
  }
  if (info_out) *info_out = info;
  return prof;
}

Field solve_stationary_pressure(const GridSpec& grid, const std::vector<bool>& saturated,
                                const Potential& phi, const GrowthLaw& law,
                                const NewtonOptions& opts, StationaryInfo* info_out) {
  if (std::ptrdiff_t(saturated.size()) != grid.size())
    throw InvalidArgument("saturation mask does not match the grid");
  std::vector<Eigen::Index> unknown(grid.size(), -1);
  std::vector<Eigen::Index> cells;
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    if (saturated[k]) {
      unknown[k] = Eigen::Index(cells.size());
      cells.push_back(k);
    }
  Field out(grid);
  StationaryInfo info;
  const Eigen::Index count = Eigen::Index(cells.size());
  if (count == 0) {
    if (info_out) *info_out = info;
    return out;
  }

  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const int nx = grid.cells(0), ny = grid.cells(1);
  Eigen::VectorXd lap_phi(count);
  for (Eigen::Index u = 0; u < count; ++u) lap_phi[u] = phi.laplacian(grid.cell_center(cells[u]));

  auto neighbours = [&](Eigen::Index k, auto&& visit) {
    const int i = grid.ix(k), j = grid.iy(k);
    if (i > 0) visit(grid.index(i - 1, j));
    if (i < nx - 1) visit(grid.index(i + 1, j));
    if (grid.dim() == 2) {
      if (j > 0) visit(grid.index(i, j - 1));
      if (j < ny - 1) visit(grid.index(i, j + 1));
    }
  };

  // F(p) = -Lap p - Lap Phi - G(p) on the saturated cells.
  Eigen::VectorXd p = Eigen::VectorXd::Zero(count);
  auto residual = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(count);
    for (Eigen::Index u = 0; u < count; ++u) {
      double s = 0.0;
      neighbours(cells[u], [&](Eigen::Index nb) {
        if (unknown[nb] >= 0) s += q[unknown[nb]];
      });
      r[u] = (2.0 * grid.dim() * q[u] - s) * inv_h2 - lap_phi[u] - law(q[u]);
    }
    return r;
  };

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  auto newton_step = [&](const Eigen::VectorXd& r) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(std::size_t(count) * (2 * grid.dim() + 1));
    for (Eigen::Index u = 0; u < count; ++u) {
      entries.emplace_back(u, u, 2.0 * grid.dim() * inv_h2 - law.derivative(p[u]));
      neighbours(cells[u], [&](Eigen::Index nb) {
        if (unknown[nb] >= 0) entries.emplace_back(u, unknown[nb], -inv_h2);
      });
    }
    Eigen::SparseMatrix<double> jac(count, count);
    jac.setFromTriplets(entries.begin(), entries.end());
    solver.compute(jac);
    if (solver.info() != Eigen::Success)
      throw SolverError("stationary pressure Jacobian factorisation failed");
    return Eigen::VectorXd(solver.solve(-r));
  };

  Eigen::VectorXd r = residual(p);
  double rn = r.lpNorm<Eigen::Infinity>();
  info.residual_history.push_back(rn);
  if (law.is_linear()) {
    p += newton_step(r);
    info.iterations = 1;
    info.residual_history.push_back(residual(p).lpNorm<Eigen::Infinity>());
  } else {
    while (rn > opts.tolerance) {
      if (info.iterations >= opts.max_iterations) throw_newton_failure(info.residual_history);
      const Eigen::VectorXd delta = newton_step(r);
      double theta = 1.0;
      Eigen::VectorXd trial = p;
      for (int halving = 0; halving < 12; ++halving) {
        trial = p + theta * delta;
        if (residual(trial).lpNorm<Eigen::Infinity>() < rn || halving == 11) break;
        theta *= 0.5;
      }
      p = trial;
      ++info.iterations;
      r = residual(p);
      rn = r.lpNorm<Eigen::Infinity>();
      info.residual_history.push_back(rn);
      if ((theta * delta).lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, p.maxCoeff())) break;
    }
  }
  check_sign(p, info);
  for (Eigen::Index u = 0; u < count; ++u) out[cells[u]] = p[u];
  if (info_out) *info_out = info;
  return out;
}

Field saturated_density(const GridSpec& grid, double radius, double gamma, const Potential& phi,
                        const GrowthLaw& law) {
  Field p(grid);
  if (grid.dim() == 1) {
    const int m = std::max(2001, 4 * grid.cells(0) + 1);
    const PressureProfile prof = solve_stationary_pressure(-radius, radius, m, phi, law);
    p = Field::from_function(grid, [&](const Point& x) { return prof.sample(x.x()); });
  } else {
    std::vector<bool> mask(grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k) mask[k] = grid.cell_center(k).norm() <= radius;
    p = solve_stationary_pressure(grid, mask, phi, law);
  }
  Field n(grid);
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    n[k] = p[k] > 0.0 ? std::pow(p[k], 1.0 / gamma) : 0.0;
  return n;
}

// ---------------------------------------------------------------- fronts

FrontState make_front(double a, double b, double t, const Potential& phi, const GrowthLaw& law,
                      int mesh) {
  return FrontState{t, a, b, solve_stationary_pressure(a, b, mesh, phi, law)};
}

FrontVelocity front_velocity(const FrontState& front, const Potential& phi) {
  if (front.profile.nodes() < 8) throw InvalidArgument("front pressure profile needs m >= 8 nodes");
  const double dphi_a = phi.gradient(Point{front.a, 0.0}).x();
  const double dphi_b = phi.gradient(Point{front.b, 0.0}).x();
  return {-(front.profile.slope_left() + dphi_a), -(front.profile.slope_right() + dphi_b)};
}

FrontStep evolve_front(const FrontState& front, const Potential& phi, const GrowthLaw& law,
                       double dt, const FrontOptions& opts) {
  if (!(dt > 0.0)) throw InvalidArgument("front step must be positive");
  const FrontVelocity v0 = front_velocity(front, phi);
  const double width = front.b - front.a;
  if (dt * std::max(std::abs(v0.left), std::abs(v0.right)) >= 0.25 * width)
    throw InvalidArgument("front step too large: dt * |velocity| must stay below a quarter width");

  FrontStep out;
  double a = front.a + dt * v0.left;
  double b = front.b + dt * v0.right;
  if (opts.heun && b - a > opts.min_width) {
    const FrontState predicted = make_front(a, b, front.t + dt, phi, law, opts.mesh);
    const FrontVelocity v1 = front_velocity(predicted, phi);
    a = front.a + 0.5 * dt * (v0.left + v1.left);
    b = front.b + 0.5 * dt * (v0.right + v1.right);
  }
  if (b - a <= opts.min_width) {
    out.extinct = true;
    const double mid = 0.5 * (a + b);
    out.front = FrontState{front.t + dt, mid, mid, PressureProfile{mid, mid, Eigen::VectorXd::Zero(opts.mesh)}};
    return out;
  }
  out.front = make_front(a, b, front.t + dt, phi, law, opts.mesh);
  return out;
}

FrontTrajectory run_front(const FrontState& start, const Potential& phi, const GrowthLaw& law,
                          double dt, double horizon, std::span<const double> stops,
                          const FrontOptions& opts) {
  std::vector<double> targets;
  for (double s : stops)
    if (s > start.t && s < horizon) targets.push_back(s);
  if (horizon > start.t) targets.push_back(horizon);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  FrontTrajectory traj;
  traj.states.push_back(start);
  traj.velocities.push_back(front_velocity(start, phi));
  FrontState cur = start;
  for (double target : targets) {
    while (cur.t < target) {
      double step = dt;
      bool land = false;
      if (target - cur.t <= step * (1.0 + 1e-12)) {
        step = target - cur.t;
        land = true;
      }
      FrontStep next = evolve_front(cur, phi, law, step, opts);
      cur = std::move(next.front);
      if (land) cur.t = target;
      traj.states.push_back(cur);
      if (next.extinct) {
        traj.velocities.push_back({0.0, 0.0});
        traj.extinct = true;
        return traj;
      }
      traj.velocities.push_back(front_velocity(cur, phi));
    }
  }
  return traj;
}

FrontPositions density_fronts(const Field& n) {
  const GridSpec& g = n.grid();
  if (g.dim() != 1) throw InvalidArgument("density fronts are defined for 1D fields");
  const int nx = g.cells(0);
  const double h = g.spacing();
  int first = -1, last = -1;
  for (int i = 0; i < nx; ++i)
    if (n(i) >= 0.5) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) {
    const double x = g.center(0, nx / 2);
    return {x, x};
  }
  double beyond_right = 0.0, beyond_left = 0.0;
  for (int i = last + 1; i < nx; ++i) beyond_right += n(i);
  for (int i = 0; i < first; ++i) beyond_left += n(i);
  FrontPositions f;
  f.right = g.center(0, last) + 0.5 * h - h * (1.0 - n(last)) + h * beyond_right;
  f.left = g.center(0, first) - 0.5 * h + h * (1.0 - n(first)) - h * beyond_left;
  return f;
}

// ---------------------------------------------------------------- limit stepper

LimitState LimitState::initial(Field n0, const Potential& phi, const GrowthLaw& law) {
  const GridSpec& g = n0.grid();
  std::vector<bool> mask(g.size());
  bool any = false;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (n0[k] < 0.0 || n0[k] > 1.0 + 1e-12)
      throw InvalidArgument("limit density must lie in [0, 1]");
    mask[k] = n0[k] >= 1.0 - 1e-12;
    any = any || mask[k];
  }
  Field p = any ? solve_stationary_pressure(g, mask, phi, law) : Field(g);
  return LimitState{0.0, std::move(n0), std::move(p)};
}

double limit_dt(const GridSpec& grid, const Potential& phi, const GrowthLaw& law, double cfl) {
  const double h = grid.spacing();
  double limit = h;
  if (phi.sup_gradient() > 0.0) limit = std::min(limit, h / (2.0 * phi.sup_gradient()));
  const double rate = law.sup_abs(law.p_max());
  if (rate > 0.0) limit = std::min(limit, 1.0 / (2.0 * rate));
  return cfl * limit;
}

namespace {

using FaceVelocity = std::vector<double>[2];

LimitState limit_step_impl(const LimitState& state, const GrowthLaw& law, double dt,
                           const LimitOptions& opts, LimitStepInfo* info_out,
                           const FaceVelocity& faces) {
  const GridSpec& g = state.n.grid();
  if (!(dt > 0.0)) throw InvalidArgument("limit step must be positive");
  const double vol = g.cell_volume();
  const int nx = g.cells(0), ny = g.cells(1), dim = g.dim();
  LimitStepInfo info;

  // (i) transport and reaction with the previous pressure.
  Field tilde = state.n;
  const Box support = support_box(state.n).dilated(1, g);
  add_upwind_drift(state.n, faces, support, dt, tilde);
  double source = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (state.n[k] == 0.0) continue;
    const double r = dt * state.n[k] * law(state.p[k]);
    tilde[k] += r;
    source += r;
  }
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (tilde[k] < -1e-12) throw SolverError("transport step produced a negative density");
    tilde[k] = std::max(tilde[k], 0.0);
  }
  info.mass_before = state.n.values().sum() * vol;
  info.source = source * vol;

  // (ii) projection: find p >= 0 with n = tilde + dt Lap p <= 1 and p (1 - n) = 0,
  // by projected over-relaxation on the linear complementarity problem.
  const double coupling = dt / (g.spacing() * g.spacing());
  const double diag = 2.0 * dim * coupling;
  Field p = state.p;
  auto at = [&](int i, int j) {
    return (i < 0 || i >= nx || j < 0 || j >= ny) ? 0.0 : p(i, j);
  };
  auto neighbour_sum = [&](int i, int j) {
    double s = at(i - 1, j) + at(i + 1, j);
    if (dim == 2) s += at(i, j - 1) + at(i, j + 1);
    return s;
  };

  Field occupied(g);
  occupied.values() = (tilde.values() > 0.0 || p.values() > 0.0).cast<double>();
  Box box = support_box(occupied).dilated(1, g);
  if (box.empty()) {
    LimitState next{state.t + dt, tilde, Field(g)};
    info.mass_after = tilde.values().sum() * vol;
    if (info_out) *info_out = info;
    return next;
  }
  // Cells outside the box keep p = 0.
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const int i = g.ix(k), j = g.iy(k);
    if (i < box.lo[0] || i > box.hi[0] || j < box.lo[1] || j > box.hi[1]) p[k] = 0.0;
  }

  auto relax = [&](int i, int j, double omega) {
    const Eigen::Index k = g.index(i, j);
    const double gs = (neighbour_sum(i, j) - (1.0 - tilde[k]) / coupling) / (2.0 * dim);
    p[k] = std::max(0.0, p[k] + omega * (gs - p[k]));
  };
  auto violation = [&]() {
    double v = 0.0;
    for (int j = box.lo[1]; j <= box.hi[1]; ++j)
      for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
        const Eigen::Index k = g.index(i, j);
        const double slack = 1.0 - tilde[k] - coupling * (neighbour_sum(i, j) - 2.0 * dim * p[k]);
        v = std::max(v, std::abs(std::min(diag * p[k], slack)));
      }
    return v;
  };
  auto boundary_active = [&]() {
    for (int j = box.lo[1]; j <= box.hi[1]; ++j)
      for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
        const bool edge = i == box.lo[0] || i == box.hi[0] ||
                          (dim == 2 && (j == box.lo[1] || j == box.hi[1]));
        const bool grid_edge = i == 0 || i == nx - 1 || (dim == 2 && (j == 0 || j == ny - 1));
        if (edge && !grid_edge && p(i, j) > 0.0) return true;
      }
    return false;
  };

  constexpr int check_every = 4;
  while (true) {
    const int side = std::max(box.hi[0] - box.lo[0] + 1, box.hi[1] - box.lo[1] + 1);
    const double pi = 3.14159265358979323846;
    const double omega = opts.omega > 0.0 ? opts.omega : 2.0 / (1.0 + std::sin(pi / (side + 1)));
    bool converged = false;
    while (!converged) {
      if (info.sweeps >= opts.max_sweeps) {
        std::ostringstream os;
        os << "projection did not converge in " << opts.max_sweeps << " sweeps (violation "
           << info.violation << ")";
        throw SolverError(os.str(), info.violation_history);
      }
      if (opts.order == SweepOrder::forward) {
        for (int j = box.lo[1]; j <= box.hi[1]; ++j)
          for (int i = box.lo[0]; i <= box.hi[0]; ++i) relax(i, j, omega);
      } else {
        for (int j = box.hi[1]; j >= box.lo[1]; --j)
          for (int i = box.hi[0]; i >= box.lo[0]; --i) relax(i, j, omega);
      }
      ++info.sweeps;
      if (info.sweeps % check_every == 0) {
        info.violation = violation();
        info.violation_history.push_back(info.violation);
        // The slack is a difference of terms of size diag * max p; below a few
        // hundred ulps of that the sweeps only shuffle roundoff.
        double top = 0.0;
        for (int j = box.lo[1]; j <= box.hi[1]; ++j)
          for (int i = box.lo[0]; i <= box.hi[0]; ++i) top = std::max(top, p(i, j));
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * diag * top;
        converged = info.violation <= std::max(opts.tolerance, floor);
      }
    }
    if (!boundary_active()) break;
    box = box.dilated(2, g);
  }

  LimitState next{state.t + dt, Field(g), p};
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const int i = g.ix(k), j = g.iy(k);
    // Overshoot above 1 is bounded by the stopping tolerance.
    next.n[k] = std::min(1.0, tilde[k] + coupling * (neighbour_sum(i, j) - 2.0 * dim * p[k]));
  }
  info.mass_after = next.n.values().sum() * vol;
  if (info_out) *info_out = std::move(info);
  return next;
}

}  // namespace

LimitState limit_step(const LimitState& state, const Potential& phi, const GrowthLaw& law,
                      double dt, const LimitOptions& opts, LimitStepInfo* info) {
  std::vector<double> faces[2];
  face_velocities(state.n.grid(), phi, faces);
  return limit_step_impl(state, law, dt, opts, info, faces);
}

LimitTrajectory run_limit(const LimitState& start, const Potential& phi, const GrowthLaw& law,
                          double dt, double horizon, std::span<const double> stops,
                          const LimitOptions& opts) {
  std::vector<double> faces[2];
  face_velocities(start.n.grid(), phi, faces);
  std::vector<double> targets;
  for (double s : stops)
    if (s > start.t && s < horizon) targets.push_back(s);
  if (horizon > start.t) targets.push_back(horizon);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  LimitTrajectory traj;
  traj.snapshots.push_back(start);
  LimitState cur = start;
  for (double target : targets) {
    while (cur.t < target) {
      double step = dt;
      bool land = false;
      if (target - cur.t <= step * (1.0 + 1e-12)) {
        step = target - cur.t;
        land = true;
      }
      LimitStepInfo info;
      cur = limit_step_impl(cur, law, step, opts, &info, faces);
      if (land) cur.t = target;
      ++traj.steps;
      traj.total_sweeps += info.sweeps;
      traj.max_violation = std::max(traj.max_violation, info.violation);
      const double mass = std::max(info.mass_before, info.mass_after);
      if (mass > 0.0)
        traj.max_balance_error =
            std::max(traj.max_balance_error,
                     std::abs(info.mass_after - info.mass_before - info.source) / mass);
    }
    traj.snapshots.push_back(cur);
  }
  return traj;
}

}  // namespace mesa
