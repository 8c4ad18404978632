#include "mesa/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace mesa {

Field ab_quantity(const Field& p, const GrowthLaw& law) {
  return laplacian(p) + eval_growth(p, law);
}

Field negative_part(const Field& f) {
  Field out(f.grid());
  out.values() = (-f.values()).max(0.0);
  return out;
}

Residual complementarity_residual(const State& state, const ModelParams& params) {
  const Field& p = state.p;
  const Field lap = laplacian(p);
  const GridSpec& g = p.grid();
  Residual r;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    const double lap_phi = params.potential.laplacian(g.cell_center(k));
    const double v = std::abs(p[k] * (lap[k] + lap_phi + params.growth(p[k])));
    sum += v;
    r.pointwise_max = std::max(r.pointwise_max, v);
  }
  r.integral = sum * g.cell_volume();
  return r;
}

SaturationResidual saturation_residual(const State& state, double gamma) {
  const Field& n = state.n;
  const Field& p = state.p;
  SaturationResidual r;
  double sum = 0.0;
  const double exponent = 1.0 + 1.0 / gamma;
  for (Eigen::Index k = 0; k < n.size(); ++k) {
    if (p[k] == 0.0) continue;
    const double v = p[k] * std::max(1.0 - n[k], 0.0);
    sum += v;
    r.pointwise_max = std::max(r.pointwise_max, v);
    const double np = n[k] * p[k];
    const double err = std::abs(std::pow(p[k], exponent) - np) / std::max(1.0, np);
    r.identity_error = std::max(r.identity_error, err);
  }
  r.integral = sum * n.grid().cell_volume();
  return r;
}

double support_radius(const Field& n, double threshold) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < n.size(); ++k)
    if (n[k] > threshold) r = std::max(r, n.grid().cell_center(k).norm());
  return r;
}

double total_variation(const Field& f) {
  const GridSpec& g = f.grid();
  const int nx = g.cells(0), ny = g.cells(1);
  const double face_area = g.dim() == 1 ? 1.0 : g.spacing();
  double tv = 0.0;
  for (int j = 0; j < ny; ++j) {
    double prev = 0.0;
    for (int i = 0; i < nx; ++i) {
      tv += std::abs(f(i, j) - prev);
      prev = f(i, j);
    }
    tv += std::abs(prev);
  }
  if (g.dim() == 2) {
    for (int i = 0; i < nx; ++i) {
      double prev = 0.0;
      for (int j = 0; j < ny; ++j) {
        tv += std::abs(f(i, j) - prev);
        prev = f(i, j);
      }
      tv += std::abs(prev);
    }
  }
  return tv * face_area;
}

long confinement_violations(const State& state, const ModelParams& params, double threshold) {
  const double radius = std::sqrt(2.0 * supersolution_constants(params).R(state.t));
  long count = 0;
  const GridSpec& g = state.n.grid();
  for (Eigen::Index k = 0; k < state.n.size(); ++k)
    if (state.n[k] >= threshold && g.cell_center(k).norm() > radius) ++count;
  return count;
}

std::vector<double> trapezoid_weights(std::span<const double> times) {
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double half = 0.5 * (times[k + 1] - times[k]);
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

DiagnosticsReport space_time_norms(std::span<const State> trajectory, const ModelParams& params) {
  if (trajectory.size() < 2)
    throw InvalidArgument("space-time norms need at least 2 snapshots");
  const GridSpec& g = params.grid;
  const double vol = g.cell_volume();

  DiagnosticsReport rep;
  rep.gamma = params.gamma;
  rep.horizon = trajectory.back().t - trajectory.front().t;
  for (const auto& s : trajectory) rep.snapshot_times.push_back(s.t);
  const auto w = trapezoid_weights(rep.snapshot_times);

  double grad_l1 = 0.0, grad_l2 = 0.0, grad_l4 = 0.0, ab3 = 0.0, lap_l1 = 0.0;
  double comp = 0.0, sat = 0.0;
  const Field lap_phi = params.potential.sample_laplacian(g);
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const State& s = trajectory[k];
    rep.sup_n = std::max(rep.sup_n, s.n.values().maxCoeff());
    rep.sup_p = std::max(rep.sup_p, s.p.values().maxCoeff());
    rep.bv_space.push_back(total_variation(s.n));
    rep.support_radius_series.push_back(support_radius(s.n));

    Eigen::ArrayXd grad_sq = Eigen::ArrayXd::Zero(g.size());
    double abs_sum = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const Field d = gradient(s.p, a);
      grad_sq += d.values().square();
      abs_sum += d.values().abs().sum();
    }
    grad_l1 += w[k] * abs_sum * vol;
    grad_l2 += w[k] * grad_sq.sum() * vol;
    grad_l4 += w[k] * grad_sq.square().sum() * vol;

    const Field lap = laplacian(s.p);
    const Field G = eval_growth(s.p, params.growth);
    const Eigen::ArrayXd wq = lap.values() + G.values();
    ab3 += w[k] * (-wq).max(0.0).cube().sum() * vol;
    lap_l1 += w[k] * lap.values().abs().sum() * vol;
    comp += w[k] * (s.p.values() * (lap.values() + lap_phi.values() + G.values())).abs().sum() * vol;

    const auto cr = complementarity_residual(s, params);
    rep.comp_residual_max = std::max(rep.comp_residual_max, cr.pointwise_max);
    const auto sr = saturation_residual(s, params.gamma);
    sat += w[k] * sr.integral;
    rep.sat_residual_max = std::max(rep.sat_residual_max, sr.pointwise_max);
    rep.identity_residual = std::max(rep.identity_residual, sr.identity_error);

    if (k + 1 < trajectory.size()) {
      const State& nxt = trajectory[k + 1];
      const double dt = nxt.t - s.t;
      const double dn = (nxt.n.values() - s.n.values()).abs().sum() * vol;
      if (dt > 0.0) rep.l1_dt_n = std::max(rep.l1_dt_n, dn / dt);
      rep.l1_dt_p += (nxt.p.values() - s.p.values()).abs().sum() * vol;
    }
  }
  rep.grad_p_l1_qt = grad_l1;
  rep.grad_p_l2_qt = std::sqrt(grad_l2);
  rep.grad_p_l4_qt = std::pow(grad_l4, 0.25);
  rep.ab_l3 = std::cbrt(ab3);
  rep.lap_p_l1 = lap_l1;
  rep.comp_residual = comp;
  rep.sat_residual = sat;
  return rep;
}

}  // namespace mesa
