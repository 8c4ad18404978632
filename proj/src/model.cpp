#include "mesa/model.hpp"

// pchip.hpp relies on boost::math::isnan without including it.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mesa {

// ---------------------------------------------------------------- GrowthLaw

GrowthLaw GrowthLaw::linear(double alpha, double p_max) {
  if (!(alpha >= 0.0) || !(p_max > 0.0))
    throw InvalidArgument("linear growth law needs alpha >= 0 and p_max > 0");
  GrowthLaw g;
  g.kind_ = Kind::linear;
  g.alpha_ = alpha;
  g.p_max_ = p_max;
  return g;
}

GrowthLaw GrowthLaw::tabulated(std::vector<double> p, std::vector<double> gv, double alpha,
                               double p_max) {
  if (p.size() != gv.size() || p.size() < 4)
    throw InvalidArgument("tabulated growth law needs at least 4 (p, G) nodes");
  for (std::size_t i = 1; i < p.size(); ++i)
    if (!(p[i] > p[i - 1])) throw InvalidArgument("tabulated growth nodes must increase in p");
  if (!(p_max > 0.0)) throw InvalidArgument("tabulated growth law needs p_max > 0");

  GrowthLaw g;
  g.kind_ = Kind::tabulated_smooth;
  g.alpha_ = alpha;
  g.p_max_ = p_max;
  g.table_p_ = p;
  g.table_g_ = gv;

  using Spline = boost::math::interpolators::pchip<std::vector<double>>;
  auto spline = std::make_shared<Spline>(std::vector<double>(p), std::vector<double>(gv));
  const double lo = p.front(), hi = p.back();
  const double slope_lo = spline->prime(lo), slope_hi = spline->prime(hi);
  const double g_lo = gv.front(), g_hi = gv.back();
  g.interp_ = std::make_shared<const std::function<double(double)>>([=](double x) {
    if (x < lo) return g_lo + slope_lo * (x - lo);
    if (x > hi) return g_hi + slope_hi * (x - hi);
    return (*spline)(x);
  });
  g.interp_prime_ = std::make_shared<const std::function<double(double)>>([=](double x) {
    if (x < lo) return slope_lo;
    if (x > hi) return slope_hi;
    return spline->prime(x);
  });
  return g;
}

double GrowthLaw::operator()(double p) const {
  if (kind_ == Kind::linear) return alpha_ * (p_max_ - p);
  return (*interp_)(p);
}

double GrowthLaw::derivative(double p) const {
  if (kind_ == Kind::linear) return -alpha_;
  return (*interp_prime_)(p);
}

double GrowthLaw::sup_abs(double p_hi) const {
  if (kind_ == Kind::linear) return std::max(std::abs((*this)(0.0)), std::abs((*this)(p_hi)));
  double s = 0.0;
  constexpr int samples = 1000;
  for (int i = 0; i <= samples; ++i) s = std::max(s, std::abs((*this)(p_hi * i / samples)));
  return s;
}

// ---------------------------------------------------------------- Potential

Potential Potential::zero(const GridSpec& domain) {
  Potential phi(Kind::zero, domain);
  return phi;
}

Potential Potential::quadratic_well(double lambda, const GridSpec& domain) {
  Potential phi(Kind::quadratic_well, domain);
  phi.lambda_ = lambda;
  phi.compute_norms(domain);
  return phi;
}

Potential Potential::gaussian_bump(double amplitude, double width, const Point& center,
                                   const GridSpec& domain) {
  if (!(width > 0.0)) throw InvalidArgument("gaussian potential width must be positive");
  Potential phi(Kind::gaussian_bump, domain);
  phi.amplitude_ = amplitude;
  phi.width_ = width;
  phi.center_ = center;
  if (domain.dim() == 1) phi.center_.y() = 0.0;
  phi.compute_norms(domain);
  return phi;
}

Potential Potential::linear(const Point& slope, const GridSpec& domain) {
  Potential phi(Kind::linear, domain);
  phi.slope_ = slope;
  if (domain.dim() == 1) phi.slope_.y() = 0.0;
  phi.compute_norms(domain);
  return phi;
}

double Potential::value(const Point& x) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::quadratic_well: return 0.5 * lambda_ * x.squaredNorm();
    case Kind::gaussian_bump:
      return amplitude_ * std::exp(-(x - center_).squaredNorm() / (width_ * width_));
    case Kind::linear: return slope_.dot(x);
  }
  return 0.0;
}

Point Potential::gradient(const Point& x) const {
  switch (kind_) {
    case Kind::zero: return Point::Zero();
    case Kind::quadratic_well: return lambda_ * x;
    case Kind::gaussian_bump: return (-2.0 / (width_ * width_)) * value(x) * (x - center_);
    case Kind::linear: return slope_;
  }
  return Point::Zero();
}

double Potential::laplacian(const Point& x) const {
  switch (kind_) {
    case Kind::zero:
    case Kind::linear: return 0.0;
    case Kind::quadratic_well: return lambda_ * dim_;
    case Kind::gaussian_bump: {
      const double s2 = width_ * width_;
      const double r2 = (x - center_).squaredNorm();
      return value(x) * (4.0 * r2 / (s2 * s2) - 2.0 * dim_ / s2);
    }
  }
  return 0.0;
}

Point Potential::laplacian_gradient(const Point& x) const {
  if (kind_ != Kind::gaussian_bump) return Point::Zero();
  const double s2 = width_ * width_;
  const double r2 = (x - center_).squaredNorm();
  const double bracket = -(2.0 / s2) * (4.0 * r2 / (s2 * s2) - 2.0 * dim_ / s2) + 8.0 / (s2 * s2);
  return value(x) * bracket * (x - center_);
}

void Potential::compute_norms(const GridSpec& g) {
  // Sup norms over cell centres and grid nodes (the quadratic well peaks at the corners).
  double sg = 0.0, sl = 0.0;
  const int ny_nodes = g.dim() == 2 ? g.cells(1) : 0;
  for (int j = 0; j <= ny_nodes; ++j)
    for (int i = 0; i <= g.cells(0); ++i) {
      const Point x{g.face(0, i), g.dim() == 2 ? g.face(1, j) : 0.0};
      sg = std::max(sg, gradient(x).norm());
      sl = std::max(sl, std::abs(laplacian(x)));
    }
  double q = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Point x = g.cell_center(k);
    sg = std::max(sg, gradient(x).norm());
    sl = std::max(sl, std::abs(laplacian(x)));
    q += std::pow(laplacian_gradient(x).norm(), 12.0 / 5.0);
  }
  sup_gradient_ = sg;
  sup_laplacian_ = sl;
  lap_grad_norm_ = std::pow(q * g.cell_volume(), 5.0 / 12.0);
}

Field Potential::sample_value(const GridSpec& g) const {
  return Field::from_function(g, [&](const Point& x) { return value(x); });
}

Field Potential::sample_laplacian(const GridSpec& g) const {
  return Field::from_function(g, [&](const Point& x) { return laplacian(x); });
}

// ---------------------------------------------------------------- ModelParams

double ModelParams::gamma_lower_bound() const {
  return std::max(1.0, 2.0 - 2.0 / grid.dim());
}

bool ModelParams::gamma_admissible() const { return gamma > gamma_lower_bound(); }

// ---------------------------------------------------------------- InitialData

InitialData InitialData::patch(double radius, double height) {
  if (!(radius > 0.0) || !(height >= 0.0))
    throw InvalidArgument("patch needs radius > 0 and height >= 0");
  InitialData d;
  d.kind_ = Kind::patch_indicator;
  d.radius_ = radius;
  d.height_ = height;
  return d;
}

InitialData InitialData::smooth_bump(double height, double width, double cutoff) {
  if (!(width > 0.0) || !(height >= 0.0) || !(cutoff > 0.0))
    throw InvalidArgument("smooth bump needs width > 0, height >= 0 and cutoff > 0");
  InitialData d;
  d.kind_ = Kind::smooth_bump;
  d.height_ = height;
  d.width_ = width;
  d.cutoff_ = cutoff;
  return d;
}

InitialData InitialData::custom(Field n0, double support_radius) {
  InitialData d;
  d.kind_ = Kind::custom_field;
  d.custom_ = std::make_shared<const Field>(std::move(n0));
  d.custom_radius_ = support_radius;
  return d;
}

double InitialData::support_radius() const {
  switch (kind_) {
    case Kind::patch_indicator: return radius_;
    case Kind::smooth_bump:
      return height_ > cutoff_ ? std::sqrt(width_ * std::log(height_ / cutoff_)) : 0.0;
    case Kind::custom_field: return custom_radius_;
  }
  return 0.0;
}

Field InitialData::density(const GridSpec& g) const {
  switch (kind_) {
    case Kind::patch_indicator:
      return Field::from_function(
          g, [&](const Point& x) { return x.norm() <= radius_ ? height_ : 0.0; });
    case Kind::smooth_bump:
      return Field::from_function(g, [&](const Point& x) {
        const double v = height_ * std::exp(-x.squaredNorm() / width_);
        return v < cutoff_ ? 0.0 : v;
      });
    case Kind::custom_field:
      if (!(custom_->grid() == g))
        throw InvalidArgument("custom initial field was built on a different grid");
      return *custom_;
  }
  return Field(g);
}

// ---------------------------------------------------------------- pressure / growth

Field eval_pressure(const Field& n, double gamma) {
  Field p(n.grid());
  for (Eigen::Index k = 0; k < n.size(); ++k) {
    const double v = n[k];
    if (v < 0.0) {
      std::ostringstream os;
      os << "negative density " << v << " at cell " << k;
      throw DomainError(os.str(), long(k));
    }
    p[k] = v == 0.0 ? 0.0 : std::pow(v, gamma);
  }
  return p;
}

Field eval_growth(const Field& p, const GrowthLaw& law) {
  Field g(p.grid());
  if (law.is_linear()) {
    g.values() = law.alpha() * (law.p_max() - p.values());
  } else {
    for (Eigen::Index k = 0; k < p.size(); ++k) g[k] = law(p[k]);
  }
  return g;
}

// ---------------------------------------------------------------- validation

bool ValidationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

const ValidationEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

ValidationReport validate_assumptions(const ModelParams& params, const Field& n0) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, double value, std::string detail) {
    report.entries.push_back({std::move(name), ok, value, std::move(detail)});
  };
  const GridSpec& g = n0.grid();

  {
    std::ostringstream os;
    os << "gamma must exceed max(1, 2 - 2/d) = " << params.gamma_lower_bound();
    add("gamma", params.gamma_admissible(), params.gamma, os.str());
  }

  const double n_min = n0.values().minCoeff(), n_max = n0.values().maxCoeff();
  add("density_bounds", n_min >= 0.0 && n_max <= params.n_max && n0.all_finite(), n_max,
      "0 <= n0 <= n_M");

  bool p_ok = n_min >= 0.0;
  double p_max0 = 0.0;
  if (p_ok) {
    const Field p0 = eval_pressure(n0, params.gamma);
    p_max0 = p0.values().maxCoeff();
    p_ok = p_max0 <= params.growth.p_max() * (1.0 + 1e-12);
  }
  add("pressure_bounds", p_ok, p_max0, "0 <= p0 <= p_M");

  bool inside_ball = true, clear_of_edge = true;
  double reach = 0.0;
  for (Eigen::Index k = 0; k < n0.size(); ++k) {
    if (n0[k] == 0.0) continue;
    const Point x = g.cell_center(k);
    reach = std::max(reach, x.norm());
    if (x.norm() > params.support_radius_0 + 1e-12) inside_ball = false;
    for (int a = 0; a < g.dim(); ++a) {
      const int i = a == 0 ? g.ix(k) : g.iy(k);
      if (i < 3 || i > g.cells(a) - 4) clear_of_edge = false;
    }
  }
  add("compact_support", inside_ball && clear_of_edge, reach,
      "supp(n0) inside the ball of radius support_radius_0 and away from the grid edge");

  {
    const GrowthLaw& G = params.growth;
    const double pm = G.p_max();
    bool ok = G.alpha() > 0.0 && std::abs(G(pm)) <= 1e-12;
    double worst = -std::numeric_limits<double>::infinity();
    constexpr int samples = 1000;
    const double d = 1e-6 * pm;
    for (int i = 0; i <= samples; ++i) {
      const double p = pm * i / samples;
      const double slope = (G(p + d) - G(p - d)) / (2.0 * d);
      worst = std::max(worst, slope);
    }
    ok = ok && worst <= -G.alpha() * (1.0 - 1e-6);
    std::ostringstream os;
    os << "G(p_M) = 0, G' <= -alpha on [0, p_M] (alpha = " << G.alpha() << ")";
    add("growth_law", ok, worst, os.str());
  }

  {
    const Potential& phi = params.potential;
    const bool ok = std::isfinite(phi.sup_gradient()) && std::isfinite(phi.sup_laplacian()) &&
                    std::isfinite(phi.laplacian_gradient_norm());
    add("potential_regularity", ok, phi.laplacian_gradient_norm(),
        "sup|grad Phi|, sup|Lap Phi| and ||grad Lap Phi||_{12/5} finite on the domain");
  }

  {
    const double bound = domain_bound(params, params.horizon);
    bool ok = true;
    for (int a = 0; a < g.dim(); ++a)
      ok = ok && std::min(-g.origin(a), g.origin(a) + g.extent(a)) >= bound;
    add("domain_size", ok, bound, "grid covers the ball of radius sqrt(2 R(T))");
  }

  // Uniform-in-gamma proxies; recorded, only required to be finite.
  if (n_min >= 0.0) {
    const Field p0 = eval_pressure(n0, params.gamma);
    Field u = p0 * n0;
    const double lap_u = norm_lp(laplacian(u), 1.0);
    double grad_sq = 0.0;
    for (int a = 0; a < g.dim(); ++a) grad_sq += gradient(p0, a).values().square().sum();
    const double grad_l2 = std::sqrt(grad_sq * g.cell_volume());
    Field lap_p = laplacian(p0);
    lap_p.values() = (-lap_p.values()).max(0.0);
    const double neg_lap = norm_lp(lap_p, 2.0);
    add("a3_laplacian_n_pow_l1", std::isfinite(lap_u), lap_u, "||Lap n0^(gamma+1)||_L1");
    add("a3_grad_p_l2", std::isfinite(grad_l2), grad_l2, "||grad p0||_L2");
    add("a3_neg_laplacian_p_l2", std::isfinite(neg_lap), neg_lap, "|| |Lap p0|_- ||_L2");
  }
  return report;
}

// ---------------------------------------------------------------- supersolution

double Supersolution::R(double t) const {
  const double k = rate();
  const double shift = drift_term / k;
  return std::exp(k * t) * (r0 + shift) - shift;
}

double Supersolution::barrier(double t, const Point& x) const {
  return c * std::max(R(t) - 0.5 * x.squaredNorm(), 0.0);
}

Supersolution supersolution_constants(const ModelParams& params) {
  const int d = params.grid.dim();
  const double c = std::max(0.0, (2.0 / d) * (params.growth(0.0) + params.potential.sup_laplacian()));
  const double r0 = 0.5 * params.support_radius_0 * params.support_radius_0;
  return {c, r0, 0.5 * params.potential.sup_gradient()};
}

double domain_bound(const ModelParams& params, double T) {
  if (T < 0.0) throw InvalidArgument("domain_bound needs T >= 0");
  return std::sqrt(2.0 * supersolution_constants(params).R(T));
}

// ---------------------------------------------------------------- Barenblatt

namespace {

struct BarenblattExponents {
  double alpha, beta, k, m, c;
};

BarenblattExponents barenblatt_exponents(int dim, double gamma) {
  const double m = gamma + 1.0;
  const double alpha = dim / (dim * (m - 1.0) + 2.0);
  const double beta = alpha / dim;
  const double k = alpha * (m - 1.0) / (2.0 * m * dim);
  return {alpha, beta, k, m, gamma / (gamma + 1.0)};
}

}  // namespace

Field barenblatt_density(const GridSpec& g, double gamma, double t, double constant) {
  if (!(t > 0.0)) throw InvalidArgument("Barenblatt profile needs t > 0");
  const auto e = barenblatt_exponents(g.dim(), gamma);
  const double tau = e.c * t;
  return Field::from_function(g, [&](const Point& x) {
    const double core = constant - e.k * x.squaredNorm() * std::pow(tau, -2.0 * e.beta);
    return core > 0.0 ? std::pow(tau, -e.alpha) * std::pow(core, 1.0 / (e.m - 1.0)) : 0.0;
  });
}

double barenblatt_support_radius(int dim, double gamma, double t, double constant) {
  const auto e = barenblatt_exponents(dim, gamma);
  return std::sqrt(constant / e.k) * std::pow(e.c * t, e.beta);
}

}  // namespace mesa
