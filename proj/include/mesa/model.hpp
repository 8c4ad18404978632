#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mesa/grid.hpp"

namespace mesa {

/// Net proliferation rate G(p). Decreasing on [0, p_max] with slope at most
/// -alpha and a root at the homeostatic pressure p_max.
class GrowthLaw {
 public:
  enum class Kind { linear, tabulated_smooth };

  /// G(p) = alpha (p_max - p). alpha = 0 gives the degenerate law G == 0.
  static GrowthLaw linear(double alpha, double p_max);
  static GrowthLaw none(double p_max = 1.0) { return linear(0.0, p_max); }
  /// Monotone cubic (PCHIP) interpolant through (p_i, g_i), at least 4 nodes,
  /// extended linearly outside the table. `alpha` is the claimed slope bound.
  static GrowthLaw tabulated(std::vector<double> p, std::vector<double> g, double alpha,
                             double p_max);

  double operator()(double p) const;
  double derivative(double p) const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double p_max() const { return p_max_; }
  bool is_zero() const { return kind_ == Kind::linear && alpha_ == 0.0; }
  bool is_linear() const { return kind_ == Kind::linear; }

  /// sup |G| over [0, p_hi], sampled.
  double sup_abs(double p_hi) const;

  const std::vector<double>& table_p() const { return table_p_; }
  const std::vector<double>& table_g() const { return table_g_; }

 private:
  Kind kind_ = Kind::linear;
  double alpha_ = 0.0;
  double p_max_ = 1.0;
  std::vector<double> table_p_, table_g_;
  std::shared_ptr<const std::function<double(double)>> interp_, interp_prime_;
};

/// Analytic external potential with closed-form derivatives. Norms over the
/// computational domain are evaluated once at construction.
class Potential {
 public:
  enum class Kind { zero, quadratic_well, gaussian_bump, linear };

  static Potential zero(const GridSpec& domain);
  /// Phi = (lambda/2) |x|^2.
  static Potential quadratic_well(double lambda, const GridSpec& domain);
  /// Phi = A exp(-|x - x0|^2 / s^2).
  static Potential gaussian_bump(double amplitude, double width, const Point& center,
                                 const GridSpec& domain);
  /// Phi = v . x: uniform drift with velocity -v.
  static Potential linear(const Point& slope, const GridSpec& domain);

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  double laplacian(const Point& x) const;
  Point laplacian_gradient(const Point& x) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  double lambda() const { return lambda_; }
  double amplitude() const { return amplitude_; }
  double width() const { return width_; }
  const Point& center() const { return center_; }
  const Point& slope() const { return slope_; }

  double sup_gradient() const { return sup_gradient_; }
  double sup_laplacian() const { return sup_laplacian_; }
  /// || grad(Laplacian Phi) ||_{L^{12/5}} over the domain.
  double laplacian_gradient_norm() const { return lap_grad_norm_; }

  Field sample_value(const GridSpec& g) const;
  Field sample_laplacian(const GridSpec& g) const;

 private:
  Potential(Kind kind, const GridSpec& domain) : kind_(kind), dim_(domain.dim()) {}
  void compute_norms(const GridSpec& domain);

  Kind kind_;
  int dim_;
  double lambda_ = 0.0;
  double amplitude_ = 0.0;
  double width_ = 1.0;
  Point center_ = Point::Zero();
  Point slope_ = Point::Zero();
  double sup_gradient_ = 0.0;
  double sup_laplacian_ = 0.0;
  double lap_grad_norm_ = 0.0;
};

struct ModelParams {
  double gamma;
  GrowthLaw growth;
  Potential potential;
  GridSpec grid;
  /// Upper bound n_M on the initial density.
  double n_max = 1.0;
  /// Radius of a centred ball containing supp(n0).
  double support_radius_0 = 1.0;
  /// Final time T the grid has to accommodate.
  double horizon = 1.0;

  /// gamma > max(1, 2 - 2/d).
  bool gamma_admissible() const;
  double gamma_lower_bound() const;
};

class InitialData {
 public:
  enum class Kind { patch_indicator, smooth_bump, custom_field };

  /// height * 1{|x| <= radius}.
  static InitialData patch(double radius, double height);
  /// height * exp(-|x|^2 / width), set to zero where it falls below `cutoff`.
  static InitialData smooth_bump(double height, double width, double cutoff = 1e-12);
  static InitialData custom(Field n0, double support_radius);

  Kind kind() const { return kind_; }
  double support_radius() const;
  double height() const { return height_; }
  double radius() const { return radius_; }
  double width() const { return width_; }

  Field density(const GridSpec& g) const;

 private:
  Kind kind_ = Kind::patch_indicator;
  double radius_ = 1.0, height_ = 1.0, width_ = 0.1, cutoff_ = 1e-12;
  std::shared_ptr<const Field> custom_;
  double custom_radius_ = 0.0;
};

/// p = n^gamma cellwise, with 0^gamma = 0. Throws DomainError on a negative cell.
Field eval_pressure(const Field& n, double gamma);
Field eval_growth(const Field& p, const GrowthLaw& law);

struct ValidationEntry {
  std::string name;
  bool passed;
  double value;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool all_passed() const;
  const ValidationEntry* find(const std::string& name) const;
};

ValidationReport validate_assumptions(const ModelParams& params, const Field& n0);

/// Parabolic barrier C |R(t) - |x|^2/2|_+ dominating the pressure.
struct Supersolution {
  double c;
  double r0;
  /// sup |grad Phi| / 2.
  double drift_term;
  double rate() const { return 2.0 * c + 1.0; }
  double R(double t) const;
  double barrier(double t, const Point& x) const;
};

Supersolution supersolution_constants(const ModelParams& params);

/// Radius sqrt(2 R(T)) of the ball containing every support up to time T.
double domain_bound(const ModelParams& params, double T);

/// Barenblatt profile of dn/dt = (gamma/(gamma+1)) Lap n^(gamma+1) at time t
/// with free constant `constant`.
Field barenblatt_density(const GridSpec& g, double gamma, double t, double constant);
double barenblatt_support_radius(int dim, double gamma, double t, double constant);

}  // namespace mesa
