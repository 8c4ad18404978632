#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mesa/model.hpp"

using namespace mesa;

namespace {

ModelParams params_1d(double gamma, GrowthLaw law, double radius = 1.0, int cells = 400,
                      double extent = 4.0) {
  const GridSpec g = GridSpec::centered(1, cells, extent);
  return ModelParams{gamma, law, Potential::zero(g), g, 1.0, radius, 0.1};
}

}  // namespace

TEST_CASE("eval_pressure") {
  const GridSpec g(1, {4, 1}, {0, 0}, {4.0, 0});
  Field n(g);
  n(0) = 0.0;
  n(1) = 1.0;
  n(2) = 0.5;
  n(3) = 0.25;
  const Field p = eval_pressure(n, 2.0);
  CHECK(p(0) == 0.0);
  CHECK(p(1) == 1.0);
  CHECK(p(2) == doctest::Approx(0.25));
  CHECK(p(3) == doctest::Approx(0.0625));
  CHECK(eval_pressure(n, 1e6)(1) == 1.0);
  CHECK(eval_pressure(n, 1.0001)(0) == 0.0);

  n(2) = -1e-3;
  try {
    eval_pressure(n, 2.0);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("pressure is monotone and satisfies p^(1+1/gamma) = n p") {
  const GridSpec g = GridSpec::centered(1, 101, 1.0);
  for (double gamma : {1.5, 5.0, 40.0, 200.0}) {
    const Field n = Field::from_function(g, [](const Point& x) { return x.x() + 0.5; });
    const Field p = eval_pressure(n, gamma);
    for (int i = 1; i < 101; ++i) CHECK(p(i) >= p(i - 1));
    for (int i = 0; i < 101; ++i) {
      const double np = n(i) * p(i);
      CHECK(std::abs(std::pow(p(i), 1.0 + 1.0 / gamma) - np) <= 1e-10 * std::max(np, 1e-300) + 1e-300);
    }
  }
}

TEST_CASE("growth laws") {
  const GrowthLaw lin = GrowthLaw::linear(1.0, 1.0);
  CHECK(lin(1.0) == 0.0);
  CHECK(lin(0.0) == 1.0);
  CHECK(GrowthLaw::linear(2.0, 1.0)(1.5) == doctest::Approx(-1.0));
  CHECK(GrowthLaw::none().is_zero());
  CHECK_THROWS_AS(GrowthLaw::linear(1.0, 0.0), InvalidArgument);

  const GridSpec g(1, {3, 1}, {0, 0}, {3.0, 0});
  Field p(g);
  p(0) = 0.0, p(1) = 1.0, p(2) = 1.5;
  const Field G = eval_growth(p, GrowthLaw::linear(2.0, 1.0));
  CHECK(G(0) == 2.0);
  CHECK(G(1) == 0.0);
  CHECK(G(2) == doctest::Approx(-1.0));

  SUBCASE("tabulated law reproduces a smooth decreasing table") {
    // G(p) = 1 - p^2/2 - p/2 on [0, 1]: G(1) = 0, G' <= -1/2.
    std::vector<double> ps, gs;
    for (int i = 0; i <= 20; ++i) {
      const double x = 0.06 * i;
      ps.push_back(x);
      gs.push_back(1.0 - 0.5 * x * x - 0.5 * x);
    }
    const GrowthLaw t = GrowthLaw::tabulated(ps, gs, 0.5, 1.0);
    CHECK(std::abs(t(1.0)) < 1e-3);
    CHECK(t(0.33) == doctest::Approx(1.0 - 0.5 * 0.33 * 0.33 - 0.165).epsilon(1e-3));
    CHECK(t.derivative(0.5) == doctest::Approx(-1.0).epsilon(2e-2));
    // linear continuation past the table
    CHECK(t(1.3) - t(1.25) == doctest::Approx(0.05 * t.derivative(1.2)).epsilon(1e-9));
    CHECK_THROWS_AS(GrowthLaw::tabulated({0, 1}, {1, 0}, 1.0, 1.0), InvalidArgument);
  }
}

TEST_CASE("potentials") {
  const GridSpec g = GridSpec::centered(2, 40, 4.0);
  SUBCASE("zero potential") {
    const Potential z = Potential::zero(g);
    const Point x(0.3, -0.7);
    CHECK(z.value(x) == 0.0);
    CHECK(z.gradient(x).norm() == 0.0);
    CHECK(z.laplacian(x) == 0.0);
    CHECK(z.sup_gradient() == 0.0);
    CHECK(z.laplacian_gradient_norm() == 0.0);
  }
  SUBCASE("quadratic well norms") {
    const Potential w = Potential::quadratic_well(1.0, g);
    CHECK(w.laplacian(Point(0.4, 0.1)) == 2.0);
    CHECK(w.sup_gradient() == doctest::Approx(2.0 * std::sqrt(2.0)));  // corner (2, 2)
    CHECK(w.sup_laplacian() == 2.0);
    const Potential w1 = Potential::quadratic_well(1.0, GridSpec::centered(1, 400, 4.0));
    CHECK(w1.sup_gradient() == doctest::Approx(2.0));
  }
  SUBCASE("analytic Laplacian agrees with the stencil to O(h^2)") {
    auto err = [](int cells) {
      const GridSpec gg = GridSpec::centered(2, cells, 4.0);
      const Potential b = Potential::gaussian_bump(0.7, 0.8, Point(0.2, -0.1), gg);
      const Field l = laplacian(b.sample_value(gg));
      const Field exact = b.sample_laplacian(gg);
      double e = 0.0;
      for (int j = 1; j < cells - 1; ++j)
        for (int i = 1; i < cells - 1; ++i) e = std::max(e, std::abs(l(i, j) - exact(i, j)));
      return e;
    };
    CHECK(err(80) / err(160) == doctest::Approx(4.0).epsilon(0.1));
  }
  SUBCASE("gradient of the Laplacian matches finite differences") {
    const Potential b = Potential::gaussian_bump(1.3, 0.6, Point(0.1, 0.2), g);
    const Point x(0.35, -0.2);
    const double d = 1e-5;
    for (int a = 0; a < 2; ++a) {
      Point e = Point::Zero();
      e[a] = d;
      const double fd = (b.laplacian(x + e) - b.laplacian(x - e)) / (2 * d);
      CHECK(b.laplacian_gradient(x)[a] == doctest::Approx(fd).epsilon(1e-6));
      const double fd_phi = (b.value(x + e) - b.value(x - e)) / (2 * d);
      CHECK(b.gradient(x)[a] == doctest::Approx(fd_phi).epsilon(1e-7));
    }
    CHECK(std::isfinite(b.laplacian_gradient_norm()));
    CHECK(b.laplacian_gradient_norm() > 0.0);
  }
}

TEST_CASE("validate_assumptions") {
  SUBCASE("indicator patch passes bounds and support") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::linear(1.0, 1.0));
    const Field n0 = InitialData::patch(1.0, 1.0).density(prm.grid);
    const ValidationReport r = validate_assumptions(prm, n0);
    CHECK(r.find("density_bounds")->passed);
    CHECK(r.find("compact_support")->passed);
    CHECK(r.find("gamma")->passed);
  }
  SUBCASE("density above n_M fails") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::linear(1.0, 1.0));
    const Field n0 = Field::constant(prm.grid, 1.5);
    const ValidationReport r = validate_assumptions(prm, n0);
    CHECK_FALSE(r.find("density_bounds")->passed);
    CHECK_FALSE(r.all_passed());
  }
  SUBCASE("smooth bump passes everything and records the gamma-dependent numbers") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::linear(1.0, 1.0), 1.7, 600, 6.0);
    const InitialData bump = InitialData::smooth_bump(0.8, 0.1);
    CHECK(bump.support_radius() == doctest::Approx(std::sqrt(0.1 * std::log(0.8e12))));
    const ValidationReport r = validate_assumptions(prm, bump.density(prm.grid));
    for (const auto& e : r.entries) CHECK_MESSAGE(e.passed, e.name);
    CHECK(r.find("a3_laplacian_n_pow_l1")->value > 0.0);
    CHECK(r.find("a3_grad_p_l2")->value > 0.0);
    CHECK(r.find("a3_neg_laplacian_p_l2")->value > 0.0);
  }
  SUBCASE("gamma <= 1 is flagged, and gamma <= 1 in 2D too") {
    CHECK_FALSE(params_1d(0.5, GrowthLaw::linear(1.0, 1.0)).gamma_admissible());
    const GridSpec g = GridSpec::centered(2, 40, 4.0);
    const ModelParams p2{1.0, GrowthLaw::linear(1.0, 1.0), Potential::zero(g), g};
    CHECK_FALSE(p2.gamma_admissible());
    CHECK(p2.gamma_lower_bound() == 1.0);
  }
  SUBCASE("the degenerate law G = 0 fails the growth entry") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::none());
    const ValidationReport r =
        validate_assumptions(prm, InitialData::patch(1.0, 0.5).density(prm.grid));
    CHECK_FALSE(r.find("growth_law")->passed);
  }
  SUBCASE("support touching the grid edge fails") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::linear(1.0, 1.0), 3.0, 40, 4.0);
    const ValidationReport r =
        validate_assumptions(prm, InitialData::patch(1.95, 0.5).density(prm.grid));
    CHECK_FALSE(r.find("compact_support")->passed);
  }
}

TEST_CASE("supersolution constants") {
  SUBCASE("2D, G(0) = 1, no potential: C = 1, R = e^{3t}") {
    const GridSpec g = GridSpec::centered(2, 20, 4.0);
    const ModelParams prm{5.0, GrowthLaw::linear(1.0, 1.0), Potential::zero(g), g, 1.0,
                          std::sqrt(2.0)};
    const Supersolution s = supersolution_constants(prm);
    CHECK(s.c == 1.0);
    for (double t : {0.0, 0.3, 1.0}) CHECK(s.R(t) == doctest::Approx(std::exp(3.0 * t)));
    CHECK(domain_bound(prm, 0.0) == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("1D, G = 0: C = 0 and R = R0 e^t") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::none(), 1.2);
    const Supersolution s = supersolution_constants(prm);
    CHECK(s.c == 0.0);
    CHECK(s.R(0.7) == doctest::Approx(0.72 * std::exp(0.7)));
  }
  SUBCASE("1D, G(0) = 1: C = 2, radius at T = 0.2 is sqrt(e)") {
    const ModelParams prm = params_1d(5.0, GrowthLaw::linear(1.0, 1.0), 1.0);
    CHECK(supersolution_constants(prm).c == 2.0);
    CHECK(domain_bound(prm, 0.2) == doctest::Approx(std::sqrt(std::exp(1.0))));
    CHECK(domain_bound(prm, 0.2) == doctest::Approx(1.6487212707));
    CHECK(domain_bound(prm, 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("with drift R solves R' = (2C+1) R + M") {
    const GridSpec g = GridSpec::centered(2, 40, 3.0);
    const ModelParams prm{5.0, GrowthLaw::linear(1.0, 1.0), Potential::quadratic_well(1.0, g), g,
                          1.0, 0.5};
    const Supersolution s = supersolution_constants(prm);
    CHECK(s.c == doctest::Approx(3.0));  // (2/2) (1 + 2)
    const double t = 0.37, d = 1e-6;
    const double lhs = (s.R(t + d) - s.R(t - d)) / (2 * d);
    CHECK(lhs == doctest::Approx(s.rate() * s.R(t) + s.drift_term).epsilon(1e-8));
    double prev = 0.0;
    for (double T = 0.0; T < 1.0; T += 0.1) {
      CHECK(domain_bound(prm, T) >= prev);
      prev = domain_bound(prm, T);
    }
  }
  SUBCASE("R(2) = 2 gives radius 2") {
    const Supersolution s{0.0, 2.0, 0.0};
    CHECK(std::sqrt(2.0 * s.R(0.0)) == doctest::Approx(2.0));
  }
}

TEST_CASE("Barenblatt profile conserves mass and solves the equation") {
  const GridSpec g = GridSpec::centered(1, 4000, 4.0);
  const double gamma = 3.0, c = 0.1;
  const double m1 = integrate(barenblatt_density(g, gamma, 0.1, c));
  const double m2 = integrate(barenblatt_density(g, gamma, 0.4, c));
  CHECK(m2 == doctest::Approx(m1).epsilon(1e-4));
  // support radius: where the bracket vanishes
  const double r = barenblatt_support_radius(1, gamma, 0.1, c);
  const Field u = barenblatt_density(g, gamma, 0.1, c);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double x = std::abs(g.cell_center(k).x());
    if (x > r) CHECK(u[k] == 0.0);
    if (x < 0.99 * r) CHECK(u[k] > 0.0);
  }
  // du/dt = (gamma/(gamma+1)) (u^{gamma+1})'' away from the front
  const double t = 0.2, dt = 1e-6;
  const Field a = barenblatt_density(g, gamma, t - dt, c), b = barenblatt_density(g, gamma, t + dt, c);
  const Field mid = barenblatt_density(g, gamma, t, c);
  Field pw(g);
  pw.values() = mid.values().pow(gamma + 1.0);
  const Field rhs = (gamma / (gamma + 1.0)) * laplacian(pw);
  const int i = 2000 + 40;
  CHECK((b(i) - a(i)) / (2 * dt) == doctest::Approx(rhs(i)).epsilon(1e-3));
}
