#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <limits>

#include "mesa/hele_shaw.hpp"

using namespace mesa;

namespace {

const GridSpec line = GridSpec::centered(1, 400, 4.0);
const GrowthLaw unit_law = GrowthLaw::linear(1.0, 1.0);

}  // namespace

TEST_CASE("stationary pressure in 1D") {
  const Potential zero = Potential::zero(line);
  SUBCASE("linear law: cosh profile") {
    StationaryInfo info;
    const PressureProfile p = solve_stationary_pressure(-1.0, 1.0, 2000, zero, unit_law, {}, &info);
    CHECK(std::abs(p.sample(0.0) - (1.0 - 1.0 / std::cosh(1.0))) <= 1e-8);
    for (double x : {-0.9, -0.37, 0.123, 0.5, 0.99})
      CHECK(std::abs(p.sample(x) - (1.0 - std::cosh(x) / std::cosh(1.0))) <= 1e-8);
    CHECK(p.values[0] == 0.0);
    CHECK(p.values[1999] == 0.0);
    CHECK(p.values.minCoeff() >= 0.0);
    CHECK(p.sample(1.5) == 0.0);
    CHECK(info.iterations <= 1);
  }
  SUBCASE("general alpha and length") {
    const double alpha = 2.5, L = 1.3, s = std::sqrt(alpha);
    const PressureProfile p = solve_stationary_pressure(-L / 2, L / 2, 1000, zero,
                                                        GrowthLaw::linear(alpha, 0.7));
    CHECK(std::abs(p.sample(0.2) - 0.7 * (1.0 - std::cosh(s * 0.2) / std::cosh(s * L / 2))) <= 1e-8);
  }
  SUBCASE("quadratic well without growth: inverted parabola") {
    const double lambda = 1.5, L = 2.0;
    const Potential well = Potential::quadratic_well(lambda, line);
    const PressureProfile p = solve_stationary_pressure(-L / 2, L / 2, 201, well, GrowthLaw::none());
    for (double x : {-0.8, 0.0, 0.33})
      CHECK(p.sample(x) == doctest::Approx(0.5 * lambda * (L * L / 4 - x * x)).epsilon(1e-10));
    CHECK(p.slope_right() == doctest::Approx(-lambda * L / 2).epsilon(1e-10));
  }
  SUBCASE("short intervals: p vanishes uniformly") {
    double prev = std::numeric_limits<double>::infinity();
    for (double half : {0.1, 0.01, 0.001}) {
      const double top = solve_stationary_pressure(-half, half, 101, zero, unit_law).values.maxCoeff();
      CHECK(top <= 0.5 * half * half + 1e-15);
      CHECK(top < prev);
      prev = top;
    }
  }
  SUBCASE("tabulated law: Newton converges to the same profile") {
    std::vector<double> ps, gs;
    for (int i = 0; i <= 12; ++i) {
      ps.push_back(0.1 * i);
      gs.push_back(1.0 - 0.1 * i);
    }
    StationaryInfo info;
    const PressureProfile p = solve_stationary_pressure(
        -1.0, 1.0, 2000, zero, GrowthLaw::tabulated(ps, gs, 1.0, 1.0), {}, &info);
    CHECK(std::abs(p.sample(0.0) - (1.0 - 1.0 / std::cosh(1.0))) <= 1e-8);
    CHECK(info.iterations >= 1);
    CHECK(info.iterations < 50);
    // Floor: roundoff in the d^-2 term, 1e-16 / d^2 = 1e-10.
    CHECK(info.residual_history.back() <= 1e-8);
  }
  SUBCASE("nonlinear table: the Newton solution satisfies the discrete equation") {
    std::vector<double> ps, gs;
    for (int i = 0; i <= 12; ++i) {
      const double x = 0.1 * i;
      ps.push_back(x);
      gs.push_back(1.0 - x * x);
    }
    const GrowthLaw law = GrowthLaw::tabulated(ps, gs, 1.0, 1.0);
    StationaryInfo info;
    const PressureProfile p = solve_stationary_pressure(-1.5, 1.5, 3001, zero, law, {}, &info);
    CHECK(info.iterations > 1);
    const double h = p.spacing();
    for (int j : {300, 1500, 2700}) {
      const double lap = (p.values[j - 1] - 2 * p.values[j] + p.values[j + 1]) / (h * h);
      CHECK(-lap == doctest::Approx(law(p.values[j])).epsilon(1e-5));
    }
  }
  SUBCASE("a pressure forced below zero is not admissible") {
    const Potential hill = Potential::quadratic_well(-2.0, line);
    CHECK_THROWS_AS(solve_stationary_pressure(-1.0, 1.0, 101, hill, GrowthLaw::none()),
                    ModelingError);
  }
}

TEST_CASE("stationary pressure on a 2D disc") {
  const GridSpec g = GridSpec::centered(2, 120, 2.4);
  std::vector<bool> mask(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) mask[k] = g.cell_center(k).norm() <= 1.0;
  const Field p = solve_stationary_pressure(g, mask, Potential::zero(g), unit_law);
  // -Lap p = 1 - p, p = 0 on r = 1: p = 1 - I0(r) / I0(1).
  const double i0 = boost::math::cyl_bessel_i(0, 1.0);
  double err = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (!mask[k]) {
      CHECK(p[k] == 0.0);
      continue;
    }
    const double r = g.cell_center(k).norm();
    err = std::max(err, std::abs(p[k] - (1.0 - boost::math::cyl_bessel_i(0, r) / i0)));
  }
  CHECK(err <= 3.0 * g.spacing());

  const Field n = saturated_density(g, 1.0, 40.0, Potential::zero(g), unit_law);
  CHECK(n.values().maxCoeff() <= 1.0);
  CHECK(n(60, 60) == doctest::Approx(std::pow(p(60, 60), 1.0 / 40.0)));
  CHECK(n(5, 5) == 0.0);
}

TEST_CASE("front velocity") {
  const Potential zero = Potential::zero(line);
  SUBCASE("no pressure, no drift: motionless") {
    const FrontState f = make_front(-1.0, 1.0, 0.0, zero, GrowthLaw::none());
    const FrontVelocity v = front_velocity(f, zero);
    CHECK(v.left == 0.0);
    CHECK(v.right == 0.0);
  }
  SUBCASE("cosh profile: fronts move at tanh(1)") {
    const FrontState f = make_front(-1.0, 1.0, 0.0, zero, unit_law);
    const FrontVelocity v = front_velocity(f, zero);
    CHECK(std::abs(v.right - std::tanh(1.0)) <= 1e-6);
    CHECK(std::abs(v.left + std::tanh(1.0)) <= 1e-6);
  }
  SUBCASE("pure drift: both fronts move at -v") {
    const Potential tilt = Potential::linear(Point(0.3, 0.0), line);
    const FrontState f = make_front(-0.5, 0.7, 0.0, tilt, GrowthLaw::none());
    const FrontVelocity v = front_velocity(f, tilt);
    CHECK(v.left == doctest::Approx(-0.3));
    CHECK(v.right == doctest::Approx(-0.3));
  }
  SUBCASE("coarse profile") {
    CHECK_THROWS_AS(front_velocity(make_front(-1.0, 1.0, 0.0, zero, unit_law, 5), zero),
                    InvalidArgument);
  }
}

TEST_CASE("evolve_front") {
  const Potential zero = Potential::zero(line);
  SUBCASE("degenerate law: unchanged") {
    const FrontState f = make_front(-1.0, 1.0, 0.0, zero, GrowthLaw::none());
    const FrontStep s = evolve_front(f, zero, GrowthLaw::none(), 1e-2);
    CHECK(s.front.a == -1.0);
    CHECK(s.front.b == 1.0);
    CHECK(s.front.t == doctest::Approx(1e-2));
  }
  SUBCASE("one Heun step of the cosh patch") {
    const FrontState f = make_front(-1.0, 1.0, 0.0, zero, unit_law);
    const FrontStep s = evolve_front(f, zero, unit_law, 1e-3);
    CHECK(std::abs(s.front.b - (1.0 + 0.76159e-3)) <= 1e-6);
    CHECK(std::abs(s.front.a + s.front.b) <= 1e-12);
    // Halving dt twice agrees with one step to O(dt^3).
    FrontState h = f;
    for (int k = 0; k < 2; ++k) h = evolve_front(h, zero, unit_law, 5e-4).front;
    CHECK(std::abs(h.b - s.front.b) <= 1e-8);
  }
  SUBCASE("translation under pure drift keeps the width") {
    const Potential tilt = Potential::linear(Point(-0.8, 0.0), line);
    FrontState f = make_front(-0.5, 0.5, 0.0, tilt, GrowthLaw::none());
    for (int k = 0; k < 50; ++k) {
      const FrontStep s = evolve_front(f, tilt, GrowthLaw::none(), 1e-2);
      CHECK(std::abs((s.front.b - s.front.a) - (f.b - f.a)) <= 1e-12);
      f = s.front;
    }
    CHECK(f.a == doctest::Approx(-0.5 + 0.4));
  }
  SUBCASE("guards and extinction") {
    const FrontState f = make_front(-1.0, 1.0, 0.0, zero, unit_law);
    CHECK_THROWS_AS(evolve_front(f, zero, unit_law, 1.0), InvalidArgument);
    CHECK_THROWS_AS(evolve_front(f, zero, unit_law, 0.0), InvalidArgument);
    FrontOptions o;
    o.min_width = 5.0;
    CHECK(evolve_front(f, zero, unit_law, 1e-3, o).extinct);
  }
  SUBCASE("run_front lands on stops") {
    const FrontState f = make_front(-1.0, 1.0, 0.0, zero, unit_law, 400);
    const std::vector<double> stops{0.0125, 0.05};
    const FrontTrajectory tr = run_front(f, zero, unit_law, 1e-2, 0.06, stops);
    bool hit = false;
    for (const auto& s : tr.states) hit = hit || s.t == 0.0125;
    CHECK(hit);
    CHECK(tr.states.back().t == 0.06);
    CHECK(tr.velocities.size() == tr.states.size());
    CHECK_FALSE(tr.extinct);
  }
}

TEST_CASE("density fronts") {
  const GridSpec g = GridSpec::centered(1, 40, 4.0);
  Field n = Field::from_function(g, [](const Point& x) { return std::abs(x.x()) < 1.0 ? 1.0 : 0.0; });
  FrontPositions f = density_fronts(n);
  CHECK(f.left == doctest::Approx(-1.0));
  CHECK(f.right == doctest::Approx(1.0));
  n(30) = 0.3;  // cell [1.0, 1.1]
  f = density_fronts(n);
  CHECK(f.right == doctest::Approx(1.03));
  n(29) = 0.8;
  f = density_fronts(n);
  CHECK(f.right == doctest::Approx(1.0 - 0.02 + 0.03));
}

TEST_CASE("limit stepper") {
  const Potential zero = Potential::zero(line);
  SUBCASE("unsaturated density: projection is inactive") {
    const Field n0 = InitialData::patch(1.0, 0.5).density(line);
    const LimitState s0 = LimitState::initial(n0, zero, unit_law);
    CHECK(s0.p.values().abs().maxCoeff() == 0.0);
    LimitStepInfo info;
    const LimitState s1 = limit_step(s0, zero, unit_law, 1e-2, {}, &info);
    CHECK(s1.p.values().abs().maxCoeff() == 0.0);
    CHECK((s1.n - (1.0 + 1e-2) * n0).values().abs().maxCoeff() <= 1e-15);
    CHECK(info.violation == 0.0);
  }
  SUBCASE("limit_dt") {
    CHECK(limit_dt(line, zero, unit_law) == doctest::Approx(0.45 * 0.01));
    CHECK(limit_dt(line, Potential::quadratic_well(1.0, line), GrowthLaw::linear(200.0, 1.0)) ==
          doctest::Approx(0.45 / 400.0));
  }
  SUBCASE("density outside [0, 1] is rejected") {
    CHECK_THROWS_AS(LimitState::initial(Field::constant(line, 1.2), zero, unit_law),
                    InvalidArgument);
  }
  SUBCASE("saturated patch follows the tracked front and keeps the mass budget") {
    const GridSpec g = GridSpec::centered(1, 1600, 4.0);  // h = 1/400
    const Potential phi = Potential::zero(g);
    const LimitState s0 = LimitState::initial(InitialData::patch(1.0, 1.0).density(g), phi, unit_law);
    std::vector<double> stops;
    for (int k = 1; k <= 10; ++k) stops.push_back(0.05 * k);
    const double dt = limit_dt(g, phi, unit_law);
    const LimitTrajectory lt = run_limit(s0, phi, unit_law, dt, 0.5, stops);
    const FrontTrajectory ft =
        run_front(make_front(-1.0, 1.0, 0.0, phi, unit_law), phi, unit_law, 1e-3, 0.5, stops);
    CHECK(lt.max_balance_error <= 1e-8);
    CHECK(lt.max_violation <= 1e-8);
    for (const LimitState& s : lt.snapshots) {
      CHECK(s.n.values().maxCoeff() <= 1.0 + 1e-12);
      CHECK(s.n.values().minCoeff() >= 0.0);
      CHECK((s.p * (Field::constant(g, 1.0) - s.n)).values().abs().maxCoeff() <= 1e-10);
      double b = 1.0;
      for (const auto& f : ft.states)
        if (std::abs(f.t - s.t) < 1e-12) b = f.b;
      CHECK(std::abs(density_fronts(s.n).right - b) <= 2.0 * g.spacing());
    }
  }
}
