#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mesa/io.hpp"
#include "mesa/sweep.hpp"

using namespace mesa;

namespace {

std::vector<State> run(const Problem& pr) {
  return PmeSolver(pr.params, pr.solver).run(pr.initial_density(), pr.params.horizon).snapshots;
}

Problem small(const std::string& scenario, const std::string& extra) {
  return build_problem(Config::parse_string("scenario = " + scenario + "\n" + extra), 5, false);
}

// Sweep CSV with the wall-time column removed.
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST_CASE("distance metrics") {
  const Problem pr = small("mesa", "cells = 100\nhorizon = 0.01\ngamma = 5");
  const auto a = run(pr);
  SUBCASE("identical runs") {
    const Distances d = distance_metrics(a, a);
    CHECK(d.l1_sup == 0.0);
    CHECK(d.l1_final == 0.0);
    CHECK(d.grad_p_l2 == 0.0);
    CHECK(d.l1.size() == a.size());
  }
  SUBCASE("a single cell of mass m h") {
    auto b = a;
    const double m = 0.3, h = pr.params.grid.spacing();
    b.back().n(10) += m;
    const Distances d = distance_metrics(a, b);
    CHECK(d.l1_final == doctest::Approx(m * h));
    CHECK(d.l1_sup == doctest::Approx(m * h));
    CHECK(d.l1.front() == 0.0);
  }
  SUBCASE("mismatches are rejected") {
    const auto c = run(small("mesa", "cells = 120\nhorizon = 0.01\ngamma = 5"));
    CHECK_THROWS_AS(distance_metrics(a, c), InvalidArgument);
    const std::vector<State> shorter(a.begin(), a.end() - 1);
    CHECK_THROWS_AS(distance_metrics(a, shorter), InvalidArgument);
    auto shifted = a;
    shifted.back().t += 1e-3;
    CHECK_THROWS_AS(distance_metrics(a, shifted), InvalidArgument);
  }
}

TEST_CASE("ladder of length one has no monotone verdicts") {
  Problem pr = small("mesa", "cells = 100\nhorizon = 0.01\nsweep.ladder = 10");
  const SweepReport rep = run_sweep(pr);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].ok);
  CHECK_FALSE(rep.verdicts.comp_residual_decay.has_value());
  CHECK_FALSE(rep.verdicts.sat_residual_decay.has_value());
  CHECK_FALSE(rep.verdicts.uniform_bounds.has_value());
  CHECK_FALSE(rep.verdicts.distance_decreasing.has_value());
  CHECK(rep.complete());
}

TEST_CASE("mesa ladder: distance to the initial density decreases") {
  const Problem pr = small("mesa", "cells = 200\nhorizon = 0.05\nsweep.ladder = 5, 10, 20, 40");
  const SweepReport rep = run_sweep(pr);
  REQUIRE(rep.complete());
  REQUIRE(rep.verdicts.distance_decreasing.has_value());
  CHECK(*rep.verdicts.distance_decreasing);
  CHECK(rep.verdicts.confinement);
  CHECK(rep.verdicts.conservation);
}

TEST_CASE("results do not depend on the execution order or worker count") {
  const Problem pr = small("mesa", "cells = 100\nhorizon = 0.02\nsweep.ladder = 5, 10, 20");
  SweepOptions forward;
  forward.threads = 1;
  SweepOptions scrambled;
  scrambled.threads = 3;
  scrambled.execution_order = {2, 0, 1};
  const SweepReport a = run_sweep(pr, forward), b = run_sweep(pr, scrambled);
  CHECK(without_wall_time(io::sweep_csv(a)) == without_wall_time(io::sweep_csv(b)));
  CHECK(io::sweep_csv(a).rfind("gamma,", 0) == 0);
  SweepOptions bad;
  bad.execution_order = {0, 0, 1};
  CHECK_THROWS_AS(run_sweep(pr, bad), InvalidArgument);
}

TEST_CASE("failed runs give partial reports") {
  // gamma = 1 is outside the admissible range; the other entry still runs.
  const Problem pr = small("mesa", "cells = 100\nhorizon = 0.01\nsweep.ladder = 1, 10");
  const SweepReport rep = run_sweep(pr);
  REQUIRE(rep.rows.size() == 2);
  CHECK_FALSE(rep.rows[0].ok);
  CHECK_FALSE(rep.rows[0].error.empty());
  CHECK(rep.rows[1].ok);
  CHECK_FALSE(rep.complete());
  const std::string csv = io::sweep_csv(rep);
  CHECK(csv.find("nan") != std::string::npos);
}

TEST_CASE("patch growth: the ladder is Cauchy and tracks the front") {
  const Problem pr = small("patch-growth",
                           "cells = 220\nhorizon = 0.1\nsweep.ladder = 5, 10, 40, 80\n"
                           "front.mesh = 800");
  const SweepReport rep = run_sweep(pr);
  REQUIRE(rep.complete());
  CHECK(rep.rows[3].d_l1_to_ref < rep.rows[1].d_l1_to_ref);
  CHECK(rep.rows[3].front_error_cells <= 3.0);

  std::vector<std::vector<State>> runs;
  for (double g : {5.0, 40.0, 80.0}) runs.push_back(run(pr.with_gamma(g)));
  CHECK(distance_metrics(runs[1], runs[2]).l1_final < distance_metrics(runs[0], runs[2]).l1_final);
}

TEST_CASE("limit initial density") {
  const Problem well = small("drift-well", "");
  const Field n = limit_initial_density(well);
  CHECK(n.values().maxCoeff() == 1.0);
  CHECK(((n.values() == 0.0) || (n.values() == 1.0)).all());
  const Problem mesa = small("mesa", "gamma = 10");
  CHECK(limit_initial_density(mesa).values().maxCoeff() == doctest::Approx(0.8));
}
