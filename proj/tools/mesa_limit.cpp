// mesa_limit: validate | simulate | limit | front | sweep
//
// Exit codes: 0 ok, 1 configuration error, 2 validation failure, 3 solver error.

#include <CLI11.hpp>

#include <iostream>

#include "mesa/io.hpp"
#include "mesa/problem.hpp"
#include "mesa/sweep.hpp"

namespace {

using namespace mesa;

enum Exit { ok = 0, config_error = 1, validation_failed = 2, solver_failed = 3 };

struct Args {
  std::string config;
  std::string out;
  int snapshots = 50;
  bool snapshots_set = false;
};

Problem load(const Args& a, bool need_gamma) {
  Config c = Config::load(a.config);
  if (!a.out.empty()) c.set("output.dir", a.out);
  if (a.snapshots_set) c.set("snapshots", std::to_string(a.snapshots));
  return build_problem(c, a.snapshots, need_gamma);
}

int cmd_validate(const Problem& pr, io::OutputDir& out) {
  const ValidationReport rep = validate_assumptions(pr.params, pr.initial_density());
  out.write("validation.json", io::to_json(rep));
  for (const auto& e : rep.entries)
    if (!e.passed) std::cerr << "FAIL " << e.name << ": " << e.detail << "\n";
  return rep.all_passed() ? ok : validation_failed;
}

int cmd_simulate(const Problem& pr, io::OutputDir& out) {
  const PmeSolver solver(pr.params, pr.solver);
  const Trajectory traj = solver.run(pr.initial_density(), pr.params.horizon);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    out.write(io::numbered("snapshot", k, "csv"),
              io::field_csv(traj.snapshots[k].n, traj.snapshots[k].p));
  out.write("runlog.json", io::to_json(traj.log));
  out.write("diagnostics.json", io::to_json(space_time_norms(traj.snapshots, pr.params)));
  return ok;
}

int cmd_limit(const Problem& pr, io::OutputDir& out) {
  const auto& prm = pr.params;
  LimitOptions lo;
  lo.tolerance = pr.limit_tolerance;
  const LimitState start = LimitState::initial(limit_initial_density(pr), prm.potential, prm.growth);
  const LimitTrajectory traj = run_limit(start, prm.potential, prm.growth, pr.limit_dt,
                                         prm.horizon, pr.solver.snapshot_times, lo);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    out.write(io::numbered("limit", k, "csv"),
              io::field_csv(traj.snapshots[k].n, traj.snapshots[k].p));
  out.write("limit_log.json", io::json{{"steps", traj.steps},
                                       {"dt", pr.limit_dt},
                                       {"total_sweeps", traj.total_sweeps},
                                       {"max_violation", traj.max_violation},
                                       {"max_balance_error", traj.max_balance_error}});
  return ok;
}

int cmd_front(const Problem& pr, io::OutputDir& out) {
  const auto& prm = pr.params;
  if (prm.grid.dim() != 1) throw ConfigError("front tracking needs dim = 1", "dim");
  FrontOptions fo;
  fo.mesh = pr.front_mesh;
  const FrontState start = make_front(-pr.init_radius, pr.init_radius, 0.0, prm.potential,
                                      prm.growth, pr.front_mesh);
  const FrontTrajectory traj = run_front(start, prm.potential, prm.growth, pr.front_dt,
                                         prm.horizon, pr.solver.snapshot_times, fo);
  out.write("front.csv", io::front_csv(traj));
  if (traj.extinct) std::cerr << "front went extinct at t = " << traj.states.back().t << "\n";
  return ok;
}

int cmd_sweep(const Problem& pr, io::OutputDir& out) {
  const SweepReport rep = run_sweep(pr);
  out.write("sweep_report.csv", io::sweep_csv(rep));
  out.write("sweep_report.json", io::to_json(rep));
  for (const auto& r : rep.rows)
    if (!r.ok) std::cerr << "gamma = " << r.gamma << " failed: " << r.error << "\n";
  return rep.complete() ? ok : solver_failed;
}

int dispatch(const std::string& name, const Args& a) {
  const bool need_gamma = name == "validate" || name == "simulate";
  std::optional<Problem> loaded;
  try {
    loaded = load(a, need_gamma);
  } catch (const ConfigError& e) {
    std::cerr << a.config << ": " << e.what();
    if (!e.key().empty()) std::cerr << " [key " << e.key() << "]";
    if (e.line() > 0) std::cerr << " [line " << e.line() << "]";
    std::cerr << "\n";
    return config_error;
  }
  const Problem& pr = *loaded;
  io::OutputDir out(pr.output_dir);
  int code = ok;
  std::string error;
  try {
    if (name == "validate") code = cmd_validate(pr, out);
    else if (name == "simulate") code = cmd_simulate(pr, out);
    else if (name == "limit") code = cmd_limit(pr, out);
    else if (name == "front") code = cmd_front(pr, out);
    else code = cmd_sweep(pr, out);
  } catch (const ConfigError& e) {
    std::cerr << a.config << ": " << e.what() << "\n";
    code = config_error;
    error = e.what();
  } catch (const std::exception& e) {
    std::cerr << name << ": " << e.what() << "\n";
    code = solver_failed;
    error = e.what();
  }
  out.write_manifest(pr.echo, name, code, error);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Porous-medium tumour growth with drift and its incompressible limit"};
  app.set_version_flag("--version", MESA_LIMIT_VERSION);
  app.require_subcommand(1);
  Args args;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check the model assumptions for a configuration"},
      {"simulate", "run the finite-gamma density solver"},
      {"limit", "run the limit (n <= 1) projection stepper"},
      {"front", "track the 1D patch fronts"},
      {"sweep", "run a gamma ladder against a reference"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", args.config, "configuration file")->required();
    sub->add_option("--out", args.out, "output directory (overrides output.dir)");
    sub->add_option("--snapshots", args.snapshots, "snapshots per horizon")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { args.snapshots_set = true; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : config_error;
  }
  return dispatch(app.get_subcommands().front()->get_name(), args);
}
