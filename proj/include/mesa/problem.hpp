#pragma once

// Run configuration: a `key = value` text format with `#` comments, named
// scenario presets, and the translation of both into model objects.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mesa/hele_shaw.hpp"
#include "mesa/pme_solver.hpp"

namespace mesa {

class Config {
 public:
  /// Throws ConfigError on malformed lines, unknown or repeated keys.
  static Config parse(std::istream& in);
  static Config parse_string(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Line of the key in the source; 0 for defaults and overrides.
  int line(const std::string& key) const;

  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  void set(const std::string& key, std::string value);
  void set_default(const std::string& key, std::string value);

  const std::map<std::string, std::string>& values() const { return values_; }

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

enum class Reference { front_tracking, limit_step, largest_gamma };

std::string to_string(Reference r);
Reference parse_reference(const std::string& s);

/// Everything needed to run any of the subcommands.
struct Problem {
  explicit Problem(ModelParams p) : params(std::move(p)) {}

  std::string scenario;
  ModelParams params;
  SolverConfig solver;
  std::string init_kind;
  double init_radius = 1.0;
  double init_height = 1.0;
  /// Start time of a Barenblatt initial profile.
  double init_time = 0.0;
  double init_constant = 0.0;
  std::optional<Field> init_field;

  int front_mesh = 2000;
  double front_dt = 1e-3;
  double limit_dt = 0.0;
  double limit_tolerance = 1e-12;
  std::vector<double> ladder{5, 10, 20, 40, 80};
  Reference reference = Reference::largest_gamma;
  std::string output_dir;
  /// Resolved configuration (preset values included).
  std::map<std::string, std::string> echo;

  /// n0 for the configured gamma.
  Field initial_density() const;
  Field initial_density(double gamma) const;
  /// Same problem at another gamma.
  Problem with_gamma(double gamma) const;
};

/// Fill the preset values for `scenario` into `config` without overriding
/// keys that are already set.
void apply_preset(Config& config, const std::string& scenario);
const std::vector<std::string>& scenario_names();

/// Snapshot times k/K * T for k = 1..K.
std::vector<double> uniform_snapshots(double horizon, int count);

/// `require_gamma` is false for commands that do not use it (front, limit, sweep).
Problem build_problem(Config config, int snapshots = 50, bool require_gamma = true);

}  // namespace mesa
