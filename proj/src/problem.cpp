#include "mesa/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mesa {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& text, const std::string& key, int line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + text + "' is not a finite number", key, line);
  return v;
}

const std::map<std::string, std::string>& preset(const std::string& name) {
  static const std::map<std::string, std::map<std::string, std::string>> presets = {
      {"mesa",
       {{"dim", "1"}, {"cells", "800"}, {"extent", "4"}, {"growth.kind", "none"},
        {"potential.kind", "zero"}, {"init.kind", "patch"}, {"init.radius", "1"},
        {"init.height", "0.8"}, {"init.support_radius", "1.25"}, {"horizon", "0.25"},
        {"sweep.reference", "limit-step"}}},
      {"patch-growth",
       {{"dim", "1"}, {"cells", "880"}, {"extent", "4.4"}, {"growth.kind", "linear"},
        {"growth.alpha", "1"}, {"growth.p_max", "1"}, {"potential.kind", "zero"},
        {"init.kind", "pressure-profile"}, {"init.radius", "1"}, {"horizon", "0.3"},
        {"sweep.reference", "front-tracking"}}},
      {"drift-well",
       {{"dim", "2"}, {"cells", "60"}, {"extent", "3"}, {"growth.kind", "linear"},
        {"growth.alpha", "1"}, {"growth.p_max", "1"}, {"potential.kind", "quadratic-well"},
        {"potential.lambda", "1"}, {"init.kind", "pressure-profile"}, {"init.radius", "0.5"},
        {"init.support_radius", "0.75"}, {"horizon", "0.1"}, {"sweep.reference", "limit-step"}}},
      {"barenblatt",
       {{"dim", "1"}, {"cells", "960"}, {"extent", "2.4"}, {"gamma", "3"}, {"growth.kind", "none"},
        {"potential.kind", "zero"}, {"init.kind", "barenblatt"}, {"init.time", "0.1"},
        {"init.constant", "0.1"}, {"init.support_radius", "1"}, {"horizon", "0.1"},
        {"sweep.reference", "largest-gamma"}}},
  };
  auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown scenario '" + name + "'", "scenario");
  return it->second;
}

std::array<double, 2> pair_of(const Config& c, const std::string& key, int dim) {
  const auto v = c.numbers(key);
  if (v.size() != 1 && int(v.size()) != dim)
    throw ConfigError("key '" + key + "' needs 1 or " + std::to_string(dim) + " values", key,
                      c.line(key));
  return {v[0], v.size() > 1 ? v[1] : v[0]};
}

Field read_density_csv(const std::string& path, const GridSpec& g) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read init.file '" + path + "'", "init.file");
  std::string header;
  std::getline(in, header);
  const auto cols = split(header, ',');
  const auto col = std::find(cols.begin(), cols.end(), "n");
  if (col == cols.end()) throw ConfigError("init.file has no 'n' column", "init.file");
  const std::size_t which = std::size_t(col - cols.begin());
  std::vector<double> values;
  std::string row;
  while (std::getline(in, row)) {
    if (trim(row).empty()) continue;
    const auto cells = split(row, ',');
    if (cells.size() != cols.size()) throw ConfigError("ragged row in init.file", "init.file");
    values.push_back(parse_double(cells[which], "init.file", 0));
  }
  if (std::ptrdiff_t(values.size()) != g.size())
    throw ConfigError("init.file has " + std::to_string(values.size()) + " rows, grid has " +
                          std::to_string(g.size()) + " cells",
                      "init.file");
  return Field(g, Eigen::Map<Eigen::ArrayXd>(values.data(), Eigen::Index(values.size())));
}

}  // namespace

// ---------------------------------------------------------------- Config

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      "scenario", "dim", "cells", "extent", "gamma", "n_max", "growth.kind", "growth.alpha",
      "growth.p_max", "growth.table", "potential.kind", "potential.lambda",
      "potential.amplitude", "potential.width", "potential.center", "potential.slope",
      "init.kind", "init.radius",
      "init.height", "init.width", "init.time", "init.constant", "init.support_radius",
      "init.file", "horizon", "cfl_safety", "reaction", "output.dir", "snapshots",
      "front.mesh", "front.dt", "limit.dt", "limit.tolerance", "sweep.ladder",
      "sweep.reference"};
  return keys;
}

Config Config::parse(std::istream& in) {
  Config c;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", "", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", key, line);
    if (value.empty())
      throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' has no value", key,
                        line);
    if (c.has(key))
      throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' repeated", key, line);
    c.values_[key] = value;
    c.lines_[key] = line;
  }
  return c;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", "");
  return parse(in);
}

int Config::line(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

const std::string& Config::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'", key);
  return it->second;
}

double Config::number(const std::string& key) const {
  return parse_double(text(key), key, line(key));
}

int Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError("key '" + key + "' must be an integer", key, line(key));
  return int(v);
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(text(key), ',')) out.push_back(parse_double(item, key, line(key)));
  return out;
}

void Config::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
  lines_.erase(key);
}

void Config::set_default(const std::string& key, std::string value) {
  if (!has(key)) values_[key] = std::move(value);
}

// ---------------------------------------------------------------- presets

std::string to_string(Reference r) {
  switch (r) {
    case Reference::front_tracking: return "front-tracking";
    case Reference::limit_step: return "limit-step";
    case Reference::largest_gamma: return "largest-gamma";
  }
  return "?";
}

Reference parse_reference(const std::string& s) {
  if (s == "front-tracking") return Reference::front_tracking;
  if (s == "limit-step") return Reference::limit_step;
  if (s == "largest-gamma") return Reference::largest_gamma;
  throw ConfigError("unknown sweep.reference '" + s + "'", "sweep.reference");
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"mesa", "patch-growth", "drift-well",
                                                 "barenblatt"};
  return names;
}

void apply_preset(Config& config, const std::string& scenario) {
  for (const auto& [k, v] : preset(scenario)) config.set_default(k, v);
}

std::vector<double> uniform_snapshots(double horizon, int count) {
  if (count < 1) throw InvalidArgument("snapshot count must be positive");
  std::vector<double> t(count);
  for (int k = 1; k <= count; ++k) t[k - 1] = horizon * k / count;
  t.back() = horizon;
  return t;
}

// ---------------------------------------------------------------- Problem

Field Problem::initial_density() const { return initial_density(params.gamma); }

Field Problem::initial_density(double gamma) const {
  const GridSpec& g = params.grid;
  if (init_kind == "patch") return InitialData::patch(init_radius, init_height).density(g);
  if (init_kind == "bump") return InitialData::smooth_bump(init_height, init_radius).density(g);
  if (init_kind == "barenblatt") return barenblatt_density(g, gamma, init_time, init_constant);
  if (init_kind == "pressure-profile")
    return saturated_density(g, init_radius, gamma, params.potential, params.growth);
  return *init_field;
}

Problem Problem::with_gamma(double gamma) const {
  Problem q = *this;
  q.params.gamma = gamma;
  std::ostringstream os;
  os.precision(17);
  os << gamma;
  q.echo["gamma"] = os.str();
  return q;
}

Problem build_problem(Config c, int snapshots, bool require_gamma) {
  std::string scenario;
  if (c.has("scenario")) {
    scenario = c.text("scenario");
    apply_preset(c, scenario);
  }
  c.set_default("n_max", "1");
  c.set_default("growth.kind", "none");
  c.set_default("potential.kind", "zero");
  c.set_default("init.kind", "patch");
  c.set_default("init.radius", "1");
  c.set_default("init.height", "1");
  c.set_default("cfl_safety", "0.45");
  c.set_default("reaction", "explicit");
  c.set_default("front.mesh", "2000");
  c.set_default("front.dt", "1e-3");
  c.set_default("limit.tolerance", "1e-12");
  c.set_default("sweep.ladder", "5,10,20,40,80");
  c.set_default("sweep.reference", "largest-gamma");
  c.set_default("output.dir", "out");
  if (c.has("snapshots")) snapshots = c.integer("snapshots");

  const int dim = c.integer("dim");
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2", "dim", c.line("dim"));
  const auto cells = pair_of(c, "cells", dim);
  const auto extent = pair_of(c, "extent", dim);
  for (int a = 0; a < dim; ++a)
    if (cells[a] < 3 || cells[a] != std::floor(cells[a]))
      throw ConfigError("cells must be integers >= 3", "cells", c.line("cells"));
  const auto make_grid = [&]() {
    try {
      return GridSpec(dim, {int(cells[0]), int(cells[1])}, {-0.5 * extent[0], -0.5 * extent[1]},
                      {extent[0], extent[1]});
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what(), "extent", c.line("extent"));
    }
  };
  const GridSpec grid = make_grid();

  double gamma = std::numeric_limits<double>::quiet_NaN();
  if (c.has("gamma") || require_gamma) gamma = c.number("gamma");
  const double horizon = c.number("horizon");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive", "horizon", c.line("horizon"));

  const std::string gkind = c.text("growth.kind");
  GrowthLaw law = GrowthLaw::none();
  if (gkind == "none") {
    law = GrowthLaw::none(c.has("growth.p_max") ? c.number("growth.p_max") : 1.0);
  } else if (gkind == "linear") {
    law = GrowthLaw::linear(c.number("growth.alpha"), c.number("growth.p_max"));
  } else if (gkind == "tabulated") {
    // growth.table = p0:g0, p1:g1, ...
    std::vector<double> p, g;
    for (const auto& item : split(c.text("growth.table"), ',')) {
      const auto pg = split(item, ':');
      if (pg.size() != 2) throw ConfigError("growth.table entries are 'p:g'", "growth.table");
      p.push_back(parse_double(pg[0], "growth.table", c.line("growth.table")));
      g.push_back(parse_double(pg[1], "growth.table", c.line("growth.table")));
    }
    try {
      law = GrowthLaw::tabulated(p, g, c.number("growth.alpha"), c.number("growth.p_max"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what(), "growth.table", c.line("growth.table"));
    }
  } else {
    throw ConfigError("unknown growth.kind '" + gkind + "'", "growth.kind", c.line("growth.kind"));
  }

  const std::string pkind = c.text("potential.kind");
  std::optional<Potential> phi;
  if (pkind == "zero") {
    phi = Potential::zero(grid);
  } else if (pkind == "quadratic-well") {
    phi = Potential::quadratic_well(c.number("potential.lambda"), grid);
  } else if (pkind == "gaussian-bump") {
    Point center = Point::Zero();
    if (c.has("potential.center")) {
      const auto v = c.numbers("potential.center");
      center.x() = v[0];
      if (v.size() > 1) center.y() = v[1];
    }
    phi = Potential::gaussian_bump(c.number("potential.amplitude"), c.number("potential.width"),
                                   center, grid);
  } else if (pkind == "linear") {
    const auto v = c.numbers("potential.slope");
    phi = Potential::linear(Point(v[0], v.size() > 1 ? v[1] : 0.0), grid);
  } else {
    throw ConfigError("unknown potential.kind '" + pkind + "'", "potential.kind",
                      c.line("potential.kind"));
  }

  Problem pr(ModelParams{gamma, law, *phi, grid, c.number("n_max"), 1.0, horizon});
  pr.scenario = scenario;
  pr.solver.cfl_safety = c.number("cfl_safety");
  if (!(pr.solver.cfl_safety > 0.0 && pr.solver.cfl_safety <= 1.0))
    throw ConfigError("cfl_safety must lie in (0, 1]", "cfl_safety", c.line("cfl_safety"));
  const std::string reaction = c.text("reaction");
  if (reaction == "explicit")
    pr.solver.reaction = ReactionTreatment::explicit_euler;
  else if (reaction == "semi-implicit")
    pr.solver.reaction = ReactionTreatment::semi_implicit;
  else
    throw ConfigError("reaction must be 'explicit' or 'semi-implicit'", "reaction",
                      c.line("reaction"));
  pr.solver.snapshot_times = uniform_snapshots(horizon, snapshots);

  pr.init_kind = c.text("init.kind");
  pr.init_radius = c.number("init.radius");
  pr.init_height = c.number("init.height");
  double support = pr.init_radius;
  if (pr.init_kind == "bump") {
    if (c.has("init.width")) pr.init_radius = c.number("init.width");
    support = InitialData::smooth_bump(pr.init_height, pr.init_radius).support_radius();
  } else if (pr.init_kind == "barenblatt") {
    pr.init_time = c.number("init.time");
    pr.init_constant = c.number("init.constant");
    if (!(pr.init_time > 0.0) || !(pr.init_constant > 0.0))
      throw ConfigError("barenblatt needs init.time > 0 and init.constant > 0", "init.time");
    if (!c.has("init.support_radius") && std::isnan(gamma))
      throw ConfigError("barenblatt without gamma needs init.support_radius", "init.support_radius");
    if (!std::isnan(gamma))
      support = barenblatt_support_radius(dim, gamma, pr.init_time, pr.init_constant);
  } else if (pr.init_kind == "file") {
    pr.init_field = read_density_csv(c.text("init.file"), grid);
    support = 0.0;
    for (Eigen::Index k = 0; k < grid.size(); ++k)
      if ((*pr.init_field)[k] != 0.0)
        support = std::max(support, grid.cell_center(k).norm() + 0.5 * grid.spacing() * std::sqrt(dim));
  } else if (pr.init_kind != "patch" && pr.init_kind != "pressure-profile") {
    throw ConfigError("unknown init.kind '" + pr.init_kind + "'", "init.kind", c.line("init.kind"));
  }
  pr.params.support_radius_0 =
      c.has("init.support_radius") ? c.number("init.support_radius") : support;

  pr.front_mesh = c.integer("front.mesh");
  pr.front_dt = c.number("front.dt");
  pr.limit_dt = c.has("limit.dt") ? c.number("limit.dt") : mesa::limit_dt(grid, *phi, law);
  pr.limit_tolerance = c.number("limit.tolerance");
  pr.ladder = c.numbers("sweep.ladder");
  for (std::size_t k = 1; k < pr.ladder.size(); ++k)
    if (!(pr.ladder[k] > pr.ladder[k - 1]))
      throw ConfigError("sweep.ladder must be strictly increasing", "sweep.ladder",
                        c.line("sweep.ladder"));
  pr.reference = parse_reference(c.text("sweep.reference"));
  pr.output_dir = c.text("output.dir");
  pr.echo = c.values();
  return pr;
}

}  // namespace mesa
