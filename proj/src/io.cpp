#include "mesa/io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace mesa::io {

namespace {

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json decimated(const std::vector<double>& series, std::size_t stride) {
  json a = json::array();
  for (std::size_t k = 0; k < series.size(); k += stride) a.push_back(series[k]);
  if (!series.empty() && (series.size() - 1) % stride != 0) a.push_back(series.back());
  return a;
}

json optional_bool(const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); }

}  // namespace

std::string field_csv(const Field& n, const Field& p) {
  const GridSpec& g = n.grid();
  std::string out = g.dim() == 1 ? "x,n,p\n" : "x,y,n,p\n";
  out.reserve(out.size() + std::size_t(g.size()) * 80);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Point x = g.cell_center(k);
    put(out, x.x());
    out += ',';
    if (g.dim() == 2) {
      put(out, x.y());
      out += ',';
    }
    put(out, n[k]);
    out += ',';
    put(out, p[k]);
    out += '\n';
  }
  return out;
}

std::string front_csv(const FrontTrajectory& traj) {
  std::string out = "t,a,b,p_center,da_dt,db_dt\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const FrontState& s = traj.states[k];
    for (double v : {s.t, s.a, s.b, s.profile.sample(0.5 * (s.a + s.b)), traj.velocities[k].left,
                     traj.velocities[k].right}) {
      put(out, v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out =
      "gamma,sup_p,grad_p_l2,grad_p_l4,ab_l3,lap_p_l1,comp_residual,sat_residual,d_l1_to_ref,"
      "d_l2_gradp_to_ref,wall_time_s\n";
  const double nan = std::nan("");
  for (const SweepRow& r : report.rows) {
    const auto& d = r.diagnostics;
    const bool ok = r.ok;
    for (double v : {r.gamma, ok ? d.sup_p : nan, ok ? d.grad_p_l2_qt : nan,
                     ok ? d.grad_p_l4_qt : nan, ok ? d.ab_l3 : nan, ok ? d.lap_p_l1 : nan,
                     ok ? d.comp_residual : nan, ok ? d.sat_residual : nan,
                     ok ? r.d_l1_to_ref : nan, ok ? r.d_l2_gradp_to_ref : nan, r.wall_time_s}) {
      put(out, v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

json to_json(const ValidationReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name},
                       {"passed", e.passed},
                       {"value", finite_or_null(e.value)},
                       {"detail", e.detail}});
  return {{"all_passed", report.all_passed()}, {"entries", entries}};
}

json to_json(const DiagnosticsReport& r) {
  return {{"gamma", r.gamma},
          {"horizon", r.horizon},
          {"sup_n", r.sup_n},
          {"sup_p", r.sup_p},
          {"snapshot_times", r.snapshot_times},
          {"bv_space", r.bv_space},
          {"l1_dt_n", r.l1_dt_n},
          {"l1_dt_p", r.l1_dt_p},
          {"grad_p_l1_qt", r.grad_p_l1_qt},
          {"grad_p_l2_qt", r.grad_p_l2_qt},
          {"grad_p_l4_qt", r.grad_p_l4_qt},
          {"ab_l3", r.ab_l3},
          {"lap_p_l1", r.lap_p_l1},
          {"comp_residual", r.comp_residual},
          {"comp_residual_max", r.comp_residual_max},
          {"sat_residual", r.sat_residual},
          {"sat_residual_max", r.sat_residual_max},
          {"identity_residual", r.identity_residual},
          {"support_radius_series", r.support_radius_series}};
}

json to_json(const RunLog& log, std::size_t max_points) {
  const std::size_t n = log.mass_series.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / std::max<std::size_t>(1, max_points));
  return {{"steps", log.steps},
          {"series_stride", stride},
          {"dt_series", decimated(log.dt_series, stride)},
          {"mass_series", decimated(log.mass_series, stride)},
          {"source_series", decimated(log.source_series, stride)},
          {"clipped_series", decimated(log.clipped_series, stride)},
          {"max_n_series", decimated(log.max_n_series, stride)},
          {"max_p_series", decimated(log.max_p_series, stride)},
          {"clipped_mass", log.clipped_mass},
          {"max_balance_error", log.max_balance_error},
          {"max_clip_fraction", log.max_clip_fraction},
          {"wall_time_s", log.wall_time_s}};
}

json to_json(const SweepReport& report) {
  json rows = json::array();
  for (const SweepRow& r : report.rows) {
    json row = {{"gamma", r.gamma},
                {"ok", r.ok},
                {"steps", r.steps},
                {"max_balance_error", r.max_balance_error},
                {"max_clip_fraction", r.max_clip_fraction},
                {"confinement_violations", r.confinement_violations},
                {"d_l1_to_ref", r.d_l1_to_ref},
                {"d_l1_sup_to_ref", r.d_l1_sup_to_ref},
                {"d_l2_gradp_to_ref", r.d_l2_gradp_to_ref},
                {"front_error_cells", r.front_error_cells},
                {"wall_time_s", r.wall_time_s}};
    if (r.ok) row["diagnostics"] = to_json(r.diagnostics);
    else row["error"] = r.error;
    rows.push_back(row);
  }
  const auto& v = report.verdicts;
  return {{"scenario", report.scenario},
          {"reference", to_string(report.reference)},
          {"complete", report.complete()},
          {"reference_wall_time_s", report.reference_wall_time_s},
          {"verdicts",
           {{"comp_residual_decay", optional_bool(v.comp_residual_decay)},
            {"sat_residual_decay", optional_bool(v.sat_residual_decay)},
            {"uniform_bounds", optional_bool(v.uniform_bounds)},
            {"distance_decreasing", optional_bool(v.distance_decreasing)},
            {"confinement", v.confinement},
            {"conservation", v.conservation}}},
          {"rows", rows}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

std::string numbered(const std::string& stem, std::size_t index, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return stem + "_" + buf + "." + ext;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write(const std::string& name, const std::string& content) {
  std::ofstream out(dir_ / name, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write " + (dir_ / name).string());
  files_.push_back({name, sha256_hex(content), content.size()});
}

void OutputDir::write(const std::string& name, const json& content) {
  write(name, content.dump(2) + "\n");
}

void OutputDir::write_manifest(const std::map<std::string, std::string>& config,
                               const std::string& command, int exit_code,
                               const std::string& error) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json files = json::array();
  for (const auto& f : files_)
    files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  json m = {{"tool", "mesa_limit"},
            {"version", MESA_LIMIT_VERSION},
            {"command", command},
            {"timestamp", stamp},
            {"config", config},
            {"digest", "sha256"},
            {"files", files},
            {"exit_code", exit_code}};
  if (!error.empty()) m["error"] = error;
  std::ofstream out(dir_ / "manifest.json");
  out << m.dump(2) << "\n";
}

}  // namespace mesa::io
