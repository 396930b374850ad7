#pragma once

// Run drivers behind the command-line tool: the linear table, a single
// simulation and a resumable sweep, each writing into a run directory with
// a JSON manifest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "filmheat/config.hpp"
#include "filmheat/diagnostics.hpp"
#include "filmheat/experiment.hpp"
#include "filmheat/linear_analysis.hpp"
#include "filmheat/snapshot.hpp"
#include "filmheat/sweep.hpp"
#include "filmheat/version.hpp"

namespace filmheat {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- ranges

/// Parses "v", "v1,v2,..." or "start:stop:count[:log]".
inline std::vector<double> parse_range(const std::string& spec, const std::string& what) {
  auto num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + s + "' is not a number");
    }
  };
  auto split = [](const std::string& s, char c) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, c)) parts.push_back(p);
    return parts;
  };
  if (spec.empty()) throw UsageError(what + ": empty range");
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto p = split(spec, ':');
    if (p.size() < 3 || p.size() > 4) throw UsageError(what + ": expected start:stop:count[:log]");
    const double a = num(p[0]);
    const double b = num(p[1]);
    const double c = num(p[2]);
    if (!(c >= 1.0) || std::floor(c) != c) throw UsageError(what + ": count must be a positive integer");
    const auto n = static_cast<std::size_t>(c);
    const bool log = p.size() == 4;
    if (log && p[3] != "log") throw UsageError(what + ": fourth field must be 'log'");
    if (log && !(a > 0.0 && b > 0.0)) throw UsageError(what + ": log ranges need positive bounds");
    if (b < a) throw UsageError(what + ": stop must not be below start");
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
  } else {
    for (const auto& p : split(spec, ',')) out.push_back(num(p));
  }
  if (out.empty()) throw UsageError(what + ": empty range");
  return out;
}

/// Rows (bih, k, exact modes, theta, lin, scheid, theta-phi +/-), all in
/// units of 3 Pe lambda.
inline ColumnTable linear_table(const std::vector<double>& bih, const std::vector<double>& k,
                                int n_modes = 3) {
  if (bih.empty() || k.empty()) throw UsageError("linear: empty range");
  if (n_modes < 1) throw UsageError("linear: at least one exact mode required");
  std::vector<std::string> cols{"bih", "k"};
  for (int m = 1; m <= n_modes; ++m) cols.push_back("exact" + std::to_string(m));
  for (const char* c : {"theta", "lin", "scheid", "theta_phi_plus", "theta_phi_minus"}) cols.emplace_back(c);
  ColumnTable t(cols);
  for (double b : bih) {
    if (!(b >= 0.0)) throw UsageError("linear: bih must be >= 0");
    const auto roots = relaxation_roots(b, n_modes);
    for (double kk : k) {
      if (!(kk >= 0.0)) throw UsageError("linear: k must be >= 0");
      std::vector<double> row{b, kk};
      for (double l : roots) row.push_back(-(l * l + kk * kk));
      row.push_back(model_damping(ThermalModel::theta, b, kk)[0]);
      row.push_back(model_damping(ThermalModel::lin_truncated, b, kk)[0]);
      row.push_back(model_damping(ThermalModel::scheid, b, kk)[0]);
      const auto tp = model_damping(ThermalModel::theta_phi, b, kk);
      row.push_back(tp[0]);
      row.push_back(tp[1]);
      t.add_row(row);
    }
  }
  return t;
}

// ------------------------------------------------------------- manifests

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline Json groups_json(const DimensionlessGroups& g) {
  return Json{{"re", g.re}, {"we", g.we}, {"ct", g.ct}, {"ct_convention", "cot(beta)"},
              {"beta_deg", g.beta_deg}, {"pr", g.pr}, {"pe", g.pe}, {"bi", g.bi},
              {"bi_tilde", g.bi_tilde}, {"ka", g.ka}};
}

inline Json settings_json(const RunConfig& c) {
  const PairedRunSpec& s = c.spec;
  const DomainSpec& d = s.domain;
  Json j;
  j["domain"] = {{"kind", d.kind == DomainKind::open ? "open" : "periodic"},
                 {"length", d.length},
                 {"nx", d.nx},
                 {"dx", d.grid().dx()},
                 {"useful_length", d.useful_length},
                 {"inlet_amplitude", d.inlet.amplitude},
                 {"inlet_frequency", d.inlet.frequency},
                 {"thermal_inlet", d.thermal_inlet == ThermalInlet::hot ? "hot" : "equilibrium"},
                 {"perturbation", s.perturbation},
                 {"perturbation_mode", s.perturbation_mode}};
  Json models = Json::array();
  for (ThermalModel m : s.models) models.push_back(to_string(m));
  j["solver"] = {{"hydro", to_string(s.hydro)},
                 {"models", models},
                 {"reference", s.reference},
                 {"n_cheb", s.n_cheb},
                 {"time_scheme", "ARS(2,3,2) IMEX Runge-Kutta"},
                 {"implicit_terms",
                  "hydro: mass flux and q-equation surface tension and viscous terms (h frozen per "
                  "step); thermal models: relaxation terms; reference: cross-stream operator and "
                  "mixed derivative"},
                 {"explicit_terms", "advection, inertia, gravity, streamwise diffusion"},
                 {"courant", s.step.courant},
                 {"dt_max", s.step.dt_max},
                 {"h_min", s.step.h_min},
                 {"spinup_time", s.spinup_time},
                 {"thermal_time", s.thermal_time ? Json(*s.thermal_time) : Json("auto")},
                 {"window_fraction", s.window_fraction},
                 {"sample_interval", s.sample_interval}};
  return j;
}

/// Manifest written before a run and finalised after it.
class RunManifest {
 public:
  RunManifest(fs::path path, const std::string& command, const RunConfig& c, const std::string& config_path)
      : path_(std::move(path)) {
    j_["command"] = command;
    j_["version"] = std::string(version_string);
    j_["config_path"] = config_path;
    Json echo = Json::object();
    for (const auto& [k, v] : c.echo) echo[k] = v;
    j_["config_echo"] = echo;
    j_["groups"] = groups_json(c.groups);
    j_["scaling"] = {{"h_n_m", c.scaling.h_n}, {"velocity_scale_m_s", c.scaling.u_n_scale},
                     {"l_nu_m", c.scaling.l_nu}, {"time_scale_s", c.scaling.time_scale()}};
    j_["settings"] = settings_json(c);
    j_["started"] = utc_timestamp();
    j_["status"] = "running";
    write();
  }

  Json& operator[](const std::string& key) { return j_[key]; }

  void finalize(const std::string& status, const std::string& message = "") {
    j_["finished"] = utc_timestamp();
    j_["status"] = status;
    if (!message.empty()) j_["message"] = message;
    write();
  }

  void write() const {
    const fs::path tmp = path_.string() + ".tmp";
    {
      std::ofstream f(tmp);
      if (!f) throw IoError("cannot write '" + tmp.string() + "'");
      f << j_.dump(2) << '\n';
    }
    fs::rename(tmp, path_);
  }

 private:
  fs::path path_;
  Json j_;
};

/// Creates `dir`; an existing non-empty directory is refused unless `force`,
/// in which case it is cleared.
inline void prepare_output_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) throw IoError("output directory '" + dir.string() + "' exists; use --force to overwrite");
      for (const auto& e : fs::directory_iterator(dir)) fs::remove_all(e.path());
    }
  }
  fs::create_directories(dir);
}

// -------------------------------------------------------------- simulate

struct SimulateResult {
  PairedRunResult run;
  double mass_drift = 0.0;
  std::size_t snapshots = 0;
};

inline double film_mass(const CoupledSimulation& s) {
  const Field& h = s.hydro().h;
  if (s.grid().periodic()) return h.sum() * s.grid().dx();
  // trapezoid on the open grid
  return (h.sum() - 0.5 * (h[0] + h[h.size() - 1])) * s.grid().dx();
}

inline void write_profiles(const fs::path& path, const FluxSnapshot& snap,
                           const std::vector<std::string>& names, const Field& q) {
  std::vector<std::string> cols{"x", "h", "q"};
  for (const auto& n : names) {
    cols.push_back("theta_" + n);
    cols.push_back("interface_flux_" + n);
    cols.push_back("wall_flux_" + n);
  }
  ColumnTable t(cols);
  for (Eigen::Index i = 0; i < snap.x.size(); ++i) {
    std::vector<double> row{snap.x[i], snap.h[i], q[i]};
    for (std::size_t k = 0; k < names.size(); ++k) {
      row.push_back(snap.theta[k][i]);
      row.push_back(snap.interface[k][i]);
      row.push_back(snap.wall[k][i]);
    }
    t.add_row(row);
  }
  t.save(path.string());
}

/// Spin-up, then the paired thermal run, writing diagnostics.tsv,
/// profiles_NNNN.tsv, fourier_NNNN.{tsv,bin}, summary.tsv and manifest.json.
inline SimulateResult simulate(const RunConfig& c, const fs::path& out, RunManifest& manifest) {
  const PairedRunSpec& spec = c.spec;
  const DimensionlessGroups& g = c.groups;
  const HydroState flow = spec.spinup_time > 0.0 ? spin_up(spec) : initial_flow(spec);
  const double duration = spec.thermal_time ? *spec.thermal_time : thermal_duration(g.pe, g.bi);
  manifest["thermal_duration"] = duration;
  manifest.write();

  std::vector<std::string> names;
  for (ThermalModel m : spec.models) names.push_back(to_string(m));
  if (spec.reference) names.emplace_back("fourier");

  std::vector<std::string> dcols{"t", "h_min", "h_max", "wave_speed"};
  for (const auto& n : names) {
    dcols.push_back("min_theta_" + n);
    dcols.push_back("nu_" + n);
  }
  if (spec.reference)
    for (ThermalModel m : spec.models) {
      dcols.push_back("h1_error_interface_" + to_string(m));
      dcols.push_back("h1_error_wall_" + to_string(m));
    }
  ColumnTable diag(dcols);

  SimulateResult res;
  std::optional<double> mass0;
  double mass_last = 0.0;
  double next_diag = 0.0;
  double next_snap = 0.0;
  double last_snap = -1.0;
  Field h_prev;
  double t_prev = 0.0;
  const bool periodic = spec.domain.kind == DomainKind::periodic;

  auto snapshot = [&](const CoupledSimulation& s) {
    const FluxSnapshot snap = flux_snapshot(s);
    char tag[32];
    std::snprintf(tag, sizeof tag, "%04zu", res.snapshots);
    write_profiles(out / ("profiles_" + std::string(tag) + ".tsv"), snap, names,
                   crop(s.hydro().q, s.domain()));
    if (spec.reference) {
      const auto& fr = dynamic_cast<const FourierRider&>(s.rider(s.rider_count() - 1));
      TemperatureField2D f;
      f.x = s.grid().coordinates();
      f.ybar = fr.solver().cheb().nodes();
      f.T = fr.as_field(s.thermal(s.rider_count() - 1));
      f.h = s.hydro().h;
      f.q = s.hydro().q;
      f.t = s.time();
      std::ofstream txt(out / ("fourier_" + std::string(tag) + ".tsv"));
      write_field_text(txt, f);
      save_field_binary((out / ("fourier_" + std::string(tag) + ".bin")).string(), f);
    }
    ++res.snapshots;
  };

  auto observe = [&](const CoupledSimulation& s) {
    if (!mass0) mass0 = film_mass(s);
    mass_last = film_mass(s);
    const double t = s.time();
    if (t + 1e-12 >= next_diag) {
      const FluxSnapshot snap = flux_snapshot(s);
      const Field& h = s.hydro().h;
      double c_wave = std::nan("");
      if (periodic && h_prev.size() == h.size() && t > t_prev) {
        try {
          c_wave = wave_speed(h_prev, h, t - t_prev, s.grid().dx());
        } catch (const DomainError&) {
        }
      }
      h_prev = h;
      t_prev = t;
      std::vector<double> row{t, h.minCoeff(), h.maxCoeff(), c_wave};
      for (std::size_t k = 0; k < names.size(); ++k) {
        row.push_back(snap.theta[k].minCoeff());
        row.push_back(g.bi > 0.0 ? nusselt_global(snap.interface[k], snap.h, g.bi) : std::nan(""));
      }
      if (spec.reference) {
        const std::size_t nm = spec.models.size();
        const BoundaryKind bc = periodic ? BoundaryKind::periodic : BoundaryKind::open;
        for (std::size_t k = 0; k < nm; ++k) {
          row.push_back(relative_error_h1(snap.interface[k], snap.interface[nm], s.grid().dx(), bc));
          row.push_back(relative_error_h1(snap.wall[k], snap.wall[nm], s.grid().dx(), bc));
        }
      }
      diag.add_row(row);
      next_diag += c.output.diagnostics_interval;
    }
    const bool due = c.output.snapshot_interval > 0.0 && t + 1e-12 >= next_snap;
    const bool last = t + 1e-12 >= duration;
    if (due || (last && t != last_snap)) {
      snapshot(s);
      last_snap = t;
      while (c.output.snapshot_interval > 0.0 && next_snap <= t + 1e-12)
        next_snap += c.output.snapshot_interval;
    }
  };

  try {
    res.run = run_paired(spec, g, flow, observe);
  } catch (...) {
    diag.save((out / "diagnostics.tsv").string());
    throw;
  }
  diag.save((out / "diagnostics.tsv").string());

  res.mass_drift = mass0 ? std::abs(mass_last - *mass0) / *mass0 : 0.0;

  ColumnTable summary({"rider", "min_theta", "nu_mean", "h1_error_interface", "h1_error_wall"});
  for (const auto& r : res.run.riders)
    summary.add_row({r.name, ColumnTable::format(r.min_theta), ColumnTable::format(r.nu_mean),
                     ColumnTable::format(r.error_interface), ColumnTable::format(r.error_wall)});
  summary.save((out / "summary.tsv").string());

  manifest["result"] = {{"t_end", res.run.t_end},
                        {"steps", res.run.steps},
                        {"rejections", res.run.rejections},
                        {"window_start", res.run.window_start},
                        {"steady_window", res.run.steady_window},
                        {"window_samples", res.run.window_samples},
                        {"hydro_stream_hash", hex64(res.run.hydro_hash)},
                        {"relative_mass_drift", res.mass_drift},
                        {"snapshots", res.snapshots}};
  return res;
}

/// Runs `simulate` inside a fresh run directory with manifest bookkeeping.
inline SimulateResult run_simulate(const RunConfig& c, const fs::path& out, bool force,
                                   const std::string& config_path = "") {
  prepare_output_dir(out, force);
  RunManifest manifest(out / "manifest.json", "simulate", c, config_path);
  try {
    SimulateResult r = simulate(c, out, manifest);
    manifest.finalize("completed");
    return r;
  } catch (const std::exception& e) {
    manifest.finalize("failed", e.what());
    throw;
  }
}

// ----------------------------------------------------------------- sweep

inline std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

inline const std::vector<std::string>& errormap_columns() {
  static const std::vector<std::string> cols{"index", "pe", "bi", "model", "error_interface",
                                             "error_wall", "min_theta", "nu", "status", "hydro_hash"};
  return cols;
}

inline void write_sample_file(const fs::path& path, const SampleOutcome& o) {
  ColumnTable t(errormap_columns());
  for (const auto& r : o.rows)
    t.add_row({std::to_string(o.index), ColumnTable::format(o.pe), ColumnTable::format(o.bi), r.model,
               ColumnTable::format(r.error_interface), ColumnTable::format(r.error_wall),
               ColumnTable::format(r.min_theta), ColumnTable::format(r.nu), r.ok ? "ok" : "failed",
               hex64(o.hydro_hash)});
  const fs::path tmp = path.string() + ".tmp";
  t.save(tmp.string());
  if (!o.ok) {
    std::ofstream m(path.string() + ".err");
    m << sanitize(o.message) << '\n';
  }
  fs::rename(tmp, path);
}

/// Reads the rows of a completed sample file.
inline std::vector<std::vector<std::string>> read_sample_rows(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, '\t')) cells.push_back(c);
    if (cells.size() != errormap_columns().size()) throw IoError("malformed sample file '" + path.string() + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

/// FNV-1a over the echoed configuration, excluding keys that do not affect
/// results (worker count).
inline std::string config_fingerprint(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : c.echo) {
    if (k == "sweep.workers") continue;
    for (char ch : k + "=" + v + ";") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  return hex64(h);
}

struct SweepRunResult {
  ErrorMap map;
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

inline ErrorSample parse_error_row(const std::vector<std::string>& r) {
  ErrorSample e;
  e.index = static_cast<std::size_t>(std::stoul(r[0]));
  e.pe = std::stod(r[1]);
  e.bi = std::stod(r[2]);
  e.model = r[3];
  e.error_interface = std::stod(r[4]);
  e.error_wall = std::stod(r[5]);
  e.min_theta = std::stod(r[6]);
  e.nu = std::stod(r[7]);
  e.ok = r[8] == "ok";
  return e;
}

inline void write_region(const fs::path& path, const std::vector<ErrorSample>& samples,
                         double threshold, std::size_t grid, bool use_wall, Json& record) {
  std::size_t valid = 0;
  for (const auto& s : samples)
    if (s.ok && std::isfinite(use_wall ? s.error_wall : s.error_interface)) ++valid;
  if (valid < 10) {
    record = {{"status", "insufficient_samples"}, {"valid_samples", valid}};
    return;
  }
  const Region r = region_threshold(samples, threshold, grid, use_wall);
  ColumnTable t({"polyline", "log10_pe", "log10_bi"});
  for (std::size_t p = 0; p < r.polylines.size(); ++p)
    for (const auto& pt : r.polylines[p])
      t.add_row({std::to_string(p), ColumnTable::format(pt.x), ColumnTable::format(pt.y)});
  t.save(path.string());
  record = {{"status", to_string(r.status)}, {"polylines", r.polylines.size()}, {"file", path.filename().string()}};
}

/// Resumable sweep: completed samples live in samples/NNNNN.tsv and are
/// skipped when the directory is reopened with the same configuration.
inline SweepRunResult run_sweep(const RunConfig& c, const fs::path& out, bool force,
                                const std::string& config_path = "", std::size_t workers = 0) {
  if (!c.spec.reference) throw UsageError("sweep: the reference solver is required for error maps");
  const std::string fingerprint = config_fingerprint(c);
  const fs::path sample_dir = out / "samples";
  bool resume = false;
  if (fs::exists(out / "manifest.json") && !force) {
    std::ifstream f(out / "manifest.json");
    Json old;
    try {
      old = Json::parse(f);
    } catch (const std::exception&) {
      throw IoError("existing manifest in '" + out.string() + "' is unreadable; use --force");
    }
    if (old.value("command", "") != "sweep" || old.value("fingerprint", "") != fingerprint)
      throw IoError("output directory '" + out.string() +
                    "' holds a different run; use --force to overwrite");
    resume = true;
  } else {
    prepare_output_dir(out, force);
  }
  fs::create_directories(sample_dir);

  if (workers == 0) workers = c.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  RunManifest manifest(out / "manifest.json", "sweep", c, config_path);
  manifest["fingerprint"] = fingerprint;
  manifest["seed"] = c.plan.seed;
  manifest["samples"] = c.plan.n_samples;
  manifest["workers"] = workers;
  Json dims = Json::array();
  for (const auto& d : c.plan.dims)
    dims.push_back({{"name", d.name}, {"median", d.median}, {"log_sigma", d.log_sigma}, {"lo", d.lo}, {"hi", d.hi}});
  manifest["dims"] = dims;
  manifest.write();

  auto sample_path = [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.tsv", i);
    return sample_dir / name;
  };

  SweepRunResult res;
  try {
    std::vector<bool> skip(c.plan.n_samples, false);
    if (resume)
      for (std::size_t i = 0; i < skip.size(); ++i) skip[i] = fs::exists(sample_path(i));
    for (bool s : skip) res.skipped += s ? 1 : 0;
    const auto outcomes = execute_sweep(c.plan, c.spec, workers, skip, [&](const SampleOutcome& o) {
      write_sample_file(sample_path(o.index), o);
    });
    res.computed = outcomes.size();

    ColumnTable map(errormap_columns());
    Json failures = Json::array();
    for (std::size_t i = 0; i < c.plan.n_samples; ++i) {
      for (const auto& row : read_sample_rows(sample_path(i))) {
        map.add_row(row);
        ErrorSample e = parse_error_row(row);
        if (!e.ok) {
          std::ifstream m(sample_path(i).string() + ".err");
          std::getline(m, e.message);
        }
        res.map.samples.push_back(e);
      }
    }
    std::map<std::size_t, std::string> failed;
    for (const auto& e : res.map.samples)
      if (!e.ok) failed[e.index] = e.message;
    for (const auto& [i, msg] : failed) failures.push_back({{"index", i}, {"message", msg}});
    res.failed = failed.size();
    map.save((out / "errormap.tsv").string());

    Json regions = Json::object();
    for (ThermalModel m : c.spec.models) {
      const std::string name = to_string(m);
      const auto rows = res.map.for_model(name);
      for (bool wall : {false, true}) {
        const std::string key = name + (wall ? "_wall" : "_interface");
        Json rec;
        write_region(out / ("region_" + key + ".tsv"), rows, c.region_threshold, c.region_grid, wall, rec);
        regions[key] = rec;
      }
    }
    manifest["regions"] = regions;
    manifest["failures"] = failures;
    manifest["computed"] = res.computed;
    manifest["resumed_skipped"] = res.skipped;
    manifest.finalize("completed");
  } catch (const std::exception& e) {
    manifest.finalize("failed", e.what());
    throw;
  }
  return res;
}

}  // namespace filmheat
