#pragma once

// INI run configuration with sections [groups], [domain], [solver], [sweep].
// Every problem found is reported with its section.key path.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "filmheat/error.hpp"
#include "filmheat/experiment.hpp"
#include "filmheat/models.hpp"
#include "filmheat/parameters.hpp"
#include "filmheat/sweep.hpp"

namespace filmheat {

struct OutputSettings {
  double diagnostics_interval = 1.0;  ///< time between diagnostics records
  double snapshot_interval = 0.0;     ///< 0: final snapshot only
};

struct RunConfig {
  DimensionlessGroups groups;
  ScalingReport scaling;
  PairedRunSpec spec;
  OutputSettings output;
  SweepPlan plan;
  std::size_t workers = 0;      ///< 0: hardware concurrency
  double region_threshold = 0.05;
  std::size_t region_grid = 64;
  std::map<std::string, std::string> echo;  ///< section.key -> raw value
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(const boost::property_tree::ptree& tree) : tree_(tree) {
    static const std::map<std::string, std::set<std::string>> known{
        {"groups", {"re", "we", "ct", "beta", "pe", "pr", "bi", "bi_tilde", "ka", "nu", "gravity"}},
        {"domain",
         {"kind", "length", "length_unit", "nx", "buffer_length", "inlet_amplitude",
          "inlet_frequency", "frequency_unit", "thermal_inlet", "perturbation",
          "perturbation_mode"}},
        {"solver",
         {"hydro", "models", "reference", "n_cheb", "courant", "dt_max", "h_min", "spinup_time",
          "thermal_time", "window_fraction", "sample_interval", "diagnostics_interval",
          "snapshot_interval"}},
        {"sweep",
         {"samples", "seed", "workers", "pe_median", "pe_sigma", "pe_min", "pe_max", "bi_median",
          "bi_sigma", "bi_min", "bi_max", "threshold", "grid"}}};
    for (const auto& [section, body] : tree_) {
      const auto it = known.find(section);
      if (it == known.end()) {
        errors_.push_back(section + ": unknown section");
        continue;
      }
      for (const auto& [key, value] : body) {
        if (!it->second.contains(key)) errors_.push_back(section + "." + key + ": unknown key");
        echo_[section + "." + key] = value.get_value<std::string>();
      }
    }
  }

  [[nodiscard]] bool has(const std::string& path) const {
    return tree_.get_optional<std::string>(path).has_value();
  }

  std::optional<double> number(const std::string& path) {
    const auto v = tree_.get_optional<std::string>(path);
    if (!v) return std::nullopt;
    try {
      std::size_t pos = 0;
      const double d = std::stod(*v, &pos);
      if (pos != trim(*v).size() || !std::isfinite(d)) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      errors_.push_back(path + ": expected a number, got '" + *v + "'");
      return std::nullopt;
    }
  }

  double number(const std::string& path, double fallback) {
    return number(path).value_or(fallback);
  }

  double positive(const std::string& path, double fallback) {
    const double v = number(path, fallback);
    if (!(v > 0.0)) errors_.push_back(path + ": must be positive");
    return v;
  }

  double nonnegative(const std::string& path, double fallback) {
    const double v = number(path, fallback);
    if (!(v >= 0.0)) errors_.push_back(path + ": must be >= 0");
    return v;
  }

  std::size_t count(const std::string& path, std::size_t fallback, std::size_t min) {
    const auto v = number(path);
    if (!v) return fallback;
    if (*v < static_cast<double>(min) || std::floor(*v) != *v) {
      errors_.push_back(path + ": must be an integer >= " + std::to_string(min));
      return fallback;
    }
    return static_cast<std::size_t>(*v);
  }

  std::string text(const std::string& path, const std::string& fallback) {
    const auto v = tree_.get_optional<std::string>(path);
    return v ? trim(*v) : fallback;
  }

  std::string choice(const std::string& path, const std::string& fallback,
                     const std::set<std::string>& allowed) {
    const std::string v = text(path, fallback);
    if (!allowed.contains(v)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      errors_.push_back(path + ": '" + v + "' is not one of {" + list + "}");
      return fallback;
    }
    return v;
  }

  bool flag(const std::string& path, bool fallback) {
    const auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    const std::string s = trim(*v);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    errors_.push_back(path + ": expected a boolean, got '" + s + "'");
    return fallback;
  }

  void error(const std::string& msg) { errors_.push_back(msg); }
  [[nodiscard]] const std::vector<std::string>& errors() const { return errors_; }
  [[nodiscard]] const std::map<std::string, std::string>& echo() const { return echo_; }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::vector<std::string> errors_;
  std::map<std::string, std::string> echo_;
};

}  // namespace detail

/// Parses a comma-separated thermal model list, e.g. "theta,theta-phi".
inline std::vector<ThermalModel> parse_model_list(const std::string& list) {
  std::vector<ThermalModel> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::ConfigReader::trim(item);
    if (item.empty()) continue;
    out.push_back(parse_thermal_model(item));
  }
  return out;
}

inline RunConfig parse_config(const boost::property_tree::ptree& tree) {
  detail::ConfigReader in(tree);
  RunConfig c;

  // [groups]
  const double re = in.positive("groups.re", 15.0);
  const double nu = in.positive("groups.nu", 1.0e-6);
  const double gravity = in.positive("groups.gravity", 9.81);
  double beta = 90.0;
  if (in.has("groups.beta")) {
    beta = in.number("groups.beta", 90.0);
    if (!(beta > 0.0 && beta <= 90.0)) in.error("groups.beta: must lie in (0, 90]");
  }
  if (in.has("groups.ka")) {
    const double ka = in.positive("groups.ka", 1.0);
    const double pr = in.positive("groups.pr", 7.0);
    const double bit = in.positive("groups.bi_tilde", 0.1);
    std::optional<double> we;
    if (in.has("groups.we")) we = in.positive("groups.we", 266.0);
    for (const char* k : {"groups.pe", "groups.bi", "groups.ct"})
      if (in.has(k)) in.error(std::string(k) + ": not allowed together with groups.ka");
    if (in.errors().empty()) c.groups = derive_groups(ka, re, pr, bit, beta, we);
  } else {
    const double we = in.nonnegative("groups.we", 266.0);
    double ct = in.has("groups.beta") ? cot_degrees(beta) : 0.0;
    if (in.has("groups.ct")) ct = in.nonnegative("groups.ct", 0.0);
    double pe = 105.0;
    if (in.has("groups.pe") && in.has("groups.pr")) in.error("groups.pr: give either pe or pr");
    if (in.has("groups.pr")) pe = in.positive("groups.pr", 7.0) * re;
    else pe = in.positive("groups.pe", 105.0);
    double bi = 0.1;
    if (in.has("groups.bi") && in.has("groups.bi_tilde")) in.error("groups.bi_tilde: give either bi or bi_tilde");
    if (in.has("groups.bi_tilde")) bi = in.nonnegative("groups.bi_tilde", 0.1) * nusselt_length_ratio(re);
    else bi = in.nonnegative("groups.bi", 0.1);
    if (in.errors().empty()) c.groups = simulation_groups(re, we, ct, pe, bi);
  }
  if (in.errors().empty()) c.scaling = scaling_report(re, c.groups.beta_deg, nu, gravity);

  // [domain]
  DomainSpec& d = c.spec.domain;
  const std::string kind = in.choice("domain.kind", "periodic", {"periodic", "open"});
  d.kind = kind == "open" ? DomainKind::open : DomainKind::periodic;
  const std::string lunit = in.choice("domain.length_unit", "nondim", {"nondim", "cm"});
  const double to_nondim_length = lunit == "cm" ? 0.01 / c.scaling.h_n : 1.0;
  d.length = in.positive("domain.length", d.kind == DomainKind::open ? 300.0 : 90.0) *
             (lunit == "cm" && c.scaling.h_n > 0.0 ? to_nondim_length : 1.0);
  if (lunit == "cm" && !in.has("domain.length")) d.length = 5.0 * to_nondim_length;
  d.nx = in.count("domain.nx", d.kind == DomainKind::open ? 1024 : 512, 64);
  if (d.kind == DomainKind::open) {
    double buffer = in.positive("domain.buffer_length", lunit == "cm" ? 5.0 : 0.2 * d.length);
    if (lunit == "cm") buffer *= to_nondim_length;
    d.useful_length = d.length - buffer;
    d.inlet.amplitude = in.nonnegative("domain.inlet_amplitude", 0.1);
    const std::string funit = in.choice("domain.frequency_unit", "nondim", {"nondim", "hz"});
    const double f = in.nonnegative("domain.inlet_frequency", funit == "hz" ? 10.0 : 0.05);
    d.inlet.frequency = funit == "hz" ? f * c.scaling.time_scale() : f;
    d.thermal_inlet = in.choice("domain.thermal_inlet", "equilibrium", {"equilibrium", "hot"}) == "hot"
                          ? ThermalInlet::hot
                          : ThermalInlet::equilibrium;
  } else {
    d.useful_length = d.length;
    for (const char* k : {"domain.buffer_length", "domain.inlet_amplitude", "domain.inlet_frequency",
                          "domain.frequency_unit", "domain.thermal_inlet"})
      if (in.has(k)) in.error(std::string(k) + ": only meaningful for open domains");
  }
  c.spec.perturbation = in.number("domain.perturbation", 0.01);
  c.spec.perturbation_mode = static_cast<int>(in.count("domain.perturbation_mode", 1, 1));
  try {
    d.validate();
  } catch (const UsageError& e) {
    in.error(std::string(e.what()));
  }

  // [solver]
  c.spec.re = c.groups.re;
  c.spec.we = c.groups.we;
  c.spec.ct = c.groups.ct;
  try {
    c.spec.hydro = parse_hydro_model(in.text("solver.hydro", "vila"));
  } catch (const UsageError& e) {
    in.error(std::string("solver.hydro: ") + e.what());
  }
  try {
    c.spec.models = parse_model_list(in.text("solver.models", "theta,theta-phi"));
  } catch (const UsageError& e) {
    in.error(std::string("solver.models: ") + e.what());
  }
  c.spec.reference = in.flag("solver.reference", true);
  c.spec.n_cheb = in.count("solver.n_cheb", 16, 4);
  c.spec.step.courant = in.positive("solver.courant", 0.5);
  c.spec.step.dt_max = in.positive("solver.dt_max", 0.05);
  c.spec.step.h_min = in.positive("solver.h_min", 1e-3);
  c.spec.spinup_time =
      in.nonnegative("solver.spinup_time", d.kind == DomainKind::open ? 2.0 * d.length : 800.0);
  const std::string tt = in.text("solver.thermal_time", "auto");
  if (tt != "auto") c.spec.thermal_time = in.positive("solver.thermal_time", 100.0);
  c.spec.window_fraction = in.positive("solver.window_fraction", 0.2);
  if (c.spec.window_fraction > 1.0) in.error("solver.window_fraction: must be <= 1");
  c.spec.sample_interval = in.positive("solver.sample_interval", 0.5);
  c.output.diagnostics_interval = in.positive("solver.diagnostics_interval", 1.0);
  c.output.snapshot_interval = in.nonnegative("solver.snapshot_interval", 0.0);

  // [sweep]
  c.plan.n_samples = in.count("sweep.samples", d.kind == DomainKind::open ? 64 : 640, 1);
  c.plan.seed = static_cast<std::uint64_t>(in.count("sweep.seed", 1, 0));
  c.workers = in.count("sweep.workers", 0, 0);
  LogNormalDim pe{"pe", in.positive("sweep.pe_median", 105.0), in.positive("sweep.pe_sigma", std::log(1e4) / 4.0),
                  in.nonnegative("sweep.pe_min", 0.1), in.positive("sweep.pe_max", 1e3)};
  LogNormalDim bi{"bi", in.positive("sweep.bi_median", 0.1), in.positive("sweep.bi_sigma", std::log(1e6) / 4.0),
                  in.nonnegative("sweep.bi_min", 1e-3), in.positive("sweep.bi_max", 1e3)};
  c.plan.dims = {pe, bi};
  for (const auto& dim : c.plan.dims) {
    try {
      dim.validate();
    } catch (const UsageError& e) {
      in.error(std::string(e.what()));
    }
  }
  c.region_threshold = in.positive("sweep.threshold", 0.05);
  c.region_grid = in.count("sweep.grid", 64, 2);

  c.echo = in.echo();
  if (!in.errors().empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : in.errors()) msg += "\n  " + e;
    throw UsageError(msg);
  }
  return c;
}

inline boost::property_tree::ptree read_config_tree(std::istream& is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  return tree;
}

/// Loads `path` and applies section.key overrides before validation.
inline RunConfig load_config(const std::string& path,
                             const std::map<std::string, std::string>& overrides = {}) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file '" + path + "'");
  boost::property_tree::ptree tree = read_config_tree(f);
  for (const auto& [key, value] : overrides) tree.put(key, value);
  return parse_config(tree);
}

inline RunConfig parse_config_string(const std::string& text,
                                     const std::map<std::string, std::string>& overrides = {}) {
  std::istringstream f(text);
  boost::property_tree::ptree tree = read_config_tree(f);
  for (const auto& [key, value] : overrides) tree.put(key, value);
  return parse_config(tree);
}

}  // namespace filmheat
