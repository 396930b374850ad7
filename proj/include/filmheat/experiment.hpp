#pragma once

// Paired runs: one hydrodynamic trajectory, several averaged models and
// (optionally) the Fourier reference riding on it, with flux errors
// accumulated over the closing window of the run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "filmheat/diagnostics.hpp"
#include "filmheat/domain.hpp"
#include "filmheat/linear_analysis.hpp"
#include "filmheat/time_integration.hpp"

namespace filmheat {

struct PairedRunSpec {
  DomainSpec domain;
  HydroModel hydro = HydroModel::vila;
  double re = 15.0;
  double we = 266.0;
  double ct = 0.0;
  std::vector<ThermalModel> models{ThermalModel::theta, ThermalModel::theta_phi};
  bool reference = true;
  std::size_t n_cheb = 16;
  StepSettings step;
  double spinup_time = 800.0;      ///< hydro-only run before the thermal fields start
  double perturbation = 0.01;      ///< amplitude of the initial thickness perturbation
  int perturbation_mode = 1;       ///< number of wavelengths in the periodic box
  std::optional<double> thermal_time;  ///< defaults to thermal_duration()
  double window_fraction = 0.2;
  double sample_interval = 0.5;
};

/// Long enough for the slowest cross-film mode of the thickest film to
/// relax by e^-4, clamped to [100, t_max].
inline double thermal_duration(double pe, double bi, double h_ref = 1.5, double t_max = 2000.0) {
  const double l1 = relaxation_roots(bi * h_ref, 1).front();
  return std::clamp(4.0 * 3.0 * pe * h_ref * h_ref / (l1 * l1), 100.0, t_max);
}

/// FNV-1a over the bytes of the flow fields.
inline std::uint64_t hash_fields(const HydroState& s, std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t hsh = seed;
  auto mix = [&](const Field& f) {
    const auto* p = reinterpret_cast<const unsigned char*>(f.data());
    for (std::size_t i = 0; i < static_cast<std::size_t>(f.size()) * sizeof(double); ++i) {
      hsh ^= p[i];
      hsh *= 1099511628211ULL;
    }
  };
  mix(s.h);
  mix(s.q);
  return hsh;
}

/// Initial flow: Nusselt film with a small sinusoidal thickness perturbation
/// (periodic) or the flat film (open plate, waves come from the inlet).
inline HydroState initial_flow(const PairedRunSpec& spec) {
  const Grid1D grid = spec.domain.grid();
  const Field x = grid.coordinates();
  HydroState s;
  s.h = Field::Ones(x.size());
  if (spec.domain.kind == DomainKind::periodic && spec.perturbation != 0.0) {
    const double k = 2.0 * std::numbers::pi * spec.perturbation_mode / spec.domain.length;
    s.h += spec.perturbation * (k * x).sin();
  }
  s.q = s.h.cube() / 3.0;
  return s;
}

/// Hydro-only spin-up; independent of Pe and Bi, so sweeps compute it once.
inline HydroState spin_up(const PairedRunSpec& spec) {
  const DimensionlessGroups g = simulation_groups(spec.re, spec.we, spec.ct, 1.0, 0.0);
  CoupledSimulation sim(spec.domain, spec.hydro, g, spec.step);
  sim.set_hydro(initial_flow(spec), 0.0);
  sim.run_to_time(spec.spinup_time);
  return sim.hydro();
}

struct RiderSummary {
  std::string name;
  double min_theta = 0.0;          ///< minimum over the window and useful region
  double nu_mean = 0.0;            ///< window-averaged global Nusselt number
  double error_interface = std::nan("");  ///< windowed relative H1 error vs reference
  double error_wall = std::nan("");
};

struct PairedRunResult {
  std::vector<RiderSummary> riders;
  std::uint64_t hydro_hash = 0;  ///< FNV-1a over the (h, q) stream seen by the riders
  std::size_t steps = 0;
  std::size_t rejections = 0;
  std::size_t window_samples = 0;
  double window_start = 0.0;
  bool steady_window = true;  ///< false when an open run never met the drift test
  double t_end = 0.0;
};

/// Snapshot of fluxes on the useful region for every rider.
struct FluxSnapshot {
  double t = 0.0;
  Field x;
  Field h;
  std::vector<Field> theta;
  std::vector<Field> interface;
  std::vector<Field> wall;
};

inline FluxSnapshot flux_snapshot(const CoupledSimulation& sim) {
  const StageFlow f = sim.current_flow();
  const DomainSpec& d = sim.domain();
  FluxSnapshot s;
  s.t = sim.time();
  s.x = crop(sim.grid().coordinates(), d);
  s.h = crop(f.kin.h, d);
  for (std::size_t k = 0; k < sim.rider_count(); ++k) {
    const ThermalRider& r = sim.rider(k);
    const Field& y = sim.thermal(k);
    s.theta.push_back(crop(r.surface_theta(y), d));
    s.interface.push_back(crop(r.interface_flux(f, y), d));
    s.wall.push_back(crop(r.wall_flux(f, y), d));
  }
  return s;
}

using SnapshotObserver = std::function<void(const CoupledSimulation&)>;

namespace detail {

struct WindowSample {
  double t = 0.0;
  std::vector<double> min_theta;
  std::vector<double> nu;
  std::vector<double> err2_i, ref2_i, err2_w, ref2_w;
};

/// Start of the statistically steady window of an open run: the first
/// forcing period after which the reference Nu never drifts by more than
/// `tol` between consecutive periods. Returns nullopt when never reached.
inline std::optional<double> steady_window_start(const std::vector<WindowSample>& s,
                                                 std::size_t ref, double period, double tol) {
  if (s.empty() || !(period > 0.0)) return std::nullopt;
  std::vector<double> mean;
  std::vector<double> start;
  double t0 = s.front().t;
  double acc = 0.0;
  std::size_t cnt = 0;
  for (const auto& w : s) {
    if (w.t >= t0 + period - 1e-12) {
      if (cnt > 0) {
        mean.push_back(acc / static_cast<double>(cnt));
        start.push_back(t0);
      }
      while (w.t >= t0 + period - 1e-12) t0 += period;
      acc = 0.0;
      cnt = 0;
    }
    acc += w.nu[ref];
    ++cnt;
  }
  if (mean.size() < 3) return std::nullopt;
  std::size_t first = mean.size();
  for (std::size_t p = mean.size() - 1; p >= 1; --p) {
    if (std::abs(mean[p] - mean[p - 1]) > tol * std::abs(mean[p])) break;
    first = p;
  }
  if (first >= mean.size() - 1) return std::nullopt;
  return start[first];
}

}  // namespace detail

/// Runs the thermal riders on a spun-up flow. Rider order: models as listed,
/// then the reference when requested. Errors and averages cover the final
/// window_fraction of the run on periodic boxes; open plates use the
/// statistically steady window (reference Nu drift below 0.5% per forcing
/// period), falling back to the final fraction.
inline PairedRunResult run_paired(const PairedRunSpec& spec, const DimensionlessGroups& g,
                                  const HydroState& flow, const SnapshotObserver& observer = {}) {
  CoupledSimulation sim(spec.domain, spec.hydro, g, spec.step);
  sim.set_hydro(flow, 0.0);
  for (ThermalModel m : spec.models) sim.add_model(m);
  if (spec.reference) sim.add_fourier(spec.n_cheb);
  const std::size_t nm = spec.models.size();
  const std::size_t nr = sim.rider_count();

  const bool open = spec.domain.kind == DomainKind::open;
  const double duration = spec.thermal_time ? *spec.thermal_time : thermal_duration(g.pe, g.bi);
  const double tail_start = duration * (1.0 - spec.window_fraction);
  const BoundaryKind bc = open ? BoundaryKind::open : BoundaryKind::periodic;
  const double dx = sim.grid().dx();

  std::vector<detail::WindowSample> samples;
  std::uint64_t stream_hash = hash_fields(sim.hydro());
  double next_sample = open ? 0.0 : tail_start;
  auto sample = [&](const CoupledSimulation& s) {
    const FluxSnapshot snap = flux_snapshot(s);
    detail::WindowSample w;
    w.t = s.time();
    for (std::size_t k = 0; k < nr; ++k) {
      w.min_theta.push_back(snap.theta[k].minCoeff());
      w.nu.push_back(g.bi > 0.0 ? nusselt_global(snap.interface[k], snap.h, g.bi) : std::nan(""));
    }
    if (spec.reference) {
      for (std::size_t k = 0; k < nm; ++k) {
        const double ei = h1_norm(snap.interface[k] - snap.interface[nm], dx, bc);
        const double ri = h1_norm(snap.interface[nm], dx, bc);
        const double ew = h1_norm(snap.wall[k] - snap.wall[nm], dx, bc);
        const double rw = h1_norm(snap.wall[nm], dx, bc);
        w.err2_i.push_back(ei * ei);
        w.ref2_i.push_back(ri * ri);
        w.err2_w.push_back(ew * ew);
        w.ref2_w.push_back(rw * rw);
      }
    }
    samples.push_back(std::move(w));
  };

  sim.run_to_time(duration, [&](const CoupledSimulation& s) {
    stream_hash = hash_fields(s.hydro(), stream_hash);
    if (s.time() + 1e-12 >= next_sample) {
      sample(s);
      next_sample += spec.sample_interval;
    }
    if (observer) observer(s);
  });
  if (samples.empty()) sample(sim);

  PairedRunResult out;
  out.window_start = tail_start;
  if (open) {
    const double period = spec.domain.inlet.amplitude > 0.0 && spec.domain.inlet.frequency > 0.0
                              ? 1.0 / spec.domain.inlet.frequency
                              : 0.0;
    const std::size_t ref = spec.reference ? nm : 0;
    const auto start = nr > 0 && g.bi > 0.0
                           ? detail::steady_window_start(samples, ref, period, 0.005)
                           : std::nullopt;
    out.steady_window = start.has_value();
    if (start) out.window_start = *start;
  }

  std::vector<double> min_theta(nr, std::numeric_limits<double>::infinity());
  std::vector<double> nu_sum(nr, 0.0);
  std::vector<double> ei(nm, 0.0), ri(nm, 0.0), ew(nm, 0.0), rw(nm, 0.0);
  std::size_t used = 0;
  for (const auto& w : samples) {
    if (w.t + 1e-12 < out.window_start && samples.size() > 1) continue;
    for (std::size_t k = 0; k < nr; ++k) {
      min_theta[k] = std::min(min_theta[k], w.min_theta[k]);
      nu_sum[k] += w.nu[k];
    }
    for (std::size_t k = 0; k < w.err2_i.size(); ++k) {
      ei[k] += w.err2_i[k];
      ri[k] += w.ref2_i[k];
      ew[k] += w.err2_w[k];
      rw[k] += w.ref2_w[k];
    }
    ++used;
  }
  if (used == 0) throw NumericalError("run_paired: no samples inside the averaging window");

  for (std::size_t k = 0; k < nr; ++k) {
    RiderSummary r;
    r.name = sim.rider(k).name();
    r.min_theta = min_theta[k];
    r.nu_mean = nu_sum[k] / static_cast<double>(used);
    if (k < nm && spec.reference) {
      if (!(ri[k] > 0.0) || !(rw[k] > 0.0))
        throw DomainError("run_paired: reference flux has zero norm");
      r.error_interface = std::sqrt(ei[k] / ri[k]);
      r.error_wall = std::sqrt(ew[k] / rw[k]);
    }
    out.riders.push_back(r);
  }
  out.hydro_hash = stream_hash;
  out.steps = sim.steps();
  out.rejections = sim.rejections();
  out.window_samples = used;
  out.t_end = sim.time();
  return out;
}

}  // namespace filmheat
