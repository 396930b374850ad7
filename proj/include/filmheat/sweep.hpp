#pragma once

// Latin-hypercube sweeps over (Pe, Bi), batch execution of paired runs and
// extraction of the region where the error stays below a threshold.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "filmheat/error.hpp"
#include "filmheat/experiment.hpp"

namespace filmheat {

/// Log-normal marginal, optionally truncated to [lo, hi].
struct LogNormalDim {
  std::string name;
  double median = 1.0;
  double log_sigma = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(median > 0.0)) throw UsageError("sweep: median of '" + name + "' must be positive");
    if (!(log_sigma > 0.0)) throw UsageError("sweep: log-sigma of '" + name + "' must be positive");
    if (!(lo >= 0.0 && hi > lo)) throw UsageError("sweep: bad truncation range for '" + name + "'");
  }

  /// Inverse CDF of the (truncated) marginal.
  [[nodiscard]] double quantile(double u) const {
    const boost::math::normal_distribution<double> nd;
    const double plo = lo > 0.0 ? boost::math::cdf(nd, (std::log(lo) - std::log(median)) / log_sigma) : 0.0;
    const double phi = std::isfinite(hi) ? boost::math::cdf(nd, (std::log(hi) - std::log(median)) / log_sigma) : 1.0;
    const double p = std::clamp(plo + u * (phi - plo), 1e-300, 1.0 - 1e-16);
    return median * std::exp(log_sigma * boost::math::quantile(nd, p));
  }

  /// CDF of the (truncated) marginal.
  [[nodiscard]] double cdf(double x) const {
    const boost::math::normal_distribution<double> nd;
    auto f = [&](double v) {
      if (v <= 0.0) return 0.0;
      if (!std::isfinite(v)) return 1.0;
      return boost::math::cdf(nd, (std::log(v) - std::log(median)) / log_sigma);
    };
    const double plo = lo > 0.0 ? f(lo) : 0.0;
    const double phi = f(hi);
    return std::clamp((f(x) - plo) / (phi - plo), 0.0, 1.0);
  }
};

struct SweepPlan {
  std::size_t n_samples = 640;
  std::vector<LogNormalDim> dims;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_samples < 1) throw UsageError("sweep: at least one sample required");
    if (dims.empty()) throw UsageError("sweep: no sampled dimensions");
    for (const auto& d : dims) d.validate();
  }

  /// Default (Pe, Bi) plan; medians on the reference case Pe = 105, Bi = 0.1.
  static SweepPlan pe_bi(std::size_t n = 640, std::uint64_t seed = 1) {
    SweepPlan p;
    p.n_samples = n;
    p.seed = seed;
    p.dims = {{"pe", 105.0, std::log(1e4) / 4.0, 0.1, 1e3}, {"bi", 0.1, std::log(1e6) / 4.0, 1e-3, 1e3}};
    return p;
  }
};

/// Uniform in [0, 1) from the top 53 bits of the generator.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// samples[i][d]: one point per stratum of every marginal, strata matched
/// across dimensions by seeded permutations, uniform jitter inside strata.
inline std::vector<std::vector<double>> lhs_sample(const SweepPlan& plan) {
  plan.validate();
  const std::size_t n = plan.n_samples;
  std::mt19937_64 rng(plan.seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(plan.dims.size()));
  for (std::size_t d = 0; d < plan.dims.size(); ++d) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with our own index draw keeps the sequence library-independent
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
      std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[i]) + unit_uniform(rng)) / static_cast<double>(n);
      out[i][d] = plan.dims[d].quantile(u);
    }
  }
  return out;
}

/// One row of an error map.
struct ErrorSample {
  std::size_t index = 0;
  double pe = 0.0;
  double bi = 0.0;
  std::string model;
  double error_interface = std::nan("");
  double error_wall = std::nan("");
  double min_theta = std::nan("");
  double nu = std::nan("");
  bool ok = true;
  std::string message;
};

struct ErrorMap {
  std::vector<ErrorSample> samples;

  [[nodiscard]] std::vector<ErrorSample> for_model(const std::string& model) const {
    std::vector<ErrorSample> out;
    for (const auto& s : samples)
      if (s.model == model) out.push_back(s);
    return out;
  }
};

/// Result of one sampled point: model rows plus the reference summary.
struct SampleOutcome {
  std::size_t index = 0;
  double pe = 0.0;
  double bi = 0.0;
  std::vector<ErrorSample> rows;
  std::uint64_t hydro_hash = 0;
  bool ok = true;
  std::string message;
};

inline SampleOutcome run_sample(const PairedRunSpec& spec, const HydroState& flow,
                                std::size_t index, double pe, double bi) {
  SampleOutcome o;
  o.index = index;
  o.pe = pe;
  o.bi = bi;
  try {
    const DimensionlessGroups g = simulation_groups(spec.re, spec.we, spec.ct, pe, bi);
    const PairedRunResult r = run_paired(spec, g, flow);
    o.hydro_hash = r.hydro_hash;
    for (std::size_t k = 0; k < spec.models.size(); ++k) {
      const RiderSummary& s = r.riders[k];
      ErrorSample e;
      e.index = index;
      e.pe = pe;
      e.bi = bi;
      e.model = s.name;
      e.error_interface = s.error_interface;
      e.error_wall = s.error_wall;
      e.min_theta = s.min_theta;
      e.nu = s.nu_mean;
      o.rows.push_back(e);
    }
  } catch (const std::exception& ex) {
    o.ok = false;
    o.message = ex.what();
    for (ThermalModel m : spec.models) {
      ErrorSample e;
      e.index = index;
      e.pe = pe;
      e.bi = bi;
      e.model = to_string(m);
      e.ok = false;
      e.message = ex.what();
      o.rows.push_back(e);
    }
  }
  return o;
}

/// Runs every sample not listed in `skip` on a pool of `workers` threads.
/// Results are ordered by sample index whatever the scheduling; `on_done`
/// is called (serialised) as each sample finishes.
inline std::vector<SampleOutcome> execute_sweep(
    const SweepPlan& plan, const PairedRunSpec& spec, std::size_t workers,
    const std::vector<bool>& skip = {},
    const std::function<void(const SampleOutcome&)>& on_done = {}) {
  if (workers < 1) throw UsageError("sweep: worker budget must be >= 1");
  const auto points = lhs_sample(plan);
  std::vector<SampleOutcome> results(points.size());
  if (spec.models.empty()) return {};
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (skip.empty() || !skip[i]) todo.push_back(i);
  if (todo.empty()) return {};
  const HydroState flow = spin_up(spec);

  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const std::size_t i = todo[k];
      results[i] = run_sample(spec, flow, i, points[i][0], points[i][1]);
      if (on_done) {
        const std::lock_guard<std::mutex> lock(done_mutex);
        on_done(results[i]);
      }
    }
  };
  const std::size_t n_threads = std::min(workers, std::max<std::size_t>(todo.size(), 1));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::vector<SampleOutcome> out;
  for (std::size_t i : todo) out.push_back(std::move(results[i]));
  return out;
}

enum class RegionStatus { boundary, all_below, all_above };

inline std::string to_string(RegionStatus s) {
  switch (s) {
    case RegionStatus::boundary: return "boundary";
    case RegionStatus::all_below: return "all_below";
    case RegionStatus::all_above: return "all_above";
  }
  return "?";
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Threshold contour in (log10 Pe, log10 Bi).
struct Region {
  RegionStatus status = RegionStatus::boundary;
  std::vector<std::vector<Point2>> polylines;
};

/// Nearest-neighbour interpolation of the error onto a log-log grid
/// followed by marching squares at `threshold`; grid nodes far from every
/// sample are masked.
inline Region region_threshold(const std::vector<ErrorSample>& samples, double threshold = 0.05,
                               std::size_t grid = 64, bool use_wall = false) {
  std::vector<const ErrorSample*> valid;
  for (const auto& s : samples) {
    const double e = use_wall ? s.error_wall : s.error_interface;
    if (s.ok && std::isfinite(e) && s.pe > 0.0 && s.bi > 0.0) valid.push_back(&s);
  }
  if (valid.size() < 10) throw UsageError("region: at least 10 valid samples required");
  if (grid < 2) throw UsageError("region: grid must have at least 2 nodes per axis");

  auto err = [&](const ErrorSample* s) { return use_wall ? s->error_wall : s->error_interface; };
  bool any_below = false;
  bool any_above = false;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto* s : valid) {
    (err(s) < threshold ? any_below : any_above) = true;
    x0 = std::min(x0, std::log10(s->pe));
    x1 = std::max(x1, std::log10(s->pe));
    y0 = std::min(y0, std::log10(s->bi));
    y1 = std::max(y1, std::log10(s->bi));
  }
  Region r;
  if (!any_above) {
    r.status = RegionStatus::all_below;
    return r;
  }
  if (!any_below) {
    r.status = RegionStatus::all_above;
    return r;
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  auto nd2 = [&](double ax, double ay, double bx, double by) {
    const double dx = (ax - bx) / (x1 - x0);
    const double dy = (ay - by) / (y1 - y0);
    return dx * dx + dy * dy;
  };
  // nodes farther than twice the median sample spacing carry no contour
  std::vector<double> spacing;
  for (const auto* a : valid) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto* b : valid)
      if (a != b)
        best = std::min(best, nd2(std::log10(a->pe), std::log10(a->bi), std::log10(b->pe), std::log10(b->bi)));
    spacing.push_back(best);
  }
  std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
  const double reach2 = 4.0 * spacing[spacing.size() / 2];

  const auto n = grid;
  std::vector<double> f(n * n);
  std::vector<bool> masked(n * n, false);
  auto gx = [&](std::size_t i) { return x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1); };
  auto gy = [&](std::size_t j) { return y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(n - 1); };
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      double v = 0.0;
      for (const auto* s : valid) {
        const double d2 = nd2(std::log10(s->pe), std::log10(s->bi), gx(i), gy(j));
        if (d2 < best) {
          best = d2;
          v = err(s);
        }
      }
      f[j * n + i] = v - threshold;
      masked[j * n + i] = best > reach2;
    }

  // marching squares; ambiguous saddles split by the cell-centre average
  std::vector<std::pair<Point2, Point2>> segs;
  auto lerp = [](double a, double b, double fa, double fb) { return a + (b - a) * fa / (fa - fb); };
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (masked[j * n + i] || masked[j * n + i + 1] || masked[(j + 1) * n + i] || masked[(j + 1) * n + i + 1])
        continue;
      const double v00 = f[j * n + i], v10 = f[j * n + i + 1];
      const double v01 = f[(j + 1) * n + i], v11 = f[(j + 1) * n + i + 1];
      std::vector<Point2> cut;
      if ((v00 < 0) != (v10 < 0)) cut.push_back({lerp(gx(i), gx(i + 1), v00, v10), gy(j)});
      if ((v10 < 0) != (v11 < 0)) cut.push_back({gx(i + 1), lerp(gy(j), gy(j + 1), v10, v11)});
      if ((v11 < 0) != (v01 < 0)) cut.push_back({lerp(gx(i + 1), gx(i), v11, v01), gy(j + 1)});
      if ((v01 < 0) != (v00 < 0)) cut.push_back({gx(i), lerp(gy(j + 1), gy(j), v01, v00)});
      if (cut.size() == 2) {
        segs.emplace_back(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const bool centre_below = (v00 + v10 + v01 + v11) < 0.0;
        if (centre_below == (v00 < 0)) {
          segs.emplace_back(cut[0], cut[1]);
          segs.emplace_back(cut[2], cut[3]);
        } else {
          segs.emplace_back(cut[0], cut[3]);
          segs.emplace_back(cut[1], cut[2]);
        }
      }
    }

  // chain segments sharing end points into polylines
  auto same = [](const Point2& a, const Point2& b) {
    return std::abs(a.x - b.x) < 1e-12 && std::abs(a.y - b.y) < 1e-12;
  };
  std::vector<bool> used(segs.size(), false);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<Point2> line{segs[s].first, segs[s].second};
    bool grown = true;
    while (grown) {
      grown = false;
      for (std::size_t t = 0; t < segs.size(); ++t) {
        if (used[t]) continue;
        const auto& [a, b] = segs[t];
        if (same(line.back(), a)) line.push_back(b);
        else if (same(line.back(), b)) line.push_back(a);
        else if (same(line.front(), b)) line.insert(line.begin(), a);
        else if (same(line.front(), a)) line.insert(line.begin(), b);
        else continue;
        used[t] = true;
        grown = true;
      }
    }
    r.polylines.push_back(std::move(line));
  }
  r.status = RegionStatus::boundary;
  return r;
}

/// The 5% region of the validation maps.
inline Region region_5pct(const std::vector<ErrorSample>& samples, std::size_t grid = 64) {
  return region_threshold(samples, 0.05, grid);
}

}  // namespace filmheat
