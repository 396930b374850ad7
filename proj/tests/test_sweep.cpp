#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "filmheat/sweep.hpp"

using namespace filmheat;

namespace {

SweepPlan small_plan(std::size_t n, std::uint64_t seed) {
  SweepPlan p;
  p.n_samples = n;
  p.seed = seed;
  p.dims = {{"pe", 3.0, 0.5, 1.0, 10.0}, {"bi", 1.0, 1.0, 0.1, 10.0}};
  return p;
}

PairedRunSpec tiny_spec() {
  PairedRunSpec s;
  s.domain = DomainSpec::periodic_box(20.0, 64);
  s.models = {ThermalModel::theta, ThermalModel::theta_phi};
  s.spinup_time = 5.0;
  s.thermal_time = 3.0;
  s.perturbation = 0.05;
  s.sample_interval = 0.5;
  return s;
}

std::vector<ErrorSample> synthetic_map(std::size_t n, double scale) {
  const auto pts = lhs_sample(SweepPlan::pe_bi(n, 11));
  std::vector<ErrorSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    ErrorSample e;
    e.index = i;
    e.pe = pts[i][0];
    e.bi = pts[i][1];
    e.model = "theta_phi";
    e.error_interface = e.pe / scale;
    e.error_wall = e.error_interface;
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST(Sweep, LatinHypercubeFillsEveryStratumOnce) {
  for (std::size_t n : {1u, 4u, 7u, 16u, 101u}) {
    const SweepPlan plan = SweepPlan::pe_bi(n, 3);
    const auto pts = lhs_sample(plan);
    ASSERT_EQ(pts.size(), n);
    for (std::size_t d = 0; d < 2; ++d) {
      std::vector<std::size_t> strata;
      for (const auto& p : pts)
        strata.push_back(static_cast<std::size_t>(plan.dims[d].cdf(p[d]) * static_cast<double>(n)));
      std::sort(strata.begin(), strata.end());
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(strata[i], i) << "n " << n << " dim " << d;
      for (const auto& p : pts) {
        EXPECT_GE(p[d], plan.dims[d].lo);
        EXPECT_LE(p[d], plan.dims[d].hi);
      }
    }
  }
}

TEST(Sweep, LatinHypercubeIsSeedDeterministic) {
  EXPECT_EQ(lhs_sample(SweepPlan::pe_bi(50, 9)), lhs_sample(SweepPlan::pe_bi(50, 9)));
  EXPECT_NE(lhs_sample(SweepPlan::pe_bi(50, 9)), lhs_sample(SweepPlan::pe_bi(50, 10)));
}

TEST(Sweep, QuantileInvertsCdf) {
  const LogNormalDim d{"pe", 105.0, std::log(1e4) / 4.0, 0.1, 1e3};
  for (double u : {1e-6, 0.1, 0.5, 0.9, 0.999999}) EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-12);
  const LogNormalDim open{"bi", 2.0, 1.0};
  EXPECT_NEAR(open.quantile(0.5), 2.0, 1e-12);
}

TEST(Sweep, PlanValidation) {
  SweepPlan p = small_plan(4, 1);
  p.dims[0].median = 0.0;
  EXPECT_THROW(lhs_sample(p), UsageError);
  p = small_plan(0, 1);
  EXPECT_THROW(lhs_sample(p), UsageError);
}

TEST(Sweep, RegionTracksSyntheticBoundary) {
  // error = Pe / 100 crosses 5% at Pe = 5
  const auto map = synthetic_map(200, 100.0);
  const Region r = region_5pct(map);
  ASSERT_EQ(r.status, RegionStatus::boundary);
  ASSERT_FALSE(r.polylines.empty());
  for (const auto& line : r.polylines)
    for (const Point2& p : line) EXPECT_NEAR(p.x, std::log10(5.0), 0.25);
}

TEST(Sweep, RegionReportsUniformMaps) {
  EXPECT_EQ(region_5pct(synthetic_map(30, 1e6)).status, RegionStatus::all_below);
  EXPECT_EQ(region_5pct(synthetic_map(30, 1e-3)).status, RegionStatus::all_above);
  EXPECT_THROW(region_5pct(synthetic_map(9, 100.0)), UsageError);
  auto map = synthetic_map(12, 100.0);
  for (std::size_t i = 0; i < 3; ++i) map[i].ok = false;
  EXPECT_THROW(region_5pct(map), UsageError);
}

TEST(Sweep, ResultsIndependentOfWorkerCount) {
  const SweepPlan plan = small_plan(3, 5);
  const PairedRunSpec spec = tiny_spec();
  const auto a = execute_sweep(plan, spec, 1);
  const auto b = execute_sweep(plan, spec, 3);
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(a[i].ok) << a[i].message;
    EXPECT_EQ(a[i].index, i);
    EXPECT_EQ(a[i].hydro_hash, b[i].hydro_hash);
    ASSERT_EQ(a[i].rows.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(a[i].rows[k].error_interface, b[i].rows[k].error_interface);
      EXPECT_EQ(a[i].rows[k].error_wall, b[i].rows[k].error_wall);
      EXPECT_EQ(a[i].rows[k].min_theta, b[i].rows[k].min_theta);
    }
  }
}

TEST(Sweep, SkippedSamplesAreNotRun) {
  const SweepPlan plan = small_plan(3, 5);
  std::size_t calls = 0;
  const auto out = execute_sweep(plan, tiny_spec(), 2, {true, false, true},
                                 [&](const SampleOutcome&) { ++calls; });
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].index, 1u);
  EXPECT_EQ(calls, 1u);
  EXPECT_TRUE(execute_sweep(plan, tiny_spec(), 1, {true, true, true}).empty());
  EXPECT_THROW(execute_sweep(plan, tiny_spec(), 0), UsageError);
}
