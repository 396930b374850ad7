#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "filmheat/closure.hpp"
#include "filmheat/domain.hpp"
#include "filmheat/linear_analysis.hpp"
#include "filmheat/thermal.hpp"
#include "oracles.hpp"

using namespace filmheat;

namespace {

struct WavyFilm {
  Grid1D grid{128, 20.0, BoundaryKind::periodic};
  DimensionlessGroups g = simulation_groups(15.0, 266.0, 0.0, 12.0, 0.4);
  FlowKinematics kin;
  Field theta, phi;

  WavyFilm() {
    const Field x = grid.coordinates();
    const double k = 2.0 * std::numbers::pi / 20.0;
    const Field h = 1.0 + 0.3 * (k * x).sin() + 0.1 * (2 * k * x).cos();
    const Field q = h.cube() / 3.0;
    kin = FlowKinematics::from(grid, h, q);
    theta = theta0_field(h, g.bi) + 0.05 * (k * x + 0.3).cos();
    phi = 0.02 * (2 * k * x).sin();
  }
};

}  // namespace

TEST(ThermalModels, LinearisedRatesMatchClosedForms) {
  for (ThermalModel m : all_thermal_models()) {
    for (double b : {0.0, 1.0, 10.0}) {
      for (double k : {0.0, 0.5}) {
        const auto expect = model_damping(m, b, k);
        const auto got = oracle::jacobian_damping(m, b, k);
        ASSERT_EQ(got.size(), expect.size());
        for (std::size_t i = 0; i < got.size(); ++i)
          EXPECT_NEAR(got[i], expect[i], 1e-6 * std::abs(expect[i]))
              << to_string(m) << " bih " << b << " k " << k;
      }
    }
  }
}

TEST(ThermalModels, AdvectionLeavesOneVariableDecayRateUnchanged) {
  for (ThermalModel m : {ThermalModel::theta, ThermalModel::scheid, ThermalModel::lin_truncated}) {
    const double expect = model_damping(m, 1.0, 0.5)[0];
    EXPECT_NEAR(oracle::jacobian_damping(m, 1.0, 0.5, 1.0 / 3.0)[0], expect, 1e-6 * std::abs(expect));
  }
}

TEST(ThermalModels, ConductiveFlatFilmIsFixedPoint) {
  const Grid1D grid(64, 10.0, BoundaryKind::periodic);
  for (double bi : {0.0, 0.1, 3.0}) {
    const DimensionlessGroups g = simulation_groups(15.0, 266.0, 0.0, 105.0, bi);
    const FlatState f = nusselt_flat_state(bi);
    const FlowKinematics kin =
        FlowKinematics::from(grid, Field::Constant(64, f.h), Field::Constant(64, f.q));
    const Field th = Field::Constant(64, f.theta);
    for (ThermalModel m : {ThermalModel::theta, ThermalModel::scheid, ThermalModel::lin_truncated})
      EXPECT_LT(rhs_single(m, grid, kin, th, g).abs().maxCoeff(), 1e-12) << to_string(m);
    const ThermalRate r = rhs_theta_phi(grid, kin, {th, Field::Zero(64)}, g);
    EXPECT_LT(r.dtheta.abs().maxCoeff(), 1e-12);
    EXPECT_LT(r.dphi.abs().maxCoeff(), 1e-12);
  }
}

TEST(ThermalModels, RightHandSidesCommuteWithTranslation) {
  const WavyFilm w;
  const Eigen::Index s = 37;
  FlowKinematics shifted = FlowKinematics::from(w.grid, periodic_shift(w.kin.h, s),
                                                periodic_shift(w.kin.q, s));
  for (ThermalModel m : all_thermal_models()) {
    Field y, ys;
    if (m == ThermalModel::theta_phi) {
      y.resize(256);
      ys.resize(256);
      y << w.theta, w.phi;
      ys << periodic_shift(w.theta, s), periodic_shift(w.phi, s);
    } else {
      y = w.theta;
      ys = periodic_shift(w.theta, s);
    }
    const Field r = oracle::thermal_rhs(m, w.grid, w.kin, y, w.g);
    const Field rs = oracle::thermal_rhs(m, w.grid, shifted, ys, w.g);
    Field expect(r.size());
    for (Eigen::Index b = 0; b < r.size(); b += 128) expect.segment(b, 128) = periodic_shift(r.segment(b, 128), s);
    EXPECT_LT((rs - expect).abs().maxCoeff(), 1e-12) << to_string(m);
  }
}

TEST(ThermalModels, RelaxationSplitRecombines) {
  const WavyFilm w;
  for (ThermalModel m : {ThermalModel::theta, ThermalModel::scheid, ThermalModel::lin_truncated}) {
    const Field full = rhs_single(m, w.grid, w.kin, w.theta, w.g);
    const Field part = rhs_single(m, w.grid, w.kin, w.theta, w.g, false);
    const Field rel = -relaxation_rate(m, w.kin.h, w.g) * (w.theta - theta0_field(w.kin.h, w.g.bi));
    EXPECT_LT((full - part - rel).abs().maxCoeff(), 1e-14);
  }
}

TEST(ThermalModels, WallFluxMatchesAnsatzGradient) {
  const WavyFilm w;
  const ThermalState s{w.theta, w.phi};
  const Field f = model_wall_flux(ThermalModel::theta_phi, w.kin.h, s, w.g.bi);
  for (Eigen::Index i = 0; i < 128; i += 9)
    EXPECT_NEAR(f[i], -ansatz_wall_gradient(w.kin.h[i], w.theta[i], w.phi[i], w.g.bi), 1e-14);
  // at equilibrium every closure conducts Bi theta0 through the film
  const Field th0 = theta0_field(w.kin.h, w.g.bi);
  for (ThermalModel m : all_thermal_models()) {
    const Field eq = model_wall_flux(m, w.kin.h, {th0, Field::Zero(128)}, w.g.bi);
    EXPECT_LT((eq - w.g.bi * th0).abs().maxCoeff(), 1e-14) << to_string(m);
  }
}

TEST(ThermalModels, RejectMisuse) {
  const WavyFilm w;
  EXPECT_THROW(relaxation_rate(ThermalModel::theta_phi, w.kin.h, w.g), UsageError);
  EXPECT_THROW(rhs_single(ThermalModel::theta_phi, w.grid, w.kin, w.theta, w.g), UsageError);
  FlowKinematics bad = w.kin;
  bad.h[3] = -0.1;
  EXPECT_THROW(rhs_theta(w.grid, bad, w.theta, w.g), DomainError);
}
