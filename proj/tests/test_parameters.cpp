#include <cmath>

#include <gtest/gtest.h>

#include "filmheat/parameters.hpp"

using namespace filmheat;

TEST(Parameters, DerivedGroupsFollowNusseltScaling) {
  const double ka = 3923.0, re = 15.0, pr = 7.0, bit = 0.1;
  const DimensionlessGroups g = derive_groups(ka, re, pr, bit, 90.0);
  const double ratio = std::pow(45.0, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(g.pe, 105.0);
  EXPECT_NEAR(g.bi, 0.1 * ratio, 1e-14);
  EXPECT_NEAR(g.we, ka / (ratio * ratio), 1e-10);
  EXPECT_EQ(g.ct, 0.0);
  EXPECT_EQ(g.beta_deg, 90.0);
}

TEST(Parameters, WeberOverrideWins) {
  const DimensionlessGroups g = derive_groups(3923.0, 15.0, 7.0, 0.1, 90.0, 266.0);
  EXPECT_EQ(g.we, 266.0);
}

TEST(Parameters, InclinationIsCotangent) {
  EXPECT_NEAR(derive_groups(1.0, 1.0, 1.0, 1.0, 45.0).ct, 1.0, 1e-15);
  EXPECT_NEAR(derive_groups(1.0, 1.0, 1.0, 1.0, 30.0).ct, std::sqrt(3.0), 1e-14);
}

TEST(Parameters, SimulationGroupsInvertDerivedGroups) {
  const DimensionlessGroups a = derive_groups(500.0, 20.0, 5.0, 0.3, 60.0);
  const DimensionlessGroups b = simulation_groups(a.re, a.we, a.ct, a.pe, a.bi);
  EXPECT_NEAR(b.ka, a.ka, 1e-10 * a.ka);
  EXPECT_NEAR(b.bi_tilde, a.bi_tilde, 1e-14);
  EXPECT_NEAR(b.pr, a.pr, 1e-14);
  EXPECT_NEAR(b.beta_deg, a.beta_deg, 1e-12);
}

TEST(Parameters, RejectsNonPhysicalInput) {
  EXPECT_THROW(derive_groups(0.0, 15, 7, 0.1, 90), DomainError);
  EXPECT_THROW(derive_groups(1.0, -1, 7, 0.1, 90), DomainError);
  EXPECT_THROW(derive_groups(1.0, 15, 7, 0.1, 0.0), DomainError);
  EXPECT_THROW(derive_groups(1.0, 15, 7, 0.1, 91.0), DomainError);
  EXPECT_THROW(derive_groups(1.0, 15, 7, 0.1, 90, -2.0), DomainError);
  EXPECT_THROW(simulation_groups(15, 266, 0, 0.0, 1), DomainError);
  EXPECT_THROW(simulation_groups(15, 266, 0, 1.0, -1), DomainError);
}

TEST(Parameters, ScalingMatchesFlatFilmFlux) {
  // h_N^3 = 3 nu^2 Re / g for a vertical plate
  const double nu = 1e-6, re = 15.0, grav = 9.81;
  const ScalingReport s = scaling_report(re, 90.0, nu, grav);
  EXPECT_NEAR(s.h_n, std::cbrt(3.0 * nu * nu * re / grav), 1e-18);
  // the Nusselt flow rate per unit width equals Re nu
  const double u_mean = grav * s.h_n * s.h_n / (3.0 * nu);
  EXPECT_NEAR(u_mean * s.h_n, re * nu, 1e-16);
  EXPECT_NEAR(s.u_n_scale, 3.0 * u_mean, 1e-12);
}

TEST(Parameters, FlatStateIsConductive) {
  for (double bi : {0.0, 0.5, 10.0}) {
    const FlatState f = nusselt_flat_state(bi);
    EXPECT_EQ(f.h, 1.0);
    EXPECT_NEAR(f.q, 1.0 / 3.0, 1e-16);
    EXPECT_NEAR(f.theta, 1.0 / (1.0 + bi), 1e-16);
    EXPECT_EQ(f.phi, 0.0);
  }
  EXPECT_THROW(nusselt_flat_state(-1.0), DomainError);
}
