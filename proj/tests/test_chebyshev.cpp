#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "filmheat/chebyshev.hpp"

using namespace filmheat;

TEST(Chebyshev, DifferentiatesPolynomialsExactly) {
  const UnitIntervalGrid g(10);
  const Eigen::ArrayXd y = g.nodes().array();
  const Eigen::VectorXd f = (y.pow(7) - 3.0 * y.square() + 2.0).matrix();
  const Eigen::VectorXd df = (7.0 * y.pow(6) - 6.0 * y).matrix();
  const Eigen::VectorXd d2f = (42.0 * y.pow(5) - 6.0).matrix();
  EXPECT_LT((g.d1() * f - df).lpNorm<Eigen::Infinity>(), 1e-11);
  EXPECT_LT((g.d2() * f - d2f).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(Chebyshev, NodesAreGaussLobatto) {
  const UnitIntervalGrid g(8);
  ASSERT_EQ(g.size(), 9);
  for (Eigen::Index i = 0; i < 9; ++i)
    EXPECT_NEAR(g.nodes()[i], 0.5 * (1.0 - std::cos(std::numbers::pi * i / 8.0)), 1e-15);
}

TEST(Chebyshev, QuadratureIntegratesPolynomials) {
  for (std::size_t n : {8u, 9u, 16u}) {
    const UnitIntervalGrid g(n);
    const Eigen::VectorXd w = g.quadrature_weights();
    EXPECT_NEAR(w.sum(), 1.0, 1e-14);
    for (int p = 1; p <= static_cast<int>(n); ++p)
      EXPECT_NEAR(w.dot(g.nodes().array().pow(p).matrix()), 1.0 / (p + 1), 1e-13) << n << " " << p;
  }
}

TEST(Chebyshev, SpectralConvergenceOnSmoothFunction) {
  auto err = [](std::size_t n) {
    const UnitIntervalGrid g(n);
    const Eigen::ArrayXd y = g.nodes().array();
    const Eigen::VectorXd f = (8.0 * y).sin().matrix();
    const Eigen::VectorXd df = (8.0 * (8.0 * y).cos()).matrix();
    return (g.d1() * f - df).lpNorm<Eigen::Infinity>();
  };
  EXPECT_GT(err(8) / err(16), 1e3);
  EXPECT_LT(err(24), 1e-9);
}

TEST(Chebyshev, PolynomialValuesMatchTrigonometricForm) {
  for (std::size_t n = 0; n <= 12; ++n) {
    for (double x : {-0.9, -0.3, 0.2, 0.77}) {
      const double a = std::acos(x);
      const ChebyshevValue v = chebyshev_t(n, x);
      EXPECT_NEAR(v.t, std::cos(n * a), 1e-13);
      const double dt = n == 0 ? 0.0 : n * std::sin(n * a) / std::sin(a);
      EXPECT_NEAR(v.dt, dt, 1e-11);
      const double e = 1e-5;
      const double d2 = (chebyshev_t(n, x + e).dt - chebyshev_t(n, x - e).dt) / (2 * e);
      EXPECT_NEAR(v.d2t, d2, 1e-5 * (1.0 + std::abs(d2)));
    }
  }
}

TEST(Chebyshev, WallBasisVanishesAtEnds) {
  EXPECT_EQ(basis_phi(1, -1.0).t, 0.0);
  for (std::size_t i = 2; i <= 12; ++i) {
    EXPECT_NEAR(basis_phi(i, -1.0).t, 0.0, 1e-14);
    EXPECT_NEAR(basis_phi(i, 1.0).t, 0.0, 1e-14);
  }
  EXPECT_THROW(basis_phi(0, 0.0), UsageError);
  EXPECT_THROW(basis_phi(2, 1.5), DomainError);
}
