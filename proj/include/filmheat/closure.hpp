#pragma once

// Cross-stream profiles used to close the averaged heat equations: the
// conductive (Nusselt) temperature, the polynomial relaxation modes and the
// two-variable temperature ansatz.

#include <array>
#include <cmath>

#include "filmheat/error.hpp"
#include "filmheat/parameters.hpp"

namespace filmheat {

/// Cubic c1 y + c2 y^2 + c3 y^3 (no constant term: every closure
/// polynomial vanishes at the wall).
struct WallPolynomial {
  std::array<double, 3> c{};

  [[nodiscard]] double value(double y) const { return y * (c[0] + y * (c[1] + y * c[2])); }
  [[nodiscard]] double d1(double y) const { return c[0] + y * (2.0 * c[1] + 3.0 * y * c[2]); }
  [[nodiscard]] double d2(double y) const { return 2.0 * c[1] + 6.0 * y * c[2]; }
};

inline void require_unit_interval(double ybar, const char* who) {
  if (!(ybar >= 0.0 && ybar <= 1.0)) throw DomainError(std::string(who) + ": ybar outside [0, 1]");
}

inline double nusselt_temperature(double ybar, double h, double bi) {
  require_unit_interval(ybar, "nusselt_temperature");
  if (!(h > 0.0)) throw DomainError("nusselt_temperature: h must be positive");
  if (!(bi >= 0.0)) throw DomainError("nusselt_temperature: Biot number must be >= 0");
  return 1.0 + (theta0(h, bi) - 1.0) * ybar;
}

/// Approximation of the first relaxation eigenmode: y(2 - y) + Bih y(1 - y).
inline WallPolynomial vtilde1_poly(double bih) { return {{2.0 + bih, -(1.0 + bih), 0.0}}; }

/// Approximation of the second relaxation eigenmode:
/// -12 y (2/3 - y)(5/4 - y) + 2 Bih y (1 - y)(y - 1/2).
inline WallPolynomial vtilde2_poly(double bih) {
  return {{-10.0 - bih, 23.0 + 3.0 * bih, -12.0 - 2.0 * bih}};
}

/// y [3 - 3y + y^2 + Bih (2 - 3y + y^2)]; unit value and zero curvature at y = 1.
inline WallPolynomial vhat1_poly(double bih) {
  return {{3.0 + 2.0 * bih, -3.0 - 3.0 * bih, 1.0 + bih}};
}

/// y (1 - y)^2 / 2; zero value and unit curvature at y = 1.
inline WallPolynomial vhat2_poly() { return {{0.5, -1.0, 0.5}}; }

inline double vtilde1(double ybar, double bih) { return vtilde1_poly(bih).value(ybar); }
inline double vtilde2(double ybar, double bih) { return vtilde2_poly(bih).value(ybar); }
inline double vhat1(double ybar, double bih) { return vhat1_poly(bih).value(ybar); }
inline double vhat2(double ybar) { return vhat2_poly().value(ybar); }

/// Temperature ansatz T_Nu + (theta - theta0) vhat1 + phi vhat2. With
/// phi = 0 this is the one-variable ansatz of the theta model.
inline double reconstruct_temperature(double ybar, double h, double theta, double phi, double bi) {
  const double t_nu = nusselt_temperature(ybar, h, bi);
  const double bih = bi * h;
  return t_nu + (theta - theta0(h, bi)) * vhat1(ybar, bih) + phi * vhat2(ybar);
}

/// d T / d ybar of the ansatz (not divided by h).
inline double reconstruct_temperature_dybar(double ybar, double h, double theta, double phi,
                                            double bi) {
  const double th0 = theta0(h, bi);
  return (th0 - 1.0) + (theta - th0) * vhat1_poly(bi * h).d1(ybar) + phi * vhat2_poly().d1(ybar);
}

/// Wall gradient dT/dy at y = 0 implied by the ansatz:
/// [(theta0 - 1) + (theta - theta0)(3 + 2 Bih) + phi / 2] / h.
inline double ansatz_wall_gradient(double h, double theta, double phi, double bi) {
  const double th0 = theta0(h, bi);
  return ((th0 - 1.0) + (theta - th0) * (3.0 + 2.0 * bi * h) + 0.5 * phi) / h;
}

struct VelocitySample {
  double u = 0.0;              ///< streamwise velocity
  double flux_integral = 0.0;  ///< integral of u from the wall to y
};

/// Leading-order semi-parabolic velocity u = (3q/h)(y - y^2/2). The
/// cumulative flux 3q(y^2/2 - y^3/6) lets callers build v = -d/dx of it at
/// fixed y.
inline VelocitySample velocity_profile(double ybar, double h, double q) {
  if (!(h > 0.0)) throw DomainError("velocity_profile: h must be positive");
  require_unit_interval(ybar, "velocity_profile");
  const double y2 = ybar * ybar;
  return {3.0 * q / h * (ybar - 0.5 * y2), 3.0 * q * (0.5 * y2 - y2 * ybar / 6.0)};
}

}  // namespace filmheat
