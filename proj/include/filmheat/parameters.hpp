#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "filmheat/error.hpp"

namespace filmheat {

/// Nondimensional parameter set of a heated falling film.
///
/// Lengths are scaled by the Nusselt thickness h_N and velocities by
/// 3 u_N, so the flat film has h = 1 and q = 1/3.
struct DimensionlessGroups {
  double re = 15.0;        ///< Reynolds number q_L / nu
  double we = 266.0;       ///< Weber number
  double ct = 0.0;         ///< inclination number cot(beta)
  double pr = 7.0;         ///< Prandtl number
  double pe = 105.0;       ///< Peclet number, always pr * re
  double bi = 0.1;         ///< film Biot number H h_N / k
  double bi_tilde = 0.0;   ///< Biot number on the viscous length l_nu
  double ka = 0.0;         ///< Kapitza number
  double beta_deg = 90.0;  ///< plate inclination in degrees
};

/// Dimensional scales of the Nusselt-based nondimensionalisation.
struct ScalingReport {
  double h_n = 0.0;        ///< Nusselt thickness [m]
  double u_n_scale = 0.0;  ///< velocity scale 3 u_N [m/s]
  double l_nu = 0.0;       ///< viscous length (nu^2 / g sin beta)^(1/3) [m]

  [[nodiscard]] double time_scale() const { return h_n / u_n_scale; }
};

/// Flat-film Nusselt solution in reduced variables.
struct FlatState {
  double h = 1.0;
  double q = 1.0 / 3.0;
  double theta = 1.0;
  double phi = 0.0;
};

inline double cot_degrees(double beta_deg) {
  if (beta_deg == 90.0) return 0.0;
  const double b = beta_deg * std::numbers::pi / 180.0;
  return std::cos(b) / std::sin(b);
}

/// (3 Re)^(1/3), the ratio h_N / l_nu.
inline double nusselt_length_ratio(double re) { return std::cbrt(3.0 * re); }

/// Builds the simulation groups from physical inputs. When `we_override`
/// is absent the Weber number is Ka (3 Re)^(-2/3).
inline DimensionlessGroups derive_groups(double ka, double re, double pr, double bi_tilde,
                                         double beta_deg,
                                         std::optional<double> we_override = std::nullopt) {
  if (!(ka > 0.0) || !(re > 0.0) || !(pr > 0.0) || !(bi_tilde > 0.0))
    throw DomainError("derive_groups: ka, re, pr and bi_tilde must be positive");
  if (!(beta_deg > 0.0 && beta_deg <= 90.0))
    throw DomainError("derive_groups: inclination must lie in (0, 90] degrees");
  if (we_override && !(*we_override > 0.0))
    throw DomainError("derive_groups: Weber override must be positive");

  const double ratio = nusselt_length_ratio(re);
  DimensionlessGroups g;
  g.re = re;
  g.pr = pr;
  g.pe = pr * re;
  g.bi_tilde = bi_tilde;
  g.bi = bi_tilde * ratio;
  g.ka = ka;
  g.beta_deg = beta_deg;
  g.ct = cot_degrees(beta_deg);
  g.we = we_override ? *we_override : ka / (ratio * ratio);
  return g;
}

/// Builds the groups directly from simulation numbers (the form used by
/// sweeps, which sample Pe and Bi). Derived entries are back-filled.
inline DimensionlessGroups simulation_groups(double re, double we, double ct, double pe,
                                             double bi) {
  if (!(re > 0.0) || !(we >= 0.0) || !(ct >= 0.0) || !(pe > 0.0) || !(bi >= 0.0))
    throw DomainError("simulation_groups: re, pe > 0 and we, ct, bi >= 0 required");
  const double ratio = nusselt_length_ratio(re);
  DimensionlessGroups g;
  g.re = re;
  g.we = we;
  g.ct = ct;
  g.pe = pe;
  g.pr = pe / re;
  g.bi = bi;
  g.bi_tilde = bi / ratio;
  g.ka = we * ratio * ratio;
  g.beta_deg = ct == 0.0 ? 90.0 : std::atan(1.0 / ct) * 180.0 / std::numbers::pi;
  return g;
}

/// Dimensional scales for a liquid of kinematic viscosity `nu` [m^2/s].
inline ScalingReport scaling_report(double re, double beta_deg, double nu, double gravity = 9.81) {
  if (!(re > 0.0) || !(nu > 0.0) || !(gravity > 0.0) || !(beta_deg > 0.0 && beta_deg <= 90.0))
    throw DomainError("scaling_report: invalid physical input");
  const double g_eff = gravity * std::sin(beta_deg * std::numbers::pi / 180.0);
  ScalingReport s;
  s.l_nu = std::cbrt(nu * nu / g_eff);
  s.h_n = s.l_nu * nusselt_length_ratio(re);
  s.u_n_scale = g_eff * s.h_n * s.h_n / nu;
  return s;
}

/// Free-surface temperature of the conductive flat film, 1 / (1 + Bi h).
inline double theta0(double h, double bi) { return 1.0 / (1.0 + bi * h); }

inline FlatState nusselt_flat_state(double bi) {
  if (!(bi >= 0.0)) throw DomainError("nusselt_flat_state: Biot number must be >= 0");
  return FlatState{1.0, 1.0 / 3.0, theta0(1.0, bi), 0.0};
}

}  // namespace filmheat
