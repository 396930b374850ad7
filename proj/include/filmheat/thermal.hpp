#pragma once

// Averaged heat equations for the free-surface temperature theta (and the
// scaled interface curvature phi = h^2 dyy T at y = h for the two-variable
// model). Each right-hand side is returned as d/dt, i.e. already divided
// by 3 Pe where the equations carry that factor.

#include <cmath>

#include "filmheat/error.hpp"
#include "filmheat/finite_difference.hpp"
#include "filmheat/hydro.hpp"
#include "filmheat/models.hpp"
#include "filmheat/parameters.hpp"

namespace filmheat {

struct ThermalState {
  Field theta;
  Field phi;  ///< empty unless the model is theta-phi
};

struct ThermalRate {
  Field dtheta;
  Field dphi;
};

/// theta0(h) = 1 / (1 + Bi h), pointwise.
inline Field theta0_field(const Field& h, double bi) { return 1.0 / (1.0 + bi * h); }

/// Coefficient r >= 0 of the relaxation -r (theta - theta0) of the
/// one-variable models, in d/dt units.
inline Field relaxation_rate(ThermalModel model, const Field& h, const DimensionlessGroups& g) {
  const Field b = g.bi * h;
  const Field h2 = h * h;
  const double s = 1.0 / (3.0 * g.pe);
  switch (model) {
    case ThermalModel::theta: return s * 60.0 * (1.0 + b) / ((27.0 + 7.0 * b) * h2);
    case ThermalModel::scheid: return s * 3.0 / h2;
    case ThermalModel::lin_truncated: return s * 6.0 * (1.0 + b) / ((3.0 + b) * h2);
    case ThermalModel::theta_phi: break;
  }
  throw UsageError("relaxation_rate: theta-phi relaxation is a 2x2 block");
}

/// Theta model: averaged energy balance on the one-variable ansatz.
/// With `include_relaxation` false the relaxation term is omitted (it is the
/// implicitly integrated part).
inline Field rhs_theta(const Grid1D& grid, const FlowKinematics& k, const Field& theta,
                       const DimensionlessGroups& g, bool include_relaxation = true) {
  require_positive_thickness(k.h, "rhs_theta");
  const Field& h = k.h;
  const Field& q = k.q;
  const Field b = g.bi * h;
  const Field den = 27.0 + 7.0 * b;
  const Field tx = grid.d1(theta);
  const Field txx = grid.d2(theta);
  const Field conv = -3.0 * (82.0 + 19.0 * b) / (7.0 * den) * q / h * tx -
                     57.0 * b / (7.0 * den) * q * theta / (h * h) * k.hx +
                     3.0 * (11.0 + (-11.0 + 38.0 * b) * theta) / (14.0 * den * h) * k.qx;
  Field diff = txx + (6.0 + 3.0 * (-2.0 + 7.0 * b) * theta) / den * k.hxx / h +
               (6.0 + 6.0 * (-1.0 + 2.0 * b) * theta) / den * k.hx * k.hx / (h * h) +
               6.0 * (8.0 + 7.0 * b) * theta / den * k.hx * tx / h;
  Field out = conv + diff / (3.0 * g.pe);
  if (include_relaxation)
    out -= relaxation_rate(ThermalModel::theta, h, g) * (theta - theta0_field(h, g.bi));
  return out;
}

/// Weighted-residual baseline (linear temperature closure).
inline Field rhs_scheid(const Grid1D& grid, const FlowKinematics& k, const Field& theta,
                        const DimensionlessGroups& g, bool include_relaxation = true) {
  require_positive_thickness(k.h, "rhs_scheid");
  const Field& h = k.h;
  const Field& q = k.q;
  const Field b = g.bi * h;
  const Field tx = grid.d1(theta);
  const Field txx = grid.d2(theta);
  const Field conv = -27.0 / 20.0 * q / h * tx + 7.0 / 40.0 * (1.0 - theta) / h * k.qx;
  const Field diff = txx + (1.0 - theta) * k.hxx / h +
                     (1.0 - theta - 1.5 * b) * k.hx * k.hx / (h * h) + k.hx * tx / h;
  Field out = conv + diff / (3.0 * g.pe);
  if (include_relaxation)
    out -= relaxation_rate(ThermalModel::scheid, h, g) * (theta - theta0_field(h, g.bi));
  return out;
}

/// Truncated projection on the Nusselt profile (Pe^2 convective terms dropped).
inline Field rhs_lin_truncated(const Grid1D& grid, const FlowKinematics& k, const Field& theta,
                               const DimensionlessGroups& g, bool include_relaxation = true) {
  require_positive_thickness(k.h, "rhs_lin_truncated");
  const Field& h = k.h;
  const Field& q = k.q;
  const Field b = g.bi * h;
  const Field den = 3.0 + b;
  const Field tx = grid.d1(theta);
  const Field txx = grid.d2(theta);
  const Field conv = -3.0 * (25.0 + 7.0 * b) / (20.0 * den) * q / h * tx -
                     21.0 * b / (20.0 * den) * q * theta / (h * h) * k.hx +
                     27.0 * g.bi * theta / (20.0 * den) * k.qx;
  const Field diff = txx + 3.0 * b * theta / den * k.hxx / h +
                     3.0 * b * theta / den * k.hx * k.hx / (h * h) +
                     6.0 * (1.0 + b) * theta / den * k.hx * tx / h;
  Field out = conv + diff / (3.0 * g.pe);
  if (include_relaxation)
    out -= relaxation_rate(ThermalModel::lin_truncated, h, g) * (theta - theta0_field(h, g.bi));
  return out;
}

/// Pointwise linear block of the theta-phi model, in d/dt units:
/// dtheta = phi / (3Pe h^2),
/// dphi = [-60(1+Bih)(theta - theta0) - (27+7Bih) phi] / (3Pe h^2).
struct ThetaPhiRelaxation {
  Field a12;  ///< coefficient of phi in dtheta
  Field a21;  ///< coefficient of (theta - theta0) in dphi
  Field a22;  ///< coefficient of phi in dphi
  Field th0;

  static ThetaPhiRelaxation at(const Field& h, const DimensionlessGroups& g) {
    const Field b = g.bi * h;
    const Field s = 1.0 / (3.0 * g.pe * h * h);
    return {s, -60.0 * (1.0 + b) * s, -(27.0 + 7.0 * b) * s, theta0_field(h, g.bi)};
  }
};

/// Two-variable model: exact interfacial trace of the Fourier equation for
/// theta plus the averaged equation for phi.
inline ThermalRate rhs_theta_phi(const Grid1D& grid, const FlowKinematics& k,
                                 const ThermalState& s, const DimensionlessGroups& g,
                                 bool include_relaxation = true) {
  require_positive_thickness(k.h, "rhs_theta_phi");
  const Field& h = k.h;
  const Field& q = k.q;
  const Field& theta = s.theta;
  const Field& phi = s.phi;
  const Field b = g.bi * h;
  const Field h2 = h * h;
  const Field qh = q / h;
  const Field tx = grid.d1(theta);
  const Field txx = grid.d2(theta);
  const Field px = grid.d1(phi);
  const Field pxx = grid.d2(phi);
  const double s3 = 1.0 / (3.0 * g.pe);

  ThermalRate r;
  r.dtheta = -1.5 * qh * tx + s3 * (2.0 * g.bi * k.hx * tx + phi / h2 * k.hx * k.hx +
                                    g.bi * theta * k.hxx + txx);

  const Field e = -3.0 * (25.0 + 11.0 * b) / 14.0;
  const Field f = -(66.0 + 9.0 * phi + 6.0 * (38.0 * b - 11.0) * theta) / 28.0;
  const Field gg = 57.0 / 7.0 * b;
  const Field j = 6.0 - (25.0 + 7.0 * b) * phi + 6.0 * (2.0 * b - 1.0) * theta;
  const Field l = 48.0 - 12.0 * b - 14.0 * b * b;
  r.dphi = -(15.0 / 14.0 * qh * px + e * qh * tx + f * k.qx / h + gg * q * theta / h2 * k.hx) +
           s3 * (j * k.hx * k.hx / h2 + 4.0 / h * k.hx * px + l * k.hx * tx / h + pxx);

  if (include_relaxation) {
    const ThetaPhiRelaxation rel = ThetaPhiRelaxation::at(h, g);
    r.dtheta += rel.a12 * phi;
    r.dphi += rel.a21 * (theta - rel.th0) + rel.a22 * phi;
  }
  return r;
}

/// One-variable dispatch.
inline Field rhs_single(ThermalModel model, const Grid1D& grid, const FlowKinematics& k,
                        const Field& theta, const DimensionlessGroups& g,
                        bool include_relaxation = true) {
  switch (model) {
    case ThermalModel::theta: return rhs_theta(grid, k, theta, g, include_relaxation);
    case ThermalModel::scheid: return rhs_scheid(grid, k, theta, g, include_relaxation);
    case ThermalModel::lin_truncated:
      return rhs_lin_truncated(grid, k, theta, g, include_relaxation);
    case ThermalModel::theta_phi: break;
  }
  throw UsageError("rhs_single: theta-phi carries two fields");
}

/// Wall gradient -dT/dy at y = 0 implied by each model's temperature ansatz
/// (positive when heat enters the film from the wall).
inline Field model_wall_flux(ThermalModel model, const Field& h, const ThermalState& s,
                             double bi) {
  const Field th0 = theta0_field(h, bi);
  switch (model) {
    case ThermalModel::theta:
      return -((th0 - 1.0) + (s.theta - th0) * (3.0 + 2.0 * bi * h)) / h;
    case ThermalModel::theta_phi:
      return -((th0 - 1.0) + (s.theta - th0) * (3.0 + 2.0 * bi * h) + 0.5 * s.phi) / h;
    case ThermalModel::scheid:
      return (1.0 - s.theta) / h;
    case ThermalModel::lin_truncated:
      // T = T_Nu theta / theta0
      return s.theta * (1.0 - th0) / (th0 * h);
  }
  throw UsageError("model_wall_flux: unknown model");
}

}  // namespace filmheat
