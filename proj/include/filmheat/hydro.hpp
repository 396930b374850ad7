#pragma once

// Saint-Venant right-hand sides for the film thickness h and flow rate q.

#include <cmath>

#include "filmheat/error.hpp"
#include "filmheat/finite_difference.hpp"
#include "filmheat/models.hpp"
#include "filmheat/parameters.hpp"

namespace filmheat {

struct HydroState {
  Field h;
  Field q;
};

struct HydroRate {
  Field dh;
  Field dq;
};

/// Thickness, flow rate and the streamwise derivatives every closure needs,
/// evaluated once per stage and shared by all thermal models.
struct FlowKinematics {
  Field h, q;
  Field hx, hxx, hxxx;
  Field qx, qxx;

  static FlowKinematics from(const Grid1D& grid, const Field& h, const Field& q) {
    FlowKinematics k;
    k.h = h;
    k.q = q;
    k.hx = grid.d1(h);
    k.hxx = grid.d2(h);
    k.hxxx = grid.d3(h);
    k.qx = grid.d1(q);
    k.qxx = grid.d2(q);
    return k;
  }

  static FlowKinematics from(const Grid1D& grid, const HydroState& s) {
    return from(grid, s.h, s.q);
  }
};

inline void require_positive_thickness(const Field& h, const char* who) {
  if (!(h > 0.0).all()) throw DomainError(std::string(who) + ": film thickness must be positive");
}

inline void require_finite(const Field& f, const char* who) {
  if (!f.isFinite().all()) throw NumericalError(std::string(who) + ": non-finite values");
}

/// Vila's first-order model written in conservative form:
/// 3Re [dt q + dx(q^2/h + 2/225 h^5)] = h - 3q/h^2 + We dxxx h.
inline HydroRate rhs_vila(const Grid1D& grid, const FlowKinematics& k,
                          const DimensionlessGroups& g) {
  require_positive_thickness(k.h, "rhs_vila");
  const Field& h = k.h;
  const Field& q = k.q;
  const Field flux = q * q / h + (2.0 / 225.0) * h.pow(5);
  HydroRate r;
  r.dh = -k.qx;
  r.dq = -grid.d1(flux) + (h - 3.0 * q / (h * h) + g.we * k.hxxx) / (3.0 * g.re);
  require_finite(r.dq, "rhs_vila");
  return r;
}

inline HydroRate rhs_vila(const Grid1D& grid, const HydroState& s, const DimensionlessGroups& g) {
  require_positive_thickness(s.h, "rhs_vila");
  return rhs_vila(grid, FlowKinematics::from(grid, s), g);
}

/// Weighted-residual model with second-order viscous terms. The printed
/// "4q/h^2 dx h^2" term is taken as 4 q (dx h)^2 / h^2.
inline HydroRate rhs_ruyerquil(const Grid1D& /*grid*/, const FlowKinematics& k,
                               const DimensionlessGroups& g) {
  require_positive_thickness(k.h, "rhs_ruyerquil");
  const Field& h = k.h;
  const Field& q = k.q;
  const Field qh = q / h;
  const Field h2 = h * h;
  const Field rhs = 5.0 / 6.0 * h - 5.0 * q / (2.0 * h2) +
                    (3.0 / 7.0) * g.re * (9.0 * k.hx * qh - 17.0 * k.qx) * qh -
                    (5.0 / 6.0) * g.ct * k.hx + (5.0 / 6.0) * g.we * h * k.hxxx +
                    4.0 * q * k.hx * k.hx / h2 - 9.0 / (2.0 * h) * k.hx * k.qx -
                    6.0 * qh * k.hxx + 4.5 * k.qxx;
  HydroRate r;
  r.dh = -k.qx;
  r.dq = rhs / (3.0 * g.re);
  require_finite(r.dq, "rhs_ruyerquil");
  return r;
}

inline HydroRate rhs_ruyerquil(const Grid1D& grid, const HydroState& s,
                               const DimensionlessGroups& g) {
  require_positive_thickness(s.h, "rhs_ruyerquil");
  return rhs_ruyerquil(grid, FlowKinematics::from(grid, s), g);
}

inline HydroRate hydro_rhs(HydroModel model, const Grid1D& grid, const FlowKinematics& k,
                           const DimensionlessGroups& g) {
  return model == HydroModel::vila ? rhs_vila(grid, k, g) : rhs_ruyerquil(grid, k, g);
}

/// Nusselt flow rate imposed at an inlet of thickness h.
inline double inlet_flowrate(double h) {
  if (!(h > 0.0)) throw DomainError("inlet_flowrate: h must be positive");
  return h * h * h / 3.0;
}

/// Coefficients of the linear part treated implicitly:
/// dt q ~ [capillary * hfreeze * dxxx h + viscous * dxx q] / (3 Re).
struct HydroStiffPart {
  double capillary = 0.0;
  bool thickness_weighted = false;
  double viscous = 0.0;
};

inline HydroStiffPart hydro_stiff_part(HydroModel model, const DimensionlessGroups& g) {
  if (model == HydroModel::vila) return {g.we, false, 0.0};
  return {5.0 / 6.0 * g.we, true, 4.5};
}

}  // namespace filmheat
