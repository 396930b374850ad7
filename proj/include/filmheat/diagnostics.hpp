#pragma once

// Measured quantities: heat fluxes, the global Nusselt number, H1 norms and
// the propagation speed of a wavetrain.

#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "filmheat/error.hpp"
#include "filmheat/finite_difference.hpp"

namespace filmheat {

/// Newton-law flux Bi theta sqrt(1 + hx^2) through the free surface.
inline Field interface_flux(const Field& h, const Field& theta, const Field& hx, double bi) {
  if (h.size() != theta.size() || h.size() != hx.size())
    throw UsageError("interface_flux: arrays must have equal length");
  return bi * theta * (1.0 + hx * hx).sqrt();
}

/// Mean flux normalised by the flat-film value Bi / (1 + Bi).
inline double nusselt_global(const Field& flux, const Field& h, double bi) {
  if (flux.size() == 0 || flux.size() != h.size())
    throw UsageError("nusselt_global: non-empty arrays of equal length required");
  if (!(bi > 0.0)) throw DomainError("nusselt_global: undefined for Bi = 0");
  return flux.mean() / (bi / (1.0 + bi));
}

/// sqrt(sum (X^2 + X_x^2) dx) with the solvers' fourth-order derivative.
inline double h1_norm(const Field& f, double dx, BoundaryKind bc = BoundaryKind::periodic) {
  if (f.size() < 8) throw UsageError("h1_norm: at least 8 samples required");
  if (!(dx > 0.0)) throw UsageError("h1_norm: dx must be positive");
  const Stencil d1 = Stencil::build(static_cast<std::size_t>(f.size()), dx, 1, bc);
  const Field fx = d1.apply(f);
  return std::sqrt(((f * f + fx * fx) * dx).sum());
}

inline double relative_error_h1(const Field& model, const Field& reference, double dx,
                                BoundaryKind bc = BoundaryKind::periodic) {
  if (model.size() != reference.size())
    throw UsageError("relative_error_h1: arrays must have equal length");
  const double ref = h1_norm(reference, dx, bc);
  if (!(ref > 0.0)) throw DomainError("relative_error_h1: reference has zero norm");
  return h1_norm(model - reference, dx, bc) / ref;
}

/// Accumulates squared H1 distances over a sequence of snapshots:
/// sqrt(sum_s |m_s - r_s|^2 / sum_s |r_s|^2).
class H1ErrorWindow {
 public:
  void add(const Field& model, const Field& reference, double dx,
           BoundaryKind bc = BoundaryKind::periodic) {
    const double e = h1_norm(model - reference, dx, bc);
    const double r = h1_norm(reference, dx, bc);
    num_ += e * e;
    den_ += r * r;
    ++count_;
  }
  [[nodiscard]] std::size_t count() const { return count_; }
  [[nodiscard]] double value() const {
    if (!(den_ > 0.0)) throw DomainError("H1ErrorWindow: reference has zero norm");
    return std::sqrt(num_ / den_);
  }

 private:
  double num_ = 0.0;
  double den_ = 0.0;
  std::size_t count_ = 0;
};

/// Speed of a periodic profile from the circular cross-correlation of two
/// snapshots `dt` apart, refined below a cell by a parabola through the peak.
/// Shifts are searched within half a period.
inline double wave_speed(const Field& a, const Field& b, double dt, double dx) {
  const Eigen::Index n = a.size();
  if (n != b.size() || n < 4) throw UsageError("wave_speed: snapshots must have equal length");
  if (!(dt > 0.0) || !(dx > 0.0)) throw UsageError("wave_speed: dt and dx must be positive");
  const Field am = a - a.mean();
  const Field bm = b - b.mean();
  const double scale = std::sqrt((am * am).sum() * (bm * bm).sum());
  if (!(scale > 1e-12 * static_cast<double>(n)))
    throw DomainError("wave_speed: snapshots carry no signal");
  auto corr = [&](Eigen::Index s) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) c += am[i] * bm[((i + s) % n + n) % n];
    return c;
  };
  Eigen::Index best = 0;
  double cbest = corr(0);
  for (Eigen::Index s = -n / 2 + 1; s <= n / 2; ++s) {
    const double c = corr(s);
    if (c > cbest) {
      cbest = c;
      best = s;
    }
  }
  const double cm = corr(best - 1);
  const double cp = corr(best + 1);
  const double den = cm - 2.0 * cbest + cp;
  double offset = 0.0;
  if (den < 0.0) offset = 0.5 * (cm - cp) / den;
  return (static_cast<double>(best) + offset) * dx / dt;
}

inline double min_theta(const Field& theta) {
  if (theta.size() == 0) throw UsageError("min_theta: empty array");
  return theta.minCoeff();
}

/// One line of the diagnostics stream.
struct DiagnosticsRecord {
  double t = 0.0;
  std::optional<double> wave_speed;
  double h_min = 0.0;
  double h_max = 0.0;
  std::map<std::string, double> min_theta;
  std::map<std::string, double> nu_global;
  std::map<std::string, double> h1_error_interface;
  std::map<std::string, double> h1_error_wall;
};

}  // namespace filmheat
