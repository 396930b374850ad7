#pragma once

// Periodic box and open plate setups: inlet forcing, outlet closure and
// the useful (diagnostic) region.

#include <cmath>
#include <cstddef>
#include <numbers>

#include "filmheat/error.hpp"
#include "filmheat/finite_difference.hpp"
#include "filmheat/hydro.hpp"
#include "filmheat/parameters.hpp"

namespace filmheat {

enum class DomainKind { periodic, open };

/// Thermal state fed at the inlet of an open plate.
enum class ThermalInlet {
  equilibrium,  ///< conductive profile for the inlet thickness
  hot           ///< T = 1 across the film
};

/// h(0, t) = 1 + A sin(2 pi f t) with f in nondimensional time units.
struct InletForcing {
  double amplitude = 0.1;
  double frequency = 10.0;

  [[nodiscard]] double thickness(double t) const {
    return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
  }
};

struct DomainSpec {
  DomainKind kind = DomainKind::periodic;
  double length = 90.0;
  std::size_t nx = 512;
  double useful_length = 90.0;  ///< open plates: everything past it is outlet buffer
  InletForcing inlet;
  ThermalInlet thermal_inlet = ThermalInlet::equilibrium;

  void validate() const {
    if (!(length > 0.0)) throw UsageError("domain: length must be positive");
    if (nx < 64) throw UsageError("domain: nx must be >= 64");
    if (kind == DomainKind::open) {
      if (!(useful_length > 0.0 && useful_length < length))
        throw UsageError("domain: open plates need 0 < useful_length < length");
      if (!(inlet.amplitude >= 0.0 && inlet.amplitude < 1.0))
        throw UsageError("domain: inlet amplitude must lie in [0, 1)");
      if (!(inlet.frequency >= 0.0)) throw UsageError("domain: inlet frequency must be >= 0");
    }
  }

  [[nodiscard]] Grid1D grid() const {
    validate();
    return Grid1D(nx, length,
                  kind == DomainKind::periodic ? BoundaryKind::periodic : BoundaryKind::open);
  }

  /// Number of leading grid points that belong to the useful region.
  [[nodiscard]] std::size_t useful_points() const {
    if (kind == DomainKind::periodic) return nx;
    const double dx = length / static_cast<double>(nx - 1);
    const auto n = static_cast<std::size_t>(std::floor(useful_length / dx + 1e-9)) + 1;
    return std::min(n, nx);
  }

  /// Absorbing-layer weight along the grid: 0 in the useful region, rising as
  /// sin^2 over the first half of the buffer and 1 beyond.
  [[nodiscard]] Field buffer_weight() const {
    Field s = Field::Zero(static_cast<Eigen::Index>(nx));
    if (kind == DomainKind::periodic) return s;
    const double dx = length / static_cast<double>(nx - 1);
    const double half = 0.5 * (length - useful_length);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double xi = (static_cast<double>(i) * dx - useful_length) / half;
      if (xi >= 1.0) s[i] = 1.0;
      else if (xi > 0.0) s[i] = std::pow(std::sin(0.5 * std::numbers::pi * xi), 2);
    }
    return s;
  }

  /// Periodic box of the given length.
  static DomainSpec periodic_box(double length, std::size_t nx) {
    DomainSpec d;
    d.kind = DomainKind::periodic;
    d.length = length;
    d.useful_length = length;
    d.nx = nx;
    return d;
  }

  /// Open plate whose last `buffer_fraction` of the length is cropped.
  static DomainSpec open_plate(double length, std::size_t nx, double buffer_fraction,
                               InletForcing inlet) {
    DomainSpec d;
    d.kind = DomainKind::open;
    d.length = length;
    d.useful_length = length * (1.0 - buffer_fraction);
    d.nx = nx;
    d.inlet = inlet;
    return d;
  }
};

/// Nodes held at the inlet state; the rest of the plate sees central stencils.
inline constexpr Eigen::Index inlet_nodes = 3;

/// Imposes h = 1 + A sin(2 pi f t) and q = h^3 / 3 on the inlet nodes.
inline void apply_inlet(HydroState& s, double t, const DomainSpec& d) {
  if (d.kind != DomainKind::open) throw UsageError("apply_inlet: periodic domains have no inlet");
  const double h0 = d.inlet.thickness(t);
  s.h.head(inlet_nodes).setConstant(h0);
  s.q.head(inlet_nodes).setConstant(inlet_flowrate(h0));
}

/// Inlet free-surface temperature for the chosen thermal inlet mode.
inline double inlet_theta(const DomainSpec& d, double h0, double bi) {
  return d.thermal_inlet == ThermalInlet::hot ? 1.0 : theta0(h0, bi);
}

/// Trailing nodes copied from the last interior node (zero-gradient closure).
inline constexpr Eigen::Index outlet_nodes = 3;

inline void apply_outlet(Field& f) {
  const Eigen::Index n = f.size();
  if (n > outlet_nodes) f.tail(outlet_nodes).setConstant(f[n - outlet_nodes - 1]);
}

inline void apply_outlet(HydroState& s) {
  apply_outlet(s.h);
  apply_outlet(s.q);
}

/// Restriction of a field to the useful region.
inline Field crop(const Field& f, const DomainSpec& d) {
  return f.head(static_cast<Eigen::Index>(d.useful_points()));
}

/// Cyclic shift by `cells` (positive moves content downstream).
inline Field periodic_shift(const Field& f, Eigen::Index cells) {
  const Eigen::Index n = f.size();
  Field out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[((i + cells) % n + n) % n] = f[i];
  return out;
}

}  // namespace filmheat
