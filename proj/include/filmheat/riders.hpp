#pragma once

// Thermal solvers that ride on a shared hydrodynamic trajectory. Every rider
// exposes the same IMEX split: an explicit rate, a stiff part that is linear
// in the rider's own unknowns, a solver for (I - gdt * stiff) y = rhs and a
// projection onto its boundary constraints.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "filmheat/domain.hpp"
#include "filmheat/fourier.hpp"
#include "filmheat/hydro.hpp"
#include "filmheat/models.hpp"
#include "filmheat/thermal.hpp"

namespace filmheat {

/// Hydrodynamic state at one stage of a step, shared by all riders.
struct StageFlow {
  double t = 0.0;
  std::uint64_t serial = 0;  ///< unique per flow snapshot; 0 disables caching
  FlowKinematics kin;
  Field dh_dt;
};

class ThermalRider {
 public:
  virtual ~ThermalRider() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual Field explicit_rate(const StageFlow& s, const Field& y) const = 0;
  [[nodiscard]] virtual Field implicit_rate(const StageFlow& s, const Field& y) const = 0;
  [[nodiscard]] virtual Field implicit_solve(const StageFlow& s, const Field& rhs,
                                             double gdt) const = 0;
  virtual void project(const StageFlow& s, Field& y) const = 0;

  /// Coefficient of the explicit streamwise diffusion.
  [[nodiscard]] virtual double streamwise_diffusivity() const = 0;

  [[nodiscard]] virtual Field surface_theta(const Field& y) const = 0;
  [[nodiscard]] virtual Field wall_flux(const StageFlow& s, const Field& y) const = 0;

  /// Newton-law flux Bi theta sqrt(1 + hx^2) through the free surface.
  [[nodiscard]] Field interface_flux(const StageFlow& s, const Field& y) const {
    return bi() * surface_theta(y) * (1.0 + s.kin.hx * s.kin.hx).sqrt();
  }

  [[nodiscard]] virtual double bi() const = 0;
};

/// One of the averaged models. State layout: theta, followed by phi for the
/// two-variable model.
class ModelRider final : public ThermalRider {
 public:
  ModelRider(ThermalModel model, const Grid1D& grid, const DimensionlessGroups& g,
             const DomainSpec& domain)
      : model_(model), grid_(&grid), groups_(g), domain_(domain) {}

  [[nodiscard]] ThermalModel model() const { return model_; }
  [[nodiscard]] std::string name() const override { return to_string(model_); }
  [[nodiscard]] double bi() const override { return groups_.bi; }
  [[nodiscard]] double streamwise_diffusivity() const override { return 1.0 / (3.0 * groups_.pe); }
  [[nodiscard]] Eigen::Index n() const { return static_cast<Eigen::Index>(grid_->size()); }
  [[nodiscard]] bool two_field() const { return model_ == ThermalModel::theta_phi; }

  /// Conductive equilibrium for the given thickness.
  [[nodiscard]] Field equilibrium(const Field& h) const {
    Field y = Field::Zero(two_field() ? 2 * h.size() : h.size());
    y.head(h.size()) = theta0_field(h, groups_.bi);
    return y;
  }

  [[nodiscard]] ThermalState unpack(const Field& y) const {
    ThermalState s;
    s.theta = y.head(n());
    if (two_field()) s.phi = y.tail(n());
    return s;
  }

  [[nodiscard]] Field explicit_rate(const StageFlow& s, const Field& y) const override {
    Field r(y.size());
    if (two_field()) {
      const ThermalRate tr = rhs_theta_phi(*grid_, s.kin, unpack(y), groups_, false);
      r << tr.dtheta, tr.dphi;
    } else {
      r = rhs_single(model_, *grid_, s.kin, y, groups_, false);
    }
    zero_boundary(r);
    return r;
  }

  [[nodiscard]] Field implicit_rate(const StageFlow& s, const Field& y) const override {
    Field r(y.size());
    if (two_field()) {
      const auto rel = ThetaPhiRelaxation::at(s.kin.h, groups_);
      const Field theta = y.head(n());
      const Field phi = y.tail(n());
      r << rel.a12 * phi, rel.a21 * (theta - rel.th0) + rel.a22 * phi;
    } else {
      r = -relaxation_rate(model_, s.kin.h, groups_) * (y - theta0_field(s.kin.h, groups_.bi));
    }
    zero_boundary(r);
    return r;
  }

  [[nodiscard]] Field implicit_solve(const StageFlow& s, const Field& rhs,
                                     double gdt) const override {
    Field y(rhs.size());
    if (two_field()) {
      const auto rel = ThetaPhiRelaxation::at(s.kin.h, groups_);
      const Field rt = rhs.head(n());
      const Field rp = rhs.tail(n());
      const Field phi = (rp + gdt * rel.a21 * (rt - rel.th0)) /
                        (1.0 - gdt * rel.a22 - gdt * gdt * rel.a21 * rel.a12);
      y << rt + gdt * rel.a12 * phi, phi;
    } else {
      const Field r = relaxation_rate(model_, s.kin.h, groups_);
      y = (rhs + gdt * r * theta0_field(s.kin.h, groups_.bi)) / (1.0 + gdt * r);
    }
    project(s, y);
    return y;
  }

  void project(const StageFlow& s, Field& y) const override {
    if (domain_.kind != DomainKind::open) return;
    const Eigen::Index m = n();
    y[0] = inlet_theta(domain_, s.kin.h[0], groups_.bi);
    y[m - 1] = y[m - 2];
    if (two_field()) {
      y[m] = 0.0;
      y[2 * m - 1] = y[2 * m - 2];
    }
  }

  [[nodiscard]] Field surface_theta(const Field& y) const override { return y.head(n()); }

  [[nodiscard]] Field wall_flux(const StageFlow& s, const Field& y) const override {
    return model_wall_flux(model_, s.kin.h, unpack(y), groups_.bi);
  }

 private:
  void zero_boundary(Field& r) const {
    if (domain_.kind != DomainKind::open) return;
    const Eigen::Index m = n();
    for (Eigen::Index b = 0; b < r.size(); b += m) {
      r[b] = 0.0;
      r[b + m - 1] = 0.0;
    }
  }

  ThermalModel model_;
  const Grid1D* grid_;
  DimensionlessGroups groups_;
  DomainSpec domain_;
};

/// The mapped Fourier reference. State layout: T(i, j) column-major, i.e.
/// the ybar_j column for all x follows the previous one.
class FourierRider final : public ThermalRider {
 public:
  FourierRider(const Grid1D& grid, std::size_t n_cheb, const DimensionlessGroups& g,
               const DomainSpec& domain)
      : solver_(grid, n_cheb, g), domain_(domain) {}

  [[nodiscard]] std::string name() const override { return "fourier"; }
  [[nodiscard]] double bi() const override { return solver_.groups().bi; }
  [[nodiscard]] double streamwise_diffusivity() const override {
    return 1.0 / (3.0 * solver_.groups().pe);
  }
  [[nodiscard]] const MappedFourier& solver() const { return solver_; }

  [[nodiscard]] Eigen::ArrayXXd as_field(const Field& y) const {
    return Eigen::Map<const Eigen::ArrayXXd>(y.data(), solver_.nx(), solver_.ny());
  }
  [[nodiscard]] Field as_vector(const Eigen::ArrayXXd& T) const {
    return Eigen::Map<const Field>(T.data(), T.size());
  }

  [[nodiscard]] Field equilibrium(const Field& h) const {
    return as_vector(nusselt_field(h, solver_.cheb().nodes(), bi()));
  }

  [[nodiscard]] Field explicit_rate(const StageFlow& s, const Field& y) const override {
    return as_vector(solver_.explicit_rate(coefficients(s), as_field(y)));
  }
  [[nodiscard]] Field implicit_rate(const StageFlow& s, const Field& y) const override {
    return as_vector(solver_.implicit_rate(coefficients(s), as_field(y)));
  }
  [[nodiscard]] Field implicit_solve(const StageFlow& s, const Field& rhs,
                                     double gdt) const override {
    return as_vector(solver_.implicit_solve(coefficients(s), as_field(rhs), gdt, inlet(s)));
  }
  void project(const StageFlow& s, Field& y) const override {
    Eigen::ArrayXXd T = as_field(y);
    solver_.project(coefficients(s), T, inlet(s));
    y = as_vector(T);
  }

  [[nodiscard]] Field surface_theta(const Field& y) const override {
    return y.tail(solver_.nx());
  }
  [[nodiscard]] Field wall_flux(const StageFlow& s, const Field& y) const override {
    return solver_.wall_flux(s.kin.h, as_field(y));
  }

 private:
  [[nodiscard]] const MappedCoefficients& coefficients(const StageFlow& s) const {
    if (s.serial == 0 || s.serial != cached_serial_) {
      cached_ = solver_.coefficients(s.kin, s.dh_dt);
      cached_serial_ = s.serial;
    }
    return cached_;
  }

  [[nodiscard]] std::optional<Eigen::VectorXd> inlet(const StageFlow& s) const {
    if (domain_.kind != DomainKind::open) return std::nullopt;
    const Eigen::VectorXd& yb = solver_.cheb().nodes();
    if (domain_.thermal_inlet == ThermalInlet::hot) return Eigen::VectorXd::Ones(yb.size());
    const double th0 = theta0(s.kin.h[0], bi());
    return (1.0 + (th0 - 1.0) * yb.array()).matrix().eval();
  }

  MappedFourier solver_;
  DomainSpec domain_;
  mutable MappedCoefficients cached_;
  mutable std::uint64_t cached_serial_ = 0;
};

}  // namespace filmheat
