#pragma once

// Reference solver for the full Fourier equation across the film, written
// in the mapped coordinates (x, ybar = y/h) so the domain is a fixed strip.
// Cross-stream: Chebyshev collocation; streamwise: the model FD grid.
//
// With g = hx/h the equation reads
//   3Pe [T_t + u T_x + W T_ybar] = T_xx - 2 ybar g T_xybar
//                                  + (ybar^2 g^2 + 1/h^2) T_ybarybar
//                                  + ybar (2 hx^2/h^2 - hxx/h) T_ybar
// where W = [-3 qx (ybar^2/2 - ybar^3/6) - ybar h_t] / h is the cross-stream
// velocity seen by the moving grid. The ybar terms and the mixed derivative
// are integrated implicitly: each column is factorised once per stage and the
// coupling between columns (mixed term, hx T_x in the surface condition) is
// iterated to convergence. Streamwise advection and T_xx are explicit.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "filmheat/chebyshev.hpp"
#include "filmheat/closure.hpp"
#include "filmheat/error.hpp"
#include "filmheat/finite_difference.hpp"
#include "filmheat/hydro.hpp"
#include "filmheat/parameters.hpp"

namespace filmheat {

/// T(x_i, ybar_j) stored as T(i, j).
struct TemperatureField2D {
  Field x;
  Eigen::VectorXd ybar;
  Eigen::ArrayXXd T;
  Field h;
  Field q;
  double t = 0.0;
};

/// Conductive profile T_Nu on every column.
inline Eigen::ArrayXXd nusselt_field(const Field& h, const Eigen::VectorXd& ybar, double bi) {
  Eigen::ArrayXXd T(h.size(), ybar.size());
  for (Eigen::Index j = 0; j < ybar.size(); ++j)
    T.col(j) = 1.0 + (1.0 / (1.0 + bi * h) - 1.0) * ybar[j];
  return T;
}

/// Mapping coefficients for one flow snapshot.
struct MappedCoefficients {
  Eigen::ArrayXXd diffusion;  ///< ybar^2 g^2 + 1/h^2
  Eigen::ArrayXXd drift;      ///< ybar (2 hx^2/h^2 - hxx/h)
  Eigen::ArrayXXd w;          ///< cross-stream grid velocity W
  Eigen::ArrayXXd u;          ///< streamwise velocity
  Eigen::ArrayXXd cross;      ///< -2 ybar g
  Field surface_normal;       ///< (1 + hx^2)/h, multiplies T_ybar in the surface row
  Field surface_robin;        ///< Bi sqrt(1 + hx^2)
  Field hx;
  Field h;
};

/// Dense LU with partial pivoting for a batch of small column-major systems.
class ColumnFactors {
 public:
  ColumnFactors(Eigen::Index m, Eigen::Index count)
      : m_(m), data_(static_cast<std::size_t>(m * m * count)),
        pivots_(static_cast<std::size_t>(m * count)) {}

  double* matrix(Eigen::Index k) { return &data_[static_cast<std::size_t>(k * m_ * m_)]; }

  void factor(Eigen::Index k) {
    double* a = matrix(k);
    int* piv = &pivots_[static_cast<std::size_t>(k * m_)];
    for (Eigen::Index j = 0; j < m_; ++j) {
      Eigen::Index p = j;
      double big = std::abs(a[j * m_ + j]);
      for (Eigen::Index r = j + 1; r < m_; ++r) {
        const double v = std::abs(a[j * m_ + r]);
        if (v > big) {
          big = v;
          p = r;
        }
      }
      if (!(big > 0.0)) throw NumericalError("ColumnFactors: singular column system");
      piv[j] = static_cast<int>(p);
      if (p != j)
        for (Eigen::Index q = 0; q < m_; ++q) std::swap(a[q * m_ + j], a[q * m_ + p]);
      const double inv = 1.0 / a[j * m_ + j];
      for (Eigen::Index r = j + 1; r < m_; ++r) a[j * m_ + r] *= inv;
      for (Eigen::Index q = j + 1; q < m_; ++q) {
        const double f = a[q * m_ + j];
        if (f == 0.0) continue;
        for (Eigen::Index r = j + 1; r < m_; ++r) a[q * m_ + r] -= a[j * m_ + r] * f;
      }
    }
  }

  void solve(Eigen::Index k, double* b) const {
    const double* a = &data_[static_cast<std::size_t>(k * m_ * m_)];
    const int* piv = &pivots_[static_cast<std::size_t>(k * m_)];
    for (Eigen::Index j = 0; j < m_; ++j)
      if (piv[j] != j) std::swap(b[j], b[piv[j]]);
    for (Eigen::Index j = 0; j < m_; ++j) {
      const double v = b[j];
      if (v == 0.0) continue;
      for (Eigen::Index r = j + 1; r < m_; ++r) b[r] -= a[j * m_ + r] * v;
    }
    for (Eigen::Index j = m_ - 1; j >= 0; --j) {
      b[j] /= a[j * m_ + j];
      const double v = b[j];
      for (Eigen::Index r = 0; r < j; ++r) b[r] -= a[j * m_ + r] * v;
    }
  }

 private:
  Eigen::Index m_;
  std::vector<double> data_;
  std::vector<int> pivots_;
};

class MappedFourier {
 public:
  MappedFourier(const Grid1D& grid, std::size_t n_cheb, const DimensionlessGroups& g)
      : grid_(&grid), cheb_(n_cheb), groups_(g) {
    if (n_cheb < 4) throw UsageError("MappedFourier: need at least 4 Chebyshev intervals");
    d1t_ = cheb_.d1().transpose();
    d2t_ = cheb_.d2().transpose();
  }

  [[nodiscard]] const UnitIntervalGrid& cheb() const { return cheb_; }
  [[nodiscard]] const Grid1D& grid() const { return *grid_; }
  [[nodiscard]] Eigen::Index ny() const { return cheb_.size(); }
  [[nodiscard]] Eigen::Index nx() const { return static_cast<Eigen::Index>(grid_->size()); }
  [[nodiscard]] const DimensionlessGroups& groups() const { return groups_; }

  [[nodiscard]] MappedCoefficients coefficients(const FlowKinematics& k,
                                                const Field& dh_dt) const {
    if (!(k.h > 1e-8).all()) throw NumericalError("MappedFourier: mapping singular (h -> 0)");
    const Eigen::VectorXd& yb = cheb_.nodes();
    const Eigen::Index nx_ = k.h.size();
    const Eigen::Index ny_ = yb.size();
    const Field gx = k.hx / k.h;
    const Field drift_x = 2.0 * k.hx * k.hx / (k.h * k.h) - k.hxx / k.h;
    MappedCoefficients c;
    c.diffusion.resize(nx_, ny_);
    c.drift.resize(nx_, ny_);
    c.w.resize(nx_, ny_);
    c.u.resize(nx_, ny_);
    c.cross.resize(nx_, ny_);
    for (Eigen::Index j = 0; j < ny_; ++j) {
      const double y = yb[j];
      c.diffusion.col(j) = y * y * gx * gx + 1.0 / (k.h * k.h);
      c.drift.col(j) = y * drift_x;
      c.w.col(j) = (-3.0 * k.qx * (0.5 * y * y - y * y * y / 6.0) - y * dh_dt) / k.h;
      c.u.col(j) = 3.0 * k.q / k.h * (y - 0.5 * y * y);
      c.cross.col(j) = -2.0 * y * gx;
    }
    c.surface_normal = (1.0 + k.hx * k.hx) / k.h;
    c.surface_robin = groups_.bi * (1.0 + k.hx * k.hx).sqrt();
    c.hx = k.hx;
    c.h = k.h;
    return c;
  }

  /// Streamwise part: T_xx/(3Pe) - u T_x.
  [[nodiscard]] Eigen::ArrayXXd explicit_rate(const MappedCoefficients& c,
                                              const Eigen::ArrayXXd& T) const {
    const Eigen::ArrayXXd tx = grid_->op(1).apply_columns(T);
    const Eigen::ArrayXXd txx = grid_->op(2).apply_columns(T);
    Eigen::ArrayXXd r = txx / (3.0 * groups_.pe) - c.u * tx;
    zero_boundary_rows(r);
    return r;
  }

  /// Cross-stream part: [a T_yy + b T_y - 2 ybar g T_xy]/(3Pe) - W T_y.
  [[nodiscard]] Eigen::ArrayXXd implicit_rate(const MappedCoefficients& c,
                                              const Eigen::ArrayXXd& T) const {
    const Eigen::ArrayXXd ty = (T.matrix() * d1t_).array();
    const Eigen::ArrayXXd tyy = (T.matrix() * d2t_).array();
    Eigen::ArrayXXd r = (c.diffusion * tyy + c.drift * ty) / (3.0 * groups_.pe) - c.w * ty +
                        mixed_term(c, T);
    zero_boundary_rows(r);
    return r;
  }

  /// Full dT/dt at interior collocation rows; boundary rows carry the
  /// constraint residuals' zero rate.
  [[nodiscard]] Eigen::ArrayXXd rhs(const MappedCoefficients& c, const Eigen::ArrayXXd& T) const {
    return explicit_rate(c, T) + implicit_rate(c, T);
  }

  /// Residual of the free-surface Newton law per column,
  /// (1 + hx^2)/h T_ybar - hx T_x + Bi sqrt(1 + hx^2) T at ybar = 1.
  [[nodiscard]] Field surface_residual(const MappedCoefficients& c,
                                       const Eigen::ArrayXXd& T) const {
    const Eigen::Index n = ny() - 1;
    const Field ts = T.col(n);
    const Field ty = (T.matrix() * d1t_.col(n)).array();
    return c.surface_normal * ty - c.hx * grid_->d1(ts) + c.surface_robin * ts;
  }

  /// Solves Y - gdt * implicit(Y) = rhs on interior rows with T = 1 at the
  /// wall and the Newton law at the surface.
  [[nodiscard]] Eigen::ArrayXXd implicit_solve(const MappedCoefficients& c,
                                               const Eigen::ArrayXXd& rhs, double gdt,
                                               const std::optional<Eigen::VectorXd>& inlet) const {
    const Eigen::Index nx_ = nx();
    const Eigen::Index m = ny();
    const Eigen::Index n = m - 1;
    const double s = 1.0 / (3.0 * groups_.pe);
    const Eigen::MatrixXd& d1 = cheb_.d1();
    const Eigen::MatrixXd& d2 = cheb_.d2();

    // one small dense factorisation per streamwise node
    ColumnFactors lu(m, nx_);
    for (Eigen::Index i = 0; i < nx_; ++i) {
      double* a = lu.matrix(i);
      for (Eigen::Index p = 1; p < n; ++p) {
        const double dif = -gdt * s * c.diffusion(i, p);
        const double drf = -gdt * (s * c.drift(i, p) - c.w(i, p));
        for (Eigen::Index q = 0; q < m; ++q) a[q * m + p] = dif * d2(p, q) + drf * d1(p, q);
        a[p * m + p] += 1.0;
      }
      for (Eigen::Index q = 0; q < m; ++q) {
        a[q * m] = 0.0;
        a[q * m + n] = c.surface_normal[i] * d1(n, q);
      }
      a[0] = 1.0;
      a[n * m + n] += c.surface_robin[i];
      lu.factor(i);
    }

    // transposed storage: column i holds the profile at x_i
    Eigen::MatrixXd base = rhs.matrix().transpose();
    base.row(0).setOnes();
    base.row(n).setZero();
    const Eigen::MatrixXd cross_t = (gdt * s) * c.cross.matrix().transpose();
    const Eigen::RowVectorXd hx_t = c.hx.matrix().transpose();
    Eigen::MatrixXd T = base;
    for (Eigen::Index i = 0; i < nx_; ++i) lu.solve(i, &T(0, i));
    apply_streamwise_bc_t(T, inlet);
    Eigen::MatrixXd next(m, nx_);
    double change_prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it < max_iterations_; ++it) {
      const Eigen::MatrixXd tx = grid_->op(1).apply_transposed(T);
      next.noalias() = d1 * tx;
      next.array() *= cross_t.array();
      next += base;
      next.row(n) = hx_t.cwiseProduct(tx.row(n));
      for (Eigen::Index i = 0; i < nx_; ++i) lu.solve(i, &next(0, i));
      apply_streamwise_bc_t(next, inlet);
      const double change = (next - T).cwiseAbs().maxCoeff();
      T.swap(next);
      if (change < tolerance_) return T.transpose().array();
      if (it > 2 && change > 0.9 * change_prev)
        throw NumericalError("MappedFourier: column coupling iteration not contracting");
      change_prev = change;
    }
    throw NumericalError("MappedFourier: column coupling iteration did not converge");
  }

  /// Restores T = 1 at the wall and the Newton law at the surface for the
  /// current interior values.
  void project(const MappedCoefficients& c, Eigen::ArrayXXd& T,
               const std::optional<Eigen::VectorXd>& inlet) const {
    const Eigen::Index n = ny() - 1;
    const Eigen::MatrixXd& d1 = cheb_.d1();
    T.col(0).setConstant(1.0);
    const Eigen::VectorXd dn = d1.row(n).transpose();
    // surface value: (hx T_x - N sum_{j<n} D_nj T_j) / (N D_nn + R)
    const Field partial = (T.leftCols(n).matrix() * dn.head(n)).array();
    const Field denom = c.surface_normal * d1(n, n) + c.surface_robin;
    for (int it = 0; it < max_iterations_; ++it) {
      const Field ts_old = T.col(n);
      const Field tx = grid_->d1(ts_old);
      T.col(n) = (c.hx * tx - c.surface_normal * partial) / denom;
      apply_streamwise_bc(T, inlet);
      if ((T.col(n) - ts_old).abs().maxCoeff() < tolerance_) return;
    }
    throw NumericalError("MappedFourier: surface condition did not converge");
  }

  [[nodiscard]] Field surface_temperature(const Eigen::ArrayXXd& T) const {
    return T.col(ny() - 1);
  }

  /// -dT/dy at the wall, positive when heat enters the film.
  [[nodiscard]] Field wall_flux(const Field& h, const Eigen::ArrayXXd& T) const {
    return -(T.matrix() * d1t_.col(0)).array() / h;
  }

  /// Conductive flux leaving through the surface, -(dT/dn) per unit x,
  /// recomputed from the interior gradient (equals Bi T sqrt(1+hx^2) once
  /// the Newton law holds).
  [[nodiscard]] Field surface_gradient_flux(const MappedCoefficients& c,
                                            const Eigen::ArrayXXd& T) const {
    const Eigen::Index n = ny() - 1;
    const Field ty = (T.matrix() * d1t_.col(n)).array();
    return -(c.surface_normal * ty - c.hx * grid_->d1(T.col(n)));
  }

 private:
  void zero_boundary_rows(Eigen::ArrayXXd& r) const {
    r.col(0).setZero();
    r.col(ny() - 1).setZero();
    if (!grid_->periodic()) {
      r.row(0).setZero();
      r.row(nx() - 1).setZero();
    }
  }

  void apply_streamwise_bc_t(Eigen::MatrixXd& T, const std::optional<Eigen::VectorXd>& inlet) const {
    if (grid_->periodic()) return;
    if (inlet) T.col(0) = *inlet;
    T.col(nx() - 1) = T.col(nx() - 2);
  }

  void apply_streamwise_bc(Eigen::ArrayXXd& T, const std::optional<Eigen::VectorXd>& inlet) const {
    if (grid_->periodic()) return;
    if (inlet) T.row(0) = inlet->transpose().array();
    T.row(nx() - 1) = T.row(nx() - 2);
  }

  /// -2 ybar g T_xy / (3Pe)
  [[nodiscard]] Eigen::ArrayXXd mixed_term(const MappedCoefficients& c,
                                           const Eigen::ArrayXXd& T) const {
    const Eigen::ArrayXXd tx = grid_->op(1).apply_columns(T);
    return c.cross * (tx.matrix() * d1t_).array() / (3.0 * groups_.pe);
  }

  const Grid1D* grid_;
  UnitIntervalGrid cheb_;
  DimensionlessGroups groups_;
  Eigen::MatrixXd d1t_;
  Eigen::MatrixXd d2t_;
  int max_iterations_ = 60;
  double tolerance_ = 1e-12;
};

/// Steady conduction across a flat film in the wall-compatible Chebyshev
/// basis T = 1 + sum tau_i phi_i(X), X = 2 ybar - 1, closed at the surface
/// by the eta-regularised Newton row.
struct SteadyProfile {
  Eigen::VectorXd ybar;
  Eigen::VectorXd T;
  Eigen::VectorXd tau;
};

inline SteadyProfile flat_film_steady_cheb(const DimensionlessGroups& g, std::size_t n, double eta,
                                           double h = 1.0) {
  if (n < 8) throw UsageError("flat_film_steady_cheb: n must be >= 8");
  if (!(eta > 0.0)) throw UsageError("flat_film_steady_cheb: eta must be positive");
  if (!(h > 0.0)) throw DomainError("flat_film_steady_cheb: h must be positive");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  const double pi = std::numbers::pi;
  // interior Gauss-Lobatto rows: d_yy T = (4/h^2) sum tau_j phi_j'' = 0
  for (Eigen::Index i = 1; i < m; ++i) {
    const double x = -std::cos(pi * static_cast<double>(i) / static_cast<double>(n));
    for (Eigen::Index j = 0; j < m; ++j)
      a(i - 1, j) = 4.0 / (h * h) * basis_phi(static_cast<std::size_t>(j + 1), x).d2t;
  }
  // surface row: eta T_xx = T_y - hx T_x + Bi T sqrt(1 + hx^2); on a flat
  // film every x-derivative is zero, so eta multiplies a vanishing term.
  const double txx = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const ChebyshevValue v = basis_phi(static_cast<std::size_t>(j + 1), 1.0);
    a(m - 1, j) = 2.0 / h * v.dt + g.bi * v.t;
  }
  b[m - 1] = eta * txx - g.bi;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericalError("flat_film_steady_cheb: singular collocation system");
  SteadyProfile out;
  out.tau = lu.solve(b);
  out.ybar.resize(m + 1);
  out.T.resize(m + 1);
  for (Eigen::Index i = 0; i <= m; ++i) {
    const double x = -std::cos(pi * static_cast<double>(i) / static_cast<double>(n));
    double t = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) t += out.tau[j] * basis_phi(static_cast<std::size_t>(j + 1), x).t;
    out.ybar[i] = 0.5 * (x + 1.0);
    out.T[i] = t;
  }
  out.ybar[0] = 0.0;
  out.ybar[m] = 1.0;
  return out;
}

}  // namespace filmheat
