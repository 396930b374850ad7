#pragma once

// Relaxation of temperature perturbations on a flat film: the exact
// spectrum of the cross-film diffusion operator and the damping rates of
// each averaged model.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "filmheat/chebyshev.hpp"
#include "filmheat/error.hpp"
#include "filmheat/models.hpp"

namespace filmheat {

/// Roots l_n of l cot l + Bih = 0, n = 1..n_modes. Pass
/// std::numeric_limits<double>::infinity() for an isothermal free surface.
inline std::vector<double> relaxation_roots(double bih, int n_modes) {
  if (n_modes < 1) throw UsageError("relaxation_roots: n_modes must be >= 1");
  if (!(bih >= 0.0)) throw DomainError("relaxation_roots: Bih must be >= 0");
  constexpr double pi = std::numbers::pi;
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(n_modes));
  for (int n = 1; n <= n_modes; ++n) {
    const double lo0 = (n - 0.5) * pi;
    const double hi0 = n * pi;
    if (std::isinf(bih)) {
      roots.push_back(hi0);
      continue;
    }
    if (bih == 0.0) {
      roots.push_back(lo0);
      continue;
    }
    // l cos l + Bih sin l has no poles and changes sign on the bracket
    auto f = [bih](double l) { return l * std::cos(l) + bih * std::sin(l); };
    double lo = lo0;
    double hi = hi0;
    double flo = f(lo);
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double l = 0.5 * (lo + hi);
    const double df = std::cos(l) - l * std::sin(l) + bih * std::cos(l);
    if (df != 0.0) {
      const double polished = l - f(l) / df;
      if (polished > lo0 && polished < hi0) l = polished;
    }
    roots.push_back(l);
  }
  return roots;
}

/// Growth rate of the n-th relaxation mode with streamwise diffusion,
/// -(l^2 + k^2) / (3 Pe).
inline double exact_damping(double l, double pe, double k) {
  if (!(pe > 0.0)) throw DomainError("exact_damping: Pe must be positive");
  return -(l * l + k * k) / (3.0 * pe);
}

/// Damping rates 3 Pe lambda of a model linearised on the flat film,
/// sorted from least to most damped. Theta-phi returns both eigenvalues of
/// its 2x2 relaxation matrix.
inline std::vector<double> model_damping(ThermalModel model, double bih, double k) {
  if (!(bih >= 0.0)) throw DomainError("model_damping: Bih must be >= 0");
  const double k2 = k * k;
  switch (model) {
    case ThermalModel::theta:
      return {-60.0 * (1.0 + bih) / (27.0 + 7.0 * bih) - k2};
    case ThermalModel::lin_truncated:
      return {-6.0 * (1.0 + bih) / (3.0 + bih) - k2};
    case ThermalModel::scheid:
      return {-3.0 - k2};
    case ThermalModel::theta_phi: {
      // C = [[-k^2, 1], [-60(1+Bih), -(27+7Bih) - k^2]]
      const double a = -k2;
      const double d = -(27.0 + 7.0 * bih) - k2;
      const double bc = -60.0 * (1.0 + bih);
      const double tr = a + d;
      const double disc = (a - d) * (a - d) + 4.0 * bc;
      if (disc < 0.0) throw NumericalError("model_damping: complex theta-phi eigenvalues");
      const double s = std::sqrt(disc);
      return {0.5 * (tr + s), 0.5 * (tr - s)};
    }
  }
  throw UsageError("model_damping: unknown model");
}

/// Relaxation matrix C(k) of the theta-phi model (in 3 Pe lambda units).
inline Eigen::Matrix2d theta_phi_relaxation_matrix(double bih, double k) {
  Eigen::Matrix2d c;
  c << -k * k, 1.0, -60.0 * (1.0 + bih), -(27.0 + 7.0 * bih) - k * k;
  return c;
}

struct DampingResult {
  std::vector<std::complex<double>> lambdas;  ///< growth rates, least damped first
  std::vector<double> scaled;                 ///< 3 Pe Re(lambda)
};

/// Chebyshev-collocation solution of the advected relaxation problem
/// 3 Pe (lambda + i k u) T = T'' - k^2 T on the Nusselt flat film
/// (h = 1, q = 1/3, u = y - y^2/2) with T(0) = 0 and T'(1) + Bih T(1) = 0.
/// Boundary rows are eliminated, leaving a standard complex eigenproblem
/// on the interior nodes.
inline DampingResult advected_spectrum(double pe, double bih, double k, int n_cheb,
                                       int n_modes = 3) {
  if (n_cheb < 16) throw UsageError("advected_spectrum: n_cheb must be >= 16");
  if (!(pe > 0.0)) throw DomainError("advected_spectrum: Pe must be positive");
  if (!(bih >= 0.0)) throw DomainError("advected_spectrum: Bih must be >= 0");
  const UnitIntervalGrid grid(static_cast<std::size_t>(n_cheb));
  const Eigen::Index n = grid.size() - 1;
  const Eigen::MatrixXd& d1 = grid.d1();
  const Eigen::MatrixXd& d2 = grid.d2();

  // T_n = sum_j alpha_j T_j over interior j (T_0 = 0)
  const double denom = d1(n, n) + bih;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index j = 1; j < n; ++j) alpha[j] = -d1(n, j) / denom;

  using cd = std::complex<double>;
  const Eigen::Index m = n - 1;
  Eigen::MatrixXcd a(m, m);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double y = grid.nodes()[i];
    const double u = y - 0.5 * y * y;
    for (Eigen::Index j = 1; j < n; ++j) {
      double diff = d2(i, j) + d2(i, n) * alpha[j];
      if (i == j) diff -= k * k;
      cd entry = diff / (3.0 * pe);
      if (i == j) entry -= cd(0.0, k * u);
      a(i - 1, j - 1) = entry;
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("advected_spectrum: eigen-solver failed (n_cheb = " +
                         std::to_string(n_cheb) + ", Pe = " + std::to_string(pe) + ")");
  std::vector<cd> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + m);
  std::sort(ev.begin(), ev.end(), [](cd x, cd y) { return x.real() > y.real(); });
  DampingResult out;
  const auto keep = std::min<std::size_t>(ev.size(), static_cast<std::size_t>(n_modes));
  for (std::size_t i = 0; i < keep; ++i) {
    out.lambdas.push_back(ev[i]);
    out.scaled.push_back(3.0 * pe * ev[i].real());
  }
  return out;
}

}  // namespace filmheat
