#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Dense>

#include "filmheat/error.hpp"

namespace filmheat {

/// Gauss-Lobatto collocation on [-1, 1] with nodes X_i = -cos(pi i / n),
/// i = 0..n (strictly increasing), and dense differentiation matrices.
class ChebyshevGrid {
 public:
  explicit ChebyshevGrid(std::size_t n) : n_(n) {
    if (n < 2) throw UsageError("ChebyshevGrid: degree must be >= 2");
    const auto m = static_cast<Eigen::Index>(n + 1);
    nodes_.resize(m);
    for (Eigen::Index i = 0; i < m; ++i)
      nodes_[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    d1_.setZero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (i == j) continue;
        const double ci = (i == 0 || i == m - 1) ? 2.0 : 1.0;
        const double cj = (j == 0 || j == m - 1) ? 2.0 : 1.0;
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        d1_(i, j) = ci / cj * sign / (nodes_[i] - nodes_[j]);
      }
      // negative-sum trick: rows of D annihilate constants exactly
      d1_(i, i) = -d1_.row(i).sum();
    }
    d2_ = d1_ * d1_;
  }

  [[nodiscard]] std::size_t degree() const { return n_; }
  [[nodiscard]] std::size_t size() const { return n_ + 1; }
  [[nodiscard]] const Eigen::VectorXd& nodes() const { return nodes_; }
  [[nodiscard]] const Eigen::MatrixXd& d1() const { return d1_; }
  [[nodiscard]] const Eigen::MatrixXd& d2() const { return d2_; }

 private:
  std::size_t n_;
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd d1_;
  Eigen::MatrixXd d2_;
};

/// The same collocation mapped to the reduced film coordinate ybar in [0, 1].
class UnitIntervalGrid {
 public:
  explicit UnitIntervalGrid(std::size_t n) : cheb_(n) {
    nodes_ = (cheb_.nodes().array() + 1.0) * 0.5;
    nodes_[0] = 0.0;
    nodes_[nodes_.size() - 1] = 1.0;
    d1_ = 2.0 * cheb_.d1();
    d2_ = 4.0 * cheb_.d2();
  }

  [[nodiscard]] std::size_t degree() const { return cheb_.degree(); }
  [[nodiscard]] Eigen::Index size() const { return nodes_.size(); }
  [[nodiscard]] const Eigen::VectorXd& nodes() const { return nodes_; }
  [[nodiscard]] const Eigen::MatrixXd& d1() const { return d1_; }
  [[nodiscard]] const Eigen::MatrixXd& d2() const { return d2_; }

  /// Clenshaw-Curtis weights for integrating over [0, 1].
  [[nodiscard]] Eigen::VectorXd quadrature_weights() const {
    const auto n = static_cast<Eigen::Index>(degree());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
    const double pi = std::numbers::pi;
    for (Eigen::Index i = 0; i <= n; ++i) {
      const double theta = pi * static_cast<double>(i) / static_cast<double>(n);
      double s = 0.0;
      for (Eigen::Index k = 1; k <= n / 2; ++k) {
        const double bk = (2 * k == n) ? 1.0 : 2.0;
        s += bk / static_cast<double>(4 * k * k - 1) * std::cos(2.0 * static_cast<double>(k) * theta);
      }
      const double ci = (i == 0 || i == n) ? 1.0 : 2.0;
      w[i] = ci / static_cast<double>(n) * (1.0 - s);
    }
    if (n % 2 == 0) {
      w[0] = 1.0 / static_cast<double>(n * n - 1);
      w[n] = w[0];
    } else {
      w[0] = 1.0 / static_cast<double>(n * n);
      w[n] = w[0];
    }
    return 0.5 * w;  // [-1, 1] -> [0, 1]
  }

 private:
  ChebyshevGrid cheb_;
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd d1_;
  Eigen::MatrixXd d2_;
};

/// Chebyshev polynomial T_n and its first two derivatives at X.
struct ChebyshevValue {
  double t = 0.0;
  double dt = 0.0;
  double d2t = 0.0;
};

inline ChebyshevValue chebyshev_t(std::size_t n, double x) {
  ChebyshevValue prev{1.0, 0.0, 0.0};
  if (n == 0) return prev;
  ChebyshevValue cur{x, 1.0, 0.0};
  for (std::size_t k = 1; k < n; ++k) {
    const ChebyshevValue next{2.0 * x * cur.t - prev.t, 2.0 * cur.t + 2.0 * x * cur.dt - prev.dt,
                              4.0 * cur.dt + 2.0 * x * cur.d2t - prev.d2t};
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Wall-compatible basis: phi_1 = 1 + X, phi_2i = T_2i - 1, phi_2i+1 = T_2i+1 - X.
/// Every phi_i with i >= 2 vanishes at both ends; phi_1 vanishes at X = -1.
inline ChebyshevValue basis_phi(std::size_t i, double x) {
  if (i == 0) throw UsageError("basis_phi: index starts at 1");
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("basis_phi: X outside [-1, 1]");
  if (i == 1) return {1.0 + x, 1.0, 0.0};
  ChebyshevValue v = chebyshev_t(i, x);
  if (i % 2 == 0) {
    v.t -= 1.0;
  } else {
    v.t -= x;
    v.dt -= 1.0;
  }
  return v;
}

}  // namespace filmheat
