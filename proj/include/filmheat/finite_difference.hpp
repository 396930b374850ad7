#pragma once

// Uniform streamwise grid and fourth-order finite-difference operators.
// Periodic grids use central stencils with wrapped indices; open grids use
// the same stencil width shifted inwards near the ends.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "filmheat/error.hpp"

namespace filmheat {

using Field = Eigen::ArrayXd;

enum class BoundaryKind { periodic, open };

/// Finite-difference weights for the derivatives of order 0..m at x0 on the
/// nodes `x` (Fornberg's recursion). Returns weights[order][node].
inline std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x,
                                                         int m) {
  const auto n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// One derivative operator: per-row first index and weights.
class Stencil {
 public:
  Stencil() = default;

  [[nodiscard]] Field apply(const Field& f) const {
    Field out(static_cast<Eigen::Index>(first_.size()));
    apply_raw(f.data(), out.data());
    return out;
  }

  /// Applies the operator along the first index of a 2D array.
  [[nodiscard]] Eigen::ArrayXXd apply_columns(const Eigen::ArrayXXd& f) const {
    const auto n = static_cast<Eigen::Index>(first_.size());
    Eigen::ArrayXXd out(n, f.cols());
    for (Eigen::Index c = 0; c < f.cols(); ++c) apply_raw(&f(0, c), &out(0, c));
    return out;
  }

  /// Applies the operator along the second index: out.col(i) = sum w f.col(j).
  [[nodiscard]] Eigen::MatrixXd apply_transposed(const Eigen::MatrixXd& f) const {
    const auto n = static_cast<Eigen::Index>(first_.size());
    const Eigen::Index m = f.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* wt = &weights_[static_cast<std::size_t>(i) * width_];
      Eigen::Index j = first_[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < width_; ++k, ++j) {
        Eigen::Index jj = j;
        if (jj < 0) jj += n;
        if (jj >= n) jj -= n;
        out.col(i) += wt[k] * f.col(jj);
      }
    }
    return out;
  }

  /// Adds scale * row_scale[i] * D into `triplets` at (row_offset, col_offset).
  void add_triplets(std::vector<Eigen::Triplet<double>>& triplets, const Field& row_scale,
                    Eigen::Index row_offset, Eigen::Index col_offset, double scale = 1.0) const {
    const auto n = static_cast<Eigen::Index>(first_.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* wt = &weights_[static_cast<std::size_t>(i) * width_];
      Eigen::Index j = first_[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < width_; ++k, ++j) {
        Eigen::Index jj = j;
        if (jj < 0) jj += n;
        if (jj >= n) jj -= n;
        triplets.emplace_back(row_offset + i, col_offset + jj, scale * row_scale[i] * wt[k]);
      }
    }
  }

  [[nodiscard]] std::size_t width() const { return width_; }

  static Stencil build(std::size_t n, double dx, int order, BoundaryKind bc) {
    Stencil s;
    s.width_ = order >= 3 ? 7 : 5;
    const auto half = static_cast<Eigen::Index>(s.width_ / 2);
    s.first_.resize(n);
    s.weights_.resize(n * s.width_);
    const double scale = std::pow(dx, -order);
    const std::vector<double> central = central_weights(order);
    const auto nn = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < nn; ++i) {
      Eigen::Index first = i - half;
      std::vector<double> w = central;
      if (bc == BoundaryKind::open) {
        first = std::clamp<Eigen::Index>(first, 0, nn - static_cast<Eigen::Index>(s.width_));
        if (first != i - half) {
          std::vector<double> nodes(s.width_);
          for (std::size_t k = 0; k < s.width_; ++k)
            nodes[k] = static_cast<double>(first + static_cast<Eigen::Index>(k) - i);
          w = fornberg_weights(0.0, nodes, order)[static_cast<std::size_t>(order)];
        }
      }
      s.first_[static_cast<std::size_t>(i)] = first;
      for (std::size_t k = 0; k < s.width_; ++k)
        s.weights_[static_cast<std::size_t>(i) * s.width_ + k] = w[k] * scale;
    }
    return s;
  }

 private:
  void apply_raw(const double* f, double* out) const {
    const auto n = static_cast<Eigen::Index>(first_.size());
    const auto w = static_cast<Eigen::Index>(width_);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* wt = &weights_[static_cast<std::size_t>(i) * width_];
      const Eigen::Index j0 = first_[static_cast<std::size_t>(i)];
      double s = 0.0;
      if (j0 >= 0 && j0 + w <= n) {
        for (Eigen::Index k = 0; k < w; ++k) s += wt[k] * f[j0 + k];
      } else {
        for (Eigen::Index k = 0; k < w; ++k) {
          Eigen::Index jj = j0 + k;
          if (jj < 0) jj += n;
          if (jj >= n) jj -= n;
          s += wt[k] * f[jj];
        }
      }
      out[i] = s;
    }
  }

  static std::vector<double> central_weights(int order) {
    switch (order) {
      case 1: return {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
      case 2: return {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
      case 3: return {1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0};
      default: throw UsageError("Stencil: derivative order must be 1, 2 or 3");
    }
  }

  std::size_t width_ = 0;
  std::vector<Eigen::Index> first_;
  std::vector<double> weights_;
};

/// Uniform streamwise grid with its derivative operators.
class Grid1D {
 public:
  Grid1D(std::size_t n, double length, BoundaryKind bc) : n_(n), length_(length), bc_(bc) {
    if (n < 8) throw UsageError("Grid1D: at least 8 points required");
    if (!(length > 0.0)) throw UsageError("Grid1D: length must be positive");
    dx_ = bc == BoundaryKind::periodic ? length / static_cast<double>(n)
                                       : length / static_cast<double>(n - 1);
    for (int order = 1; order <= 3; ++order)
      ops_[static_cast<std::size_t>(order - 1)] = Stencil::build(n, dx_, order, bc);
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double dx() const { return dx_; }
  [[nodiscard]] BoundaryKind boundary() const { return bc_; }
  [[nodiscard]] bool periodic() const { return bc_ == BoundaryKind::periodic; }
  [[nodiscard]] double x(std::size_t i) const { return static_cast<double>(i) * dx_; }
  [[nodiscard]] Field coordinates() const {
    return Field::LinSpaced(static_cast<Eigen::Index>(n_), 0.0,
                            dx_ * static_cast<double>(n_ - 1));
  }

  [[nodiscard]] const Stencil& op(int order) const {
    return ops_.at(static_cast<std::size_t>(order - 1));
  }
  [[nodiscard]] Field d1(const Field& f) const { return ops_[0].apply(f); }
  [[nodiscard]] Field d2(const Field& f) const { return ops_[1].apply(f); }
  [[nodiscard]] Field d3(const Field& f) const { return ops_[2].apply(f); }

 private:
  std::size_t n_;
  double length_;
  double dx_ = 0.0;
  BoundaryKind bc_;
  std::array<Stencil, 3> ops_;
};

}  // namespace filmheat
