// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "sskernel/grid.hpp"

namespace sskernel {

namespace detail {

inline double require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
  return value;
}

}  // namespace detail

/// First-order stable spline (TC) kernel: lambda * min(exp(-beta t), exp(-beta s)).
class TcKernel {
 public:
  TcKernel(double beta, double lambda)
      : beta_(detail::require_positive(beta, "beta")),
        lambda_(detail::require_positive(lambda, "lambda")) {}

  double beta() const noexcept { return beta_; }
  double lambda() const noexcept { return lambda_; }

  double operator()(double t, double s) const noexcept {
    return lambda_ * std::min(std::exp(-beta_ * t), std::exp(-beta_ * s));
  }

  bool operator==(const TcKernel&) const = default;

 private:
  double beta_;
  double lambda_;
};

/// Discrete-time Wiener covariance: lambda * min(t, s).
class WienerKernel {
 public:
  explicit WienerKernel(double lambda) : lambda_(detail::require_positive(lambda, "lambda")) {}

  double lambda() const noexcept { return lambda_; }
  double operator()(double t, double s) const noexcept { return lambda_ * std::min(t, s); }

  bool operator==(const WienerKernel&) const = default;

 private:
  double lambda_;
};

/// White noise: sigma2 on the diagonal, zero elsewhere. Equality is exact.
class WhiteNoiseKernel {
 public:
  explicit WhiteNoiseKernel(double sigma2) : sigma2_(detail::require_positive(sigma2, "sigma2")) {}

  double sigma2() const noexcept { return sigma2_; }
  double operator()(double t, double s) const noexcept { return t == s ? sigma2_ : 0.0; }

  bool operator==(const WhiteNoiseKernel&) const = default;

 private:
  double sigma2_;
};

using KernelSpec = std::variant<TcKernel, WienerKernel, WhiteNoiseKernel>;

inline std::string_view family_name(const KernelSpec& spec) {
  constexpr std::string_view names[] = {"tc", "wiener", "white"};
  return names[spec.index()];
}

inline double eval_kernel(const KernelSpec& spec, double t, double s) {
  if (!std::isfinite(t) || !std::isfinite(s) || t < 0.0 || s < 0.0) {
    throw std::invalid_argument("kernel arguments must be finite and non-negative");
  }
  return std::visit([t, s](const auto& k) { return k(t, s); }, spec);
}

/// Kernel matrix at arbitrary non-negative points; lower triangle mirrored.
inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, std::span<const double> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = eval_kernel(spec, points[static_cast<std::size_t>(i)],
                            points[static_cast<std::size_t>(j)]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

/**
 * Kernel evaluated on every pair of grid instants.
 *
 * Immutable. The LDLT factorization is computed on first request and shared
 * between copies.
 */
class GramMatrix {
 public:
  GramMatrix(KernelSpec kernel, TimeGrid grid)
      : kernel_(kernel),
        grid_(std::move(grid)),
        entries_(kernel_matrix(kernel_, grid_.times())),
        cache_(std::make_shared<FactorCache>()) {}

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  Eigen::Index size() const noexcept { return entries_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  const Eigen::LDLT<Eigen::MatrixXd>& factorization() const {
    std::call_once(cache_->once, [this] { cache_->ldlt.emplace(entries_); });
    return *cache_->ldlt;
  }

 private:
  struct FactorCache {
    std::once_flag once;
    std::optional<Eigen::LDLT<Eigen::MatrixXd>> ldlt;
  };

  KernelSpec kernel_;
  TimeGrid grid_;
  Eigen::MatrixXd entries_;
  std::shared_ptr<FactorCache> cache_;
};

inline GramMatrix gram(const KernelSpec& spec, const TimeGrid& grid) { return GramMatrix(spec, grid); }

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Eigen::MatrixXd& k) {
  if (k.rows() != k.cols() || k.rows() == 0) {
    throw std::invalid_argument("min_eigenvalue needs a non-empty square matrix");
  }
  if (!k.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

inline double min_eigenvalue(const GramMatrix& k) { return min_eigenvalue(k.entries()); }

}  // namespace sskernel
