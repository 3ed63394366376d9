// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sskernel/grid.hpp"
#include "sskernel/kernels.hpp"
#include "sskernel/processes.hpp"
#include "sskernel/random.hpp"

// Entropies are in nats throughout.

namespace sskernel {

/// log(2 pi e)
inline double log_two_pi_e() { return std::log(2.0 * std::numbers::pi) + 1.0; }

inline constexpr double kSingularPivotThreshold = 1e-12;

/**
 * log det of a symmetric PSD matrix via pivoted LDLT.
 *
 * Pivots within kSingularPivotThreshold * trace of zero mark the matrix as
 * singular and yield -infinity. Asymmetric, indefinite or non-finite input
 * throws.
 */
inline double log_det_psd(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw std::invalid_argument("covariance must be a non-empty square matrix");
  }
  if (!sigma.allFinite()) throw std::invalid_argument("covariance has non-finite entries");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  const double threshold = kSingularPivotThreshold * sigma.trace();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("LDLT factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  bool singular = false;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) < -threshold) throw std::invalid_argument("covariance is indefinite");
    if (d(i) <= threshold) {
      singular = true;
    } else {
      sum += std::log(d(i));
    }
  }
  return singular ? -std::numeric_limits<double>::infinity() : sum;
}

/// Differential entropy 1/2 (n log(2 pi e) + log det sigma); -infinity when singular.
inline double gaussian_entropy(const Eigen::MatrixXd& sigma) {
  const double log_det = log_det_psd(sigma);
  return 0.5 * (static_cast<double>(sigma.rows()) * log_two_pi_e() + log_det);
}

/// Entropy rate of white Gaussian noise with variance lambda.
inline double white_noise_rate(double lambda) {
  detail::require_positive(lambda, "lambda");
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * lambda);
}

/**
 * H(g(t_1..t_n)) - H(w(t_1..t_n)) - log|A| for the Wiener process on `grid`.
 *
 * The levels are the image of white innovations under the increment matrix,
 * so this vanishes up to rounding.
 */
inline double chain_rule_residual(const TimeGrid& grid, double lambda) {
  if (grid.size() < 2) throw std::invalid_argument("chain rule needs at least two grid points");
  const std::vector<double> levels(grid.times().begin() + 1, grid.times().end());
  const double h_levels = gaussian_entropy(kernel_matrix(WienerKernel(lambda), levels));
  const double h_innovations = static_cast<double>(levels.size()) * white_noise_rate(lambda);
  return h_levels - h_innovations - increment_matrix(grid).log_abs_det();
}

/// Map from levels g(t_1..t_n) (with g(t_0) = 0) to increments; lower bidiagonal.
inline Eigen::MatrixXd difference_operator(Eigen::Index n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 1; i < n; ++i) d(i, i - 1) = -1.0;
  return d;
}

/**
 * A covariance of (g(t_1), ..., g(t_n)) with g(t_0) = 0 whose increments
 * satisfy Var[g(t_{i+1}) - g(t_i)] = lambda (t_{i+1} - t_i).
 *
 * Construction rejects candidates violating the increment constraint by more
 * than 1e-8 (relative to the largest entry, floored at 1) or with an
 * eigenvalue below -1e-10 * trace.
 */
class ConstrainedCovariance {
 public:
  ConstrainedCovariance(Eigen::MatrixXd sigma, TimeGrid grid, double lambda)
      : sigma_(std::move(sigma)), grid_(std::move(grid)), lambda_(lambda) {
    detail::require_positive(lambda_, "lambda");
    const auto n = static_cast<Eigen::Index>(grid_.size()) - 1;
    if (n < 1) throw std::invalid_argument("constrained covariance needs at least two grid points");
    if (sigma_.rows() != n || sigma_.cols() != n) {
      throw std::invalid_argument("covariance size must equal the number of non-origin grid points");
    }
    if (!sigma_.allFinite()) throw std::invalid_argument("covariance has non-finite entries");
    const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("covariance is not symmetric");
    }
    const Eigen::MatrixXd inc = increment_covariance();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double target = lambda_ * grid_.spacing(static_cast<std::size_t>(i));
      if (std::abs(inc(i, i) - target) > 1e-8 * scale) {
        throw std::invalid_argument("increment variance constraint violated at index " +
                                    std::to_string(i));
      }
    }
    if (min_eigenvalue(sigma_) < -1e-10 * sigma_.trace()) {
      throw std::invalid_argument("covariance is not positive semidefinite");
    }
  }

  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  double lambda() const noexcept { return lambda_; }

  /// Covariance of the increments g(t_{i+1}) - g(t_i), i = 0..n-1.
  Eigen::MatrixXd increment_covariance() const {
    const Eigen::MatrixXd d = difference_operator(sigma_.rows());
    Eigen::MatrixXd c = d * sigma_ * d.transpose();
    return 0.5 * (c + c.transpose());
  }

 private:
  Eigen::MatrixXd sigma_;
  TimeGrid grid_;
  double lambda_;
};

/**
 * Entropy of the Wiener levels minus entropy of the candidate, on the same
 * grid and lambda. Non-negative for every feasible candidate; zero only when
 * the candidate has uncorrelated increments.
 */
inline double maxent_gap(const ConstrainedCovariance& candidate) {
  const auto times = candidate.grid().times();
  const std::vector<double> levels(times.begin() + 1, times.end());
  const double h_wiener = gaussian_entropy(kernel_matrix(WienerKernel(candidate.lambda()), levels));
  return h_wiener - gaussian_entropy(candidate.sigma());
}

/**
 * Random correlation matrix: Haar-like orthogonal mixing of a spectrum drawn
 * uniformly from [min_eigenvalue, 1], then unit-diagonal rescaling.
 */
inline Eigen::MatrixXd random_correlation(Eigen::Index n, std::uint64_t seed,
                                          double min_eigenvalue = 0.05) {
  if (n < 1) throw std::invalid_argument("correlation size must be positive");
  random::Engine rng(seed, 0x636f7272);  // "corr"
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd spectrum(n);
  for (Eigen::Index i = 0; i < n; ++i) spectrum(i) = rng.uniform(min_eigenvalue, 1.0);
  Eigen::MatrixXd s = q * spectrum.asDiagonal() * q.transpose();
  const Eigen::VectorXd inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  r = 0.5 * (r + r.transpose());
  r.diagonal().setOnes();
  return r;
}

/// Feasible covariance whose increments have correlation `correlation`.
inline ConstrainedCovariance constrained_from_correlation(const TimeGrid& grid, double lambda,
                                                          const Eigen::MatrixXd& correlation) {
  detail::require_positive(lambda, "lambda");
  if (grid.size() < 2) throw std::invalid_argument("constrained covariance needs at least two grid points");
  const auto n = static_cast<Eigen::Index>(grid.size()) - 1;
  if (correlation.rows() != n || correlation.cols() != n) {
    throw std::invalid_argument("correlation size must equal the number of increments");
  }
  Eigen::VectorXd sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sd(i) = std::sqrt(lambda * grid.spacing(static_cast<std::size_t>(i)));
  }
  const Eigen::MatrixXd inc = sd.asDiagonal() * correlation * sd.asDiagonal();
  // Levels are running sums of increments: Sigma = L C L^T with L all-ones lower.
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n).triangularView<Eigen::Lower>();
  Eigen::MatrixXd sigma = ones * inc * ones.transpose();
  sigma = 0.5 * (sigma + sigma.transpose());
  return ConstrainedCovariance(std::move(sigma), grid, lambda);
}

inline ConstrainedCovariance random_constrained_covariance(const TimeGrid& grid, double lambda,
                                                           std::uint64_t seed) {
  if (grid.size() < 2) throw std::invalid_argument("constrained covariance needs at least two grid points");
  const auto n = static_cast<Eigen::Index>(grid.size()) - 1;
  return constrained_from_correlation(grid, lambda, random_correlation(n, seed));
}

struct EntropyReport {
  std::size_t n = 0;
  double joint_entropy = 0.0;
  double rate = 0.0;            // joint_entropy / n
  double reference_rate = 0.0;  // closed form for the same n
  double log_spacing_sum = 0.0; // sum_{i<=n} log sqrt(t_i - t_{i-1})
};

namespace detail {

/// Closed-form joint entropy of the first n non-origin grid points.
inline double reference_entropy(const KernelSpec& spec, const TimeGrid& grid, std::size_t n) {
  const double nd = static_cast<double>(n);
  if (const auto* white = std::get_if<WhiteNoiseKernel>(&spec)) {
    return nd * white_noise_rate(white->sigma2());
  }
  if (const auto* wiener = std::get_if<WienerKernel>(&spec)) {
    double log_a = 0.0;
    for (std::size_t i = 1; i <= n; ++i) log_a += 0.5 * std::log(grid[i] - grid[i - 1]);
    return nd * white_noise_rate(wiener->lambda()) + log_a;
  }
  // TC: Wiener on the ascending transformed instants exp(-beta t_n) < ... < exp(-beta t_1).
  const auto& tc = std::get<TcKernel>(spec);
  double log_a = 0.5 * std::log(std::exp(-tc.beta() * grid[n]));
  for (std::size_t i = 1; i < n; ++i) {
    log_a += 0.5 * std::log(std::exp(-tc.beta() * grid[i]) - std::exp(-tc.beta() * grid[i + 1]));
  }
  return nd * white_noise_rate(tc.lambda()) + log_a;
}

}  // namespace detail

/**
 * Joint entropy and running rate of f(t_1..t_n) for n = 1..n_max.
 *
 * The grid must have at least n_max + 1 points (t_0 is excluded, matching the
 * entropy-rate definition). Singular prefixes report -infinity.
 */
inline std::vector<EntropyReport> entropy_rate_curve(const KernelSpec& spec, const TimeGrid& grid,
                                                     std::size_t n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  if (grid.size() < n_max + 1) {
    throw std::invalid_argument("grid needs n_max + 1 points for an entropy-rate curve");
  }
  const std::vector<double> points(grid.times().begin() + 1,
                                   grid.times().begin() + static_cast<std::ptrdiff_t>(n_max + 1));
  const Eigen::MatrixXd full = kernel_matrix(spec, points);
  std::vector<EntropyReport> curve;
  curve.reserve(n_max);
  double log_spacing = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    log_spacing += 0.5 * std::log(grid[n] - grid[n - 1]);
    const auto size = static_cast<Eigen::Index>(n);
    EntropyReport report;
    report.n = n;
    report.joint_entropy = gaussian_entropy(full.topLeftCorner(size, size));
    report.rate = report.joint_entropy / static_cast<double>(n);
    report.reference_rate = detail::reference_entropy(spec, grid, n) / static_cast<double>(n);
    report.log_spacing_sum = log_spacing;
    curve.push_back(report);
  }
  return curve;
}

}  // namespace sskernel
