// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sskernel/grid.hpp"
#include "sskernel/kernels.hpp"
#include "sskernel/random.hpp"

namespace sskernel {

enum class ProcessKind { white, wiener, stable_spline };

inline std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::white: return "white";
    case ProcessKind::wiener: return "wiener";
    case ProcessKind::stable_spline: return "stable_spline";
  }
  return "unknown";
}

using PathMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sampled trajectories, one row per path, one column per grid instant.
class ProcessPaths {
 public:
  ProcessPaths(PathMatrix values, TimeGrid grid, std::uint64_t seed, ProcessKind kind)
      : values_(std::move(values)), grid_(std::move(grid)), seed_(seed), kind_(kind) {
    if (values_.cols() != static_cast<Eigen::Index>(grid_.size())) {
      throw std::invalid_argument("path length does not match grid size");
    }
    if (!values_.allFinite()) throw std::invalid_argument("paths contain non-finite values");
  }

  const PathMatrix& values() const noexcept { return values_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  std::uint64_t seed() const noexcept { return seed_; }
  ProcessKind kind() const noexcept { return kind_; }
  Eigen::Index n_paths() const noexcept { return values_.rows(); }
  Eigen::Index n_points() const noexcept { return values_.cols(); }

 private:
  PathMatrix values_;
  TimeGrid grid_;
  std::uint64_t seed_;
  ProcessKind kind_;
};

namespace detail {

/// Runs body(p) for p in [0, n) over contiguous blocks; threads == 0 means hardware concurrency.
inline void for_each_path(Eigen::Index n, unsigned threads,
                          const std::function<void(Eigen::Index)>& body) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  const auto workers = static_cast<Eigen::Index>(
      std::min<Eigen::Index>(static_cast<Eigen::Index>(threads), std::max<Eigen::Index>(n, 1)));
  if (workers <= 1) {
    for (Eigen::Index p = 0; p < n; ++p) body(p);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Eigen::Index block = (n + workers - 1) / workers;
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index lo = w * block;
    const Eigen::Index hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &body] {
      for (Eigen::Index p = lo; p < hi; ++p) body(p);
    });
  }
}

inline void check_sampling_args(double lambda, Eigen::Index n_paths) {
  require_positive(lambda, "lambda");
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
}

// Above this length the running sums are Kahan-compensated.
inline constexpr std::size_t kCompensatedSumThreshold = 10000;

/**
 * Cumulative construction on abscissae 0 = x_0 < x_1 < ... < x_{n-1}:
 * out[p][0] = 0, out[p][i] = sum_{k=1..i} sqrt(lambda) z(p, k) sqrt(x_k - x_{k-1}).
 * z(p, k) is normal draw k of stream (seed, p).
 */
inline PathMatrix cumulative_paths(std::span<const double> abscissae, double lambda,
                                   std::uint64_t seed, Eigen::Index n_paths, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(abscissae.size());
  std::vector<double> root_gap(abscissae.size(), 0.0);
  for (std::size_t i = 1; i < abscissae.size(); ++i) {
    const double gap = abscissae[i] - abscissae[i - 1];
    if (!(gap > 0.0)) throw std::invalid_argument("abscissae must be strictly increasing");
    root_gap[i] = std::sqrt(gap);
  }
  const double scale = std::sqrt(lambda);
  const bool compensated = abscissae.size() > kCompensatedSumThreshold;
  PathMatrix out(n_paths, n);
  for_each_path(n_paths, threads, [&](Eigen::Index p) {
    const random::Stream stream(seed, static_cast<std::uint64_t>(p));
    double sum = 0.0;
    double carry = 0.0;
    out(p, 0) = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) {
      const double h = scale * stream.normal(static_cast<std::uint64_t>(i));
      const double step = h * root_gap[static_cast<std::size_t>(i)];
      if (compensated) {
        const double y = step - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
      } else {
        sum += step;
      }
      out(p, i) = sum;
    }
  });
  return out;
}

}  // namespace detail

/// I.i.d. N(0, lambda) draws at every grid instant; entry (p, i) is normal draw i of stream (seed, p).
inline ProcessPaths sample_white(const TimeGrid& grid, double lambda, std::uint64_t seed,
                                 Eigen::Index n_paths, unsigned threads = 1) {
  detail::check_sampling_args(lambda, n_paths);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double scale = std::sqrt(lambda);
  PathMatrix values(n_paths, n);
  detail::for_each_path(n_paths, threads, [&](Eigen::Index p) {
    const random::Stream stream(seed, static_cast<std::uint64_t>(p));
    for (Eigen::Index i = 0; i < n; ++i) {
      values(p, i) = scale * stream.normal(static_cast<std::uint64_t>(i));
    }
  });
  return ProcessPaths(std::move(values), grid, seed, ProcessKind::white);
}

/**
 * Discrete-time Wiener paths: g(t_0) = 0 and g(t_n) = sum_{i<=n} h(t_i) sqrt(t_i - t_{i-1}).
 *
 * h is exactly the white-noise sample of sample_white(grid, lambda, seed, ...),
 * so the output equals increment_matrix(grid) applied to columns 1.. of it.
 */
inline ProcessPaths sample_wiener(const TimeGrid& grid, double lambda, std::uint64_t seed,
                                  Eigen::Index n_paths, unsigned threads = 1) {
  detail::check_sampling_args(lambda, n_paths);
  return ProcessPaths(detail::cumulative_paths(grid.times(), lambda, seed, n_paths, threads), grid,
                      seed, ProcessKind::wiener);
}

/**
 * Stable-spline paths f(t) = g(exp(-beta t)) with g a Wiener process.
 *
 * g is sampled on the ascending transformed instants preceded by the origin
 * tau = 0 (where g vanishes), then read back in the original t order. The
 * resulting covariance is lambda * min(exp(-beta t), exp(-beta s)).
 */
inline ProcessPaths sample_stable_spline(const TimeGrid& grid, double beta, double lambda,
                                         std::uint64_t seed, Eigen::Index n_paths,
                                         unsigned threads = 1) {
  detail::check_sampling_args(lambda, n_paths);
  const TransformedGrid transformed = exp_transform(grid, beta);
  if (!transformed.resolvable()) {
    throw std::invalid_argument(
        "transformed instants exp(-beta t) collapse at double precision; shorten the grid or "
        "reduce beta");
  }
  const std::size_t n = grid.size();
  // taus are strictly decreasing, so the ascending order is the reverse.
  std::vector<double> ascending(n + 1);
  ascending[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) ascending[k + 1] = transformed.taus()[n - 1 - k];

  const PathMatrix g = detail::cumulative_paths(ascending, lambda, seed, n_paths, threads);
  PathMatrix f(n_paths, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    f.col(static_cast<Eigen::Index>(i)) = g.col(static_cast<Eigen::Index>(n - i));
  }
  return ProcessPaths(std::move(f), grid, seed, ProcessKind::stable_spline);
}

/// Forward differences along each path; the result lives on the first n-1 instants.
inline ProcessPaths finite_difference(const ProcessPaths& paths) {
  const Eigen::Index n = paths.n_points();
  if (n < 2) throw std::invalid_argument("finite difference needs at least two grid points");
  PathMatrix diff = paths.values().rightCols(n - 1) - paths.values().leftCols(n - 1);
  return ProcessPaths(std::move(diff), paths.grid().prefix(static_cast<std::size_t>(n - 1)),
                      paths.seed(), paths.kind());
}

/// Finite differences divided by sqrt(t_{i+1} - t_i): the innovations w(t_1..t_{n-1}).
inline Eigen::MatrixXd normalized_increments(const ProcessPaths& paths) {
  const Eigen::Index n = paths.n_points();
  if (n < 2) throw std::invalid_argument("normalized increments need at least two grid points");
  Eigen::MatrixXd w = paths.values().rightCols(n - 1) - paths.values().leftCols(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    w.col(i) /= std::sqrt(paths.grid().spacing(static_cast<std::size_t>(i)));
  }
  return w;
}

/// Lower-triangular map from innovations w(t_1..t_n) to levels g(t_1..t_n).
class IncrementMatrix {
 public:
  explicit IncrementMatrix(TimeGrid grid) : grid_(std::move(grid)) {
    if (grid_.size() < 2) throw std::invalid_argument("increment matrix needs at least two grid points");
    const auto n = static_cast<Eigen::Index>(grid_.size() - 1);
    entries_ = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double root_gap = std::sqrt(grid_.spacing(static_cast<std::size_t>(j)));
      entries_.col(j).tail(n - j).setConstant(root_gap);
    }
  }

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const TimeGrid& grid() const noexcept { return grid_; }

  /// log|det A| = sum_i log sqrt(t_i - t_{i-1}).
  double log_abs_det() const {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) sum += std::log(entries_(i, i));
    return sum;
  }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd entries_;
};

inline IncrementMatrix increment_matrix(const TimeGrid& grid) { return IncrementMatrix(grid); }

/// Unbiased sample covariance between columns (variables), rows are observations.
template <typename Derived>
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixBase<Derived>& samples) {
  const Eigen::Index rows = samples.rows();
  if (rows < 2) throw std::invalid_argument("empirical covariance needs at least two paths");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(samples.cols(), samples.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(rows - 1));
  return cov.selfadjointView<Eigen::Lower>();
}

inline Eigen::MatrixXd empirical_covariance(const ProcessPaths& paths) {
  return empirical_covariance(paths.values());
}

}  // namespace sskernel
