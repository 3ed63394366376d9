// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sskernel {

/**
 * Ordered sampling instants t_0 = 0 < t_1 < ... < t_{n-1}.
 *
 * Spacing need not be uniform. Two instants closer than kDuplicateTolerance
 * are rejected as duplicates. A one-point grid has no gaps; its min_spacing()
 * is +infinity.
 */
class TimeGrid {
 public:
  static constexpr double kDuplicateTolerance = 1e-12;

  explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) {
      throw std::invalid_argument("time grid must not be empty");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i])) {
        throw std::invalid_argument("time grid entry " + std::to_string(i) + " is not finite");
      }
    }
    if (times_.front() != 0.0) {
      throw std::invalid_argument("time grid must start at t_0 = 0");
    }
    min_spacing_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
      const double gap = times_[i + 1] - times_[i];
      if (!(gap > kDuplicateTolerance)) {
        throw std::invalid_argument("time grid must be strictly increasing (entries " +
                                    std::to_string(i) + " and " + std::to_string(i + 1) + ")");
      }
      min_spacing_ = std::min(min_spacing_, gap);
    }
  }

  /// n points 0, step, 2 step, ...
  static TimeGrid uniform(std::size_t n, double step) {
    if (n == 0) throw std::invalid_argument("uniform grid needs at least one point");
    if (!(step > 0.0) || !std::isfinite(step)) {
      throw std::invalid_argument("uniform grid step must be positive and finite");
    }
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * step;
    return TimeGrid(std::move(t));
  }

  std::span<const double> times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  double back() const noexcept { return times_.back(); }
  double min_spacing() const noexcept { return min_spacing_; }

  /// t_{i+1} - t_i
  double spacing(std::size_t i) const { return times_.at(i + 1) - times_.at(i); }

  /// The first n instants.
  TimeGrid prefix(std::size_t n) const {
    if (n == 0 || n > times_.size()) throw std::out_of_range("grid prefix length out of range");
    return TimeGrid(std::vector<double>(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  std::vector<double> times_;
  double min_spacing_ = 0.0;
};

inline TimeGrid make_grid(std::vector<double> times) { return TimeGrid(std::move(times)); }

/// Image of a TimeGrid under t -> exp(-beta t); strictly decreasing, taus[0] = 1.
class TransformedGrid {
 public:
  TransformedGrid(TimeGrid source, double beta) : source_(std::move(source)), beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw std::invalid_argument("exponential transform rate beta must be positive and finite");
    }
    taus_.reserve(source_.size());
    for (double t : source_.times()) taus_.push_back(std::exp(-beta_ * t));
  }

  std::span<const double> taus() const noexcept { return taus_; }
  const TimeGrid& source_times() const noexcept { return source_; }
  double beta() const noexcept { return beta_; }
  std::size_t size() const noexcept { return taus_.size(); }

  /// True when the taus are distinct and positive at double precision.
  bool resolvable() const noexcept {
    for (std::size_t i = 0; i + 1 < taus_.size(); ++i) {
      if (!(taus_[i + 1] < taus_[i])) return false;
    }
    return taus_.back() > 0.0;
  }

 private:
  TimeGrid source_;
  double beta_;
  std::vector<double> taus_;
};

inline TransformedGrid exp_transform(const TimeGrid& grid, double beta) {
  return TransformedGrid(grid, beta);
}

}  // namespace sskernel
