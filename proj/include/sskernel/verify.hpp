// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sskernel/entropy.hpp"
#include "sskernel/grid.hpp"
#include "sskernel/io.hpp"
#include "sskernel/kernels.hpp"
#include "sskernel/processes.hpp"
#include "sskernel/random.hpp"

// Numerical property checks behind `sskernel verify`.

namespace sskernel::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  Eigen::Index paths = 200000;
  unsigned threads = 1;
};

/// Random grid with n points and gaps drawn uniformly from [min_gap, max_gap].
inline TimeGrid random_grid(random::Engine& rng, std::size_t n, double min_gap = 0.05,
                            double max_gap = 1.0) {
  std::vector<double> t(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) t[i] = t[i - 1] + rng.uniform(min_gap, max_gap);
  return TimeGrid(std::move(t));
}

inline std::size_t random_size(random::Engine& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) {
  return random::mix64(seed ^ random::mix64(tag));
}

// Fixed nonuniform 10-point grid for Monte Carlo covariance checks.
inline TimeGrid monte_carlo_grid() {
  return TimeGrid({0.0, 0.3, 0.5, 1.1, 1.6, 2.0, 2.9, 3.3, 4.2, 5.0});
}

}  // namespace detail

inline std::vector<CheckResult> white_bound(const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  {
    constexpr Eigen::Index n = 8;
    const double bound = static_cast<double>(n) * white_noise_rate(1.0);
    double worst_excess = -std::numeric_limits<double>::infinity();
    double closest_non_diagonal = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const Eigen::MatrixXd r = random_correlation(n, detail::sub_seed(opt.seed, 100 + k));
      const double excess = gaussian_entropy(r) - bound;
      worst_excess = std::max(worst_excess, excess);
      closest_non_diagonal = std::min(closest_non_diagonal, -excess);
    }
    const double identity_gap = std::abs(gaussian_entropy(Eigen::MatrixXd::Identity(n, n)) - bound);
    const bool ok = worst_excess <= 1e-10 && closest_non_diagonal > 1e-10 && identity_gap < 1e-12;
    out.push_back({"white_bound", "unit-variance entropy bound (1000 x n=8)", ok,
                   "max H - n H* = " + detail::sci(worst_excess) +
                       ", identity gap = " + detail::sci(identity_gap)});
  }
  {
    double worst = 0.0;
    for (double lambda : {0.25, 1.0, 3.0}) {
      const auto curve = entropy_rate_curve(WhiteNoiseKernel(lambda), TimeGrid::uniform(201, 1.0), 200);
      for (const auto& r : curve) worst = std::max(worst, std::abs(r.rate - white_noise_rate(lambda)));
    }
    out.push_back({"white_bound", "white-noise entropy rate = 1/2 log(2 pi e lambda)", worst < 1e-12,
                   "max residual = " + detail::sci(worst)});
  }
  return out;
}

inline std::vector<CheckResult> increments(const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  {
    const TimeGrid grid = detail::monte_carlo_grid();
    const double lambda = 1.0;
    const auto paths = sample_wiener(grid, lambda, detail::sub_seed(opt.seed, 2), opt.paths, opt.threads);
    const Eigen::MatrixXd cov = empirical_covariance(normalized_increments(paths));
    double var_err = 0.0;
    double max_corr = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      var_err = std::max(var_err, std::abs(cov(i, i) - lambda) / lambda);
      for (Eigen::Index j = 0; j < i; ++j) {
        max_corr = std::max(max_corr, std::abs(cov(i, j)) / std::sqrt(cov(i, i) * cov(j, j)));
      }
    }
    const double corr_bound = 5.0 / std::sqrt(static_cast<double>(opt.paths));
    out.push_back({"increments", "normalized increments are white", var_err <= 0.03 && max_corr <= corr_bound,
                   "max rel var err = " + detail::sci(var_err) + ", max |corr| = " +
                       detail::sci(max_corr) + " (bound " + detail::sci(corr_bound) + ")"});
  }
  {
    random::Engine rng(detail::sub_seed(opt.seed, 3), 0);
    double worst = 0.0;
    for (int g = 0; g < 100; ++g) {
      const TimeGrid grid = random_grid(rng, random_size(rng, 2, 50));
      const double lambda = rng.uniform(0.1, 10.0);
      const std::uint64_t seed = rng();
      const auto white = sample_white(grid, lambda, seed, 20);
      const auto wiener = sample_wiener(grid, lambda, seed, 20);
      const Eigen::MatrixXd a = increment_matrix(grid).entries();
      const auto n = a.rows();
      const Eigen::MatrixXd built = white.values().rightCols(n) * a.transpose();
      const double scale = std::max(1.0, built.cwiseAbs().maxCoeff());
      worst = std::max(worst, (wiener.values().rightCols(n) - built).cwiseAbs().maxCoeff() / scale);
      worst = std::max(worst, wiener.values().col(0).cwiseAbs().maxCoeff());
    }
    out.push_back({"increments", "cumulative sum = increment matrix x white noise (100 grids)", worst <= 1e-12,
                   "max scaled diff = " + detail::sci(worst)});
  }
  return out;
}

inline std::vector<CheckResult> wiener_cov(const SuiteOptions& opt) {
  const TimeGrid grid = detail::monte_carlo_grid();
  const double lambda = 1.0;
  const auto paths = sample_wiener(grid, lambda, detail::sub_seed(opt.seed, 4), opt.paths, opt.threads);
  const Eigen::MatrixXd cov = empirical_covariance(paths);
  const Eigen::MatrixXd target = gram(WienerKernel(lambda), grid).entries();
  const double err = (cov - target).cwiseAbs().maxCoeff() / target.cwiseAbs().maxCoeff();
  return {{"wiener_cov", "Wiener covariance = lambda min(t_i, t_j) (Monte Carlo)", err <= 0.03,
           "max err / max entry = " + detail::sci(err)}};
}

inline std::vector<CheckResult> wiener_maxent(const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  {
    random::Engine rng(detail::sub_seed(opt.seed, 5), 0);
    double worst = 0.0;
    for (int g = 0; g < 100; ++g) {
      const TimeGrid grid = random_grid(rng, random_size(rng, 2, 51));
      worst = std::max(worst, std::abs(chain_rule_residual(grid, rng.uniform(0.1, 10.0))));
    }
    out.push_back({"wiener_maxent", "H(G) = H(W) + log|A| (100 grids)", worst < 1e-8,
                   "max |residual| = " + detail::sci(worst)});
  }
  {
    random::Engine rng(detail::sub_seed(opt.seed, 6), 0);
    double min_gap = std::numeric_limits<double>::infinity();
    bool equality_only_diagonal = true;
    double wiener_gap = 0.0;
    for (std::size_t points = 3; points <= 9; ++points) {
      const TimeGrid grid = random_grid(rng, points);
      const double lambda = rng.uniform(0.1, 10.0);
      for (int k = 0; k < 1000; ++k) {
        const auto candidate = random_constrained_covariance(grid, lambda, rng());
        const double gap = maxent_gap(candidate);
        min_gap = std::min(min_gap, gap);
        if (gap < 1e-10) {
          const Eigen::MatrixXd inc = candidate.increment_covariance();
          const Eigen::MatrixXd off = inc - Eigen::MatrixXd(inc.diagonal().asDiagonal());
          if (off.cwiseAbs().maxCoeff() > 1e-8) equality_only_diagonal = false;
        }
      }
      const auto n = static_cast<Eigen::Index>(points - 1);
      wiener_gap = std::max(wiener_gap, std::abs(maxent_gap(
          constrained_from_correlation(grid, lambda, Eigen::MatrixXd::Identity(n, n)))));
    }
    const bool ok = min_gap >= -1e-10 && equality_only_diagonal && wiener_gap < 1e-10;
    out.push_back({"wiener_maxent", "Wiener maximizes entropy under increment constraints (7000 candidates)", ok,
                   "min gap = " + detail::sci(min_gap) + ", Wiener self-gap = " + detail::sci(wiener_gap)});
  }
  return out;
}

inline std::vector<CheckResult> tc_equivalence(const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  {
    random::Engine rng(detail::sub_seed(opt.seed, 7), 0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double beta = rng.uniform(1e-3, 10.0);
      const double lambda = rng.uniform(0.1, 10.0);
      const double t = rng.uniform(0.0, 20.0);
      const double s = rng.uniform(0.0, 20.0);
      const double tc = eval_kernel(TcKernel(beta, lambda), t, s);
      const double wi = eval_kernel(WienerKernel(lambda), std::exp(-beta * t), std::exp(-beta * s));
      worst = std::max(worst, std::abs(tc - wi) / std::abs(tc));
    }
    out.push_back({"tc_equivalence", "TC(t, s) = Wiener(exp(-beta t), exp(-beta s)) (1000 triples)", worst <= 1e-14,
                   "max rel err = " + detail::sci(worst)});
  }
  {
    const TimeGrid grid = TimeGrid::uniform(10, 1.0);
    const auto paths = sample_stable_spline(grid, 1.0, 1.0, detail::sub_seed(opt.seed, 8), opt.paths, opt.threads);
    const Eigen::MatrixXd cov = empirical_covariance(paths);
    const Eigen::MatrixXd target = gram(TcKernel(1.0, 1.0), grid).entries();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      for (Eigen::Index j = 0; j < cov.cols(); ++j) {
        worst = std::max(worst, std::abs(cov(i, j) - target(i, j)) / std::sqrt(target(i, i) * target(j, j)));
      }
    }
    out.push_back({"tc_equivalence", "stable-spline paths have TC covariance (Monte Carlo)", worst <= 0.03,
                   "max err / sqrt(K_ii K_jj) = " + detail::sci(worst)});
  }
  {
    random::Engine rng(detail::sub_seed(opt.seed, 9), 0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const TimeGrid grid = random_grid(rng, random_size(rng, 1, 10));
      const double beta = rng.uniform(0.05, 1.0);
      const double lambda = rng.uniform(0.1, 10.0);
      const double h_tc = gaussian_entropy(gram(TcKernel(beta, lambda), grid).entries());
      const auto transformed = exp_transform(grid, beta);
      std::vector<double> taus(transformed.taus().begin(), transformed.taus().end());
      std::sort(taus.begin(), taus.end());
      const double h_wiener = gaussian_entropy(kernel_matrix(WienerKernel(lambda), taus));
      worst = std::max(worst, std::abs(h_tc - h_wiener));
    }
    out.push_back({"tc_equivalence", "H(TC on t) = H(Wiener on sorted exp(-beta t)) (100 grids)", worst <= 1e-8,
                   "max |diff| = " + detail::sci(worst)});
  }
  return out;
}

inline std::vector<CheckResult> psd(const SuiteOptions& opt) {
  random::Engine rng(detail::sub_seed(opt.seed, 10), 0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < 100; ++g) {
    const TimeGrid grid = random_grid(rng, random_size(rng, 1, 50));
    const double beta = rng.uniform(0.01, 10.0);
    const double lambda = rng.uniform(0.1, 10.0);
    for (const KernelSpec& spec : {KernelSpec(TcKernel(beta, lambda)), KernelSpec(WienerKernel(lambda)),
                                   KernelSpec(WhiteNoiseKernel(lambda))}) {
      const auto k = gram(spec, grid);
      worst = std::max(worst, -min_eigenvalue(k) / k.entries().trace());
    }
  }
  return {{"psd", "TC, Wiener, white Gram matrices are PSD (100 grids)", worst <= 1e-8,
           "max -min_eig / trace = " + detail::sci(worst)}};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"white_bound", "increments", "wiener_cov", "wiener_maxent", "tc_equivalence", "psd"};
  return names;
}

inline std::vector<CheckResult> run_suite(const std::string& suite, const SuiteOptions& opt) {
  using Runner = std::vector<CheckResult> (*)(const SuiteOptions&);
  const std::vector<std::pair<std::string, Runner>> runners{
      {"white_bound", white_bound}, {"increments", increments}, {"wiener_cov", wiener_cov},
      {"wiener_maxent", wiener_maxent},   {"tc_equivalence", tc_equivalence},   {"psd", psd}};
  std::vector<CheckResult> results;
  bool matched = false;
  for (const auto& [name, run] : runners) {
    if (suite == "all" || suite == name) {
      matched = true;
      for (auto& r : run(opt)) results.push_back(std::move(r));
    }
  }
  if (!matched) throw std::invalid_argument("unknown suite '" + suite + "'");
  return results;
}

/// Entropy-rate curves for the three kernel families, as CSV rows.
inline void write_rate_curves(std::ostream& out, std::size_t n_max = 200) {
  out << "kernel,n,joint_entropy,rate,reference_rate,log_spacing_sum\n";
  struct Curve {
    std::string name;
    KernelSpec spec;
    double period;
  };
  const std::vector<Curve> curves{{"white_lambda1", WhiteNoiseKernel(1.0), 1.0},
                                  {"wiener_lambda1_ts1", WienerKernel(1.0), 1.0},
                                  {"wiener_lambda1_ts4", WienerKernel(1.0), 4.0},
                                  {"tc_beta0.1_lambda1_ts1", TcKernel(0.1, 1.0), 1.0}};
  for (const auto& c : curves) {
    for (const auto& r : entropy_rate_curve(c.spec, TimeGrid::uniform(n_max + 1, c.period), n_max)) {
      out << c.name << ',' << r.n << ',' << io::format_number(r.joint_entropy) << ','
          << io::format_number(r.rate) << ',' << io::format_number(r.reference_rate) << ','
          << io::format_number(r.log_spacing_sum) << '\n';
    }
  }
}

}  // namespace sskernel::verify
