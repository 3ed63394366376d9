// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sskernel/grid.hpp"
#include "sskernel/kernels.hpp"

// Impulse-response estimation with a TC Gaussian-process prior:
//   y = Phi f + v,  f ~ N(0, K_TC),  v ~ N(0, sigma2 I).

namespace sskernel {

/// Uniformly sampled input/output record.
class IODataset {
 public:
  static constexpr double kUniformTolerance = 1e-9;

  IODataset(TimeGrid t, std::vector<double> u, std::vector<double> y)
      : t_(std::move(t)), u_(std::move(u)), y_(std::move(y)) {
    if (u_.size() != t_.size() || y_.size() != t_.size()) {
      throw std::invalid_argument("t, u and y must have equal lengths");
    }
    if (t_.size() < 2) throw std::invalid_argument("dataset needs at least two samples");
    for (std::size_t i = 0; i < u_.size(); ++i) {
      if (!std::isfinite(u_[i]) || !std::isfinite(y_[i])) {
        throw std::invalid_argument("non-finite input/output at sample " + std::to_string(i));
      }
    }
    period_ = t_.back() / static_cast<double>(t_.size() - 1);
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      if (std::abs(t_.spacing(i) - period_) > kUniformTolerance * std::max(1.0, period_)) {
        throw std::invalid_argument("dataset must be uniformly sampled (gap " + std::to_string(i) +
                                    " differs from the mean period)");
      }
    }
  }

  const TimeGrid& t() const noexcept { return t_; }
  std::span<const double> u() const noexcept { return u_; }
  std::span<const double> y() const noexcept { return y_; }
  std::size_t size() const noexcept { return u_.size(); }
  double sample_period() const noexcept { return period_; }

 private:
  TimeGrid t_;
  std::vector<double> u_;
  std::vector<double> y_;
  double period_ = 1.0;
};

/// Phi(i, j) = u[i - j] for i >= j, zero otherwise (zero initial conditions).
inline Eigen::MatrixXd convolution_matrix(std::span<const double> u, std::ptrdiff_t m) {
  if (m <= 0) throw std::invalid_argument("coefficient count m must be positive");
  if (u.empty()) throw std::invalid_argument("input sequence must not be empty");
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index j = 0; j < m && j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) phi(i, j) = u[static_cast<std::size_t>(i - j)];
  }
  return phi;
}

/// TC prior covariance on coefficient instants 0, Ts, ..., (m-1) Ts.
inline Eigen::MatrixXd tc_prior(double beta, double lambda, std::size_t m, double period) {
  return gram(TcKernel(beta, lambda), TimeGrid::uniform(m, period)).entries();
}

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

namespace detail {

inline void check_regression_args(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& k, double sigma2) {
  if (phi.rows() != y.size()) throw std::invalid_argument("Phi rows must match length of y");
  if (k.rows() != k.cols() || k.rows() != phi.cols()) {
    throw std::invalid_argument("prior covariance must be m x m with m = columns of Phi");
  }
  require_positive(sigma2, "sigma2");
}

/// Cholesky of a PD matrix; retries once with 1e-10 * trace jitter.
inline Eigen::LLT<Eigen::MatrixXd> robust_llt(Eigen::MatrixXd s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return llt;
  s.diagonal().array() += 1e-10 * s.trace();
  llt.compute(s);
  if (llt.info() != Eigen::Success) throw std::runtime_error("marginal covariance is not positive definite");
  return llt;
}

inline double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline double log_two_pi() { return std::log(2.0 * std::numbers::pi); }

/// B with K = B B^T from the symmetric eigendecomposition; negative rounding clipped to zero.
inline Eigen::MatrixXd psd_square_root(const Eigen::MatrixXd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of prior failed");
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

}  // namespace detail

/**
 * Posterior of f given y. Solves with the Cholesky factor of
 * Phi K Phi^T + sigma2 I; no explicit inverse is formed.
 */
inline Posterior gp_posterior(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& k, double sigma2) {
  detail::check_regression_args(phi, y, k, sigma2);
  const Eigen::MatrixXd k_phi_t = k * phi.transpose();
  Eigen::MatrixXd s = phi * k_phi_t;
  s.diagonal().array() += sigma2;
  const auto llt = detail::robust_llt(std::move(s));
  Posterior post;
  post.mean = k_phi_t * llt.solve(y);
  const Eigen::MatrixXd half = llt.matrixL().solve(k_phi_t.transpose());
  post.covariance = k - half.transpose() * half;
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose());
  return post;
}

inline Posterior gp_posterior(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                              const GramMatrix& k, double sigma2) {
  return gp_posterior(phi, y, k.entries(), sigma2);
}

/// log N(y; 0, Phi K Phi^T + sigma2 I), factorizing the N x N marginal covariance.
inline double log_marginal_likelihood(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                                      const Eigen::MatrixXd& k, double sigma2) {
  detail::check_regression_args(phi, y, k, sigma2);
  Eigen::MatrixXd s = phi * k * phi.transpose();
  s.diagonal().array() += sigma2;
  const auto llt = detail::robust_llt(std::move(s));
  const Eigen::VectorXd white = llt.matrixL().solve(y);
  return -0.5 * white.squaredNorm() - 0.5 * detail::log_det_from_llt(llt) -
         0.5 * static_cast<double>(y.size()) * detail::log_two_pi();
}

/**
 * Same evidence through the m x m dual form. With K = B B^T and
 * M = sigma2 I + B^T Phi^T Phi B:
 *   log det S = (N - m) log sigma2 + log det M
 *   y^T S^-1 y = (y^T y - c^T M^-1 c) / sigma2,  c = B^T Phi^T y.
 */
inline double log_marginal_likelihood_dual(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                                           const Eigen::MatrixXd& k, double sigma2) {
  detail::check_regression_args(phi, y, k, sigma2);
  const Eigen::MatrixXd b = detail::psd_square_root(k);
  const Eigen::MatrixXd phi_b = phi * b;
  Eigen::MatrixXd m = phi_b.transpose() * phi_b;
  m.diagonal().array() += sigma2;
  const auto llt = detail::robust_llt(std::move(m));
  const Eigen::VectorXd c = phi_b.transpose() * y;
  const Eigen::VectorXd half = llt.matrixL().solve(c);
  const double n = static_cast<double>(y.size());
  const double log_det = (n - static_cast<double>(k.rows())) * std::log(sigma2) +
                         detail::log_det_from_llt(llt);
  const double quad = (y.squaredNorm() - half.squaredNorm()) / sigma2;
  return -0.5 * quad - 0.5 * log_det - 0.5 * n * detail::log_two_pi();
}

/// Logarithmically spaced search axis, inclusive of both ends.
inline std::vector<double> log_space(double lo, double hi, std::size_t count) {
  detail::require_positive(lo, "grid lower bound");
  detail::require_positive(hi, "grid upper bound");
  if (count == 0 || hi < lo) throw std::invalid_argument("log-spaced grid needs count >= 1 and lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double step = (std::log10(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::pow(10.0, a + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

struct SearchGrid {
  std::vector<double> beta = log_space(0.05, 2.0, 20);
  std::vector<double> lambda = log_space(1e-4, 1e2, 15);
  std::vector<double> sigma2 = log_space(1e-4, 1e2, 15);
};

struct EstimationResult {
  Eigen::VectorXd f_mean;
  Eigen::VectorXd f_std;
  double beta = 0.0;
  double lambda = 0.0;
  double sigma2 = 0.0;
  double log_evidence = 0.0;       // direct N x N route at the selection
  double log_evidence_dual = 0.0;  // route used during the search
  double residual_norm = 0.0;      // ||y - Phi f_mean||
  double degrees_of_freedom = 0.0; // trace of the hat matrix
  std::size_t points_evaluated = 0;
  std::size_t points_finite = 0;
};

namespace detail {

struct EvidenceSearchTerms {
  Eigen::VectorXd g;  // eigenvalues of B1^T Phi^T Phi B1 (unit-lambda prior)
  Eigen::VectorXd z;  // projections of B1^T Phi^T y onto their eigenvectors
};

// Evidence on a (lambda, sigma2) plane for one beta, via the dual eigen form.
inline double dual_evidence(const EvidenceSearchTerms& terms, double yty, double n, double lambda,
                            double sigma2) {
  double log_det = n * std::log(sigma2);
  double explained = 0.0;
  for (Eigen::Index k = 0; k < terms.g.size(); ++k) {
    const double g = std::max(terms.g(k), 0.0);
    log_det += std::log1p(lambda * g / sigma2);
    explained += lambda * terms.z(k) * terms.z(k) / (sigma2 + lambda * g);
  }
  const double quad = (yty - explained) / sigma2;
  return -0.5 * quad - 0.5 * log_det - 0.5 * n * log_two_pi();
}

}  // namespace detail

/**
 * Empirical Bayes over a (beta, lambda, sigma2) grid.
 *
 * Points are visited in ascending order of beta, then lambda, then sigma2, and
 * the incumbent is replaced only on strictly larger evidence, so ties go to
 * the smallest values. The posterior is returned at the maximizer.
 */
inline EstimationResult tune_hyperparameters(const IODataset& data, std::size_t m,
                                             const SearchGrid& search) {
  if (m == 0 || m > data.size()) throw std::invalid_argument("coefficient count m must be in [1, N]");
  if (search.beta.empty() || search.lambda.empty() || search.sigma2.empty()) {
    throw std::invalid_argument("search grids must be non-empty");
  }
  auto sorted = [](std::vector<double> v, const char* name) {
    for (double x : v) detail::require_positive(x, name);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto betas = sorted(search.beta, "beta grid entry");
  const auto lambdas = sorted(search.lambda, "lambda grid entry");
  const auto sigmas = sorted(search.sigma2, "sigma2 grid entry");

  const Eigen::MatrixXd phi = convolution_matrix(data.u(), static_cast<std::ptrdiff_t>(m));
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y().data(),
                                                              static_cast<Eigen::Index>(data.size()));
  const Eigen::MatrixXd gram_phi = phi.transpose() * phi;
  const Eigen::VectorXd phi_t_y = phi.transpose() * y;
  const double yty = y.squaredNorm();
  const double n = static_cast<double>(data.size());

  EstimationResult best;
  best.log_evidence_dual = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double beta : betas) {
    const Eigen::MatrixXd b = detail::psd_square_root(tc_prior(beta, 1.0, m, data.sample_period()));
    const Eigen::MatrixXd g = b.transpose() * gram_phi * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()));
    if (eig.info() != Eigen::Success) continue;
    const detail::EvidenceSearchTerms terms{eig.eigenvalues(),
                                            eig.eigenvectors().transpose() * (b.transpose() * phi_t_y)};
    for (double lambda : lambdas) {
      for (double sigma2 : sigmas) {
        ++best.points_evaluated;
        const double ev = detail::dual_evidence(terms, yty, n, lambda, sigma2);
        if (!std::isfinite(ev)) continue;
        ++best.points_finite;
        if (!found || ev > best.log_evidence_dual) {
          found = true;
          best.log_evidence_dual = ev;
          best.beta = beta;
          best.lambda = lambda;
          best.sigma2 = sigma2;
        }
      }
    }
  }
  if (!found) {
    throw std::runtime_error("evidence is non-finite at every search point (" +
                             std::to_string(best.points_evaluated) + " evaluated)");
  }

  const Eigen::MatrixXd k = tc_prior(best.beta, best.lambda, m, data.sample_period());
  const Posterior post = gp_posterior(phi, y, k, best.sigma2);
  best.f_mean = post.mean;
  best.f_std = post.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  best.log_evidence = log_marginal_likelihood(phi, y, k, best.sigma2);
  best.residual_norm = (y - phi * post.mean).norm();
  // Effective degrees of freedom: trace of Phi K Phi^T (Phi K Phi^T + sigma2 I)^-1.
  {
    const Eigen::MatrixXd b = detail::psd_square_root(k);
    const Eigen::MatrixXd g = b.transpose() * gram_phi * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    const Eigen::ArrayXd ev = eig.eigenvalues().array().max(0.0);
    best.degrees_of_freedom = (ev / (ev + best.sigma2)).sum();
  }
  return best;
}

struct EstimationConfig {
  std::optional<std::size_t> m;  // default min(N, 100)
  SearchGrid search;
};

/// Convolution matrix, evidence search, posterior: the whole pipeline.
inline EstimationResult estimate_impulse_response(const IODataset& data,
                                                  const EstimationConfig& config = {}) {
  const std::size_t m = config.m.value_or(std::min<std::size_t>(data.size(), 100));
  if (m == 0 || m > data.size()) throw std::invalid_argument("coefficient count m must be in [1, N]");
  return tune_hyperparameters(data, m, config.search);
}

}  // namespace sskernel
