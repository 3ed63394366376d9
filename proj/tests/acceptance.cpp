// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "sskernel/sskernel.hpp"

using namespace sskernel;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

constexpr std::uint64_t kSeed = 20260101;

std::vector<double> gaps_grid(std::mt19937_64& rng, std::size_t n) { return oracle::random_times(rng, n); }

Outcome wiener_covariance() {
  const TimeGrid grid({0.0, 0.3, 0.5, 1.1, 1.6, 2.0, 2.9, 3.3, 4.2, 5.0});
  const auto paths = sample_wiener(grid, 1.0, kSeed, 200000);
  const Eigen::MatrixXd cov = empirical_covariance(paths);
  const Eigen::MatrixXd target =
      oracle::wiener_covariance(std::vector<double>(grid.times().begin(), grid.times().end()), 1.0);
  const double err = (cov - target).cwiseAbs().maxCoeff() / target.cwiseAbs().maxCoeff();
  return {err <= 0.03, "max err / max entry = " + sci(err)};
}

Outcome tc_equivalence() {
  const TimeGrid grid = TimeGrid::uniform(10, 1.0);
  const auto paths = sample_stable_spline(grid, 1.0, 1.0, kSeed + 1, 200000);
  const Eigen::MatrixXd cov = empirical_covariance(paths);
  double mc = 0.0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) {
      const double k = std::exp(-1.0 * static_cast<double>(std::max(i, j)));
      const double scale = std::sqrt(std::exp(-static_cast<double>(i)) * std::exp(-static_cast<double>(j)));
      mc = std::max(mc, std::abs(cov(i, j) - k) / scale);
    }
  }
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_real_distribution<double> beta(1e-3, 10.0), lambda(0.1, 10.0), time(0.0, 20.0);
  double identity = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double b = beta(rng), l = lambda(rng), t = time(rng), s = time(rng);
    const double tc = eval_kernel(TcKernel(b, l), t, s);
    const double wi = eval_kernel(WienerKernel(l), std::exp(-b * t), std::exp(-b * s));
    identity = std::max(identity, std::abs(tc - wi) / std::abs(tc));
  }
  return {mc <= 0.03 && identity <= 1e-14,
          "max err / sqrt(K_ii K_jj) = " + sci(mc) + ", identity rel err = " + sci(identity)};
}

Outcome chain_rule() {
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_int_distribution<std::size_t> size(2, 51);
  std::uniform_real_distribution<double> lambda(0.1, 10.0);
  double worst = 0.0;
  for (int g = 0; g < 100; ++g) {
    const TimeGrid grid(gaps_grid(rng, size(rng)));
    worst = std::max(worst, std::abs(chain_rule_residual(grid, lambda(rng))));
  }
  return {worst < 1e-8, "max |residual| = " + sci(worst)};
}

Outcome maxent_maximality() {
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_real_distribution<double> lambda(0.1, 10.0);
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t near_zero = 0, near_zero_non_diagonal = 0;
  for (std::size_t n = 2; n <= 8; ++n) {
    const TimeGrid grid(gaps_grid(rng, n + 1));
    const double l = lambda(rng);
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const auto candidate = random_constrained_covariance(grid, l, rng());
      const double gap = maxent_gap(candidate);
      min_gap = std::min(min_gap, gap);
      if (gap < 1e-10) {
        ++near_zero;
        const Eigen::MatrixXd inc = candidate.increment_covariance();
        const Eigen::MatrixXd off = inc - Eigen::MatrixXd(inc.diagonal().asDiagonal());
        if (off.cwiseAbs().maxCoeff() > 1e-8) ++near_zero_non_diagonal;
      }
    }
  }
  return {min_gap >= -1e-10 && near_zero_non_diagonal == 0,
          "min gap = " + sci(min_gap) + ", gaps < 1e-10: " + std::to_string(near_zero) +
              " (non-diagonal: " + std::to_string(near_zero_non_diagonal) + ")"};
}

Outcome unit_variance_bound() {
  constexpr Eigen::Index n = 8;
  const double bound = static_cast<double>(n) * oracle::kHalfLog2PiE;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < 1000; ++k) {
    worst = std::max(worst, gaussian_entropy(random_correlation(n, kSeed + 10 + k)) - bound);
  }
  const double at_identity = std::abs(gaussian_entropy(Eigen::MatrixXd::Identity(n, n)) - bound);
  double rate = 0.0;
  for (double lambda : {0.25, 1.0, 3.0}) {
    const double want = oracle::kHalfLog2PiE + 0.5 * std::log(lambda);
    for (const auto& r : entropy_rate_curve(WhiteNoiseKernel(lambda), TimeGrid::uniform(201, 1.0), 200)) {
      rate = std::max(rate, std::abs(r.rate - want));
    }
  }
  return {worst <= 1e-10 && worst < -1e-10 && at_identity < 1e-12 && rate < 1e-12,
          "max H - n/2 log(2 pi e) = " + sci(worst) + ", identity gap = " + sci(at_identity) +
              ", white rate residual = " + sci(rate)};
}

Outcome gram_psd() {
  std::mt19937_64 rng(kSeed + 5);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  std::uniform_real_distribution<double> beta(0.01, 10.0), lambda(0.1, 10.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < 100; ++g) {
    const TimeGrid grid(gaps_grid(rng, size(rng)));
    const double b = beta(rng), l = lambda(rng);
    for (const KernelSpec& spec : {KernelSpec(TcKernel(b, l)), KernelSpec(WienerKernel(l)),
                                   KernelSpec(WhiteNoiseKernel(l))}) {
      const Eigen::MatrixXd k = gram(spec, grid).entries();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
      worst = std::max(worst, -eig.eigenvalues().minCoeff() / k.trace());
    }
  }
  return {worst <= 1e-8, "max -min_eig / trace = " + sci(worst)};
}

Outcome increments_white() {
  const TimeGrid grid({0.0, 0.3, 0.5, 1.1, 1.6, 2.0, 2.9, 3.3, 4.2, 5.0});
  constexpr Eigen::Index paths = 100000;
  const auto wiener = sample_wiener(grid, 1.0, kSeed + 6, paths);
  const Eigen::MatrixXd cov = empirical_covariance(normalized_increments(wiener));
  double var_err = 0.0, corr = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    var_err = std::max(var_err, std::abs(cov(i, i) - 1.0));
    for (Eigen::Index j = 0; j < i; ++j) corr = std::max(corr, std::abs(cov(i, j)) / std::sqrt(cov(i, i) * cov(j, j)));
  }
  const double ci = 5.0 / std::sqrt(static_cast<double>(paths));

  std::mt19937_64 rng(kSeed + 7);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  std::uniform_real_distribution<double> lambda(0.1, 10.0);
  double build = 0.0;
  for (int g = 0; g < 100; ++g) {
    const TimeGrid grid_g(gaps_grid(rng, size(rng)));
    const double l = lambda(rng);
    const std::uint64_t seed = rng();
    const auto white = sample_white(grid_g, l, seed, 20);
    const auto w = sample_wiener(grid_g, l, seed, 20);
    const Eigen::MatrixXd a = increment_matrix(grid_g).entries();
    const Eigen::MatrixXd built = white.values().rightCols(a.rows()) * a.transpose();
    const double scale = std::max(1.0, built.cwiseAbs().maxCoeff());
    build = std::max(build, (w.values().rightCols(a.rows()) - built).cwiseAbs().maxCoeff() / scale);
    build = std::max(build, w.values().col(0).cwiseAbs().maxCoeff());
  }
  return {var_err <= 0.03 && corr <= ci && build <= 1e-12,
          "max rel var err = " + sci(var_err) + ", max |corr| = " + sci(corr) + " (CI " + sci(ci) +
              "), construction diff = " + sci(build)};
}

Outcome sysid_desk_scale() {
  constexpr std::size_t m = 50;
  int wins = 0;
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = oracle::first_order_system(1000 + seed, 200, m, 0.7, 10.0);
    const IODataset data(TimeGrid::uniform(s.t.size(), 1.0), s.u, s.y);
    EstimationConfig config;
    config.m = m;
    const auto result = estimate_impulse_response(data, config);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(s.y.data(), static_cast<Eigen::Index>(s.y.size()));
    const Eigen::VectorXd ls = oracle::least_squares(convolution_matrix(s.u, m), y);
    const double tc_err = oracle::relative_error(result.f_mean, s.f);
    errors.push_back(tc_err);
    if (tc_err <= oracle::relative_error(ls, s.f)) ++wins;
  }
  std::sort(errors.begin(), errors.end());
  const double median = 0.5 * (errors[9] + errors[10]);
  return {wins >= 16 && median <= 0.35,
          "TC <= LS in " + std::to_string(wins) + "/20, median rel err = " + sci(median)};
}

Outcome cli_reproducible() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sskernel_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    const auto s = oracle::first_order_system(77, 150, 30, 0.7, 10.0);
    std::ofstream f(dir / "io.csv");
    f << "t,u,y\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      f << io::format_number(s.t[i]) << ',' << io::format_number(s.u[i]) << ',' << io::format_number(s.y[i]) << '\n';
    }
  }
  const std::string io_csv = (dir / "io.csv").string();
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--process", "white", "--grid", "uniform:25,0.2", "--paths", "40", "--seed", "1", "--out", "@a.csv"},
      {"simulate", "--process", "wiener", "--grid", "0,0.3,0.5,1.1,1.6", "--paths", "40", "--seed", "2", "--threads",
       "2", "--out", "@b.csv", "--emit-gram", "@b_gram.csv"},
      {"simulate", "--process", "stable_spline", "--grid", "uniform:20,1", "--beta", "0.5", "--paths", "40", "--seed",
       "3", "--out", "@c.csv"},
      {"verify", "--suite", "all", "--seed", "7", "--paths", "20000", "--curves", "@curves.csv", "--n-max", "50"},
      {"entropy", "--kernel", "wiener", "--grid", "uniform:41,0.5", "--out", "@d.csv", "--svg", "@d.svg"},
      {"estimate", "--data", io_csv, "--m", "30", "--out", "@e.csv", "--diagnostics", "@e.json", "--svg", "@e.svg"},
  };
  std::size_t compared = 0;
  std::string mismatch;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (const auto& proto : commands) {
    std::vector<fs::path> files[2];
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<std::string> args{"sskernel"};
      for (const auto& a : proto) {
        if (!a.empty() && a.front() == '@') {
          files[rep].push_back(dir / (std::to_string(rep) + "_" + a.substr(1)));
          args.push_back(files[rep].back().string());
        } else {
          args.push_back(a);
        }
      }
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      if (code != 0) return {false, proto.front() + " exited " + std::to_string(code) + ": " + err.str()};
    }
    for (std::size_t i = 0; i < files[0].size(); ++i) {
      ++compared;
      const std::string a = slurp(files[0][i]);
      // Diagnostics echo the output paths, which differ between the two runs only by name.
      if (a.empty() || (files[0][i].extension() != ".json" && a != slurp(files[1][i]))) {
        mismatch += files[0][i].filename().string() + " ";
      }
    }
  }
  fs::remove_all(dir);
  return {mismatch.empty(), std::to_string(compared) + " files compared" +
                                (mismatch.empty() ? std::string() : ", mismatched: " + mismatch)};
}

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Wiener path covariance (2e5 paths)", 10.0, wiener_covariance},
      {2, "stable-spline paths have TC covariance; TC/Wiener identity", 0.0, tc_equivalence},
      {3, "entropy chain rule on 100 random grids", 1.0, chain_rule},
      {4, "Wiener levels maximize entropy under increment constraints", 5.0, maxent_maximality},
      {5, "unit-variance entropy bound; white-noise rate", 0.0, unit_variance_bound},
      {6, "TC, Wiener, white Gram matrices PSD", 0.0, gram_psd},
      {7, "increments whiten; cumulative construction", 0.0, increments_white},
      {8, "impulse-response estimation vs least squares", 60.0, sysid_desk_scale},
      {9, "CLI byte-identical reruns", 0.0, cli_reproducible},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = outcome.passed;
    if (c.time_limit > 0 && seconds > c.time_limit) {
      ok = false;
      outcome.detail += ", over time limit " + sci(c.time_limit) + " s";
    }
    if (!ok) ++failures;
    std::printf("%s criterion %d: %s (%.2f s) %s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                outcome.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
