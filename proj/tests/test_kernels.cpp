// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sskernel/kernels.hpp"

using namespace sskernel;

TEST(EvalKernel, TcValues) {
  EXPECT_EQ(eval_kernel(TcKernel(1, 1), 0, 0), 1.0);
  EXPECT_NEAR(eval_kernel(TcKernel(1, 1), 1, 2), oracle::kExpMinus2, 1e-16);
  EXPECT_NEAR(eval_kernel(TcKernel(1, 1), 2, 1), oracle::kExpMinus2, 1e-16);
}

TEST(EvalKernel, WienerValue) { EXPECT_DOUBLE_EQ(eval_kernel(WienerKernel(2), 0.5, 1.0), 1.0); }

TEST(EvalKernel, WhiteNoiseValues) {
  EXPECT_EQ(eval_kernel(WhiteNoiseKernel(3), 1, 1), 3.0);
  EXPECT_EQ(eval_kernel(WhiteNoiseKernel(3), 1, 2), 0.0);
}

TEST(EvalKernel, RejectsBadArguments) {
  EXPECT_THROW(eval_kernel(WienerKernel(1), -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(eval_kernel(WienerKernel(1), 1.0, NAN), std::invalid_argument);
  EXPECT_THROW(eval_kernel(TcKernel(1, 1), INFINITY, 0.0), std::invalid_argument);
}

TEST(KernelSpec, RejectsNonPositiveParameters) {
  EXPECT_THROW(TcKernel(0, 1), std::invalid_argument);
  EXPECT_THROW(TcKernel(1, -1), std::invalid_argument);
  EXPECT_THROW(WienerKernel(0), std::invalid_argument);
  EXPECT_THROW(WhiteNoiseKernel(-2), std::invalid_argument);
  EXPECT_EQ(family_name(KernelSpec(TcKernel(1, 1))), "tc");
}

TEST(Gram, WienerOnSmallGrid) {
  const auto k = gram(WienerKernel(1), make_grid({0, 1, 2}));
  Eigen::Matrix3d expected;
  expected << 0, 0, 0, 0, 1, 1, 0, 1, 2;
  EXPECT_EQ(k.entries(), Eigen::MatrixXd(expected));
}

TEST(Gram, TcOnTwoPoints) {
  const auto k = gram(TcKernel(1, 1), make_grid({0, 1}));
  EXPECT_EQ(k(0, 0), 1.0);
  EXPECT_NEAR(k(0, 1), oracle::kExpMinus1, 1e-16);
  EXPECT_NEAR(k(1, 1), oracle::kExpMinus1, 1e-16);
  EXPECT_EQ(k(0, 1), k(1, 0));
}

TEST(Gram, WhiteNoiseIsIdentity) {
  const auto k = gram(WhiteNoiseKernel(1), make_grid({0, 0.3, 1.7, 2.0, 9.0}));
  EXPECT_EQ(k.entries(), Eigen::MatrixXd::Identity(5, 5));
}

TEST(Gram, BitExactSymmetryAndCachedFactorization) {
  std::mt19937_64 rng(3);
  const auto k = gram(TcKernel(0.7, 2.0), make_grid(oracle::random_times(rng, 30)));
  EXPECT_EQ(k.entries(), k.entries().transpose());
  const auto copy = k;
  EXPECT_EQ(&k.factorization(), &copy.factorization());
  EXPECT_EQ(k.factorization().info(), Eigen::Success);
}

TEST(MinEigenvalue, Examples) {
  EXPECT_NEAR(min_eigenvalue(Eigen::MatrixXd::Identity(3, 3)), 1.0, 1e-15);
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
  EXPECT_NEAR(min_eigenvalue(ones), 0.0, 1e-15);
  const auto w = gram(WienerKernel(1), make_grid({0, 1, 2}));
  EXPECT_NEAR(min_eigenvalue(Eigen::MatrixXd(w.entries().bottomRightCorner(2, 2))), oracle::kMinEig1112, 1e-14);
}

TEST(MinEigenvalue, RejectsNonFinite) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 1) = NAN;
  EXPECT_THROW(min_eigenvalue(m), std::invalid_argument);
}

TEST(KernelProperties, TcEqualsWienerOnTransformedTimes) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> beta_dist(1e-3, 10.0), lambda_dist(0.1, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const auto t = oracle::random_times(rng, 2 + k % 8);
    const double beta = beta_dist(rng), lambda = lambda_dist(rng);
    for (double a : t) {
      for (double b : t) {
        const double tc = eval_kernel(TcKernel(beta, lambda), a, b);
        const double wi = eval_kernel(WienerKernel(lambda), std::exp(-beta * a), std::exp(-beta * b));
        ASSERT_LE(std::abs(tc - wi), 1e-14 * std::abs(tc));
      }
    }
  }
}

TEST(KernelProperties, GramMatricesArePsd) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> par(0.1, 5.0);
  for (int k = 0; k < 100; ++k) {
    const auto grid = make_grid(oracle::random_times(rng, 1 + k % 50));
    for (const KernelSpec& spec : {KernelSpec(TcKernel(par(rng), par(rng))), KernelSpec(WienerKernel(par(rng))),
                                   KernelSpec(WhiteNoiseKernel(par(rng)))}) {
      const auto g = gram(spec, grid);
      EXPECT_GE(min_eigenvalue(g), -1e-8 * g.entries().trace());
    }
  }
}

TEST(KernelProperties, TcDiagonalDecays) {
  const TcKernel k(0.8, 1.5);
  double previous = eval_kernel(k, 0, 0);
  EXPECT_EQ(previous, 1.5);
  for (double t = 0.25; t < 20; t += 0.25) {
    const double v = eval_kernel(k, t, t);
    EXPECT_DOUBLE_EQ(v, 1.5 * std::exp(-0.8 * t));
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(KernelProperties, TcTendsToLambdaAsBetaVanishes) {
  const TcKernel k(1e-12, 2.5);
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    EXPECT_NEAR(eval_kernel(k, t, t / 2), 2.5, 1e-9);
  }
}
