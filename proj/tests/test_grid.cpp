// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sskernel/grid.hpp"

using sskernel::TimeGrid;
using sskernel::exp_transform;
using sskernel::make_grid;

TEST(TimeGrid, UniformGridSpacing) {
  const auto g = make_grid({0, 1, 2, 3});
  EXPECT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.min_spacing(), 1.0);
}

TEST(TimeGrid, NonuniformMinSpacing) {
  const auto g = make_grid({0, 0.5, 0.6, 2.0});
  EXPECT_NEAR(g.min_spacing(), 0.1, 1e-15);
}

TEST(TimeGrid, RejectsMissingOrigin) {
  EXPECT_THROW(make_grid({1, 2, 3}), std::invalid_argument);
}

TEST(TimeGrid, RejectsBadSequences) {
  EXPECT_THROW(make_grid({}), std::invalid_argument);
  EXPECT_THROW(make_grid({0, 2, 1}), std::invalid_argument);
  EXPECT_THROW(make_grid({0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(make_grid({0, 1, 1 + 1e-13}), std::invalid_argument);  // duplicate within 1e-12
  EXPECT_THROW(make_grid({0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
  EXPECT_THROW(make_grid({0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST(TimeGrid, SinglePointHasInfiniteSpacing) {
  const auto g = make_grid({0});
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(std::isinf(g.min_spacing()));
}

TEST(TimeGrid, UniformFactoryAndPrefix) {
  const auto g = TimeGrid::uniform(10, 0.5);
  EXPECT_EQ(g.size(), 10u);
  EXPECT_DOUBLE_EQ(g.back(), 4.5);
  EXPECT_EQ(g.prefix(3), make_grid({0, 0.5, 1.0}));
  EXPECT_THROW(TimeGrid::uniform(0, 1.0), std::invalid_argument);
  EXPECT_THROW(TimeGrid::uniform(3, -1.0), std::invalid_argument);
}

TEST(TimeGrid, RebuildIsIdempotent) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto g = make_grid(oracle::random_times(rng, 1 + k % 40, 1e-6, 3.0));
    const auto again = make_grid(std::vector<double>(g.times().begin(), g.times().end()));
    EXPECT_EQ(g, again);
    EXPECT_EQ(g.min_spacing(), again.min_spacing());
  }
}

TEST(ExpTransform, Examples) {
  const auto a = exp_transform(make_grid({0, 1}), 1.0);
  EXPECT_EQ(a.taus()[0], 1.0);
  EXPECT_NEAR(a.taus()[1], oracle::kExpMinus1, 1e-16);

  const auto b = exp_transform(make_grid({0}), 3.7);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.taus()[0], 1.0);

  const auto c = exp_transform(make_grid({0, std::log(2.0), std::log(4.0)}), 1.0);
  EXPECT_NEAR(c.taus()[1], 0.5, 1e-15);
  EXPECT_NEAR(c.taus()[2], 0.25, 1e-15);
}

TEST(ExpTransform, RejectsNonPositiveBeta) {
  const auto g = make_grid({0, 1});
  EXPECT_THROW(exp_transform(g, 0.0), std::invalid_argument);
  EXPECT_THROW(exp_transform(g, -1.0), std::invalid_argument);
}

TEST(ExpTransform, StrictlyOrderReversing) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> beta_dist(1e-6, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const auto g = make_grid(oracle::random_times(rng, 2 + k % 20, 0.01, 1.0));
    const double beta = beta_dist(rng);
    const auto tr = exp_transform(g, beta);
    EXPECT_EQ(tr.taus()[0], 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_GT(tr.taus()[i], 0.0);
      EXPECT_LE(tr.taus()[i], 1.0);
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[i] < g[j]) {
          ASSERT_GT(tr.taus()[i], tr.taus()[j]) << "beta=" << beta;
        }
      }
    }
  }
}
