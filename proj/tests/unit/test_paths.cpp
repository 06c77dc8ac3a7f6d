#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wienerlab/paths.hpp"
#include "test_support.hpp"

using namespace wlab;

TEST(TimeGrid, RejectsNonMonotoneNodes) {
  EXPECT_THROW(TimeGrid({0.0, 0.5, 0.5, 1.0}), Error);
  EXPECT_THROW(TimeGrid({0.1, 0.5}), Error);
  EXPECT_THROW(TimeGrid::uniform(0.0, 4), Error);
  const auto g = TimeGrid::uniform(1.0, 4);
  EXPECT_EQ(g.cells(), 4u);
  EXPECT_DOUBLE_EQ(g.horizon(), 1.0);
  EXPECT_EQ(g.require_node(0.75), 3u);
  EXPECT_FALSE(g.find_node(0.3).has_value());
}

TEST(SamplePair, UnitCellVarianceWithinThreeStderr) {
  const auto grid = make_grid(TimeGrid({0.0, 1.0}));
  const std::size_t n = 1'000'000;
  RunningMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pair = sample_pair(grid, 1, {7, i});
    m.add(pair.dW[0] * pair.dW[0]);
  }
  // Var(dW^2) = 2 for N(0,1).
  EXPECT_NEAR(m.mean(), 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(SamplePair, CrossCovarianceIsZero) {
  const auto grid = make_grid(TimeGrid({0.0, 0.5, 1.0}));
  const std::size_t n = 200'000;
  RunningMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pair = sample_pair(grid, 1, {11, i});
    m.add(pair.dW[0] * pair.dW_prime[1]);
  }
  EXPECT_NEAR(m.mean(), 0.0, 3.0 * m.std_error());
}

TEST(SamplePair, SameStreamIsBitIdentical) {
  const auto grid = make_uniform_grid(1.0, 16);
  const auto a = sample_pair(grid, 2, {7, 3});
  const auto b = sample_pair(grid, 2, {7, 3});
  EXPECT_EQ(a.dW, b.dW);
  EXPECT_EQ(a.dW_prime, b.dW_prime);
  const auto c = sample_pair(grid, 2, {7, 4});
  EXPECT_NE(a.dW, c.dW);
}

TEST(Philox, KnownAnswerVector) {
  // Random123 known-answer test for philox4x32_10 with all-ones input.
  const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Rotate, ExtremeProfilesReproduceDrivers) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto pair = sample_pair(grid, 2, {1, 1});
  EXPECT_EQ(rotate(pair, RotationProfile::constant(grid, 0.0)), pair.dW);
  EXPECT_EQ(rotate(pair, RotationProfile::constant(grid, 1.0)), pair.dW_prime);
}

TEST(Rotate, IndicatorKeepsPerCellVariance) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.75);
  const std::size_t n = 200'000;
  std::vector<RunningMoments> m(4);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pair = sample_pair(grid, 1, {5, i});
    rotate(pair, phi, out);
    for (std::size_t k = 0; k < 4; ++k) m[k].add(out[k] * out[k]);
  }
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(m[k].mean(), 0.25, 3.0 * m[k].std_error());
}

TEST(Rotate, CorrelationMatchesCoefficient) {
  const auto grid = make_uniform_grid(1.0, 1);
  const auto phi = RotationProfile::constant(grid, 0.6);
  const std::size_t n = 100'000;
  RunningMoments m;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pair = sample_pair(grid, 1, {9, i});
    rotate(pair, phi, out);
    m.add(pair.dW[0] * out[0]);
  }
  EXPECT_NEAR(m.mean(), std::sqrt(1.0 - 0.36), 3.0 * m.std_error());
}

TEST(Rotate, CoefficientsAreNormalised) {
  const auto grid = make_uniform_grid(1.0, 50);
  Lcg gen(3);
  std::vector<double> v(50);
  for (auto& x : v) x = gen.uniform();
  const auto phi = RotationProfile::custom(grid, v);
  for (std::size_t k = 0; k < 50; ++k) {
    const double c = phi.complements()[k];
    EXPECT_NEAR(c * c + v[k] * v[k], 1.0, 1e-15);
  }
}

TEST(Rotate, GridMismatchIsAnError) {
  const auto g1 = make_uniform_grid(1.0, 4);
  const auto g2 = make_uniform_grid(1.0, 8);
  const auto pair = sample_pair(g1, 1, {1, 1});
  EXPECT_THROW(rotate(pair, RotationProfile::constant(g2, 0.5)), Error);
}

TEST(RotationProfile, RejectsInvalidInput) {
  const auto grid = make_uniform_grid(1.0, 4);
  EXPECT_THROW(RotationProfile::indicator(grid, 0.1, 0.5), Error);
  EXPECT_THROW(RotationProfile::constant(grid, 1.5), Error);
  EXPECT_THROW(RotationProfile::custom(grid, {0.1, 0.2}), Error);
}

TEST(DeltaDistance, ClosedForms) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.75);
  const auto zero = RotationProfile::constant(grid, 0.0);
  EXPECT_EQ(delta_distance(phi, phi), 0.0);
  EXPECT_DOUBLE_EQ(delta_distance(RotationProfile::indicator(grid, 0.0, 1.0), zero), 1.0);
  EXPECT_NEAR(delta_distance(phi, zero), std::sqrt(0.5), 1e-15);
}

TEST(DeltaDistance, TriangleInequalityOnRandomTriples) {
  const auto grid = make_uniform_grid(2.0, 13);
  Lcg gen(17);
  auto random_profile = [&]() {
    std::vector<double> v(13);
    for (auto& x : v) x = gen.uniform();
    return RotationProfile::custom(grid, v);
  };
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_profile(), b = random_profile(), c = random_profile();
    EXPECT_LE(delta_distance(a, c), delta_distance(a, b) + delta_distance(b, c) + 1e-14);
  }
}
