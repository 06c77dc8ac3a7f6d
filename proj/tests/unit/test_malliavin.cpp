#include <gtest/gtest.h>

#include <cmath>

#include "wienerlab/malliavin.hpp"

using namespace wlab;

namespace {

McConfig mc(std::size_t n, std::uint64_t seed = 1) {
  McConfig c;
  c.n_samples = n;
  c.seed = seed;
  return c;
}

FunctionalPtr ou_sine(GridPtr grid) {
  return diffusion_terminal(std::move(grid),
                            ou_spec(1.0, 1.0, 0.3, [](double x) { return std::sin(x); },
                                    [](double x) { return std::cos(x); }));
}

}  // namespace

TEST(GaussianNorm, KnownMoments) {
  EXPECT_NEAR(gaussian_norm(2.0), 1.0, 1e-14);
  EXPECT_NEAR(gaussian_norm(4.0), std::pow(3.0, 0.25), 1e-14);
  EXPECT_NEAR(gaussian_norm(1.0), std::sqrt(2.0 / M_PI), 1e-14);
}

TEST(MalliavinSeminorms, LinearTerminal) {
  const auto grid = make_uniform_grid(1.0, 64);
  for (double p : {2.0, 4.0}) {
    const auto rep = malliavin_seminorms(*linear_terminal(grid), p, mc(100'000));
    EXPECT_DOUBLE_EQ(rep.lip.value, 1.0);
    EXPECT_DOUBLE_EQ(rep.lips.value, 1.0);
    EXPECT_NEAR(rep.ratio.value, std::sqrt(2.0) * gaussian_norm(p), 0.05 * std::sqrt(2.0));
  }
}

TEST(MalliavinSeminorms, SquareTerminal) {
  const auto grid = make_uniform_grid(1.0, 64);
  const auto rep = malliavin_seminorms(*square_terminal(grid), 2.0, mc(200'000));
  EXPECT_NEAR(rep.lips.value, 2.0, 3.0 * rep.lips.std_error);
  EXPECT_NEAR(rep.phi2.value, 2.0 * std::sqrt(2.0), 0.05 * 2.0 * std::sqrt(2.0));
  EXPECT_NEAR(rep.ratio.value, std::sqrt(2.0), 0.05 * std::sqrt(2.0));
}

TEST(MalliavinSeminorms, ConstantGivesFlaggedNaN) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto rep = malliavin_seminorms(*constant_functional(grid, 2.0), 2.0, mc(2000), 3);
  EXPECT_EQ(rep.lip.value, 0.0);
  EXPECT_EQ(rep.lips.value, 0.0);
  EXPECT_EQ(rep.phi2.value, 0.0);
  EXPECT_FALSE(rep.ratio_defined);
  EXPECT_TRUE(std::isnan(rep.ratio.value));
}

TEST(MalliavinSeminorms, NoDerivativeIsAnError) {
  const auto grid = make_uniform_grid(1.0, 8);
  EXPECT_THROW(malliavin_seminorms(*bv_indicator(linear_terminal(grid), 0.0), 2.0, mc(2000), 3),
               Error);
}

TEST(MalliavinSeminorms, LipEqualsLipsAtPTwo) {
  const auto grid = make_uniform_grid(1.0, 32);
  const auto rep = malliavin_seminorms(*ou_sine(grid), 2.0, mc(100'000), 5);
  EXPECT_NEAR(rep.lip.value, rep.lips.value, 3.0 * std::hypot(rep.lip.std_error, rep.lips.std_error));
}

TEST(MalliavinSeminorms, RatioBoundedOnSmoothSuite) {
  const auto grid = make_uniform_grid(1.0, 32);
  const std::vector<FunctionalPtr> suite = {
      linear_terminal(grid), square_terminal(grid), ou_sine(grid),
      poly_increments(grid, {{0.0, 0.5, 0}, {0.5, 1.0, 0}}, {{1.0, {1, 1}}})};
  for (double p : {2.0, 4.0})
    for (const auto& xi : suite) {
      const auto rep = malliavin_seminorms(*xi, p, mc(40'000), 5);
      EXPECT_GE(rep.ratio.value, 0.1) << xi->name();
      EXPECT_LE(rep.ratio.value, 10.0) << xi->name();
      // Lyapunov: interval averages never exceed the esssup at p = 2.
      if (p == 2.0) EXPECT_LE(rep.lips.value, rep.lip.value * (1.0 + 1e-12));
    }
}

TEST(Counterexample, GrowsLinearlyWhileNormsStayBounded) {
  const auto rep = counterexample_growth(6, 2.0, mc(40'000));
  ASSERT_EQ(rep.rows.size(), 6u);
  const auto& first = rep.rows.front();
  EXPECT_NEAR(first.lower.value, first.direct.value,
              3.0 * std::hypot(first.lower.std_error, first.direct.std_error));
  EXPECT_TRUE(rep.lower_bounds_hold);
  EXPECT_TRUE(rep.slope_in_range) << rep.slope << " vs " << rep.kappa_hat;
  EXPECT_TRUE(rep.norms_bounded);
  for (const auto& r : rep.rows) EXPECT_LT(r.square_function.value, 2.0);
}

TEST(Counterexample, TooDeepForGridIsAnError) {
  EXPECT_THROW(counterexample_growth(30, 2.0, mc(2000)), Error);
}
