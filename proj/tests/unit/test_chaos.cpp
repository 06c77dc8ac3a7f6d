#include <gtest/gtest.h>

#include <cmath>

#include "wienerlab/chaos.hpp"
#include "wienerlab/estimators.hpp"

using namespace wlab;

namespace {

McConfig mc(std::size_t n, std::size_t inner = 0, std::uint64_t seed = 1) {
  McConfig c;
  c.n_samples = n;
  c.n_inner = inner;
  c.seed = seed;
  return c;
}

FunctionalPtr two_block_product(GridPtr grid) {
  return poly_increments(std::move(grid), {{0.0, 0.25, 0}, {0.5, 1.0, 0}}, {{1.0, {1, 1}}});
}

}  // namespace

TEST(ChaosExpansion, LinearTerminal) {
  const auto grid = make_uniform_grid(2.0, 8);
  const auto exp = expand_library(*linear_terminal(grid));
  EXPECT_EQ(exp.max_order(), 1u);
  EXPECT_NEAR(exp.mean(), 0.0, 1e-15);
  EXPECT_NEAR(exp.variance(), 2.0, 1e-12);
}

TEST(ChaosExpansion, SquareTerminal) {
  const auto grid = make_uniform_grid(1.5, 6);
  const auto exp = expand_library(*square_terminal(grid));
  EXPECT_EQ(exp.max_order(), 2u);
  EXPECT_NEAR(exp.mean(), 1.5, 1e-12);
  EXPECT_NEAR(2.0 * exp.kernel_norm2(2), 2.0 * 1.5 * 1.5, 1e-12);
  EXPECT_NEAR(exp.kernel_norm2(1), 0.0, 1e-15);
}

TEST(ChaosExpansion, DisjointProductIsSymmetrised) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto exp = expand_library(*two_block_product(grid));
  EXPECT_EQ(exp.max_order(), 2u);
  EXPECT_NEAR(exp.kernel_norm2(2), 0.25 * 0.5 / 2.0, 1e-14);
  const auto f = exp.kernel(2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(f[i * 4 + j], f[j * 4 + i]);
}

TEST(ChaosExpansion, QuarticHermiteMoments) {
  // W_1^4 = 3 + 6 I_2 + I_4
  const auto grid = make_uniform_grid(1.0, 4);
  const auto exp = expand_library(*poly_increments(grid, {{0.0, 1.0, 0}}, {{1.0, {4}}}));
  EXPECT_EQ(exp.max_order(), 4u);
  EXPECT_NEAR(exp.mean(), 3.0, 1e-12);
  // E W^8 - (E W^4)^2 = 105 - 9
  EXPECT_NEAR(exp.variance(), 96.0, 1e-10);
}

TEST(ChaosExpansion, ParsevalAgainstMonteCarlo) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto xi = poly_increments(grid, {{0.0, 0.5, 0}, {0.5, 1.0, 0}},
                                  {{1.0, {2, 1}}, {-0.5, {0, 3}}, {2.0, {1, 0}}});
  const auto exp = expand_library(*xi);
  const auto mom = moments(*xi, mc(400'000));
  EXPECT_NEAR(mom.mean.value, exp.mean(), 4.0 * mom.mean.std_error);
  EXPECT_NEAR(mom.variance.value, exp.variance(), 4.0 * mom.variance.std_error);
}

TEST(ChaosExpansion, UnsupportedInputs) {
  const auto grid = make_uniform_grid(1.0, 4);
  EXPECT_THROW(expand_library(*poly_increments(grid, {{0.0, 1.0, 0}}, {{1.0, {5}}})), Error);
  EXPECT_THROW(expand_library(*linear_terminal(grid, 2)), Error);
  EXPECT_THROW(expand_library(*bv_indicator(linear_terminal(grid), 0.0)), Error);
  EXPECT_THROW(ChaosExpansion(grid, {{0.0}, {1.0, 2.0}}), Error);
}

TEST(ChaosResidual, ClosedForms) {
  const auto grid = make_uniform_grid(1.0, 4);
  EXPECT_NEAR(conditional_residual_exact(expand_library(*linear_terminal(grid)), 0.25, 0.5),
              0.5, 1e-14);
  EXPECT_NEAR(conditional_residual_exact(expand_library(*square_terminal(grid)), 0.5, 0.75),
              std::sqrt(0.875), 1e-14);
  const auto outside = poly_increments(grid, {{0.0, 0.5, 0}}, {{1.0, {2}}});
  EXPECT_NEAR(conditional_residual_exact(expand_library(*outside), 0.5, 1.0), 0.0, 1e-15);
}

TEST(ChaosResidual, AgreesWithNestedMonteCarlo) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto xi = two_block_product(grid);
  const double exact = conditional_residual_exact(expand_library(*xi), 0.0, 0.25);
  const auto e = cond_exp_residual(*xi, 0.0, 0.25, 2.0, mc(200'000, 1));
  EXPECT_NEAR(e.value, exact, 4.0 * e.std_error);
}

TEST(D12Norm, KnownValues) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto c = d12_norm(expand_library(*constant_functional(grid, 3.0)));
  EXPECT_NEAR(c.norm, 3.0, 1e-14);
  EXPECT_NEAR(c.membership_sum, 0.0, 1e-15);
  const auto lin = d12_norm(expand_library(*linear_terminal(grid)));
  EXPECT_NEAR(lin.norm, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(lin.membership_sum, 1.0, 1e-14);
  const auto sq = d12_norm(expand_library(*square_terminal(grid)));
  EXPECT_NEAR(sq.norm, std::sqrt(7.0), 1e-12);
  EXPECT_NEAR(sq.membership_sum, 4.0, 1e-12);
}

TEST(BdgChaos, IdentityHoldsOnLibrary) {
  const auto grid = make_uniform_grid(1.0, 8);
  const std::vector<FunctionalPtr> suite = {
      linear_terminal(grid), square_terminal(grid), two_block_product(grid),
      poly_increments(grid, {{0.0, 0.375, 0}, {0.5, 1.0, 0}},
                      {{1.0, {2, 2}}, {0.5, {1, 3}}, {-1.0, {3, 0}}})};
  const std::vector<std::pair<double, double>> intervals = {
      {0.0, 1.0}, {0.25, 0.5}, {0.125, 0.75}, {0.5, 1.0}};
  for (const auto& xi : suite) {
    const auto exp = expand_library(*xi);
    for (auto [a, b] : intervals) {
      const auto rep = bdg_chaos_check(exp, a, b);
      EXPECT_TRUE(rep.equal) << xi->name() << " (" << a << "," << b << "] "
                             << rep.residual_squared << " vs " << rep.integral;
    }
  }
}

TEST(BdgChaos, ProductOnFirstBlock) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto rep = bdg_chaos_check(expand_library(*two_block_product(grid)), 0.0, 0.25);
  EXPECT_NEAR(rep.residual_squared, 0.25 * 0.5, 1e-14);
  EXPECT_NEAR(rep.integral, 0.25 * 0.5, 1e-14);
}

TEST(BdgChaos, OtherPowersAreUnsupported) {
  const auto grid = make_uniform_grid(1.0, 4);
  EXPECT_THROW(bdg_chaos_check(expand_library(*linear_terminal(grid)), 0.0, 0.5, 4.0), Error);
}
