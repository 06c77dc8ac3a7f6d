#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wienerlab/estimators.hpp"
#include "test_support.hpp"

using namespace wlab;

namespace {

McConfig mc(std::size_t n, std::size_t inner = 0, std::uint64_t seed = 1) {
  McConfig c;
  c.n_samples = n;
  c.seed = seed;
  c.n_inner = inner;
  return c;
}

void expect_within(const Estimate& e, double expected, double sigmas = 3.0) {
  EXPECT_NEAR(e.value, expected, sigmas * e.std_error) << "stderr " << e.std_error;
}

// E exp(|Z| / lambda) for Z ~ N(0,1) by composite Simpson on [0, 40].
double abs_normal_exp_moment(double lambda) {
  const int n = 40000;
  const double h = 40.0 / n;
  auto f = [&](double x) {
    return 2.0 * std::exp(x / lambda - 0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  double s = f(0.0) + f(40.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(McConfig, RejectsTooFewBatchesAndUnevenSplit) {
  McConfig c;
  c.n_batches = 10;
  EXPECT_THROW(c.validate(), Error);
  c.n_batches = 20;
  c.n_samples = 1001;
  EXPECT_THROW(c.validate(), Error);
}

TEST(PNormDiff, LinearTerminalMatchesGaussianOracle) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.5);
  const auto xi = linear_terminal(grid);
  expect_within(p_norm_diff(*xi, phi, 2.0, mc(400'000)), std::sqrt(0.5));
  expect_within(p_norm_diff(*xi, phi, 4.0, mc(400'000)), std::pow(3.0 * 0.25, 0.25));
}

TEST(PNormDiff, ZeroProfileIsExactlyZero) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto e = p_norm_diff(*square_terminal(grid), RotationProfile::constant(grid, 0.0), 2.0,
                             mc(2000));
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(PNormDiff, SquareTerminalMatchesIsserlisOracle) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto phi = RotationProfile::indicator(grid, 0.5, 0.75);
  // (B - B')(2A + B + B') with A ~ N(0, T-h), B, B' ~ N(0, h): 8hT - 4h^2.
  expect_within(p_norm_diff(*square_terminal(grid), phi, 2.0, mc(1'000'000)), std::sqrt(1.75));
}

TEST(PNormDiff, NonFiniteSampleNamesTheFunctional) {
  const auto grid = make_uniform_grid(1.0, 4);
  DiffusionSpec spec;
  spec.drift = [](double, double) { return 0.0; };
  spec.diffusion = [](double, double) { return 1.0; };
  spec.terminal = [](double x) { return x > 0 ? std::numeric_limits<double>::infinity() : 0.0; };
  spec.label = "exploding";
  const auto xi = diffusion_terminal(grid, spec);
  try {
    p_norm_diff(*xi, RotationProfile::constant(grid, 0.5), 2.0, mc(2000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite);
    EXPECT_NE(std::string(e.what()).find("exploding"), std::string::npos);
  }
}

TEST(PNormDiff, MonotoneInPPerBatch) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.5);
  const double ps[] = {1.0, 1.5, 2.0, 3.0, 4.0, 8.0};
  const auto bm = diff_moments(*square_terminal(grid), std::span(&phi, 1), ps, mc(40'000));
  for (std::size_t b = 0; b < bm.batches(); ++b)
    for (std::size_t i = 1; i < std::size(ps); ++i)
      EXPECT_LE(std::pow(bm.at(b, i - 1), 1.0 / ps[i - 1]),
                std::pow(bm.at(b, i), 1.0 / ps[i]) * (1.0 + 1e-12));
}

TEST(PNormDiff, EqualProfilesGiveEqualEstimates) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.75);
  const auto psi = RotationProfile::custom(grid, {0.0, 1.0, 1.0, 0.0});
  const auto xi = square_terminal(grid);
  EXPECT_EQ(p_norm_diff(*xi, phi, 2.0, mc(20'000)).value,
            p_norm_diff(*xi, psi, 2.0, mc(20'000)).value);
}

TEST(PNormDiff, ContinuityAlongConvergingProfiles) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto xi = linear_terminal(grid);
  const auto target = RotationProfile::indicator(grid, 0.25, 0.75);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 14; ++n) {
    std::vector<double> v(target.values().begin(), target.values().end());
    for (auto& x : v) x = x * (1.0 - std::pow(2.0, -n));
    const auto phi_n = RotationProfile::custom(grid, v);
    const auto e = p_norm_between(*xi, phi_n, target, 2.0, mc(40'000));
    EXPECT_LT(e.value, prev);
    prev = e.value;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(PNormDiff, ResultDoesNotDependOnThreadCount) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.5);
  auto cfg = mc(40'000);
  const auto one = p_norm_diff(*square_terminal(grid), phi, 3.0, cfg);
  cfg.threads = 4;
  const auto four = p_norm_diff(*square_terminal(grid), phi, 3.0, cfg);
  EXPECT_EQ(one.value, four.value);
  EXPECT_EQ(one.std_error, four.std_error);
}

TEST(PNormDiff, StandardErrorShrinksAtRootN) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.5);
  std::vector<double> ns, ses;
  for (std::size_t n = 20'000; n <= 640'000; n *= 2) {
    ns.push_back(static_cast<double>(n));
    ses.push_back(p_norm_diff(*square_terminal(grid), phi, 2.0, mc(n, 0, 3)).std_error);
  }
  const double slope = log_log_slope(ns, ses);
  EXPECT_NEAR(slope, -0.5, 0.1);
}

TEST(CondExpResidual, LinearTerminalIsRootWidth) {
  const auto grid = make_uniform_grid(1.0, 4);
  expect_within(cond_exp_residual(*linear_terminal(grid), 0.25, 0.5, 2.0, mc(400'000, 1)), 0.5);
}

TEST(CondExpResidual, SquareTerminalMatchesChaosValue) {
  const auto grid = make_uniform_grid(1.0, 4);
  expect_within(cond_exp_residual(*square_terminal(grid), 0.5, 0.75, 2.0, mc(1'000'000, 1)),
                std::sqrt(0.875));
}

TEST(CondExpResidual, MeasurableOutsideIntervalIsZero) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto xi = poly_increments(grid, {{0.0, 0.5, 0}}, {{1.0, {2}}});
  const auto e = cond_exp_residual(*xi, 0.5, 1.0, 2.0, mc(20'000, 2));
  EXPECT_NEAR(e.value, 0.0, 1e-12);
}

TEST(CondExpResidual, NonQuadraticPowerConverges) {
  const auto grid = make_uniform_grid(1.0, 4);
  // Residual is N(0, h); ||N(0,h)||_4 = (3 h^2)^(1/4). Inner bias is O(1/n_inner).
  const auto e = cond_exp_residual(*linear_terminal(grid), 0.25, 0.5, 4.0, mc(40'000, 200));
  EXPECT_NEAR(e.value, std::pow(3.0 / 16.0, 0.25), 0.02);
}

TEST(CondExpResidual, MissingInnerCountIsAnError) {
  const auto grid = make_uniform_grid(1.0, 4);
  EXPECT_THROW(cond_exp_residual(*linear_terminal(grid), 0.25, 0.5, 2.0, mc(2000)), Error);
  EXPECT_THROW(cond_exp_residual(*linear_terminal(grid), 0.25, 0.5, 3.0, mc(40'000, 10)), Error);
}

TEST(Sandwich, PolynomialRatiosAreInverseRootTwo) {
  const auto grid = make_uniform_grid(1.0, 4);
  for (const auto& xi : {linear_terminal(grid), square_terminal(grid)}) {
    const auto r = sandwich_check(*xi, 0.25, 0.5, 2.0, mc(400'000, 1));
    EXPECT_TRUE(r.within_bounds) << xi->name();
    expect_within(r.ratio, 1.0 / std::sqrt(2.0));
  }
}

TEST(Sandwich, IndependentFunctionalIsDegenerate) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto xi = poly_increments(grid, {{0.0, 0.5, 0}}, {{1.0, {1}}});
  try {
    sandwich_check(*xi, 0.5, 1.0, 2.0, mc(2000, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate);
  }
}

TEST(Orlicz, ZeroSamplesGiveZero) {
  const std::vector<double> z(10, 0.0);
  EXPECT_EQ(orlicz_exp_norm(z), 0.0);
}

TEST(Orlicz, TwoPointClosedForm) {
  for (double m : {1.0, 3.0}) {
    for (double p : {1.0 / (std::numbers::e - 1.0), 0.01, 0.4}) {
      const std::vector<double> f = {0.0, m};
      const std::vector<double> w = {1.0 - p, p};
      EXPECT_NEAR(orlicz_exp_norm(f, w), m / std::log1p(1.0 / p), 1e-12 * m);
    }
  }
  const std::vector<double> f = {0.0, 1.0};
  const std::vector<double> w = {1.0 - 1.0 / (std::numbers::e - 1.0), 1.0 / (std::numbers::e - 1.0)};
  EXPECT_NEAR(orlicz_exp_norm(f, w), 1.0, 1e-12);
}

TEST(Orlicz, AbsoluteNormalMatchesQuadratureRoot) {
  double lo = 0.5, hi = 5.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (abs_normal_exp_moment(mid) > 2.0 ? lo : hi) = mid;
  }
  std::vector<double> samples;
  NormalStream normals({21, 0});
  for (int i = 0; i < 200'000; ++i) samples.push_back(std::abs(normals.next()));
  EXPECT_NEAR(orlicz_exp_norm(samples), hi, 0.05 * hi);
}

TEST(Orlicz, CapSignalsInfinity) {
  const std::vector<double> f = {0.0, 10.0};
  const std::vector<double> w = {0.5, 0.5};
  EXPECT_TRUE(std::isinf(orlicz_exp_norm(f, w, 1.0)));
}
