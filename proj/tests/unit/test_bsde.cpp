#include <gtest/gtest.h>

#include <cmath>

#include "wienerlab/bsde.hpp"

using namespace wlab;

namespace {

McConfig mc(std::size_t n, std::uint64_t seed = 1) {
  McConfig c;
  c.n_samples = n;
  c.seed = seed;
  return c;
}

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

std::pair<BsdePreset, BsdeSolution> solve_preset(const std::string& name, std::size_t steps) {
  auto preset = bsde_preset(name);
  auto sol = solve_markovian(preset.problem, make_uniform_grid(1.0, steps), preset.solver);
  return {std::move(preset), std::move(sol)};
}

}  // namespace

TEST(GaussHermite, IntegratesGaussianMoments) {
  for (std::size_t n : {2u, 5u, 16u}) {
    const auto r = gauss_hermite(n);
    for (int k = 0; k <= int(2 * n - 1); ++k) {
      double s = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += r.weights[i] * std::pow(r.nodes[i], k);
        scale += r.weights[i] * std::pow(std::abs(r.nodes[i]), k);
      }
      const double exact = k % 2 ? 0.0 : double_factorial(k - 1);
      EXPECT_NEAR(s, exact, 1e-10 * std::max(1.0, scale)) << n << " " << k;
    }
  }
  EXPECT_THROW(gauss_hermite(1), Error);
}

TEST(Generator, LipschitzCheck) {
  for (const auto& name : bsde_preset_names())
    EXPECT_TRUE(check_lipschitz(bsde_preset(name).problem.generator, 1.0).holds) << name;
  GeneratorSpec bad{[](double, double, double y, double) { return 3.0 * y; }, 1.0, 0.0, 0.0};
  EXPECT_FALSE(check_lipschitz(bad, 1.0).holds);
}

TEST(Solver, ClosedFormOracles) {
  for (const char* name : {"heat", "linear-oracle", "quadratic-cole-hopf", "bv-terminal"}) {
    const auto [preset, sol] = solve_preset(name, 100);
    EXPECT_NEAR(sol.y0(preset.problem.model.x0), *preset.y0_oracle, preset.tolerance) << name;
  }
}

TEST(Solver, HeatSolutionOnWholeGrid) {
  const auto [preset, sol] = solve_preset("heat", 50);
  const auto xs = sol.space();
  // Boundary extrapolation error decays inward; check the central band.
  for (std::size_t k : {0u, 25u, 49u})
    for (std::size_t j = 150; j <= 250; j += 7) {
      const double t = sol.grid()->node(k);
      EXPECT_NEAR(sol.u(k)[j], xs[j] * xs[j] + (1.0 - t), 1e-9);
      EXPECT_NEAR(sol.z(k)[j], 2.0 * xs[j], 1e-9);
    }
  for (std::size_t j = 0; j < xs.size(); ++j) EXPECT_EQ(sol.u(50)[j], xs[j] * xs[j]);
}

TEST(Solver, SelfConvergenceUnderDoubling) {
  for (const char* name : {"heat", "linear-oracle", "quadratic-cole-hopf"}) {
    auto preset = bsde_preset(name);
    const double coarse = solve_markovian(preset.problem, make_uniform_grid(1.0, 100), preset.solver).y0(0.0);
    preset.solver.space_nodes = 2 * preset.solver.space_nodes - 1;
    const double fine = solve_markovian(preset.problem, make_uniform_grid(1.0, 200), preset.solver).y0(0.0);
    EXPECT_LT(std::abs(fine - coarse), preset.tolerance) << name;
  }
}

TEST(Solver, ImplicitEulerIsFirstOrder) {
  auto preset = bsde_preset("linear-oracle");
  preset.solver.theta = 1.0;
  const double y = solve_markovian(preset.problem, make_uniform_grid(1.0, 100), preset.solver).y0(0.0);
  EXPECT_GT(std::abs(y - std::exp(1.0)), 1e-3);
  EXPECT_LT(std::abs(y - std::exp(1.0)), 3e-2);
}

TEST(Solver, RejectsBadConfig) {
  auto preset = bsde_preset("heat");
  preset.solver.gh_nodes = 1;
  EXPECT_THROW(solve_markovian(preset.problem, make_uniform_grid(1.0, 4), preset.solver), Error);
  preset.solver.gh_nodes = 16;
  preset.solver.space_nodes = 3;
  EXPECT_THROW(solve_markovian(preset.problem, make_uniform_grid(1.0, 4), preset.solver), Error);
  auto blow = bsde_preset("heat");
  blow.problem.generator.f = [](double, double, double y, double) { return y * y * 1e300; };
  EXPECT_THROW(solve_markovian(blow.problem, make_uniform_grid(1.0, 4), blow.solver), Error);
  EXPECT_THROW(bsde_preset("nope"), Error);
}

TEST(TwinPaths, ZeroProfileIsBitwiseIdentical) {
  const auto [preset, sol] = solve_preset("ou-lipschitz", 32);
  const auto pair = sample_pair(sol.grid(), 1, RngStream{3, 9});
  const auto rec = twin_paths_eval(sol, preset.problem.model, pair, RotationProfile::constant(sol.grid(), 0.0));
  EXPECT_EQ(rec.base.y, rec.twin.y);
  EXPECT_EQ(rec.base.z, rec.twin.z);
}

TEST(TwinPaths, LinearTerminalDifferenceMoment) {
  const auto preset = bsde_preset("linear-terminal");
  const auto grid = make_uniform_grid(1.0, 16);
  const auto sol = solve_markovian(preset.problem, grid, preset.solver);
  const auto phi = RotationProfile::indicator(grid, 0.25, 0.5);
  const McConfig cfg = mc(200'000);
  const auto bm = run_batches(cfg, 3, [&]() {
    return [&](std::uint64_t i, std::span<double> acc) {
      const auto pair = sample_pair(grid, 1, sample_stream(cfg, StreamTag::bsde_paths, i));
      const auto rec = twin_paths_eval(sol, preset.problem.model, pair, phi);
      const double d = rec.base.y[12] - rec.twin.y[12];
      acc[0] += d * d;
      acc[1] += rec.twin.y[8] * rec.twin.y[8];
      acc[2] += rec.base.y[8] * rec.base.y[8];
    };
  });
  EXPECT_NEAR(bm.mean(0).value, 0.5, 3.0 * bm.mean(0).std_error);
  // Law invariance of the twin.
  EXPECT_NEAR(bm.mean(1).value, 0.5, 3.0 * bm.mean(1).std_error);
  EXPECT_NEAR(bm.mean(2).value, 0.5, 3.0 * bm.mean(2).std_error);
}

TEST(Stability, EqualProfilesGiveZero) {
  const auto [preset, sol] = solve_preset("ou-lipschitz", 32);
  const auto rep = stability_check(preset.problem, sol, RotationProfile::constant(sol.grid(), 0.0), 0.0, 2.0,
                                   mc(4000));
  EXPECT_EQ(rep.lhs.value, 0.0);
  EXPECT_EQ(rep.rhs.value, 0.0);
  EXPECT_EQ(rep.defect_z.value, 0.0);
  EXPECT_FALSE(rep.anomaly);
  EXPECT_NEAR(rotation_defect(0.3, 0.3), 0.0, 1e-15);
  EXPECT_NEAR(rotation_defect(1.0, 0.0), 1.0, 1e-15);
}

TEST(Stability, LinearTerminalAfterInterval) {
  const auto preset = bsde_preset("linear-terminal");
  const auto grid = make_uniform_grid(1.0, 16);
  const auto sol = solve_markovian(preset.problem, grid, preset.solver);
  const auto rep = stability_check(preset.problem, sol, RotationProfile::indicator(grid, 0.25, 0.5), 0.5, 2.0,
                                   mc(20'000));
  EXPECT_NEAR(rep.sup_diff.value / rep.terminal.value, 1.0, 1e-12);
  EXPECT_NEAR(rep.terminal.value, std::sqrt(0.5), 4.0 * rep.terminal.std_error);
  EXPECT_EQ(rep.defect_z.value, 0.0);
  EXPECT_TRUE(std::isfinite(rep.ratio.value));
  EXPECT_FALSE(rep.anomaly);
}

TEST(Stability, OuSweepRatiosStayComparable) {
  const auto [preset, sol] = solve_preset("ou-lipschitz", 64);
  double lo = INFINITY, hi = 0.0;
  for (int k = 2; k <= 6; ++k) {
    const double h = std::ldexp(1.0, -k);
    const auto rep = stability_check(preset.problem, sol, RotationProfile::indicator(sol.grid(), 0.5, 0.5 + h),
                                     0.0, 2.0, mc(20'000));
    ASSERT_TRUE(std::isfinite(rep.ratio.value));
    EXPECT_FALSE(rep.anomaly);
    EXPECT_GT(rep.sup_y.value, 0.0);
    lo = std::min(lo, rep.ratio.value);
    hi = std::max(hi, rep.ratio.value);
  }
  EXPECT_LE(hi / lo, 5.0);
}

TEST(Variation, LinearTerminalSquareRootLaw) {
  const auto preset = bsde_preset("linear-terminal");
  const auto grid = make_uniform_grid(1.0, 64);
  const auto sol = solve_markovian(preset.problem, grid, preset.solver);
  std::vector<std::pair<double, double>> pairs;
  for (int k = 2; k <= 6; ++k) pairs.push_back({0.25, 0.25 + std::ldexp(1.0, -k)});
  const auto rep = variation_check(preset.problem, sol, 2.0, pairs, mc(100'000));
  for (const auto& r : rep.rows) EXPECT_NEAR(r.lhs.value, std::sqrt(r.t - r.s), 4.0 * r.lhs.std_error);
  EXPECT_NEAR(rep.slope, 0.5, 0.02);
  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.drift.value, r.t - r.s, 1e-12);
    EXPECT_EQ(r.generator.value, 0.0);
  }
}

TEST(GradientDiagnostics, Envelopes) {
  const auto [preset, sol] = solve_preset("linear-terminal", 16);
  const auto zero = gradient_diagnostics(sol, 0.0);
  EXPECT_NEAR(sliceable_upper(zero, 1.0, 4), 0.5, 1e-15);
  const auto env = gradient_diagnostics(sol, 1.0);
  for (std::size_t k = 0; k < env.cells(); ++k) EXPECT_NEAR(env.level(k)[0].value, 1.0, 1e-9);

  auto lip = bsde_preset("heat");
  lip.problem.terminal = [](double x) { return std::sin(x); };
  lip.problem.terminal_dx = [](double x) { return std::cos(x); };
  const auto s2 = solve_markovian(lip.problem, make_uniform_grid(1.0, 32), lip.solver);
  const auto e2 = gradient_diagnostics(s2, 1.0);
  for (std::size_t k = 0; k < e2.cells(); ++k) EXPECT_LE(e2.level(k)[0].value, 1.0 + 1e-6);
}

TEST(ValueFunctional, EndpointsMatchSolution) {
  const auto preset = bsde_preset("heat");
  const auto grid = make_uniform_grid(1.0, 8);
  const auto sol = std::make_shared<const BsdeSolution>(solve_markovian(preset.problem, grid, preset.solver));
  const auto pair = sample_pair(grid, 1, RngStream{1, 2});
  const auto xi = bsde_value_functional(preset.problem, sol, 1.0);
  const auto w = cumulative_path(pair.w());
  EXPECT_DOUBLE_EQ(xi->evaluate(pair.w()), w.back() * w.back());
  EXPECT_NEAR(bsde_value_functional(preset.problem, sol, 0.0)->evaluate(pair.w()), 1.0, 1e-9);
  const auto mid = bsde_value_functional(preset.problem, sol, 0.5)->evaluate(pair.w());
  EXPECT_NEAR(mid, w[4] * w[4] + 0.5, 1e-9);
}
