#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wienerlab/besov.hpp"
#include "test_support.hpp"

using namespace wlab;

namespace {

McConfig mc(std::size_t n, std::uint64_t seed = 1) {
  McConfig c;
  c.n_samples = n;
  c.seed = seed;
  return c;
}

// F -> F(phi_0)^2, which is not positively homogeneous.
class SquaredPointPhi final : public PhiFunctional {
 public:
  explicit SquaredPointPhi(GridPtr grid) : family_{RotationProfile::indicator(grid, 0.0, 0.5),
                                                   RotationProfile::indicator(grid, 0.5, 1.0)} {}
  std::string name() const override { return "squared-point"; }
  const std::vector<RotationProfile>& family() const override { return family_; }
  std::string label(std::size_t j) const override { return std::to_string(j); }
  double reduce(std::span<const double> F) const override { return F[0] * F[0]; }

 private:
  std::vector<RotationProfile> family_;
};

double linear_anisotropic_oracle(double theta, double q) {
  return std::sqrt(2.0) * std::pow(2.0 / (q * (1.0 - theta)), 1.0 / q);
}

}  // namespace

TEST(DDistance, ClosedForms) {
  for (double eta : {0.0, 0.3, 1.0}) EXPECT_NEAR(d_distance(eta, eta), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(d_distance(0.0, 1.0), 1.0);
  EXPECT_NEAR(d_distance(0.6, 0.8), 0.04, 1e-15);
  EXPECT_THROW(d_distance(-0.1, 0.5), Error);
  EXPECT_THROW(d_distance(0.5, 1.1), Error);
}

TEST(DyadicIntervals, CountAndCoarseGrid) {
  const auto grid = make_uniform_grid(1.0, 64);
  EXPECT_EQ(dyadic_intervals(*grid, 6).size(), 127u);
  EXPECT_THROW(dyadic_intervals(*make_uniform_grid(1.0, 16), 6), Error);
}

TEST(SupInterval, LinearTerminalIsRootTwo) {
  const auto grid = make_uniform_grid(1.0, 64);
  const auto res = sup_interval_seminorm(*linear_terminal(grid), 2.0, 2.0,
                                         dyadic_intervals(*grid, 6), mc(100'000));
  EXPECT_NEAR(res.result.value.value, std::sqrt(2.0), 0.05 * std::sqrt(2.0));
  EXPECT_GT(res.argmax.width(), 0.0);
}

TEST(SupInterval, SquareTerminalPeaksAtSmallestWidth) {
  const auto grid = make_uniform_grid(1.0, 64);
  const auto res = sup_interval_seminorm(*square_terminal(grid), 2.0, 2.0,
                                         dyadic_intervals(*grid, 6), mc(400'000));
  EXPECT_NEAR(res.result.value.value, std::sqrt(7.9375), 0.05 * std::sqrt(7.9375));
  // Each tabulated point against the Gaussian-moment oracle sqrt(8h - 4h^2).
  const auto family = dyadic_intervals(*grid, 6);
  for (std::size_t j = 0; j < family.size(); ++j) {
    const double h = family[j].width();
    EXPECT_NEAR(res.result.curve[j].value, std::sqrt(8.0 * h - 4.0 * h * h),
                4.0 * res.result.curve[j].std_error);
  }
}

TEST(SupInterval, ConstantFunctionalIsZero) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto res = sup_interval_seminorm(*constant_functional(grid, 3.0), 2.0, 2.0,
                                         dyadic_intervals(*grid, 3), mc(2000));
  EXPECT_EQ(res.result.value.value, 0.0);
}

TEST(SupInterval, RejectsEmptyFamilyAndSmallR) {
  const auto grid = make_uniform_grid(1.0, 8);
  EXPECT_THROW(sup_interval_phi(grid, 2.0, {}), Error);
  EXPECT_THROW(sup_interval_phi(grid, 1.5, dyadic_intervals(*grid, 2)), Error);
}

TEST(Anisotropic, LinearTerminalMatchesClosedForm) {
  const auto grid = make_uniform_grid(1.0, 64);
  const auto xi = linear_terminal(grid);
  double prev = 0.0;
  for (double theta : {0.25, 0.5, 0.75}) {
    const auto res = anisotropic_seminorm(*xi, 2.0, {{1.0, theta, 2.0}}, mc(100'000));
    const double oracle = linear_anisotropic_oracle(theta, 2.0);
    EXPECT_NEAR(res.value.value, oracle, 0.03 * oracle) << "theta " << theta;
    EXPECT_GT(res.value.value, prev);
    prev = res.value.value;
  }
}

TEST(Anisotropic, ConstantIsZeroAndTailsAreReported) {
  const auto grid = make_uniform_grid(1.0, 32);
  EXPECT_EQ(anisotropic_seminorm(*constant_functional(grid, 1.0), 2.0, {{1.0, 0.5, 2.0}},
                                 mc(2000))
                .value.value,
            0.0);
  const AnisotropicPhi phi(grid, {{0.5, 0.5, 2.0}, {1.0, 0.5, 2.0}});
  // F(chi_(t,r]) = sqrt(2 (r - t)) gives the nominal decay exponent exactly.
  std::vector<double> F;
  for (std::size_t j = 0; j < phi.family().size(); ++j) {
    const auto& prof = phi.family()[j];
    F.push_back(std::sqrt(2.0 * (prof.last_active() - prof.first_active()) / 32.0));
  }
  const auto tails = phi.tails(F);
  ASSERT_EQ(tails.size(), 2u);
  for (const auto& t : tails) {
    EXPECT_NEAR(t.fitted_exponent, 0.5, 1e-12);
    EXPECT_NEAR(t.fitted, t.nominal, 1e-12);
  }
}

TEST(Anisotropic, SupNormVariant) {
  const auto grid = make_uniform_grid(1.0, 16);
  const AnisotropicPhi phi(grid, {{1.0, 0.5, std::numeric_limits<double>::infinity()}});
  std::vector<double> F(phi.family().size(), 1.0);
  // sup of (1 - t)^(-1/4) over nodes up to one cell before 1.
  EXPECT_NEAR(phi.reduce(F), std::pow(1.0 / 16.0, -0.25), 1e-12);
}

TEST(Isotropic, UnitKernelMatchesQuadratureOracle) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto res = isotropic_seminorm(*linear_terminal(grid), 2.0, unit_kernel(), 2.0,
                                      mc(100'000));
  const double oracle = std::sqrt(2.0 * (1.0 - std::numbers::pi / 4.0));
  EXPECT_NEAR(res.value.value, oracle, 0.03 * oracle);
}

TEST(Isotropic, ExactCurveIsIntegratedToHighAccuracy) {
  const auto grid = make_uniform_grid(1.0, 4);
  const IsotropicPhi phi(grid, unit_kernel(), 2.0);
  std::vector<double> F;
  for (const auto& prof : phi.family()) {
    const double r = prof.value(0);
    F.push_back(std::sqrt(2.0 * (1.0 - std::sqrt(1.0 - r * r))));
  }
  EXPECT_NEAR(phi.reduce(F), std::sqrt(2.0 * (1.0 - std::numbers::pi / 4.0)), 1e-9);
}

TEST(Isotropic, MehlerPresetSelfConverges) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto xi = linear_terminal(grid);
  const auto coarse =
      isotropic_seminorm(*xi, 2.0, mehler_kernel(0.5, 2.0), 2.0, mc(40'000), 0.25);
  const auto fine = isotropic_seminorm(*xi, 2.0, mehler_kernel(0.5, 2.0), 2.0, mc(40'000), 0.125);
  EXPECT_TRUE(std::isfinite(fine.value.value));
  EXPECT_LT(std::abs(coarse.value.value - fine.value.value), 0.01 * fine.value.value);
}

TEST(Isotropic, MehlerKernelReducesToPowerIntegral) {
  // With t = log(1/(1 - r^2)), K(r) dr = t^(-1-a) dt, so a curve with
  // F^q = min(t, 1) integrates to 1/(1 - a) + 1/a.
  const auto grid = make_uniform_grid(1.0, 2);
  const IsotropicPhi phi(grid, mehler_kernel(0.5, 2.0), 2.0, 1.0 / 32.0);
  std::vector<double> F;
  for (const auto& prof : phi.family()) {
    const double r = prof.value(0);
    const double t = r < 0.5 ? -std::log1p(-r * r) : -std::log((1.0 - r) * (1.0 + r));
    F.push_back(std::sqrt(std::min(r < 1.0 ? t : 1.0, 1.0)));
  }
  const double a = 0.5;
  EXPECT_NEAR(phi.reduce(F), std::sqrt(1.0 / (1.0 - a) + 1.0 / a), 2e-3);
}

TEST(Isotropic, DivergentKernelIsAnError) {
  const auto grid = make_uniform_grid(1.0, 4);
  const Kernel steep{"steep", [](double r, double) { return std::pow(r, -4.0); }, {}, {}};
  EXPECT_THROW(isotropic_seminorm(*linear_terminal(grid), 2.0, steep, 2.0, mc(2000)), Error);
}

TEST(BesovNorm, LinearTerminalWithPhi2) {
  const auto grid = make_uniform_grid(1.0, 64);
  const auto v = besov_norm(*linear_terminal(grid), 2.0, *phi2(grid), mc(100'000));
  EXPECT_NEAR(v.value, std::sqrt(3.0), 0.05 * std::sqrt(3.0));
  EXPECT_EQ(besov_norm(*constant_functional(grid, 0.0), 2.0, *phi2(grid, 3), mc(2000)).value,
            0.0);
}

TEST(BesovNorm, TriangleInequality) {
  const auto grid = make_uniform_grid(1.0, 16);
  const auto phi = phi2(grid, 4);
  const auto a = linear_terminal(grid), b = square_terminal(grid);
  const auto sum = linear_combination({{1.0, a}, {1.0, b}});
  const auto cfg = mc(100'000);
  const auto na = seminorm(*a, *phi, 2.0, cfg).value, nb = seminorm(*b, *phi, 2.0, cfg).value;
  const auto ns = seminorm(*sum, *phi, 2.0, cfg).value;
  EXPECT_LE(ns.value, na.value + nb.value + 3.0 * std::hypot(ns.std_error, na.std_error, nb.std_error));
}

TEST(BesovNorm, HomogeneousAndShiftInvariantOnSharedSamples) {
  const auto grid = make_uniform_grid(1.0, 16);
  const auto xi = square_terminal(grid);
  const auto cfg = mc(20'000);
  for (const auto& phi : {phi2(grid, 4), anisotropic_phi(grid, {{1.0, 0.5, 2.0}}),
                          isotropic_phi(grid, unit_kernel(), 2.0, 0.5)}) {
    const double base = seminorm(*xi, *phi, 2.0, cfg).value.value;
    const double doubled =
        seminorm(*linear_combination({{2.0, xi}}), *phi, 2.0, cfg).value.value;
    EXPECT_EQ(doubled, 2.0 * base) << phi->name();
    const double neg = seminorm(*linear_combination({{-3.0, xi}}), *phi, 2.0, cfg).value.value;
    EXPECT_NEAR(neg, 3.0 * base, 1e-12 * base) << phi->name();
    const double shifted =
        seminorm(*linear_combination({{1.0, xi}}, 5.0), *phi, 2.0, cfg).value.value;
    EXPECT_NEAR(shifted, base, 1e-9 * base) << phi->name();
  }
}

TEST(Admissibility, LibraryFunctionalsPass) {
  const auto grid = make_uniform_grid(1.0, 16);
  std::vector<RotationProfile> set = {RotationProfile::indicator(grid, 0.0, 0.5),
                                      RotationProfile::constant(grid, 0.3),
                                      RotationProfile::indicator(grid, 0.25, 1.0)};
  for (const auto& phi :
       {weighted_sup_phi(set, {0.5, 1.0, 2.0}), phi2(grid, 4),
        sup_interval_phi(grid, 4.0, dyadic_intervals(*grid, 3)),
        anisotropic_phi(grid, {{0.5, 0.3, 1.0}, {1.0, 0.7, 3.0}}),
        isotropic_phi(grid, unit_kernel(), 2.0, 0.5)}) {
    const auto rep = admissibility_check(*phi, 200);
    EXPECT_TRUE(rep.all()) << phi->name() << ": "
                           << (rep.violations.empty() ? "" : rep.violations.front());
  }
}

TEST(Admissibility, Phi2HomogeneityIsExact) {
  const auto grid = make_uniform_grid(1.0, 16);
  const auto rep = admissibility_check(*phi2(grid, 4), 100, 3, 0.0);
  EXPECT_TRUE(rep.homogeneous);
}

TEST(Admissibility, SquaredFunctionalIsReported) {
  const auto grid = make_uniform_grid(1.0, 4);
  const auto rep = admissibility_check(SquaredPointPhi(grid), 50);
  EXPECT_FALSE(rep.homogeneous);
  EXPECT_FALSE(rep.violations.empty());
}

TEST(ProcessSeminorm, DeterministicProcessIsZero) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto A = deterministic_process(grid, std::vector<double>(8, 2.0));
  EXPECT_EQ(process_seminorm(*A, 2.0, 2.0, 0.0, *phi2(grid, 3), mc(2000)).value.value, 0.0);
  EXPECT_THROW(process_seminorm(*A, 0.5, 2.0, 0.0, *phi2(grid, 3), mc(2000)), Error);
}

TEST(ProcessSeminorm, FrozenProcessIgnoresLaterCells) {
  const auto grid = make_uniform_grid(1.0, 8);
  const auto A = frozen_brownian_process(grid, 0.5);
  const auto phi = sup_interval_phi(grid, 2.0, {{0.5, 1.0}, {0.5, 0.75}, {0.75, 1.0}});
  EXPECT_EQ(process_seminorm(*A, 2.0, 2.0, 0.0, *phi, mc(2000)).value.value, 0.0);
}

TEST(ProcessSeminorm, BrownianPathMatchesIntegralOracle) {
  const auto grid = make_uniform_grid(1.0, 16);
  const auto family = dyadic_intervals(*grid, 3);
  const auto phi = sup_interval_phi(grid, 2.0, family);
  const auto res =
      process_seminorm(*brownian_step_process(grid), 2.0, 2.0, 0.0, *phi, mc(200'000));
  double best = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) {
    // E int |W_s - W^psi_s|^2 ds with W_s frozen at the left node of each cell.
    double integral = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      const double tk = grid->node(k);
      const double overlap = std::max(0.0, std::min(family[j].t, tk) - family[j].s);
      integral += 2.0 * overlap * grid->width(k);
    }
    EXPECT_NEAR(res.curve[j].value, std::sqrt(integral), 3.0 * res.curve[j].std_error + 1e-15);
    best = std::max(best, std::sqrt(integral / family[j].width()));
  }
  EXPECT_NEAR(res.value.value, best, 3.0 * res.value.std_error);
}

TEST(BvEmbedding, IndicatorRateAndBound) {
  const double T = 1.0, q = 2.0, p = 2.0;
  const auto grid = make_uniform_grid(T, 64);
  const auto xi = linear_terminal(grid);
  const auto g = bv_indicator(xi, 0.0);
  std::vector<double> hs, values;
  for (int k = 1; k <= 6; ++k) {
    const double h = T * std::pow(2.0, -k);
    const auto phi = RotationProfile::indicator(grid, T - h, T);
    const auto e = p_norm_diff(*g, phi, q, mc(200'000));
    // Orthant oracle: P(sign change) = arccos((T-h)/T) / pi.
    const double oracle = std::pow(std::acos((T - h) / T) / std::numbers::pi, 1.0 / q);
    EXPECT_NEAR(e.value, oracle, 3.0 * e.std_error + 1e-3);
    const double diff = p_norm_diff(*xi, phi, p, mc(200'000)).value;
    EXPECT_LE(e.value, bv_embedding_bound(p, q, 1.0 / std::sqrt(2.0 * std::numbers::pi * T), diff));
    hs.push_back(h);
    values.push_back(e.value);
  }
  EXPECT_NEAR(log_log_slope(hs, values), 1.0 / (2.0 * q), 0.15 / (2.0 * q));
}

TEST(DiffusionExample, FittedConstantIsStable) {
  const auto grid = make_uniform_grid(1.0, 32);
  const auto xi = diffusion_terminal(grid, ou_spec(1.0, 1.0, 0.0, [](double x) { return x; },
                                                   [](double) { return 1.0; }));
  const auto zero = RotationProfile::constant(grid, 0.0);
  // c_p = sup over intervals of ||X_T^phi - X_T||_p / delta(phi, 0).
  std::vector<double> fitted;
  for (double p : {2.0, 4.0}) {
    double c = 0.0;
    for (const auto& iv : dyadic_intervals(*grid, 4)) {
      const auto phi = RotationProfile::indicator(grid, iv.s, iv.t);
      c = std::max(c, p_norm_diff(*xi, phi, p, mc(20'000)).value / delta_distance(phi, zero));
    }
    fitted.push_back(c);
  }
  EXPECT_GT(fitted[0], 0.0);
  EXPECT_LE(fitted[1] / fitted[0], 2.0);
  EXPECT_GE(fitted[1] / fitted[0], 0.5);
}
