#include "wienerlab/bsde.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wlab {

namespace {

// Cubic Hermite on a uniform grid with central-difference slopes (one-sided
// second order at the ends); exact for quadratics.
struct UniformCubic {
  double lo = 0.0, dx = 1.0;

  double slope(std::span<const double> f, std::size_t i) const {
    const std::size_t n = f.size();
    if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / 2.0;
    if (i == n - 1) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / 2.0;
    return (f[i + 1] - f[i - 1]) / 2.0;
  }

  double value(std::span<const double> f, double x) const {
    const std::size_t n = f.size();
    const double pos = (x - lo) / dx;
    if (pos <= 0.0) return f[0] + slope(f, 0) * pos;
    if (pos >= double(n - 1)) return f[n - 1] + slope(f, n - 1) * (pos - double(n - 1));
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 2);
    const double t = pos - double(i), t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * slope(f, i) +
           (-2 * t3 + 3 * t2) * f[i + 1] + (t3 - t2) * slope(f, i + 1);
  }

  double derivative_at_node(std::span<const double> f, std::size_t i) const { return slope(f, i) / dx; }
};

QuadratureRule simpson_normal(std::size_t intervals) {
  require(intervals >= 2 && intervals % 2 == 0, ErrorCode::invalid_argument,
          "terminal Simpson rule needs an even number of intervals");
  const double a = -8.0, h = 16.0 / double(intervals);
  QuadratureRule r;
  double total = 0.0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double x = a + h * double(i);
    const double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double w = c * h / 3.0 * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    r.nodes.push_back(x);
    r.weights.push_back(w);
    total += w;
  }
  for (double& w : r.weights) w /= total;
  return r;
}

}  // namespace

QuadratureRule gauss_hermite(std::size_t n) {
  require(n >= 2, ErrorCode::invalid_argument, "Gauss-Hermite needs at least 2 nodes");
  // Golub-Welsch for the probabilists' Hermite recurrence He_{k+1} = x He_k - k He_{k-1}.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule r;
  for (std::size_t i = 0; i < n; ++i) {
    r.nodes.push_back(eig.eigenvalues()(i));
    const double v = eig.eigenvectors()(0, i);
    r.weights.push_back(v * v);
  }
  // Symmetrise against round-off so odd moments vanish exactly.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]), w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = r.weights[j] = w;
  }
  if (n % 2) r.nodes[n / 2] = 0.0;
  return r;
}

LipschitzReport check_lipschitz(const GeneratorSpec& gen, double horizon, std::size_t probes,
                                std::uint64_t seed, double range) {
  require(static_cast<bool>(gen.f), ErrorCode::invalid_argument, "generator has no evaluator");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range), ut(0.0, horizon);
  LipschitzReport rep;
  rep.probes = probes;
  for (std::size_t i = 0; i < probes; ++i) {
    const double t = ut(rng), x = u(rng), y0 = u(rng), y1 = u(rng), z0 = u(rng), z1 = u(rng);
    const double df = std::abs(gen.f(t, x, y0, z0) - gen.f(t, x, y1, z1));
    const double bound = gen.ly * std::abs(y0 - y1) +
                         gen.lz * std::pow(1.0 + std::abs(z0) + std::abs(z1), gen.theta) * std::abs(z0 - z1);
    const double ratio = bound > 0.0 ? df / bound : (df > 0.0 ? INFINITY : 0.0);
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
  }
  rep.holds = rep.worst_ratio <= 1.0 + 1e-12;
  return rep;
}

BsdeSolution::BsdeSolution(GridPtr grid, std::vector<double> xs, std::vector<std::vector<double>> u,
                           std::vector<std::vector<double>> z, ScalarMap terminal, unsigned picard_used)
    : grid_(std::move(grid)), xs_(std::move(xs)), u_(std::move(u)), z_(std::move(z)),
      terminal_(std::move(terminal)), picard_used_(picard_used) {
  require(xs_.size() >= 4, ErrorCode::invalid_argument, "spatial grid needs at least 4 nodes");
  dx_ = (xs_.back() - xs_.front()) / double(xs_.size() - 1);
}

double BsdeSolution::interpolate(std::span<const double> f, double x) const {
  return UniformCubic{xs_.front(), dx_}.value(f, x);
}

double BsdeSolution::value(std::size_t k, double x) const {
  if (k == grid_->cells() && terminal_) return terminal_(x);
  return interpolate(u_.at(k), x);
}

double BsdeSolution::gradient_z(std::size_t k, double x) const { return interpolate(z_.at(k), x); }

BsdeSolution solve_markovian(const BsdeProblem& problem, GridPtr grid, const SolverConfig& cfg) {
  require(grid != nullptr, ErrorCode::invalid_argument, "solver needs a time grid");
  require(cfg.space_nodes >= 4, ErrorCode::invalid_argument, "spatial grid needs at least 4 nodes");
  require(cfg.theta >= 0.0 && cfg.theta <= 1.0, ErrorCode::domain, "theta must lie in [0,1]");
  const auto& model = problem.model;
  const auto& f = problem.generator.f;
  require(model.drift && model.diffusion && problem.terminal && f, ErrorCode::invalid_argument,
          "problem needs drift, diffusion, generator and terminal map");
  const QuadratureRule gh = gauss_hermite(cfg.gh_nodes);
  const QuadratureRule first =
      cfg.terminal_intervals > 0 ? simpson_normal(cfg.terminal_intervals) : gh;

  const std::size_t m = grid->cells(), nx = cfg.space_nodes;
  const double horizon = grid->horizon();
  const double half = cfg.width_sigmas * model.sigma_bar * std::sqrt(horizon);
  const double lo = model.x0 - half, dx = 2.0 * half / double(nx - 1);
  std::vector<double> xs(nx);
  for (std::size_t j = 0; j < nx; ++j) xs[j] = lo + dx * double(j);
  const UniformCubic cubic{lo, dx};

  std::vector<std::vector<double>> u(m + 1, std::vector<double>(nx)), z(m + 1, std::vector<double>(nx));
  for (std::size_t j = 0; j < nx; ++j) u[m][j] = problem.terminal(xs[j]);
  for (std::size_t j = 0; j < nx; ++j) {
    const double dg = problem.terminal_dx ? problem.terminal_dx(xs[j]) : cubic.derivative_at_node(u[m], j);
    z[m][j] = model.diffusion(horizon, xs[j]) * dg;
  }

  const double theta = cfg.theta;
  for (std::size_t k = m; k-- > 0;) {
    const double tk = grid->node(k), t1 = grid->node(k + 1), dt = grid->width(k);
    const double sq = std::sqrt(dt);
    const QuadratureRule& rule = k + 1 == m ? first : gh;
    const bool at_terminal = k + 1 == m;
    auto next_u = [&](double x) { return at_terminal ? problem.terminal(x) : cubic.value(u[k + 1], x); };
    for (std::size_t j = 0; j < nx; ++j) {
      const double x = xs[j];
      const double mean = x + model.drift(tk, x) * dt;
      const double s = model.diffusion(tk, x) * sq;
      double eu = 0.0, ez = 0.0, ef = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double xi = rule.nodes[i], w = rule.weights[i];
        const double xn = mean + s * xi;
        const double un = next_u(xn);
        eu += w * un;
        ez += w * un * xi;
        if (theta < 1.0) ef += w * f(t1, xn, un, cubic.value(z[k + 1], xn));
      }
      const double zz = ez / sq;
      double y = eu + dt * (theta * f(tk, x, eu, zz) + (1.0 - theta) * ef);
      for (unsigned c = 0; c < cfg.picard; ++c)
        y = eu + dt * (theta * f(tk, x, y, zz) + (1.0 - theta) * ef);
      if (!std::isfinite(y) || !std::isfinite(zz))
        fail(ErrorCode::non_finite, "non-finite BSDE value at (k, j) = (" + std::to_string(k) + ", " +
                                        std::to_string(j) + ")");
      u[k][j] = y;
      z[k][j] = zz;
    }
  }
  return BsdeSolution(std::move(grid), std::move(xs), std::move(u), std::move(z), problem.terminal,
                      cfg.picard);
}

void evaluate_path(const BsdeSolution& sol, const MarkovModel& model, const Increments& incr,
                   PathRecord& out) {
  const auto& grid = *sol.grid();
  const std::size_t m = grid.cells();
  require(incr.cells == m, ErrorCode::grid_mismatch, "path increments do not match the solution grid");
  out.x.resize(m + 1);
  out.y.resize(m + 1);
  out.z.resize(m);
  out.exits = 0;
  double x = model.x0;
  for (std::size_t k = 0; k < m; ++k) {
    out.x[k] = x;
    if (!sol.inside(x)) ++out.exits;
    out.y[k] = sol.value(k, x);
    out.z[k] = sol.gradient_z(k, x);
    const double tk = grid.node(k);
    x += model.drift(tk, x) * grid.width(k) + model.diffusion(tk, x) * incr.at(k, 0);
  }
  out.x[m] = x;
  if (!sol.inside(x)) ++out.exits;
  out.y[m] = sol.value(m, x);
}

TwinRecord twin_paths_eval(const BsdeSolution& sol, const MarkovModel& model, const BrownianPair& pair,
                           const RotationProfile& phi) {
  require_same_grid(*pair.grid, *sol.grid(), "twin_paths_eval");
  TwinRecord rec;
  evaluate_path(sol, model, pair.w(), rec.base);
  const auto rotated = rotate(pair, phi);
  evaluate_path(sol, model, Increments{rotated, pair.grid->cells(), pair.dim}, rec.twin);
  return rec;
}

double rotation_defect(double a, double b) {
  return 1.0 - std::sqrt(1.0 - a * a) * std::sqrt(1.0 - b * b) - a * b;
}

namespace {

Estimate sum_estimates(std::initializer_list<Estimate> parts) {
  Estimate out{0.0, 0.0, 0};
  double var = 0.0;
  for (const auto& e : parts) {
    out.value += e.value;
    var += e.std_error * e.std_error;
    out.n = std::max(out.n, e.n);
  }
  out.std_error = std::sqrt(var);
  return out;
}

Estimate ratio_estimate(const Estimate& a, const Estimate& b) {
  if (a.value == 0.0) return {0.0, 0.0, a.n};
  if (b.value == 0.0) return {std::numeric_limits<double>::infinity(), 0.0, a.n};
  const double r = a.value / b.value;
  return {r, std::abs(r) * std::hypot(a.std_error / a.value, b.std_error / b.value), a.n};
}

}  // namespace

StabilityReport stability_check(const BsdeProblem& problem, const BsdeSolution& sol,
                                const RotationProfile& phi, double t, double p, const McConfig& cfg) {
  require(p >= 2.0, ErrorCode::domain, "stability check needs p >= 2");
  const GridPtr grid = sol.grid();
  require_same_grid(*phi.grid(), *grid, "stability_check");
  const std::size_t m = grid->cells(), kt = grid->require_node(t);
  const auto& gen = problem.generator;
  enum { kSup, kDefect, kZdiff, kTerminal, kGen, kSupY, kExits, kCols };

  const BatchMeans bm = run_batches(cfg, kCols, [&]() {
    return [&, pair = BrownianPair{}, rotated = std::vector<double>(), base = PathRecord{},
            twin = PathRecord{}](std::uint64_t i, std::span<double> acc) mutable {
      sample_pair(grid, 1, sample_stream(cfg, StreamTag::bsde_paths, i), pair);
      rotate(pair, phi, rotated);
      evaluate_path(sol, problem.model, pair.w(), base);
      evaluate_path(sol, problem.model, Increments{rotated, m, 1}, twin);
      double sup = 0.0, defect = 0.0, zdiff = 0.0, gdiff = 0.0, sup_y = 0.0;
      for (std::size_t k = 0; k <= m; ++k) sup_y = std::max(sup_y, std::abs(base.y[k]));
      for (std::size_t k = kt; k <= m; ++k) sup = std::max(sup, std::abs(twin.y[k] - base.y[k]));
      for (std::size_t k = kt; k < m; ++k) {
        const double w = grid->width(k);
        defect += rotation_defect(phi.value(k), 0.0) * base.z[k] * base.z[k] * w;
        zdiff += (twin.z[k] - base.z[k]) * (twin.z[k] - base.z[k]) * w;
        if (gen.depends_on_x) gdiff += std::abs(twin.x[k] - base.x[k]) * w;
      }
      acc[kSup] += std::pow(sup, p);
      acc[kDefect] += std::pow(defect, 0.5 * p);
      acc[kZdiff] += std::pow(zdiff, 0.5 * p);
      acc[kTerminal] += std::pow(std::abs(twin.y[m] - base.y[m]), p);
      acc[kGen] += std::pow(gen.lx * gdiff, p);
      acc[kSupY] += std::pow(sup_y, p);
      acc[kExits] += double(base.exits + twin.exits);
    };
  });

  StabilityReport rep;
  rep.t = t;
  rep.p = p;
  rep.sup_diff = bm.root(kSup, p);
  rep.defect_z = bm.root(kDefect, p);
  rep.z_diff = bm.root(kZdiff, p);
  rep.terminal = bm.root(kTerminal, p);
  rep.generator = bm.root(kGen, p);
  rep.sup_y = bm.root(kSupY, p);
  rep.exits = static_cast<std::size_t>(std::llround(bm.mean(kExits).value * double(bm.n_used())));
  rep.lhs = sum_estimates({rep.sup_diff, rep.defect_z, rep.z_diff});
  rep.rhs = sum_estimates({rep.terminal, rep.generator});
  rep.ratio = ratio_estimate(rep.lhs, rep.rhs);
  const bool rhs_zero = rep.rhs.value <= 3.0 * rep.rhs.std_error;
  const bool lhs_nonzero = rep.lhs.value > 3.0 * rep.lhs.std_error && rep.lhs.value > 0.0;
  rep.anomaly = rhs_zero && lhs_nonzero;
  return rep;
}

VariationReport variation_check(const BsdeProblem& problem, const BsdeSolution& sol, double p,
                                const std::vector<std::pair<double, double>>& pairs,
                                const McConfig& cfg) {
  require(p >= 2.0, ErrorCode::domain, "variation check needs p >= 2");
  require(!pairs.empty(), ErrorCode::invalid_argument, "variation check needs (s, t) pairs");
  const GridPtr grid = sol.grid();
  const std::size_t m = grid->cells(), np = pairs.size();
  const auto& gen = problem.generator;
  std::vector<std::size_t> ks(np), kt(np);
  std::vector<RotationProfile> profiles;
  for (std::size_t i = 0; i < np; ++i) {
    require(pairs[i].first < pairs[i].second, ErrorCode::invalid_argument, "variation pairs need s < t");
    ks[i] = grid->require_node(pairs[i].first);
    kt[i] = grid->require_node(pairs[i].second);
    profiles.push_back(RotationProfile::indicator(grid, pairs[i].first, pairs[i].second));
  }
  // Columns per pair: lhs, drift, terminal, generator; then exits.
  const BatchMeans bm = run_batches(cfg, 4 * np + 1, [&]() {
    return [&, pair = BrownianPair{}, rotated = std::vector<double>(), base = PathRecord{},
            twin = PathRecord{}](std::uint64_t i, std::span<double> acc) mutable {
      sample_pair(grid, 1, sample_stream(cfg, StreamTag::bsde_paths, i), pair);
      evaluate_path(sol, problem.model, pair.w(), base);
      double exits = double(base.exits);
      for (std::size_t j = 0; j < np; ++j) {
        rotate(pair, profiles[j], rotated);
        evaluate_path(sol, problem.model, Increments{rotated, m, 1}, twin);
        exits += double(twin.exits);
        double drift = 0.0, gdiff = 0.0;
        for (std::size_t k = ks[j]; k < kt[j]; ++k)
          drift += (1.0 + std::abs(gen.f(grid->node(k), base.x[k], 0.0, 0.0))) * grid->width(k);
        if (gen.depends_on_x)
          for (std::size_t k = ks[j]; k < m; ++k) {
            const double tk = grid->node(k);
            gdiff += std::abs(gen.f(tk, base.x[k], base.y[k], base.z[k]) -
                              gen.f(tk, twin.x[k], base.y[k], base.z[k])) *
                     grid->width(k);
          }
        acc[4 * j] += std::pow(std::abs(base.y[kt[j]] - base.y[ks[j]]), p);
        acc[4 * j + 1] += std::pow(drift, p);
        acc[4 * j + 2] += std::pow(std::abs(base.y[m] - twin.y[m]), p);
        acc[4 * j + 3] += std::pow(gdiff, p);
      }
      acc[4 * np] += exits;
    };
  });

  VariationReport rep;
  rep.p = p;
  std::vector<double> widths, norms;
  for (std::size_t j = 0; j < np; ++j) {
    VariationRow row;
    row.s = pairs[j].first;
    row.t = pairs[j].second;
    row.lhs = bm.root(4 * j, p);
    row.drift = bm.root(4 * j + 1, p);
    row.terminal = bm.root(4 * j + 2, p);
    row.generator = bm.root(4 * j + 3, p);
    row.rhs = row.drift.value + row.terminal.value + row.generator.value;
    row.ratio = row.rhs > 0.0 ? row.lhs.value / row.rhs : 0.0;
    rep.rows.push_back(row);
    if (row.lhs.value > 0.0) {
      widths.push_back(row.t - row.s);
      norms.push_back(row.lhs.value);
    }
  }
  rep.slope = widths.size() >= 2 ? loglog_slope(widths, norms) : 0.0;
  rep.exits = static_cast<std::size_t>(std::llround(bm.mean(4 * np).value * double(bm.n_used())));
  return rep;
}

StepProcess gradient_diagnostics(const BsdeSolution& sol, double theta) {
  require(theta >= 0.0, ErrorCode::domain, "theta must be nonnegative");
  const std::size_t m = sol.grid()->cells();
  std::vector<double> env(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (theta == 0.0) {
      env[k] = 1.0;
      continue;
    }
    double sup = 0.0;
    for (double v : sol.z(k)) sup = std::max(sup, std::abs(v));
    env[k] = std::pow(sup, theta);
  }
  return StepProcess::deterministic(sol.grid(), std::move(env));
}

namespace {

class BsdeValue final : public WienerFunctional {
 public:
  BsdeValue(BsdeProblem problem, std::shared_ptr<const BsdeSolution> sol, std::size_t k)
      : WienerFunctional(sol->grid(), 1), problem_(std::move(problem)), sol_(std::move(sol)), k_(k) {}

  std::string name() const override {
    return problem_.name + (k_ == grid()->cells() ? ":xi" : ":Y(" + std::to_string(grid()->node(k_)) + ")");
  }

  double evaluate(const Increments& incr) const override {
    check(incr);
    const auto& g = *grid();
    double x = problem_.model.x0;
    for (std::size_t k = 0; k < k_; ++k) {
      const double tk = g.node(k);
      x += problem_.model.drift(tk, x) * g.width(k) + problem_.model.diffusion(tk, x) * incr.at(k, 0);
    }
    return sol_->value(k_, x);
  }

 private:
  BsdeProblem problem_;
  std::shared_ptr<const BsdeSolution> sol_;
  std::size_t k_;
};

MarkovModel brownian(double x0 = 0.0) {
  return {[](double, double) { return 0.0; }, [](double, double) { return 1.0; }, x0, 1.0, "brownian"};
}

GeneratorSpec zero_generator() {
  return {[](double, double, double, double) { return 0.0; }, 0.0, 0.0, 0.0, false, 0.0, "zero"};
}

}  // namespace

FunctionalPtr bsde_value_functional(const BsdeProblem& problem, std::shared_ptr<const BsdeSolution> sol,
                                    double t) {
  require(sol != nullptr, ErrorCode::invalid_argument, "value functional needs a solution");
  const std::size_t k = sol->grid()->require_node(t);
  return std::make_shared<BsdeValue>(problem, std::move(sol), k);
}

std::vector<std::string> bsde_preset_names() {
  return {"bv-terminal",     "heat",        "linear-oracle",     "linear-terminal",
          "ou-lipschitz",    "quadratic-cole-hopf", "table-a-lipschitz"};
}

BsdePreset bsde_preset(const std::string& name) {
  BsdePreset p;
  p.problem.name = name;
  auto square = [](double x) { return x * x; };
  auto square_dx = [](double x) { return 2.0 * x; };
  auto identity = [](double x) { return x; };
  auto one = [](double) { return 1.0; };
  if (name == "heat") {
    p.problem.model = brownian();
    p.problem.generator = zero_generator();
    p.problem.terminal = square;
    p.problem.terminal_dx = square_dx;
    p.y0_oracle = 1.0;
    p.tolerance = 1e-3;
    p.description = "f = 0, g(x) = x^2, X = W; u(0,0) = 1";
  } else if (name == "linear-oracle") {
    p.problem.model = brownian();
    p.problem.generator = {[](double, double, double y, double) { return y; }, 1.0, 0.0, 0.0, false, 0.0,
                           "f = y"};
    p.problem.terminal = square;
    p.problem.terminal_dx = square_dx;
    p.y0_oracle = std::numbers::e;
    p.tolerance = 1e-3;
    p.description = "f = y, g(x) = x^2, X = W; Y_0 = e";
  } else if (name == "quadratic-cole-hopf") {
    p.problem.model = brownian();
    p.problem.generator = {[](double, double, double, double z) { return 0.5 * z * z; }, 0.0, 0.5, 1.0,
                           false, 0.0, "f = z^2 / 2"};
    p.problem.terminal = identity;
    p.problem.terminal_dx = one;
    p.y0_oracle = 0.5;
    p.tolerance = 1e-2;
    p.description = "f = |z|^2 / 2, g(x) = x, X = W; Y_0 = log E exp(W_1) = 1/2";
  } else if (name == "linear-terminal") {
    p.problem.model = brownian();
    p.problem.generator = zero_generator();
    p.problem.terminal = identity;
    p.problem.terminal_dx = one;
    p.y0_oracle = 0.0;
    p.tolerance = 1e-12;
    p.description = "f = 0, g(x) = x, X = W; Y = W";
  } else if (name == "table-a-lipschitz") {
    p.problem.model = brownian();
    p.problem.generator = {[](double, double, double y, double z) { return -0.5 * y + 0.5 * std::sin(z) + 0.1; },
                           0.5, 0.5, 0.0, false, 0.0, "f = -y/2 + sin(z)/2 + 1/10"};
    p.problem.terminal = identity;
    p.problem.terminal_dx = one;
    p.description = "Lipschitz generator, theta = 0, xi = W_1 in L_p";
  } else if (name == "ou-lipschitz") {
    p.problem.model = {[](double, double x) { return -x; }, [](double, double) { return 1.0; }, 0.5, 1.0,
                       "ornstein-uhlenbeck"};
    p.problem.generator = {[](double, double, double y, double) { return -0.5 * y; }, 0.5, 0.0, 0.0, false,
                           0.0, "f = -y/2"};
    p.problem.terminal = [](double x) { return std::abs(x); };
    p.problem.terminal_dx = [](double x) { return x >= 0.0 ? 1.0 : -1.0; };
    p.description = "dX = -X dt + dW, X_0 = 1/2, f = -y/2, g(x) = |x|";
  } else if (name == "bv-terminal") {
    p.problem.model = brownian();
    p.problem.generator = zero_generator();
    p.problem.terminal = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
    p.problem.terminal_dx = [](double) { return 0.0; };
    p.solver.space_nodes = 1601;
    p.solver.terminal_intervals = 4000;
    p.y0_oracle = 0.5;
    p.tolerance = 1e-3;
    p.description = "f = 0, g = indicator of [0, inf), X = W; Y_0 = 1/2";
  } else {
    fail(ErrorCode::invalid_argument, "unknown BSDE preset '" + name + "'");
  }
  return p;
}

}  // namespace wlab
