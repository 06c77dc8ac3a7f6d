#include "wienerlab/bmo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wienerlab/estimators.hpp"

namespace wlab {

namespace {

constexpr double kProbTol = 1e-9;

// Exact conditional integrals G(node) = E( int_{t_k}^{t_end} |Z|^{2 eta} ds | node )
// for levels [first, last); returns the maximum over all those nodes.
double max_conditional_integral(const StepProcess& z, double eta, std::size_t first,
                                std::size_t last) {
  const auto& grid = *z.grid();
  double best = 0.0;
  std::vector<double> below;  // contributions of level k+1 aggregated per level-k node
  for (std::size_t k = last; k-- > first;) {
    const auto& nodes = z.level(k);
    std::vector<double> g(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double v = std::abs(nodes[i].value);
      g[i] = (v == 0.0 ? 0.0 : std::pow(v, 2.0 * eta)) * grid.width(k);
      if (k + 1 < last) g[i] += below[i];
      best = std::max(best, g[i]);
    }
    if (k == first || k == 0) break;
    below.assign(z.level(k - 1).size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) below[nodes[i].parent] += nodes[i].prob * g[i];
  }
  return best;
}

}  // namespace

StepProcess::StepProcess(GridPtr grid, std::vector<std::vector<Node>> levels)
    : grid_(std::move(grid)), levels_(std::move(levels)) {
  require(grid_ != nullptr, ErrorCode::invalid_argument, "step process needs a grid");
  require(levels_.size() == grid_->cells(), ErrorCode::invalid_argument,
          "step process needs one level per grid cell");
  require(levels_.front().size() == 1, ErrorCode::invalid_argument,
          "level 0 of a scenario tree must be a single node");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const std::size_t parents = k == 0 ? 1 : levels_[k - 1].size();
    std::vector<double> mass(parents, 0.0);
    for (const auto& n : levels_[k]) {
      require(std::isfinite(n.value), ErrorCode::non_finite, "step process values must be finite");
      require(n.prob >= 0.0, ErrorCode::invalid_argument, "node probabilities must be nonnegative");
      const std::size_t parent = k == 0 ? 0 : n.parent;
      require(parent < parents, ErrorCode::invalid_argument, "node parent out of range");
      mass[parent] += n.prob;
    }
    for (double m : mass)
      require(std::abs(m - 1.0) < kProbTol, ErrorCode::invalid_argument,
              "child probabilities must sum to 1 on level " + std::to_string(k));
  }
}

StepProcess StepProcess::deterministic(GridPtr grid, std::vector<double> values) {
  std::vector<std::vector<Node>> levels;
  for (double v : values) levels.push_back({Node{0, 1.0, v}});
  require(grid != nullptr && values.size() == grid->cells(), ErrorCode::invalid_argument,
          "deterministic process needs one value per cell");
  return StepProcess(std::move(grid), std::move(levels));
}

StepProcess StepProcess::tree(GridPtr grid, std::vector<std::vector<Node>> levels) {
  require(!levels.empty(), ErrorCode::invalid_argument, "scenario tree has no levels");
  return StepProcess(std::move(grid), std::move(levels));
}

bool StepProcess::is_deterministic() const noexcept {
  return std::all_of(levels_.begin(), levels_.end(), [](const auto& l) { return l.size() == 1; });
}

std::vector<double> StepProcess::node_probabilities(std::size_t k) const {
  std::vector<double> prob{1.0};
  for (std::size_t j = 0; j <= k; ++j) {
    std::vector<double> next(levels_[j].size());
    for (std::size_t i = 0; i < levels_[j].size(); ++i)
      next[i] = (j == 0 ? 1.0 : prob[levels_[j][i].parent]) * levels_[j][i].prob;
    prob = std::move(next);
  }
  return prob;
}

StepProcess StepProcess::truncated(std::size_t keep) const {
  auto levels = levels_;
  for (std::size_t k = keep; k < levels.size(); ++k)
    for (auto& n : levels[k]) n.value = 0.0;
  return StepProcess(grid_, std::move(levels));
}

StepProcess StepProcess::abs_power(double theta) const {
  auto levels = levels_;
  for (auto& level : levels)
    for (auto& n : level) n.value = theta == 0.0 ? 1.0 : std::pow(std::abs(n.value), theta);
  return StepProcess(grid_, std::move(levels));
}

StepProcess operator+(const StepProcess& a, const StepProcess& b) {
  require(a.is_deterministic() && b.is_deterministic(), ErrorCode::unsupported,
          "sums are implemented for deterministic processes");
  require_same_grid(*a.grid(), *b.grid(), "step process sum");
  std::vector<double> values(a.cells());
  for (std::size_t k = 0; k < a.cells(); ++k) values[k] = a.level(k)[0].value + b.level(k)[0].value;
  return StepProcess::deterministic(a.grid(), std::move(values));
}

double bmo_s2eta_norm(const StepProcess& z, double eta) {
  return bmo_s2eta_norm(z, eta, 0.0, z.grid()->horizon());
}

double bmo_s2eta_norm(const StepProcess& z, double eta, double s, double t) {
  require(eta > 0.0, ErrorCode::domain, "eta must be positive");
  const auto& grid = *z.grid();
  const std::size_t first = grid.require_node(s), last = grid.require_node(t);
  require(first < last, ErrorCode::invalid_argument, "restriction needs s < t");
  const double g = max_conditional_integral(z, eta, first, last);
  return g == 0.0 ? 0.0 : std::pow(g, 1.0 / (2.0 * eta));
}

double sliceable_upper(const StepProcess& z, double eta, std::size_t n_slices) {
  require(n_slices >= 1, ErrorCode::invalid_argument, "need at least one slice");
  const double horizon = z.grid()->horizon();
  double best = 0.0;
  for (std::size_t j = 0; j < n_slices; ++j) {
    const double s = horizon * static_cast<double>(j) / n_slices;
    const double t = horizon * static_cast<double>(j + 1) / n_slices;
    best = std::max(best, bmo_s2eta_norm(z, eta, s, t));
  }
  return best;
}

double sliceable_interpolation_bound(double horizon, std::size_t n_slices, double theta, double eta,
                                     double bmo_norm) {
  require(n_slices >= 1, ErrorCode::invalid_argument, "need at least one slice");
  require(eta > 0.0 && theta >= 0.0 && theta <= eta, ErrorCode::domain,
          "interpolation bound needs 0 <= theta <= eta");
  const double power = theta == 0.0 ? 1.0 : std::pow(bmo_norm, theta);
  return std::pow(horizon / n_slices, 0.5 * (1.0 - theta / eta)) * power;
}

double kazamaki_phi(double beta) {
  require(beta > 1.0, ErrorCode::domain, "Phi needs beta > 1");
  // sqrt(1 + s) - 1 written without cancellation
  const double s = std::log1p(1.0 / (2.0 * beta - 2.0)) / (beta * beta);
  return s / (std::sqrt(1.0 + s) + 1.0);
}

double kazamaki_psi(double gamma, double beta) {
  const double phi = kazamaki_phi(beta);
  require(gamma >= 0.0 && gamma < phi, ErrorCode::domain,
          "Psi(gamma, beta) needs 0 <= gamma < Phi(beta)");
  const double e = std::exp(beta * beta * (gamma * gamma + 2.0 * gamma));
  const double denom = 1.0 - (2.0 * beta - 2.0) / (2.0 * beta - 1.0) * e;
  require(denom > 0.0, ErrorCode::domain, "Psi(gamma, beta) is not finite at this gamma");
  return std::pow(2.0 / denom, 1.0 / beta);
}

double phi_inverse(double x) {
  double lo = 1.0 + 1e-9, hi = 1e6;
  require(x > kazamaki_phi(hi) && x < kazamaki_phi(lo), ErrorCode::domain,
          "phi_inverse argument outside (Phi(1e6), Phi(1 + 1e-9))");
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kazamaki_phi(mid) > x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> rh_bound(double sl, std::size_t n_slices, double beta) {
  if (!(sl >= 0.0) || n_slices == 0 || sl >= kazamaki_phi(beta)) return std::nullopt;
  return std::pow(kazamaki_psi(sl, beta), static_cast<double>(n_slices));
}

double deterministic_rh_constant(double kappa, double horizon, double beta) {
  require(beta > 1.0, ErrorCode::domain, "RH constant needs beta > 1");
  return std::exp((beta - 1.0) * kappa * kappa * horizon / 2.0);
}

double p0_threshold(double lz, double s_inf) {
  require(lz >= 0.0 && s_inf >= 0.0, ErrorCode::domain, "p0 needs L_Z >= 0 and s_inf >= 0");
  const double x = 2.0 * std::numbers::sqrt2 * lz * s_inf;
  if (x == 0.0) return 1.5;
  const double b = phi_inverse(x);
  return b / (b - 1.0);
}

WeakerBmoReport weaker_bmo_construction(double eta, double alpha, double beta, unsigned n_max) {
  require(eta > 0.0 && eta < 1.0, ErrorCode::domain, "weaker-BMO needs eta in (0,1)");
  require(0.0 <= alpha && alpha < 0.5 && 0.5 < beta && beta < 1.0 / (2.0 * eta), ErrorCode::domain,
          "weaker-BMO needs 0 <= alpha < 1/2 < beta < 1/(2 eta)");
  require(n_max >= 2 && n_max <= 24, ErrorCode::invalid_argument, "weaker-BMO needs 2 <= n_max <= 24");

  WeakerBmoReport rep;
  rep.eta = eta;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.n_max = n_max;

  // Nodes t_n = 1 - 2^{-n}, n = 0..n_max, then T = 1. A_n in A_{t_n} splits
  // level n for n = 1..n_max-1; A_0 would have to be trivial.
  std::vector<double> nodes;
  for (unsigned n = 0; n <= n_max; ++n) nodes.push_back(1.0 - std::ldexp(1.0, -static_cast<int>(n)));
  nodes.push_back(1.0);
  const GridPtr grid = make_grid(TimeGrid(nodes));
  auto prob_a = [&](unsigned n) { return 1.0 / std::expm1(std::pow(2.0, (beta - alpha) * n)); };

  std::vector<std::vector<StepProcess::Node>> levels;
  levels.push_back({{0, 1.0, 0.0}});
  for (unsigned k = 1; k <= n_max; ++k) {
    std::vector<StepProcess::Node> level;
    for (std::size_t parent = 0; parent < levels.back().size(); ++parent) {
      if (k < n_max) {
        const double pa = prob_a(k);
        level.push_back({parent, pa, std::pow(2.0, beta * k)});
        level.push_back({parent, 1.0 - pa, 0.0});
      } else {
        level.push_back({parent, 1.0, 0.0});
      }
    }
    levels.push_back(std::move(level));
  }
  rep.process = StepProcess::tree(grid, std::move(levels));

  double s2eta = 0.0, lexp = 0.0;
  for (unsigned n = 2; n <= n_max; ++n) {
    rep.n.push_back(n);
    rep.s2_lower.push_back(std::pow(2.0, beta * (n - 1.0) - 0.5 * n));
    rep.s2_computed.push_back(bmo_s2eta_norm(rep.process.truncated(n), 1.0));
    s2eta += std::pow(2.0, beta * (n - 1.0) - n / (2.0 * eta));
    lexp += std::pow(2.0, alpha * (n - 1.0) - 0.5 * n);
    rep.s2eta_partial.push_back(s2eta);
    rep.lexp_partial.push_back(lexp);
  }
  // Terms are c r^n; the tail beyond n_max is c r^{n_max+1} / (1 - r).
  auto tail_fraction = [&](double r, double c, double partial) {
    const double tail = c * std::pow(r, n_max + 1.0) / (1.0 - r);
    return tail / (partial + tail);
  };
  rep.s2eta_tail = tail_fraction(std::pow(2.0, beta - 1.0 / (2.0 * eta)), std::pow(2.0, -beta), s2eta);
  rep.lexp_tail = tail_fraction(std::pow(2.0, alpha - 0.5), std::pow(2.0, -alpha), lexp);

  const double growth = std::pow(2.0, beta - 0.5);
  rep.lower_bounds_grow = true;
  for (std::size_t i = 1; i < rep.s2_lower.size(); ++i)
    rep.lower_bounds_grow &= rep.s2_lower[i] >= growth * rep.s2_lower[i - 1] * (1.0 - 1e-12);
  rep.computed_dominates = true;
  for (std::size_t i = 0; i < rep.s2_lower.size(); ++i)
    rep.computed_dominates &= rep.s2_computed[i] >= rep.s2_lower[i] * (1.0 - 1e-12);
  rep.partial_sums_cauchy = rep.s2eta_tail < 0.01 && rep.lexp_tail < 0.01;

  rep.orlicz_exact_match = true;
  for (unsigned n = 1; n <= n_max; ++n) {
    const double pa = prob_a(n);
    const double samples[2] = {std::pow(2.0, beta * n), 0.0};
    const double weights[2] = {pa, 1.0 - pa};
    const double computed = orlicz_exp_norm(samples, weights);
    const double exact = std::pow(2.0, alpha * n);
    rep.orlicz_computed.push_back(computed);
    rep.orlicz_exact.push_back(exact);
    rep.orlicz_exact_match &= std::abs(computed - exact) <= 1e-8 * exact;
  }
  return rep;
}

FeffermanReport fefferman_check(const StepProcess& z, double eta, double p) {
  require(eta > 0.0, ErrorCode::domain, "eta must be positive");
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  const auto& grid = *z.grid();
  // Path integrals accumulated down the tree.
  std::vector<double> i_eta{0.0}, i_two{0.0}, prob{1.0};
  for (std::size_t k = 0; k < z.cells(); ++k) {
    const auto& nodes = z.level(k);
    std::vector<double> a(nodes.size()), b(nodes.size()), w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::size_t parent = k == 0 ? 0 : nodes[i].parent;
      const double v = std::abs(nodes[i].value);
      a[i] = i_eta[parent] + (v == 0.0 ? 0.0 : std::pow(v, 1.0 + eta)) * grid.width(k);
      b[i] = i_two[parent] + v * v * grid.width(k);
      w[i] = prob[parent] * nodes[i].prob;
    }
    i_eta = std::move(a);
    i_two = std::move(b);
    prob = std::move(w);
  }
  FeffermanReport rep;
  rep.p = p;
  rep.eta = eta;
  double lhs = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    lhs += prob[i] * std::pow(i_eta[i], p);
    sq += prob[i] * std::pow(i_two[i], 0.5 * p);
  }
  rep.lhs = std::pow(lhs, 1.0 / p);
  rep.square = std::pow(sq, 1.0 / p);
  rep.bmo = bmo_s2eta_norm(z, eta);
  rep.rhs = std::sqrt(2.0) * p * rep.square * (rep.bmo == 0.0 ? 0.0 : std::pow(rep.bmo, eta));
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-12) || rep.lhs == 0.0;
  return rep;
}

}  // namespace wlab
