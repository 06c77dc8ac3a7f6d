#include "wienerlab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace wlab {

double d_distance(double eta1, double eta2) {
  require(eta1 >= 0.0 && eta1 <= 1.0 && eta2 >= 0.0 && eta2 <= 1.0, ErrorCode::domain,
          "D[eta1, eta2] needs arguments in [0,1]");
  const double d = 1.0 - std::sqrt(1.0 - eta1 * eta1) * std::sqrt(1.0 - eta2 * eta2) - eta1 * eta2;
  return std::clamp(d, 0.0, 1.0);
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

class SupIntervalPhi final : public PhiFunctional {
 public:
  SupIntervalPhi(GridPtr grid, double r, std::vector<Interval> intervals)
      : r_(r), intervals_(std::move(intervals)) {
    require(r >= 2.0, ErrorCode::domain, "Phi_r needs r >= 2");
    require(!intervals_.empty(), ErrorCode::invalid_argument, "empty interval family");
    for (const auto& iv : intervals_) {
      family_.push_back(RotationProfile::indicator(grid, iv.s, iv.t));
      scale_.push_back(std::pow(iv.width(), -1.0 / r));
    }
  }

  std::string name() const override { return r_ == 2.0 ? "phi2" : "phi-r"; }
  const std::vector<RotationProfile>& family() const override { return family_; }
  std::string label(std::size_t j) const override {
    return "(" + fmt(intervals_[j].s) + " " + fmt(intervals_[j].t) + "]";
  }
  double reduce(std::span<const double> F) const override {
    double best = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j) best = std::max(best, F[j] * scale_[j]);
    return best;
  }
  std::size_t argmax(std::span<const double> F) const override {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < F.size(); ++j)
      if (F[j] * scale_[j] > F[arg] * scale_[arg]) arg = j;
    return arg;
  }
  const Interval& interval(std::size_t j) const { return intervals_[j]; }

 private:
  double r_;
  std::vector<Interval> intervals_;
  std::vector<RotationProfile> family_;
  std::vector<double> scale_;
};

class WeightedSupPhi final : public PhiFunctional {
 public:
  WeightedSupPhi(std::vector<RotationProfile> profiles, std::vector<double> alpha,
                 std::vector<std::string> labels)
      : family_(std::move(profiles)), alpha_(std::move(alpha)), labels_(std::move(labels)) {
    require(!family_.empty(), ErrorCode::invalid_argument, "weighted sup needs profiles");
    require(alpha_.size() == family_.size(), ErrorCode::invalid_argument,
            "weighted sup needs one weight per profile");
    for (double a : alpha_) require(a > 0.0, ErrorCode::domain, "weights must be > 0");
    for (const auto& p : family_) require_same_grid(*family_[0].grid(), *p.grid(), "weighted sup");
  }

  std::string name() const override { return "weighted-sup"; }
  const std::vector<RotationProfile>& family() const override { return family_; }
  std::string label(std::size_t j) const override {
    return j < labels_.size() ? labels_[j] : "profile-" + std::to_string(j);
  }
  double reduce(std::span<const double> F) const override {
    double best = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j) best = std::max(best, F[j] / alpha_[j]);
    return best;
  }
  std::size_t argmax(std::span<const double> F) const override {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < F.size(); ++j)
      if (F[j] / alpha_[j] > F[arg] / alpha_[arg]) arg = j;
    return arg;
  }

 private:
  std::vector<RotationProfile> family_;
  std::vector<double> alpha_;
  std::vector<std::string> labels_;
};

}  // namespace

std::vector<Interval> dyadic_intervals(const TimeGrid& grid, unsigned depth) {
  require(depth <= 30, ErrorCode::invalid_argument, "dyadic depth too large");
  const double T = grid.horizon();
  std::vector<Interval> out;
  for (unsigned l = 0; l <= depth; ++l) {
    const std::size_t n = std::size_t{1} << l;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = T * static_cast<double>(j) / static_cast<double>(n);
      const double t = T * static_cast<double>(j + 1) / static_cast<double>(n);
      require(grid.find_node(s) && grid.find_node(t), ErrorCode::grid_mismatch,
              "grid too coarse for dyadic depth " + std::to_string(depth));
      out.push_back({grid.node(*grid.find_node(s)), grid.node(*grid.find_node(t))});
    }
  }
  return out;
}

PhiPtr sup_interval_phi(GridPtr grid, double r, std::vector<Interval> family) {
  return std::make_shared<SupIntervalPhi>(std::move(grid), r, std::move(family));
}

PhiPtr phi2(GridPtr grid, unsigned depth) {
  auto family = dyadic_intervals(*grid, depth);
  return sup_interval_phi(std::move(grid), 2.0, std::move(family));
}

PhiPtr weighted_sup_phi(std::vector<RotationProfile> profiles, std::vector<double> alpha,
                        std::vector<std::string> labels) {
  return std::make_shared<WeightedSupPhi>(std::move(profiles), std::move(alpha),
                                          std::move(labels));
}

// --- anisotropic ---------------------------------------------------------------

AnisotropicPhi::AnisotropicPhi(GridPtr grid, std::vector<AnisotropicTerm> terms)
    : terms_(std::move(terms)) {
  require(!terms_.empty(), ErrorCode::invalid_argument, "anisotropic functional needs terms");
  require(std::abs(terms_.back().r_end - grid->horizon()) <= 1e-12 * grid->horizon(),
          ErrorCode::invalid_argument, "last anisotropic breakpoint must be T");
  double prev = 0.0;
  std::size_t prev_node = 0;
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    const auto& term = terms_[l];
    require(term.theta > 0.0 && term.theta < 1.0, ErrorCode::domain, "theta must be in (0,1)");
    require(term.q >= 1.0, ErrorCode::domain, "q must be >= 1");
    require(term.r_end > prev, ErrorCode::invalid_argument, "breakpoints must increase");
    const std::size_t end = grid->require_node(term.r_end);
    const double r = grid->node(end);
    first_.push_back(nodes_.size());
    for (std::size_t k = prev_node; k < end; ++k) {
      const double t = grid->node(k);
      nodes_.push_back({l, t, -std::log(r - t), std::pow(r - t, -0.5 * term.theta)});
      family_.push_back(RotationProfile::indicator(grid, t, r));
    }
    prev = r;
    prev_node = end;
  }
  first_.push_back(nodes_.size());
}

std::string AnisotropicPhi::label(std::size_t j) const {
  return "(" + fmt(nodes_[j].t) + " " + fmt(terms_[nodes_[j].term].r_end) + "]";
}

double AnisotropicPhi::block_power(std::size_t l, std::span<const double> F,
                                   bool with_tail) const {
  const double q = terms_[l].q;
  const std::size_t a = first_[l], b = first_[l + 1];
  double sum = 0.0;
  auto g = [&](std::size_t j) { return std::pow(nodes_[j].weight * F[j], q); };
  for (std::size_t j = a; j + 1 < b; ++j) sum += 0.5 * (nodes_[j + 1].u - nodes_[j].u) * (g(j) + g(j + 1));
  if (with_tail) sum += g(b - 1) / (0.5 * q * (1.0 - terms_[l].theta));
  return sum;
}

double AnisotropicPhi::reduce(std::span<const double> F) const {
  require(F.size() == nodes_.size(), ErrorCode::invalid_argument, "curve size mismatch");
  double best = 0.0;
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    double v;
    if (std::isinf(terms_[l].q)) {
      v = 0.0;
      for (std::size_t j = first_[l]; j < first_[l + 1]; ++j)
        v = std::max(v, nodes_[j].weight * F[j]);
    } else {
      v = std::pow(block_power(l, F, true), 1.0 / terms_[l].q);
    }
    best = std::max(best, v);
  }
  return best;
}

std::vector<AnisotropicTail> AnisotropicPhi::tails(std::span<const double> F) const {
  std::vector<AnisotropicTail> out;
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    AnisotropicTail tail;
    const double q = terms_[l].q;
    const std::size_t b = first_[l + 1];
    if (!std::isinf(q)) {
      auto g = [&](std::size_t j) { return std::pow(nodes_[j].weight * F[j], q); };
      tail.nominal = g(b - 1) / (0.5 * q * (1.0 - terms_[l].theta));
      if (b - first_[l] >= 2 && g(b - 1) > 0.0 && g(b - 2) > 0.0) {
        tail.fitted_exponent =
            -(std::log(g(b - 1)) - std::log(g(b - 2))) / (nodes_[b - 1].u - nodes_[b - 2].u);
        tail.fitted = tail.fitted_exponent > 0.0 ? g(b - 1) / tail.fitted_exponent
                                                 : std::numeric_limits<double>::infinity();
      }
    }
    out.push_back(tail);
  }
  return out;
}

PhiPtr anisotropic_phi(GridPtr grid, std::vector<AnisotropicTerm> terms) {
  return std::make_shared<AnisotropicPhi>(std::move(grid), std::move(terms));
}

// --- isotropic -------------------------------------------------------------------

Kernel unit_kernel() {
  return {"unit", [](double, double) { return 1.0; }, [](double r) { return r; },
          [](double e) { return e; }};
}

Kernel mehler_kernel(double theta, double q) {
  require(theta > 0.0 && theta < 1.0, ErrorCode::domain, "Mehler kernel needs theta in (0,1)");
  require(q >= 1.0, ErrorCode::domain, "Mehler kernel needs q >= 1");
  const double a = 0.5 * theta * q;
  // log(1 / (1 - r^2)) without cancellation at either end
  auto log_inv = [](double r, double omr) {
    return r < 0.5 ? -std::log1p(-r * r) : -std::log(omr * (1.0 + r));
  };
  Kernel k;
  k.name = "mehler-kernel";
  k.density = [a, log_inv](double r, double omr) {
    return 2.0 * r / (omr * (1.0 + r)) * std::pow(log_inv(r, omr), -1.0 - a);
  };
  // int_{r_max}^1 K dr = int_{t_max}^inf t^(-1-a) dt with t = log(1/(1-r^2)).
  k.upper_tail = [a, log_inv](double omr) {
    return std::pow(log_inv(1.0 - omr, omr), -a) / a;
  };
  return k;
}

IsotropicPhi::IsotropicPhi(GridPtr grid, Kernel kernel, double q, double step)
    : kernel_(std::move(kernel)), q_(q) {
  require(q >= 1.0, ErrorCode::domain, "isotropic functional needs q >= 1");
  require(step > 0.0 && step <= 1.0, ErrorCode::invalid_argument, "quadrature step in (0,1]");
  require(static_cast<bool>(kernel_.density), ErrorCode::invalid_argument, "kernel needs a density");
  // r = 1 / (1 + exp(-pi sinh x)); nodes stop at min(r, 1-r) = e^-230 so that
  // kernel weights with r^-2 type singularities stay finite.
  const double x_max = std::asinh(230.0 / std::numbers::pi);
  const int n = static_cast<int>(std::floor(x_max / step));
  std::map<double, std::size_t> index;
  for (int k = -n; k <= n; ++k) {
    const double x = k * step;
    const double z = std::numbers::pi * std::sinh(x);
    const double r = 1.0 / (1.0 + std::exp(-z));
    const double omr = 1.0 / (1.0 + std::exp(z));
    const double jac = r * omr * std::numbers::pi * std::cosh(x);
    const double w = step * jac * kernel_.density(r, omr);
    require(std::isfinite(w) && w >= 0.0, ErrorCode::domain,
            "kernel " + kernel_.name + " is not finite and nonnegative on (0,1)");
    r_.push_back(r);
    weight_.push_back(w);
    if (k == -n && kernel_.lower_tail) lower_mass_ = kernel_.lower_tail(r);
    if (k == n && kernel_.upper_tail) upper_mass_ = kernel_.upper_tail(omr);
  }
  for (double r : r_) {
    if (index.count(r)) continue;
    index[r] = family_.size();
    family_.push_back(RotationProfile::constant(grid, std::min(r, 1.0)));
  }
  node_profile_.reserve(r_.size());
  for (double r : r_) node_profile_.push_back(index[r]);
}

std::string IsotropicPhi::label(std::size_t j) const {
  return "r=" + fmt(family_[j].value(0));
}

double IsotropicPhi::reduce(std::span<const double> F) const {
  require(F.size() == family_.size(), ErrorCode::invalid_argument, "curve size mismatch");
  const std::size_t n = r_.size();
  std::vector<double> term(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    term[i] = weight_[i] * std::pow(F[node_profile_[i]], q_);
    total += term[i];
  }
  const double low = lower_mass_ * std::pow(F[node_profile_.front()], q_);
  const double high = upper_mass_ * std::pow(F[node_profile_.back()], q_);
  total += low + high;
  if (total == 0.0) return 0.0;
  // Endpoint contributions that have not decayed mean the quadrature is
  // summing a divergent integral.
  const std::size_t edge = 4;
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    left += term[i];
    right += term[n - 1 - i];
  }
  require(std::isfinite(total) && (kernel_.lower_tail || left <= 1e-3 * total) &&
              (kernel_.upper_tail || right <= 1e-3 * total),
          ErrorCode::domain,
          "kernel " + kernel_.name + " is not integrable against |F|^q (partial sums diverge)");
  return std::pow(total, 1.0 / q_);
}

PhiPtr isotropic_phi(GridPtr grid, Kernel kernel, double q, double step) {
  return std::make_shared<IsotropicPhi>(std::move(grid), std::move(kernel), q, step);
}

// --- estimation --------------------------------------------------------------------

std::vector<double> Tabulation::curve() const {
  std::vector<double> out(moments.stats());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = std::pow(std::max(moments.mean(j).value, 0.0), 1.0 / p);
  return out;
}

std::vector<double> Tabulation::curve_without(std::size_t batch) const {
  const std::size_t nb = moments.batches();
  std::vector<double> out(moments.stats());
  for (std::size_t j = 0; j < out.size(); ++j) {
    double s = 0.0;
    for (std::size_t b = 0; b < nb; ++b)
      if (b != batch) s += moments.at(b, j);
    out[j] = std::pow(std::max(s / static_cast<double>(nb - 1), 0.0), 1.0 / p);
  }
  return out;
}

std::vector<Estimate> Tabulation::estimates() const {
  std::vector<Estimate> out;
  for (std::size_t j = 0; j < moments.stats(); ++j) out.push_back(moments.root(j, p));
  return out;
}

Tabulation tabulate(const WienerFunctional& xi, const PhiFunctional& phi, double p,
                    const McConfig& cfg) {
  const double ps[] = {p};
  return {p, diff_moments(xi, phi.family(), ps, cfg)};
}

SeminormResult reduce_tabulation(const PhiFunctional& phi, const Tabulation& tab) {
  SeminormResult out;
  const auto full = tab.curve();
  const double value = phi.reduce(full);
  const std::size_t nb = tab.moments.batches();
  std::vector<double> jack(nb);
  double mean = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    jack[b] = phi.reduce(tab.curve_without(b));
    mean += jack[b];
  }
  mean /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : jack) ss += (v - mean) * (v - mean);
  out.value = {value, std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb)),
               tab.moments.n_used()};
  out.argmax = phi.argmax(full);
  out.curve = tab.estimates();
  return out;
}

SeminormResult seminorm(const WienerFunctional& xi, const PhiFunctional& phi, double p,
                        const McConfig& cfg) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  return reduce_tabulation(phi, tabulate(xi, phi, p, cfg));
}

SupSeminorm sup_interval_seminorm(const WienerFunctional& xi, double p, double r,
                                  std::vector<Interval> family, const McConfig& cfg) {
  const SupIntervalPhi phi(xi.grid(), r, std::move(family));
  SupSeminorm out{seminorm(xi, phi, p, cfg), {}};
  out.argmax = phi.interval(out.result.argmax);
  return out;
}

SeminormResult anisotropic_seminorm(const WienerFunctional& xi, double p,
                                    std::vector<AnisotropicTerm> terms, const McConfig& cfg) {
  return seminorm(xi, AnisotropicPhi(xi.grid(), std::move(terms)), p, cfg);
}

SeminormResult isotropic_seminorm(const WienerFunctional& xi, double p, Kernel kernel, double q,
                                  const McConfig& cfg, double step) {
  return seminorm(xi, IsotropicPhi(xi.grid(), std::move(kernel), q, step), p, cfg);
}

Estimate besov_norm(const WienerFunctional& xi, double p, const PhiFunctional& phi,
                    const McConfig& cfg) {
  const Estimate norm = lp_norm(xi, p, cfg);
  const Estimate semi = seminorm(xi, phi, p, cfg).value;
  const double total = std::pow(norm.value, p) + std::pow(semi.value, p);
  if (total == 0.0) return {0.0, 0.0, norm.n};
  const double v = std::pow(total, 1.0 / p);
  const double scale = std::pow(v, 1.0 - p);
  const double se = scale * std::hypot(std::pow(norm.value, p - 1.0) * norm.std_error,
                                       std::pow(semi.value, p - 1.0) * semi.std_error);
  return {v, se, norm.n};
}

// --- admissibility -------------------------------------------------------------------

AdmissibilityReport admissibility_check(const PhiFunctional& phi, std::size_t trials,
                                        std::uint64_t seed, double tolerance) {
  AdmissibilityReport rep;
  rep.trials = trials;
  const std::size_t n = phi.family().size();
  NormalStream normals({derive_seed(seed, 0xad), 0});
  auto random_curve = [&]() {
    std::vector<double> f(n);
    for (auto& v : f) v = std::abs(normals.next());
    return f;
  };
  auto flag = [&](bool& field, const std::string& what, std::size_t trial) {
    if (field) rep.violations.push_back(what + " (trial " + std::to_string(trial) + ")");
    field = false;
  };
  auto close = [&](double a, double b) {
    return std::abs(a - b) <= tolerance * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto F = random_curve(), G = random_curve();
    std::vector<double> sum(n);
    for (std::size_t j = 0; j < n; ++j) sum[j] = F[j] + G[j];
    const double pf = phi.reduce(F), pg = phi.reduce(G), ps = phi.reduce(sum);

    if (ps > (pf + pg) * (1.0 + tolerance)) flag(rep.subadditive, "subadditivity", trial);

    for (double lambda : {0.0, 0.5, 2.0}) {
      std::vector<double> scaled(n);
      for (std::size_t j = 0; j < n; ++j) scaled[j] = lambda * F[j];
      if (!close(phi.reduce(scaled), lambda * pf))
        flag(rep.homogeneous, "homogeneity at lambda=" + fmt(lambda), trial);
    }

    if (pf > ps * (1.0 + tolerance)) flag(rep.monotone, "monotonicity", trial);

    // F_n -> F uniformly from above and below; Phi(F) <= lim inf Phi(F_n) is
    // checked along the tail of the sequence.
    double liminf = std::numeric_limits<double>::infinity();
    for (int k = 10; k <= 13; ++k) {
      const double eps = std::pow(10.0, -k);
      std::vector<double> fn(n);
      for (std::size_t j = 0; j < n; ++j)
        fn[j] = std::max(0.0, F[j] + eps * ((j % 2) ? G[j] : -G[j]));
      liminf = std::min(liminf, phi.reduce(fn));
    }
    if (pf > liminf + 1e-8 * std::max(1.0, pf)) flag(rep.fatou, "Fatou property", trial);
  }
  return rep;
}

// --- process seminorm ------------------------------------------------------------------

SeminormResult process_seminorm(const StepProcessFunctional& A, double q, double r, double t,
                                const PhiFunctional& phi, const McConfig& cfg) {
  require(q >= 1.0 && r >= 1.0, ErrorCode::domain, "process seminorm needs q, r >= 1");
  const GridPtr grid = A.grid();
  for (const auto& prof : phi.family()) require_same_grid(*grid, *prof.grid(), "process seminorm");
  const std::size_t start = grid->require_node(t);
  const std::size_t m = grid->cells();
  const auto& family = phi.family();
  Tabulation tab{q, run_batches(cfg, family.size(), [&]() {
                   return [&, pair = BrownianPair{}, rotated = std::vector<double>{},
                           base = std::vector<double>(m), moved = std::vector<double>(m)](
                              std::uint64_t i, std::span<double> acc) mutable {
                     sample_pair(grid, 1, sample_stream(cfg, StreamTag::coupled, i), pair);
                     A.evaluate(pair.w(), base);
                     for (std::size_t j = 0; j < family.size(); ++j) {
                       if (family[j].is_zero()) continue;
                       rotate(pair, family[j], rotated);
                       A.evaluate(Increments{rotated, m, 1}, moved);
                       double integral = 0.0;
                       for (std::size_t k = start; k < m; ++k) {
                         const double d = std::abs(base[k] - moved[k]);
                         integral += (r == 2.0 ? d * d : std::pow(d, r)) * grid->width(k);
                       }
                       acc[j] += std::pow(integral, q / r);
                     }
                   };
                 })};
  return reduce_tabulation(phi, tab);
}

double bv_embedding_bound(double p, double q, double density_sup, double diff_norm) {
  require(p >= 1.0 && q >= 1.0, ErrorCode::domain, "embedding bound needs p, q >= 1");
  const double e = p / (q * (p + 1.0));
  return std::pow(3.0, (q + 1.0) / q) * std::pow(density_sup, e) * std::pow(diff_norm, e);
}

}  // namespace wlab
