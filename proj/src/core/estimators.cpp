#include "wienerlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wlab {

void McConfig::validate() const {
  require(n_batches >= 20, ErrorCode::invalid_argument, "n_batches must be >= 20");
  require(n_samples >= n_batches && n_samples % n_batches == 0, ErrorCode::invalid_argument,
          "n_samples (" + std::to_string(n_samples) + ") must be a positive multiple of n_batches (" +
              std::to_string(n_batches) + ")");
}

RngStream sample_stream(const McConfig& cfg, StreamTag tag, std::uint64_t index) {
  return {derive_seed(cfg.seed, static_cast<std::uint64_t>(tag)), index};
}

std::vector<double> BatchMeans::column(std::size_t stat) const {
  std::vector<double> out(batches_);
  for (std::size_t b = 0; b < batches_; ++b) out[b] = at(b, stat);
  return out;
}

Estimate BatchMeans::mean(std::size_t stat) const {
  double sum = 0.0;
  for (std::size_t b = 0; b < batches_; ++b) sum += at(b, stat);
  const double m = sum / static_cast<double>(batches_);
  double ss = 0.0;
  for (std::size_t b = 0; b < batches_; ++b) {
    const double d = at(b, stat) - m;
    ss += d * d;
  }
  const double var = batches_ > 1 ? ss / static_cast<double>(batches_ - 1) : 0.0;
  return {m, std::sqrt(var / static_cast<double>(batches_)), n_used()};
}

Estimate power_root(const Estimate& moment, double p) {
  const double m = std::max(moment.value, 0.0);
  if (m == 0.0) return {0.0, moment.std_error > 0.0 ? std::pow(moment.std_error, 1.0 / p) : 0.0,
                        moment.n};
  const double v = std::pow(m, 1.0 / p);
  return {v, v / (p * m) * moment.std_error, moment.n};
}

Estimate BatchMeans::root(std::size_t stat, double p) const { return power_root(mean(stat), p); }

// ---------------------------------------------------------------------------

BatchMeans diff_moments(const WienerFunctional& xi, std::span<const RotationProfile> profiles,
                        std::span<const double> ps, const McConfig& cfg) {
  require(!profiles.empty(), ErrorCode::invalid_argument, "no profiles to evaluate");
  for (double p : ps) require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  for (const auto& phi : profiles) require_same_grid(*xi.grid(), *phi.grid(), "diff_moments");
  const std::size_t np = ps.size();
  const GridPtr grid = xi.grid();
  const std::size_t dim = xi.dim();
  return run_batches(cfg, profiles.size() * np, [&]() {
    return [&, pair = BrownianPair{}, dec = Decoupler{}](std::uint64_t i,
                                                         std::span<double> acc) mutable {
      sample_pair(grid, dim, sample_stream(cfg, StreamTag::coupled, i), pair);
      const double base = xi.evaluate(pair.w());
      if (!std::isfinite(base)) fail(ErrorCode::non_finite, "non-finite value of " + xi.name());
      for (std::size_t j = 0; j < profiles.size(); ++j) {
        const double diff = profiles[j].is_zero() ? 0.0 : std::abs(base - dec(xi, pair, profiles[j]));
        if (!std::isfinite(diff))
          fail(ErrorCode::non_finite, "non-finite decoupled value of " + xi.name());
        for (std::size_t q = 0; q < np; ++q)
          acc[j * np + q] += ps[q] == 2.0 ? diff * diff : std::pow(diff, ps[q]);
      }
    };
  });
}

std::vector<Estimate> p_norm_diff_curve(const WienerFunctional& xi,
                                        std::span<const RotationProfile> profiles, double p,
                                        const McConfig& cfg) {
  const double ps[] = {p};
  const BatchMeans bm = diff_moments(xi, profiles, ps, cfg);
  std::vector<Estimate> out;
  for (std::size_t j = 0; j < profiles.size(); ++j) out.push_back(bm.root(j, p));
  return out;
}

Estimate p_norm_diff(const WienerFunctional& xi, const RotationProfile& phi, double p,
                     const McConfig& cfg) {
  return p_norm_diff_curve(xi, std::span<const RotationProfile>(&phi, 1), p, cfg).front();
}

Estimate p_norm_between(const WienerFunctional& xi, const RotationProfile& phi,
                        const RotationProfile& psi, double p, const McConfig& cfg) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  require_same_grid(*xi.grid(), *phi.grid(), "p_norm_between");
  require_same_grid(*xi.grid(), *psi.grid(), "p_norm_between");
  const GridPtr grid = xi.grid();
  const std::size_t dim = xi.dim();
  const BatchMeans bm = run_batches(cfg, 1, [&]() {
    return [&, pair = BrownianPair{}, d1 = Decoupler{}, d2 = Decoupler{}](
               std::uint64_t i, std::span<double> acc) mutable {
      sample_pair(grid, dim, sample_stream(cfg, StreamTag::coupled, i), pair);
      acc[0] += std::pow(std::abs(d1(xi, pair, phi) - d2(xi, pair, psi)), p);
    };
  });
  return bm.root(0, p);
}

namespace {

BatchMeans plain_moments(const WienerFunctional& xi, const RotationProfile* phi, double p,
                         const McConfig& cfg) {
  const GridPtr grid = xi.grid();
  const std::size_t dim = xi.dim();
  return run_batches(cfg, 3, [&]() {
    return [&, pair = BrownianPair{}, dec = Decoupler{}](std::uint64_t i,
                                                         std::span<double> acc) mutable {
      sample_pair(grid, dim, sample_stream(cfg, StreamTag::coupled, i), pair);
      const double v = phi ? dec(xi, pair, *phi) : xi.evaluate(pair.w());
      if (!std::isfinite(v)) fail(ErrorCode::non_finite, "non-finite value of " + xi.name());
      acc[0] += v;
      acc[1] += v * v;
      acc[2] += std::pow(std::abs(v), p);
    };
  });
}

MomentSummary summarize(const BatchMeans& bm) {
  MomentSummary s;
  s.mean = bm.mean(0);
  s.second = bm.mean(1);
  // Variance per batch, then batch means of those.
  BatchMeans var(bm.batches(), 1, bm.n_used() / bm.batches());
  for (std::size_t b = 0; b < bm.batches(); ++b)
    var.at(b, 0) = bm.at(b, 1) - bm.at(b, 0) * bm.at(b, 0);
  s.variance = var.mean(0);
  return s;
}

}  // namespace

Estimate lp_norm(const WienerFunctional& xi, double p, const McConfig& cfg) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  return plain_moments(xi, nullptr, p, cfg).root(2, p);
}

MomentSummary moments(const WienerFunctional& xi, const McConfig& cfg) {
  return summarize(plain_moments(xi, nullptr, 2.0, cfg));
}

MomentSummary decoupled_moments(const WienerFunctional& xi, const RotationProfile& phi,
                                const McConfig& cfg) {
  require_same_grid(*xi.grid(), *phi.grid(), "decoupled_moments");
  return summarize(plain_moments(xi, &phi, 2.0, cfg));
}

// ---------------------------------------------------------------------------

Estimate cond_exp_residual(const WienerFunctional& xi, double a, double b, double p,
                           const McConfig& cfg) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  require(a < b, ErrorCode::invalid_argument, "cond_exp_residual needs a < b");
  require(cfg.n_inner >= 1, ErrorCode::invalid_argument,
          "cond_exp_residual needs n_inner (nested sample count)");
  const bool quadratic = p == 2.0;
  if (!quadratic)
    require(static_cast<double>(cfg.n_inner) >= std::sqrt(static_cast<double>(cfg.n_samples)),
            ErrorCode::invalid_argument,
            "n_inner must be >= sqrt(n_samples) for p != 2 (nested bias control)");
  const GridPtr grid = xi.grid();
  const std::size_t ka = grid->require_node(a);
  const std::size_t kb = grid->require_node(b);
  const std::size_t dim = xi.dim();
  const std::size_t cells = grid->cells();
  std::vector<double> root_dt(cells);
  for (std::size_t k = 0; k < cells; ++k) root_dt[k] = std::sqrt(grid->width(k));
  const std::size_t inner = cfg.n_inner;

  BatchMeans bm = run_batches(cfg, 1, [&]() {
    return [&, incr = std::vector<double>(cells * dim)](std::uint64_t i,
                                                        std::span<double> acc) mutable {
      NormalStream normals(sample_stream(cfg, StreamTag::nested, i));
      for (std::size_t k = 0; k < cells; ++k)
        for (std::size_t c = 0; c < dim; ++c) incr[k * dim + c] = normals.next() * root_dt[k];
      const Increments view{incr, cells, dim};
      auto redraw = [&]() {
        for (std::size_t k = ka; k < kb; ++k)
          for (std::size_t c = 0; c < dim; ++c) incr[k * dim + c] = normals.next() * root_dt[k];
      };
      if (quadratic) {
        double sum_sq = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t r = 0; r < 2 * inner; ++r) {
          if (r > 0) redraw();
          const double v = xi.evaluate(view);
          sum_sq += v * v;
          (r < inner ? m1 : m2) += v;
        }
        const double n = static_cast<double>(inner);
        acc[0] += sum_sq / (2.0 * n) - (m1 / n) * (m2 / n);
      } else {
        const double outer = xi.evaluate(view);
        double mean = 0.0;
        for (std::size_t r = 0; r < inner; ++r) {
          redraw();
          mean += xi.evaluate(view);
        }
        mean /= static_cast<double>(inner);
        acc[0] += std::pow(std::abs(outer - mean), p);
      }
    };
  });
  return bm.root(0, p);
}

SandwichReport sandwich_check(const WienerFunctional& xi, double a, double b, double p,
                              const McConfig& cfg) {
  SandwichReport r;
  const auto phi = RotationProfile::indicator(xi.grid(), a, b);
  r.decoupled = p_norm_diff(xi, phi, p, cfg);
  if (r.decoupled.value == 0.0 || r.decoupled.value <= 3.0 * r.decoupled.std_error)
    fail(ErrorCode::degenerate, "degenerate: " + xi.name() + " independent of (a,b]");
  r.residual = cond_exp_residual(xi, a, b, p, cfg);
  const double ratio = r.residual.value / r.decoupled.value;
  const double rel_r = r.residual.value > 0.0 ? r.residual.std_error / r.residual.value : 0.0;
  const double rel_d = r.decoupled.std_error / r.decoupled.value;
  double se = ratio * std::hypot(rel_r, rel_d);
  if (r.residual.value == 0.0) se = r.residual.std_error / r.decoupled.value;
  r.ratio = {ratio, se, r.decoupled.n};
  r.within_bounds = ratio >= 0.5 - 3.0 * se && ratio <= 1.0 + 3.0 * se;
  return r;
}

// ---------------------------------------------------------------------------

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::invalid_argument,
          "slope needs at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::domain, "log-log slope needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double orlicz_exp_norm(std::span<const double> samples, std::span<const double> weights,
                       double lambda_cap) {
  require(!samples.empty(), ErrorCode::invalid_argument, "orlicz norm needs samples");
  require(weights.empty() || weights.size() == samples.size(), ErrorCode::invalid_argument,
          "orlicz weights must match samples");
  const double uniform = 1.0 / static_cast<double>(samples.size());
  std::vector<double> abs_f, log_w;
  double total_w = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = weights.empty() ? uniform : weights[i];
    require(w >= 0.0, ErrorCode::invalid_argument, "orlicz weights must be nonnegative");
    require(std::isfinite(samples[i]), ErrorCode::non_finite, "non-finite orlicz sample");
    total_w += w;
    if (w == 0.0) continue;
    abs_f.push_back(std::abs(samples[i]));
    log_w.push_back(std::log(w));
  }
  require(std::abs(total_w - 1.0) < 1e-9, ErrorCode::invalid_argument,
          "orlicz weights must sum to 1");
  const double fmax = abs_f.empty() ? 0.0 : *std::max_element(abs_f.begin(), abs_f.end());
  if (fmax == 0.0) return 0.0;

  // log of sum_i w_i exp(|F_i| / lambda), decreasing in lambda
  auto log_mean = [&](double lambda) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < abs_f.size(); ++i) top = std::max(top, log_w[i] + abs_f[i] / lambda);
    double s = 0.0;
    for (std::size_t i = 0; i < abs_f.size(); ++i) s += std::exp(log_w[i] + abs_f[i] / lambda - top);
    return top + std::log(s);
  };
  const double target = std::log(2.0);
  double hi = fmax / target;  // exp(fmax / hi) = 2 bounds the mean by 2
  if (hi > lambda_cap) {
    if (log_mean(lambda_cap) > target) return std::numeric_limits<double>::infinity();
    hi = lambda_cap;
  }
  double lo = hi;
  while (log_mean(lo) <= target) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_mean(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace wlab
