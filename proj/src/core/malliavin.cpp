#include "wienerlab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wlab {

double gaussian_norm(double p) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  // E|N|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi)
  const double log_moment =
      0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / p);
}

MalliavinReport malliavin_seminorms(const WienerFunctional& xi, double p, const McConfig& cfg,
                                    unsigned depth) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  if (!xi.has_malliavin()) fail(ErrorCode::no_malliavin, xi.name() + " has no Malliavin derivative");
  const GridPtr grid = xi.grid();
  const std::size_t m = grid->cells(), dim = xi.dim();
  const auto family = dyadic_intervals(*grid, depth);
  std::vector<std::size_t> first, last;
  for (const auto& iv : family) {
    first.push_back(grid->require_node(iv.s));
    last.push_back(grid->require_node(iv.t));
  }

  const BatchMeans bm = run_batches(cfg, m + family.size(), [&]() {
    return [&, pair = BrownianPair{}, d = std::vector<double>(m * dim),
            sq = std::vector<double>(m)](std::uint64_t i, std::span<double> acc) mutable {
      sample_pair(grid, dim, sample_stream(cfg, StreamTag::malliavin, i), pair);
      xi.malliavin(pair.w(), d);
      for (std::size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) s += d[k * dim + c] * d[k * dim + c];
        if (!std::isfinite(s)) fail(ErrorCode::non_finite, "non-finite derivative of " + xi.name());
        sq[k] = s;
        acc[k] += std::pow(s, 0.5 * p);
      }
      for (std::size_t j = 0; j < family.size(); ++j) {
        double integral = 0.0;
        for (std::size_t k = first[j]; k < last[j]; ++k) integral += sq[k] * grid->width(k);
        acc[m + j] += std::pow(integral / family[j].width(), 0.5 * p);
      }
    };
  });

  MalliavinReport rep;
  rep.p = p;
  for (std::size_t k = 0; k < m; ++k) {
    const Estimate e = bm.root(k, p);
    if (k == 0 || e.value > rep.lip.value) {
      rep.lip = e;
      rep.lip_cell = k;
    }
  }
  for (std::size_t j = 0; j < family.size(); ++j) {
    const Estimate e = bm.root(m + j, p);
    if (j == 0 || e.value > rep.lips.value) {
      rep.lips = e;
      rep.lips_interval = family[j];
    }
  }
  rep.phi2 = sup_interval_seminorm(xi, p, 2.0, family, cfg).result.value;
  rep.ratio_defined = rep.lips.value > 0.0;
  if (rep.ratio_defined) {
    const double r = rep.phi2.value / rep.lips.value;
    const double rel_a = rep.phi2.value > 0.0 ? rep.phi2.std_error / rep.phi2.value : 0.0;
    rep.ratio = {r, r * std::hypot(rel_a, rep.lips.std_error / rep.lips.value), rep.lips.n};
  } else {
    rep.ratio = {std::numeric_limits<double>::quiet_NaN(), 0.0, rep.lips.n};
  }
  return rep;
}

CounterexampleReport counterexample_growth(unsigned l_max, double p, const McConfig& cfg,
                                           double horizon) {
  require(p >= 1.0, ErrorCode::domain, "p must be >= 1");
  const GridPtr grid = counterexample_grid(horizon, l_max);
  const auto layout = counterexample_layout(*grid, l_max);
  const std::size_t m = grid->cells();
  std::vector<std::size_t> s_node;
  for (const auto& iv : layout) s_node.push_back(grid->require_node(iv.s));

  // ||cos W_{s_l}||_p for every l on one sample set.
  const BatchMeans cos_moments = run_batches(cfg, l_max, [&]() {
    return [&, pair = BrownianPair{}](std::uint64_t i, std::span<double> acc) mutable {
      sample_pair(grid, 1, sample_stream(cfg, StreamTag::plain, i), pair);
      const auto w = cumulative_path(pair.w());
      for (unsigned l = 0; l < l_max; ++l) acc[l] += std::pow(std::abs(std::cos(w[s_node[l]])), p);
    };
  });

  CounterexampleReport rep;
  rep.p = p;
  const double cp = gaussian_norm(p);
  rep.kappa_hat = std::numeric_limits<double>::infinity();
  for (unsigned l = 0; l < l_max; ++l)
    rep.kappa_hat = std::min(rep.kappa_hat, std::sqrt(2.0) * cp * cos_moments.root(l, p).value);

  for (unsigned L = 1; L <= l_max; ++L) {
    CounterexampleRow row;
    row.L = L;
    const auto xi = counterexample_series(grid, L, l_max);
    const auto& iv = layout[L - 1];
    const auto phi = RotationProfile::indicator(grid, iv.s, iv.t);
    const Estimate diff = p_norm_diff(*xi, phi, p, cfg);
    const double scale = 1.0 / std::sqrt(iv.t - iv.s);
    row.lower = {diff.value * scale, diff.std_error * scale, diff.n};
    const Estimate c = cos_moments.root(L - 1, p);
    const double k = std::sqrt(2.0) * cp * L;
    row.direct = {k * c.value, k * c.std_error, c.n};
    row.xi_norm = lp_norm(*xi, p, cfg);
    const BatchMeans sf = run_batches(cfg, 1, [&]() {
      return [&, pair = BrownianPair{}, d = std::vector<double>(m)](std::uint64_t i,
                                                                    std::span<double> acc) mutable {
        sample_pair(grid, 1, sample_stream(cfg, StreamTag::malliavin, i), pair);
        xi->malliavin(pair.w(), d);
        double integral = 0.0;
        for (std::size_t j = 0; j < m; ++j) integral += d[j] * d[j] * grid->width(j);
        acc[0] += std::pow(integral, 0.5 * p);
      };
    });
    row.square_function = sf.root(0, p);
    rep.rows.push_back(row);
  }

  // Least-squares slope of lower(L) against L.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rep.rows.size());
  for (const auto& r : rep.rows) {
    sx += r.L;
    sy += r.lower.value;
    sxx += double(r.L) * r.L;
    sxy += r.L * r.lower.value;
  }
  rep.slope = n > 1 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : rep.rows[0].lower.value;
  rep.lower_bounds_hold = std::all_of(rep.rows.begin(), rep.rows.end(), [&](const auto& r) {
    return r.lower.value >= 0.5 * rep.kappa_hat * r.L;
  });
  rep.slope_in_range = rep.slope >= 0.5 * rep.kappa_hat && rep.slope <= 2.0 * rep.kappa_hat;
  const double reference = rep.rows[std::min<std::size_t>(4, rep.rows.size()) - 1].xi_norm.value;
  double biggest = 0.0;
  for (const auto& r : rep.rows) biggest = std::max(biggest, r.xi_norm.value);
  rep.norms_bounded = biggest < 2.0 * reference;
  return rep;
}

}  // namespace wlab
