#include "wienerlab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wlab {

namespace {

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

std::size_t ipow(std::size_t base, unsigned e) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

std::size_t flat_index(std::span<const std::size_t> tuple, std::size_t m) {
  std::size_t idx = 0;
  for (std::size_t k : tuple) idx = idx * m + k;
  return idx;
}

// Calls fn(tuple) for every tuple of length n with entries from `cells`.
template <class Fn>
void for_each_tuple(unsigned n, std::span<const std::size_t> cells, Fn&& fn) {
  std::vector<std::size_t> pos(n, 0), tuple(n);
  if (cells.empty() && n > 0) return;
  for (;;) {
    for (unsigned i = 0; i < n; ++i) tuple[i] = cells[pos[i]];
    fn(std::span<const std::size_t>(tuple));
    unsigned i = n;
    while (i > 0) {
      --i;
      if (++pos[i] < cells.size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

std::vector<double> symmetrize(const std::vector<double>& f, unsigned n, std::size_t m) {
  if (n < 2) return f;
  std::vector<double> out(f.size(), 0.0);
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  std::vector<unsigned> perm(n);
  const double count = factorial(n);
  std::vector<std::size_t> permuted(n);
  for_each_tuple(n, all, [&](std::span<const std::size_t> tuple) {
    std::iota(perm.begin(), perm.end(), 0u);
    double s = 0.0;
    do {
      for (unsigned i = 0; i < n; ++i) permuted[i] = tuple[perm[i]];
      s += f[flat_index(permuted, m)];
    } while (std::next_permutation(perm.begin(), perm.end()));
    out[flat_index(tuple, m)] = s / count;
  });
  return out;
}

}  // namespace

ChaosExpansion::ChaosExpansion(GridPtr grid, std::vector<std::vector<double>> kernels)
    : grid_(std::move(grid)), kernels_(std::move(kernels)) {
  require(grid_ != nullptr, ErrorCode::invalid_argument, "chaos expansion needs a grid");
  if (kernels_.empty()) kernels_.push_back({0.0});
  require(kernels_.size() - 1 <= max_supported_order, ErrorCode::unsupported,
          "chaos order above 4 is not supported");
  const std::size_t m = grid_->cells();
  for (unsigned n = 0; n < kernels_.size(); ++n) {
    require(kernels_[n].size() == ipow(m, n), ErrorCode::invalid_argument,
            "kernel of order " + std::to_string(n) + " must have M^n entries");
    kernels_[n] = symmetrize(kernels_[n], n, m);
  }
}

double ChaosExpansion::kernel_norm2(unsigned n, const std::vector<bool>* mask) const {
  const std::size_t m = grid_->cells();
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < m; ++k)
    if (!mask || (*mask)[k]) cells.push_back(k);
  const auto& f = kernels_.at(n);
  double sum = 0.0;
  for_each_tuple(n, cells, [&](std::span<const std::size_t> tuple) {
    double w = 1.0;
    for (std::size_t k : tuple) w *= grid_->width(k);
    const double v = f[flat_index(tuple, m)];
    sum += v * v * w;
  });
  return sum;
}

double ChaosExpansion::variance() const {
  double v = 0.0;
  for (unsigned n = 1; n <= max_order(); ++n) v += factorial(n) * kernel_norm2(n);
  return v;
}

ChaosExpansion expand_library(const WienerFunctional& xi) {
  const PolynomialForm* form = xi.polynomial();
  if (!form) fail(ErrorCode::unsupported, xi.name() + " is not a polynomial in increments");
  require(xi.dim() == 1, ErrorCode::unsupported, "chaos expansions need d = 1");
  require(form->degree() <= ChaosExpansion::max_supported_order, ErrorCode::unsupported,
          xi.name() + ": degree above 4 is not supported");
  const GridPtr& grid = xi.grid();
  const std::size_t m = grid->cells();
  const std::size_t nb = form->blocks.size();
  std::vector<double> h(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t k = form->blocks[b].first_cell; k < form->blocks[b].last_cell; ++k)
      h[b] += grid->width(k);

  const unsigned top = form->degree();
  std::vector<std::vector<double>> kernels(top + 1);
  for (unsigned n = 0; n <= top; ++n) kernels[n].assign(ipow(m, n), 0.0);

  // X^k = sum_m k! / (m! (k-2m)! 2^m) h^m I_{k-2m}(chi^{(k-2m)})
  for (const auto& mono : form->monomials) {
    std::vector<unsigned> drop(nb, 0);
    for (;;) {
      double coef = mono.coef;
      std::vector<std::size_t> order_blocks;  // block of each kernel position
      for (std::size_t b = 0; b < nb; ++b) {
        const unsigned k = mono.powers[b], mm = drop[b];
        coef *= factorial(k) / (factorial(mm) * factorial(k - 2 * mm) * std::pow(2.0, mm)) *
                std::pow(h[b], mm);
        for (unsigned i = 0; i < k - 2 * mm; ++i) order_blocks.push_back(b);
      }
      const unsigned n = static_cast<unsigned>(order_blocks.size());
      // Add coef * prod_i chi_{block(i)}(k_i) to the unsymmetrised kernel.
      std::vector<std::vector<std::size_t>> cells(n);
      for (unsigned i = 0; i < n; ++i)
        for (std::size_t k = form->blocks[order_blocks[i]].first_cell;
             k < form->blocks[order_blocks[i]].last_cell; ++k)
          cells[i].push_back(k);
      if (n == 0) {
        kernels[0][0] += coef;
      } else {
        std::vector<std::size_t> pos(n, 0), tuple(n);
        for (;;) {
          for (unsigned i = 0; i < n; ++i) tuple[i] = cells[i][pos[i]];
          kernels[n][flat_index(tuple, m)] += coef;
          unsigned i = n;
          bool done = true;
          while (i > 0) {
            --i;
            if (++pos[i] < cells[i].size()) {
              done = false;
              break;
            }
            pos[i] = 0;
          }
          if (done) break;
        }
      }
      // next combination of Hermite drops
      std::size_t b = 0;
      for (; b < nb; ++b) {
        if (2 * (drop[b] + 1) <= mono.powers[b]) {
          ++drop[b];
          break;
        }
        drop[b] = 0;
      }
      if (b == nb) break;
    }
  }
  while (kernels.size() > 1 &&
         std::all_of(kernels.back().begin(), kernels.back().end(), [](double v) { return v == 0.0; }))
    kernels.pop_back();
  return ChaosExpansion(grid, std::move(kernels));
}

double conditional_residual_exact(const ChaosExpansion& exp, double a, double b) {
  const auto& grid = *exp.grid();
  require(a < b, ErrorCode::invalid_argument, "residual needs a < b");
  const std::size_t ka = grid.require_node(a), kb = grid.require_node(b);
  std::vector<bool> outside(grid.cells());
  for (std::size_t k = 0; k < grid.cells(); ++k) outside[k] = k < ka || k >= kb;
  double sum = 0.0;
  for (unsigned n = 1; n <= exp.max_order(); ++n)
    sum += factorial(n) * (exp.kernel_norm2(n) - exp.kernel_norm2(n, &outside));
  return std::sqrt(std::max(sum, 0.0));
}

D12Norm d12_norm(const ChaosExpansion& exp) {
  D12Norm out;
  double total = 0.0;
  for (unsigned n = 0; n <= exp.max_order(); ++n) {
    const double w = factorial(n) * exp.kernel_norm2(n);
    total += (n + 1.0) * w;
    out.membership_sum += n * w;
  }
  out.norm = std::sqrt(total);
  return out;
}

BdgChaosReport bdg_chaos_check(const ChaosExpansion& exp, double a, double b, double p) {
  require(p == 2.0, ErrorCode::unsupported, "the chaos BDG identity is exact only for p = 2");
  const auto& grid = *exp.grid();
  const std::size_t m = grid.cells();
  const std::size_t ka = grid.require_node(a), kb = grid.require_node(b);
  BdgChaosReport rep;
  const double residual = conditional_residual_exact(exp, a, b);
  rep.residual_squared = residual * residual;

  // E|mu_t|^2 = sum_n n^2 (n-1)! ||f_n(t, .) chi_{A_t^{n-1}}||^2 with
  // A_t = (0,t] u (b,T]. Within cell k the own-cell measure is t - t_k, and m
  // copies of cell k integrate to dt_k^(m+1) / (m+1).
  for (unsigned n = 1; n <= exp.max_order(); ++n) {
    const auto f = exp.kernel(n);
    double order_sum = 0.0;
    for (std::size_t k = ka; k < kb; ++k) {
      std::vector<std::size_t> allowed;
      for (std::size_t j = 0; j < m; ++j)
        if (j <= k || j >= kb) allowed.push_back(j);
      const double dk = grid.width(k);
      std::vector<std::size_t> full(n);
      for_each_tuple(n - 1, allowed, [&](std::span<const std::size_t> rest) {
        double w = 1.0;
        unsigned own = 0;
        for (std::size_t j : rest) {
          if (j == k) ++own;
          else w *= grid.width(j);
        }
        w *= std::pow(dk, own + 1) / (own + 1.0);
        full[0] = k;
        std::copy(rest.begin(), rest.end(), full.begin() + 1);
        const double v = f[flat_index(full, m)];
        order_sum += v * v * w;
      });
    }
    rep.integral += n * factorial(n) * order_sum;
  }
  const double scale = std::max(std::abs(rep.residual_squared), std::abs(rep.integral));
  rep.relative_error = scale > 0.0 ? std::abs(rep.residual_squared - rep.integral) / scale : 0.0;
  rep.equal = rep.relative_error <= 1e-10;
  return rep;
}

}  // namespace wlab
