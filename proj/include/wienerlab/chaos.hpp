#pragma once

// Finite Wiener chaos expansions with kernels that are constant on products
// of grid cells (d = 1, order <= 4). Used as an exact L_2 oracle.

#include <cstddef>
#include <vector>

#include "wienerlab/functionals.hpp"

namespace wlab {

class ChaosExpansion {
 public:
  static constexpr unsigned max_supported_order = 4;

  // kernels[n] holds M^n cell values (row-major over the multi-index);
  // kernels[0] is the constant term. Kernels are symmetrised here.
  ChaosExpansion(GridPtr grid, std::vector<std::vector<double>> kernels);

  const GridPtr& grid() const noexcept { return grid_; }
  unsigned max_order() const noexcept { return static_cast<unsigned>(kernels_.size()) - 1; }
  std::span<const double> kernel(unsigned n) const { return kernels_.at(n); }

  // ||f_n||^2 in L_2((0,T]^n), optionally restricted to cells with mask[k].
  double kernel_norm2(unsigned n, const std::vector<bool>* mask = nullptr) const;

  double mean() const { return kernels_[0][0]; }
  // sum_{n >= 1} n! ||f_n||^2
  double variance() const;

 private:
  GridPtr grid_;
  std::vector<std::vector<double>> kernels_;
};

// Hermite rewrite of a polynomial in disjoint block increments.
ChaosExpansion expand_library(const WienerFunctional& xi);

// ||xi - E(xi | G_a^b)||_2 = (sum_n n! ||f_n chi_{D_n(a,b)}||^2)^(1/2), where
// D_n(a,b) is the set of n-tuples with at least one time in (a,b].
double conditional_residual_exact(const ChaosExpansion& exp, double a, double b);

struct D12Norm {
  double norm = 0.0;            // (sum (n+1) n! ||f_n||^2)^(1/2)
  double membership_sum = 0.0;  // sum n n! ||f_n||^2
};
D12Norm d12_norm(const ChaosExpansion& exp);

struct BdgChaosReport {
  double residual_squared = 0.0;  // ||xi - E(xi | G_a^b)||_2^2
  double integral = 0.0;          // int_a^b E|mu_s^b|^2 ds
  double relative_error = 0.0;
  bool equal = false;  // relative error <= 1e-10
};

// The p = 2 case of the chaos BDG identity; other p are unsupported.
BdgChaosReport bdg_chaos_check(const ChaosExpansion& exp, double a, double b, double p = 2.0);

}  // namespace wlab
