#pragma once

// Library of Wiener functionals xi evaluated on raw increment arrays.
// Decoupled values xi^phi are the same evaluator applied to rotated increments.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wienerlab/paths.hpp"

namespace wlab {

// xi = P(X_1, ..., X_B) for a polynomial P in disjoint block increments
// X_b = W_{t_{end}}(coord) - W_{t_{begin}}(coord).
struct IncrementBlock {
  std::size_t first_cell = 0;  // inclusive
  std::size_t last_cell = 0;   // exclusive
  std::size_t coord = 0;
};

struct Monomial {
  double coef = 0.0;
  std::vector<unsigned> powers;  // one per block
};

struct PolynomialForm {
  std::vector<IncrementBlock> blocks;
  std::vector<Monomial> monomials;

  unsigned degree() const;
};

class WienerFunctional {
 public:
  WienerFunctional(GridPtr grid, std::size_t dim);
  virtual ~WienerFunctional() = default;

  virtual std::string name() const = 0;
  virtual double evaluate(const Increments& incr) const = 0;

  virtual bool has_malliavin() const { return false; }
  // Writes D_s xi per cell and coordinate (M x d, row-major).
  virtual void malliavin(const Increments& incr, std::span<double> out) const;

  // Non-null for polynomial functionals; consumed by the chaos module.
  virtual const PolynomialForm* polynomial() const { return nullptr; }

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }

  void check(const Increments& incr) const;

 private:
  GridPtr grid_;
  std::size_t dim_;
};

using FunctionalPtr = std::shared_ptr<const WienerFunctional>;

// --- library entries -------------------------------------------------------

FunctionalPtr linear_terminal(GridPtr grid, std::size_t dim = 1);
FunctionalPtr square_terminal(GridPtr grid, std::size_t dim = 1);
FunctionalPtr constant_functional(GridPtr grid, double value, std::size_t dim = 1);

// Blocks are given by grid-node endpoints (a, b]; they must be disjoint.
struct BlockSpec {
  double a = 0.0;
  double b = 0.0;
  std::size_t coord = 0;
};
FunctionalPtr poly_increments(GridPtr grid, std::vector<BlockSpec> blocks,
                              std::vector<Monomial> monomials, std::size_t dim = 1,
                              std::string name = "poly-increments");

using ScalarField = std::function<double(double t, double x)>;
using ScalarMap = std::function<double(double x)>;

// Euler scheme X_{k+1} = X_k + b(t_k, X_k) dt_k + sigma(t_k, X_k) dW_k(coord 0).
// The derivative fields are optional; when all are present the tangent
// recursion provides D_s g(X_T).
struct DiffusionSpec {
  ScalarField drift;
  ScalarField diffusion;
  ScalarField drift_dx;
  ScalarField diffusion_dx;
  double x0 = 0.0;
  ScalarMap terminal;
  ScalarMap terminal_dx;
  std::string label = "diffusion-terminal";
};
FunctionalPtr diffusion_terminal(GridPtr grid, DiffusionSpec spec, std::size_t dim = 1);

// Ornstein-Uhlenbeck dX = -kappa X dt + sigma dW with terminal map g.
DiffusionSpec ou_spec(double kappa, double sigma, double x0, ScalarMap g,
                      ScalarMap dg);

// g(base) with g = indicator of [K, inf); no Malliavin derivative.
FunctionalPtr bv_indicator(FunctionalPtr base, double threshold);

// xi_L = sum_{l<=L} l cos(W_{s_l}) (W_{t_l} - W_{s_l}), t_l - s_l = T 4^{-l}.
// The interval endpoints must be grid nodes; see counterexample_grid.
struct SeriesInterval {
  double s = 0.0;
  double t = 0.0;
};
std::vector<SeriesInterval> counterexample_intervals(double horizon, unsigned l_max);
// Grid whose nodes are exactly {0, s_1, t_1, ..., s_L, t_L, T}; intervals are
// packed left to right with equal gaps.
GridPtr counterexample_grid(double horizon, unsigned l_max);
// Interval layout on a given grid: the equal-gap layout when its endpoints are
// nodes, otherwise packing with one-cell gaps on a uniform grid. Throws when
// T 4^{-l_max} falls below one cell.
std::vector<SeriesInterval> counterexample_layout(const TimeGrid& grid, unsigned l_max);
FunctionalPtr counterexample_series(GridPtr grid, unsigned terms, unsigned l_max);

// sum_i weight_i xi_i + shift
FunctionalPtr linear_combination(std::vector<std::pair<double, FunctionalPtr>> terms,
                                 double shift = 0.0);

// --- evaluation helpers ----------------------------------------------------

double evaluate(const WienerFunctional& xi, const Increments& incr);

// Reusable scratch for xi^phi = xi(rotate(pair, phi)).
class Decoupler {
 public:
  double operator()(const WienerFunctional& xi, const BrownianPair& pair,
                    const RotationProfile& phi);
  std::span<const double> last_increments() const noexcept { return buffer_; }

 private:
  std::vector<double> buffer_;
};

double decoupled_evaluate(const WienerFunctional& xi, const BrownianPair& pair,
                          const RotationProfile& phi);

std::vector<double> malliavin_path(const WienerFunctional& xi, const Increments& incr);

// --- step processes of functionals ------------------------------------------

// A_s constant on cells, A_s = A_k(increments); the process seminorm rotates
// the increments and re-evaluates cellwise.
class StepProcessFunctional {
 public:
  explicit StepProcessFunctional(GridPtr grid) : grid_(std::move(grid)) {}
  virtual ~StepProcessFunctional() = default;

  virtual std::string name() const = 0;
  virtual void evaluate(const Increments& incr, std::span<double> values) const = 0;
  const GridPtr& grid() const noexcept { return grid_; }

 private:
  GridPtr grid_;
};

using StepProcessPtr = std::shared_ptr<const StepProcessFunctional>;

// A on cell k equals W_{t_k}.
StepProcessPtr brownian_step_process(GridPtr grid);
// A on cell k equals W_{min(t_k, a)}.
StepProcessPtr frozen_brownian_process(GridPtr grid, double freeze_at);
StepProcessPtr deterministic_process(GridPtr grid, std::vector<double> values);

}  // namespace wlab
