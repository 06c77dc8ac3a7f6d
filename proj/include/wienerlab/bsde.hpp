#pragma once

// Markovian BSDE solver by backward induction on a spatial grid, decoupled
// twin evaluation through the same value function, and empirical checks of
// the stability and L_p-variation inequalities.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wienerlab/bmo.hpp"
#include "wienerlab/estimators.hpp"
#include "wienerlab/functionals.hpp"

namespace wlab {

// Nodes and weights with sum_i w_i g(x_i) ~ E g(N(0,1)).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite(std::size_t n);

using GeneratorFn = std::function<double(double t, double x, double y, double z)>;

struct GeneratorSpec {
  GeneratorFn f;
  double ly = 0.0;
  double lz = 0.0;
  double theta = 0.0;
  bool depends_on_x = false;
  double lx = 0.0;  // Lipschitz constant in x when depends_on_x
  std::string label = "generator";
};

struct LipschitzReport {
  std::size_t probes = 0;
  double worst_ratio = 0.0;  // max |df| / (L_Y |dy| + L_Z [1+|z0|+|z1|]^theta |dz|)
  bool holds = false;
};
LipschitzReport check_lipschitz(const GeneratorSpec& gen, double horizon, std::size_t probes = 10000,
                                std::uint64_t seed = 1, double range = 5.0);

struct MarkovModel {
  ScalarField drift;
  ScalarField diffusion;
  double x0 = 0.0;
  double sigma_bar = 1.0;  // bound on |sigma|, sets the spatial domain
  std::string label = "model";
};

struct BsdeProblem {
  std::string name;
  MarkovModel model;
  GeneratorSpec generator;
  ScalarMap terminal;
  ScalarMap terminal_dx;  // optional
};

struct SolverConfig {
  std::size_t gh_nodes = 16;
  std::size_t space_nodes = 401;
  double width_sigmas = 8.0;
  unsigned picard = 2;
  double theta = 0.5;  // 1 is implicit Euler in y
  // > 0: composite Simpson with this many intervals on [-8, 8] for the first
  // backward step (discontinuous terminal values).
  std::size_t terminal_intervals = 0;
};

class BsdeSolution {
 public:
  BsdeSolution(GridPtr grid, std::vector<double> xs, std::vector<std::vector<double>> u,
               std::vector<std::vector<double>> z, ScalarMap terminal, unsigned picard_used);

  const GridPtr& grid() const noexcept { return grid_; }
  std::span<const double> space() const noexcept { return xs_; }
  std::span<const double> u(std::size_t k) const { return u_.at(k); }
  std::span<const double> z(std::size_t k) const { return z_.at(k); }
  unsigned picard_used() const noexcept { return picard_used_; }

  // Cubic interpolation in x, linear extrapolation outside the domain. The
  // terminal level uses g itself.
  double value(std::size_t k, double x) const;
  double gradient_z(std::size_t k, double x) const;
  bool inside(double x) const noexcept { return x >= xs_.front() && x <= xs_.back(); }
  double y0(double x0) const { return value(0, x0); }

 private:
  double interpolate(std::span<const double> f, double x) const;

  GridPtr grid_;
  std::vector<double> xs_;
  double dx_ = 0.0;
  std::vector<std::vector<double>> u_, z_;
  ScalarMap terminal_;
  unsigned picard_used_ = 0;
};

BsdeSolution solve_markovian(const BsdeProblem& problem, GridPtr grid, const SolverConfig& cfg = {});

// Euler path of X and the values Y = u(t_k, X_k), Z = z(t_k, X_k).
struct PathRecord {
  std::vector<double> x;  // nodes 0..M
  std::vector<double> y;  // nodes 0..M (y[M] = g(x[M]))
  std::vector<double> z;  // nodes 0..M-1
  std::size_t exits = 0;  // nodes outside the spatial domain
};
void evaluate_path(const BsdeSolution& sol, const MarkovModel& model, const Increments& incr,
                   PathRecord& out);

struct TwinRecord {
  PathRecord base;
  PathRecord twin;
};
TwinRecord twin_paths_eval(const BsdeSolution& sol, const MarkovModel& model,
                           const BrownianPair& pair, const RotationProfile& phi);

// D[a, b] = 1 - sqrt(1 - a^2) sqrt(1 - b^2) - a b
double rotation_defect(double a, double b);

struct StabilityReport {
  double t = 0.0, p = 2.0;
  Estimate sup_diff;      // || sup_{s >= t} |Y^phi_s - Y_s| ||_p
  Estimate defect_z;      // || (int_t^T D[phi_s, 0] |Z_s|^2 ds)^(1/2) ||_p
  Estimate z_diff;        // || (int_t^T |Z^phi_s - Z_s|^2 ds)^(1/2) ||_p
  Estimate terminal;      // || xi^phi - xi ||_p
  Estimate generator;     // L_X || int_t^T |X^phi_s - X_s| ds ||_p, 0 for x-free f
  Estimate sup_y;         // || sup_s |Y_s| ||_p
  Estimate lhs, rhs, ratio;
  std::size_t exits = 0;
  bool anomaly = false;  // RHS indistinguishable from 0 while LHS is not
};
StabilityReport stability_check(const BsdeProblem& problem, const BsdeSolution& sol,
                                const RotationProfile& phi, double t, double p, const McConfig& cfg);

struct VariationRow {
  double s = 0.0, t = 0.0;
  Estimate lhs;        // || Y_t - Y_s ||_p
  Estimate drift;      // || int_s^t [1 + |f(r, X_r, 0, 0)|] dr ||_p
  Estimate terminal;   // || xi - xi^{(s,t]} ||_p
  Estimate generator;  // || int_s^T |f(r, X_r, Y_r, Z_r) - f(r, X^{(s,t]}_r, Y_r, Z_r)| dr ||_p
  double rhs = 0.0;    // drift + terminal + generator
  double ratio = 0.0;  // lhs / rhs
};
struct VariationReport {
  double p = 2.0;
  std::vector<VariationRow> rows;
  double slope = 0.0;  // least squares of log lhs against log(t - s)
  std::size_t exits = 0;
};
VariationReport variation_check(const BsdeProblem& problem, const BsdeSolution& sol, double p,
                                const std::vector<std::pair<double, double>>& pairs,
                                const McConfig& cfg);

// sup_x |z(t_k, x)|^theta per cell as a deterministic StepProcess (0^0 = 1).
StepProcess gradient_diagnostics(const BsdeSolution& sol, double theta);

// Y_t = u(t, X_t) and xi = g(X_T) as Wiener functionals on the solution grid.
FunctionalPtr bsde_value_functional(const BsdeProblem& problem, std::shared_ptr<const BsdeSolution> sol,
                                    double t);

struct BsdePreset {
  BsdeProblem problem;
  SolverConfig solver;
  std::optional<double> y0_oracle;
  double tolerance = 0.0;
  std::string description;
};
// heat, linear-oracle, quadratic-cole-hopf, linear-terminal, table-a-lipschitz,
// ou-lipschitz, bv-terminal
BsdePreset bsde_preset(const std::string& name);
std::vector<std::string> bsde_preset_names();

}  // namespace wlab
