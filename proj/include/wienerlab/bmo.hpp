#pragma once

// BMO(S_{2 eta}) norms on finite scenario trees, equidistant sliceable upper
// bounds, the Kazamaki reverse-Hoelder functions and derived thresholds.

#include <cstddef>
#include <optional>
#include <vector>

#include "wienerlab/paths.hpp"

namespace wlab {

// Piecewise constant process on the cells of a grid. Level k of the tree is
// the information at t_k; the value a level-k node carries is the process on
// cell k = (t_k, t_{k+1}]. The deterministic flavour is a one-node-per-level
// chain.
class StepProcess {
 public:
  struct Node {
    std::size_t parent = 0;  // index into the previous level (ignored on level 0)
    double prob = 1.0;       // conditional on the parent
    double value = 0.0;
  };

  StepProcess() = default;

  static StepProcess deterministic(GridPtr grid, std::vector<double> values);
  static StepProcess tree(GridPtr grid, std::vector<std::vector<Node>> levels);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t cells() const noexcept { return levels_.size(); }
  const std::vector<Node>& level(std::size_t k) const { return levels_.at(k); }
  bool is_deterministic() const noexcept;

  // Unconditional probability of every node on level k.
  std::vector<double> node_probabilities(std::size_t k) const;

  // Zero on cells >= keep.
  StepProcess truncated(std::size_t keep) const;
  // |Z|^theta with 0^0 = 1.
  StepProcess abs_power(double theta) const;

 private:
  StepProcess(GridPtr grid, std::vector<std::vector<Node>> levels);
  GridPtr grid_;
  std::vector<std::vector<Node>> levels_;
};

// Pointwise sum of two deterministic processes on the same grid.
StepProcess operator+(const StepProcess& a, const StepProcess& b);

// sup_t || E( int_t^T |Z_s|^{2 eta} ds | A_t ) ||_inf^{1 / (2 eta)}, exact on the tree.
double bmo_s2eta_norm(const StepProcess& z, double eta);
// Same quantity for the process restricted to [s, t] (grid nodes).
double bmo_s2eta_norm(const StepProcess& z, double eta, double s, double t);

// Max over the N equidistant slices of the restricted norm; an upper bound
// for the N-sliceable number. Slice ends must be grid nodes.
double sliceable_upper(const StepProcess& z, double eta, std::size_t n_slices);

// (T/N)^{(1 - theta/eta)/2} ||Z||_{BMO(S_{2 eta})}^theta, bounding the
// S_2-sliceable number of |Z|^theta.
double sliceable_interpolation_bound(double horizon, std::size_t n_slices, double theta, double eta,
                                     double bmo_norm);

double kazamaki_phi(double beta);
// Throws ErrorCode::domain unless 0 <= gamma < kazamaki_phi(beta).
double kazamaki_psi(double gamma, double beta);
// Bisection on (1 + 1e-9, 1e6).
double phi_inverse(double x);

// [Psi(sl_N, beta)]^N when sl_N < Phi(beta), otherwise nothing.
std::optional<double> rh_bound(double sl, std::size_t n_slices, double beta);

// Exact RH_beta constant of the exponential of int c dW for c = kappa.
double deterministic_rh_constant(double kappa, double horizon, double beta);

// beta* / (beta* - 1) with beta* = Phi^{-1}(2 sqrt2 L_Z s_inf); 3/2 when the product is 0.
double p0_threshold(double lz, double s_inf);

struct WeakerBmoReport {
  double eta = 0.0, alpha = 0.0, beta = 0.0;
  unsigned n_max = 0;
  StepProcess process;
  std::vector<unsigned> n;                // summation indices 2..n_max
  std::vector<double> s2_lower;           // 2^{beta(n-1)} 2^{-n/2}
  std::vector<double> s2_computed;        // BMO(S_2) norm of the truncation at t_n
  std::vector<double> s2eta_partial;      // partial sums of 2^{beta(n-1)} 2^{-n/(2 eta)}
  std::vector<double> lexp_partial;       // partial sums of 2^{alpha(n-1)} 2^{-n/2}
  std::vector<double> orlicz_computed;    // ||v_n||_{L_exp} from the two-point law, n = 1..n_max
  std::vector<double> orlicz_exact;       // 2^{alpha n}
  double s2eta_tail = 0.0;   // exact geometric tail beyond n_max relative to the full sum
  double lexp_tail = 0.0;
  bool lower_bounds_grow = false;     // consecutive ratio >= 2^{beta - 1/2}
  bool computed_dominates = false;    // s2_computed >= s2_lower for every n
  bool partial_sums_cauchy = false;   // both tails < 1%
  bool orlicz_exact_match = false;    // relative error <= 1e-8
};

WeakerBmoReport weaker_bmo_construction(double eta, double alpha, double beta, unsigned n_max);

struct FeffermanReport {
  double p = 2.0, eta = 1.0;
  double lhs = 0.0;        // || int |Z|^{1+eta} ds ||_p
  double square = 0.0;     // || (int |Z|^2 ds)^{1/2} ||_p
  double bmo = 0.0;        // ||Z||_{BMO(S_{2 eta})}
  double rhs = 0.0;        // sqrt2 p square bmo^eta
  bool holds = false;
};

FeffermanReport fefferman_check(const StepProcess& z, double eta, double p);

}  // namespace wlab
