#pragma once

// Esssup and interval-average p-norms of the Malliavin derivative, their
// comparison with the Phi_2 seminorm, and the counterexample series.

#include <cstddef>
#include <vector>

#include "wienerlab/besov.hpp"

namespace wlab {

struct MalliavinReport {
  double p = 2.0;
  Estimate lip;   // max over cells of ||D_s xi||_p
  Estimate lips;  // sup over dyadic (a,b] of ||((b-a)^-1 int_a^b |D_s xi|^2 ds)^(1/2)||_p
  Estimate phi2;  // Phi_2 seminorm on the same interval family
  Estimate ratio;  // phi2 / lips
  bool ratio_defined = false;  // false when lips == 0 (ratio is NaN)
  std::size_t lip_cell = 0;
  Interval lips_interval;
};

MalliavinReport malliavin_seminorms(const WienerFunctional& xi, double p, const McConfig& cfg,
                                    unsigned depth = 6);

// ||N(0,1)||_p
double gaussian_norm(double p);

struct CounterexampleRow {
  unsigned L = 0;
  Estimate lower;   // ||xi_L - xi_L^{(s_L,t_L]}||_p / sqrt(t_L - s_L)
  Estimate direct;  // sqrt(2) c_p L ||cos W_{s_L}||_p
  Estimate xi_norm;  // ||xi_L||_p
  Estimate square_function;  // ||(int |D_s xi_L|^2 ds)^(1/2)||_p
};

struct CounterexampleReport {
  double p = 2.0;
  std::vector<CounterexampleRow> rows;
  double kappa_hat = 0.0;  // sqrt(2) c_p min_l ||cos W_{s_l}||_p
  double slope = 0.0;      // least-squares slope of lower vs L
  bool lower_bounds_hold = false;  // lower >= kappa_hat L / 2 for every L
  bool slope_in_range = false;     // slope in [kappa_hat / 2, 2 kappa_hat]
  bool norms_bounded = false;      // max_L ||xi_L||_p < 2 ||xi_4||_p
};

// Uses the equal-gap layout grid of counterexample_grid(horizon, l_max).
CounterexampleReport counterexample_growth(unsigned l_max, double p, const McConfig& cfg,
                                           double horizon = 1.0);

}  // namespace wlab
