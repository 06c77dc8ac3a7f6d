#pragma once

// Admissible functionals Phi acting on curves phi -> ||xi - xi^phi||_p, the
// resulting Besov seminorms, and the process seminorm ||A||_{Phi,q}^{r,t}.
//
// A Phi is a reduction over a curve tabulated on a fixed finite family of
// profiles, so every property check on Phi is exact arithmetic on the table.

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wienerlab/estimators.hpp"
#include "wienerlab/functionals.hpp"

namespace wlab {

// D[eta1, eta2] = 1 - sqrt(1 - eta1^2) sqrt(1 - eta2^2) - eta1 eta2
double d_distance(double eta1, double eta2);

struct Interval {
  double s = 0.0;
  double t = 0.0;
  double width() const { return t - s; }
};

class PhiFunctional {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  virtual ~PhiFunctional() = default;
  virtual std::string name() const = 0;
  virtual const std::vector<RotationProfile>& family() const = 0;
  // Short text per profile, used in CSV output.
  virtual std::string label(std::size_t j) const = 0;
  // F[j] is the curve value on family()[j]; entries are >= 0.
  virtual double reduce(std::span<const double> F) const = 0;
  // Profile attaining a sup-type value, npos for integral types.
  virtual std::size_t argmax(std::span<const double>) const { return npos; }
};

using PhiPtr = std::shared_ptr<const PhiFunctional>;

// Dyadic intervals (j T 2^-l, (j+1) T 2^-l] for l = 0..depth. Throws when a
// level does not fall on grid nodes.
std::vector<Interval> dyadic_intervals(const TimeGrid& grid, unsigned depth);

// Phi_r(F) = sup over the family of F(chi_(s,t]) / (t - s)^(1/r); r >= 2.
PhiPtr sup_interval_phi(GridPtr grid, double r, std::vector<Interval> family);
PhiPtr phi2(GridPtr grid, unsigned depth = 6);

// One block of the anisotropic functional: weight (r_end - t)^(-theta/2) on
// [r_prev, r_end) in L_q(dt / (r_end - t)). q may be +inf.
struct AnisotropicTerm {
  double r_end = 1.0;
  double theta = 0.5;
  double q = 2.0;
};

struct AnisotropicTail {
  double nominal = 0.0;        // tail integral with exponent q (1 - theta) / 2
  double fitted_exponent = 0.0;  // local power-law decay of the last two nodes
  double fitted = 0.0;         // tail integral with the fitted exponent
};

class AnisotropicPhi : public PhiFunctional {
 public:
  AnisotropicPhi(GridPtr grid, std::vector<AnisotropicTerm> terms);

  std::string name() const override { return "anisotropic"; }
  const std::vector<RotationProfile>& family() const override { return family_; }
  std::string label(std::size_t j) const override;
  double reduce(std::span<const double> F) const override;
  // Per block: neglected tail beyond the one-cell cutoff, raised to power q.
  std::vector<AnisotropicTail> tails(std::span<const double> F) const;

 private:
  struct Node {
    std::size_t term;
    double t;
    double u;       // -ln(r_end - t)
    double weight;  // (r_end - t)^(-theta/2)
  };
  double block_power(std::size_t term, std::span<const double> F, bool with_tail) const;

  std::vector<AnisotropicTerm> terms_;
  std::vector<RotationProfile> family_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> first_;  // node range per term
};

PhiPtr anisotropic_phi(GridPtr grid, std::vector<AnisotropicTerm> terms);

// Kernel on (0,1). The density receives (r, 1 - r) so endpoint singularities
// can be evaluated without cancellation. Optional tails give the exact mass
// of K below r_min (argument r_min) and above r_max (argument 1 - r_max).
struct Kernel {
  std::string name;
  std::function<double(double r, double one_minus_r)> density;
  std::function<double(double r_min)> lower_tail;
  std::function<double(double one_minus_r_max)> upper_tail;
};

Kernel unit_kernel();
// K(r) = 2r / (1 - r^2) (ln 1/(1 - r^2))^(-1 - theta q / 2)
Kernel mehler_kernel(double theta, double q);

// (int_0^1 K(r) F(phi_r)^q dr)^(1/q) by tanh-sinh quadrature in r.
class IsotropicPhi : public PhiFunctional {
 public:
  IsotropicPhi(GridPtr grid, Kernel kernel, double q, double step = 0.125);

  std::string name() const override { return "isotropic-" + kernel_.name; }
  const std::vector<RotationProfile>& family() const override { return family_; }
  std::string label(std::size_t j) const override;
  double reduce(std::span<const double> F) const override;

 private:
  Kernel kernel_;
  double q_;
  std::vector<RotationProfile> family_;
  std::vector<double> r_, weight_;  // weight includes K and the Jacobian
  std::vector<std::size_t> node_profile_;  // nodes rounding to one r share a profile
  double lower_mass_ = 0.0, upper_mass_ = 0.0;
};

PhiPtr isotropic_phi(GridPtr grid, Kernel kernel, double q, double step = 0.125);

// sup_j F(phi_j) / alpha_j
PhiPtr weighted_sup_phi(std::vector<RotationProfile> profiles, std::vector<double> alpha,
                        std::vector<std::string> labels = {});

// --- estimation ----------------------------------------------------------------

// Batch-level moments E|xi - xi^phi_j|^p for every profile of a family.
struct Tabulation {
  double p = 2.0;
  BatchMeans moments{1, 1, 1};

  std::vector<double> curve() const;
  std::vector<double> curve_without(std::size_t batch) const;
  std::vector<Estimate> estimates() const;
};

Tabulation tabulate(const WienerFunctional& xi, const PhiFunctional& phi, double p,
                    const McConfig& cfg);

struct SeminormResult {
  Estimate value;  // error bar from a jackknife over batches
  std::size_t argmax = PhiFunctional::npos;
  std::vector<Estimate> curve;
};

SeminormResult reduce_tabulation(const PhiFunctional& phi, const Tabulation& tab);
SeminormResult seminorm(const WienerFunctional& xi, const PhiFunctional& phi, double p,
                        const McConfig& cfg);

struct SupSeminorm {
  SeminormResult result;
  Interval argmax;
};
SupSeminorm sup_interval_seminorm(const WienerFunctional& xi, double p, double r,
                                  std::vector<Interval> family, const McConfig& cfg);

SeminormResult anisotropic_seminorm(const WienerFunctional& xi, double p,
                                    std::vector<AnisotropicTerm> terms, const McConfig& cfg);
SeminormResult isotropic_seminorm(const WienerFunctional& xi, double p, Kernel kernel, double q,
                                  const McConfig& cfg, double step = 0.125);

// (E|xi|^p + ||xi||_{Phi,p}^p)^(1/p)
Estimate besov_norm(const WienerFunctional& xi, double p, const PhiFunctional& phi,
                    const McConfig& cfg);

struct AdmissibilityReport {
  std::size_t trials = 0;
  bool subadditive = true;
  bool homogeneous = true;
  bool monotone = true;
  bool fatou = true;
  std::vector<std::string> violations;

  bool all() const { return subadditive && homogeneous && monotone && fatou; }
};

// Random nonnegative curves F, G on the family of phi; relative tolerance
// covers rounding only.
AdmissibilityReport admissibility_check(const PhiFunctional& phi, std::size_t trials,
                                        std::uint64_t seed = 1, double tolerance = 1e-12);

// Phi applied to psi -> ||(int_t^T |A_s - A_s^psi|^r ds)^(1/r)||_q; t a grid node.
SeminormResult process_seminorm(const StepProcessFunctional& A, double q, double r, double t,
                                const PhiFunctional& phi, const McConfig& cfg);

// Right-hand side of the bounded-variation embedding
// 3^((q+1)/q) (sup rho)^(p/(q(p+1))) ||xi - xi^phi||_p^(p/(q(p+1))).
double bv_embedding_bound(double p, double q, double density_sup, double diff_norm);

}  // namespace wlab
