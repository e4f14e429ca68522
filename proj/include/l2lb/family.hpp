#pragma once

#include <span>
#include <string>
#include <vector>

#include "l2lb/base_density.hpp"
#include "l2lb/bump.hpp"
#include "l2lb/nikolskii.hpp"
#include "l2lb/params.hpp"
#include "l2lb/rng.hpp"

namespace l2lb {

struct PriorSpec {
  enum class Kind { Rademacher, BernoulliOnUnit };
  Kind kind = Kind::Rademacher;
  double p = 0.5;            // success probability for BernoulliOnUnit
  double first_moment = 0.0; // e1
};

/// Perturbed two-class family f_y = (1-rho_y) f0 + A sum_m y_m
/// Lambda((x-x_m)/sigma) with bump rectangles on a regular lattice.
struct PerturbationFamily {
  int construction = 1;  // 1, 2, or 0 for the synthetic nonnegative family
  ClassParams theta, theta_prime;
  long n = 0;
  double kappa = 0.0, delta = 0.0;

  BaseDensity base;
  BumpShape shape;
  double A = 0.0;
  std::vector<double> sigma;
  long M = 0;
  PriorSpec prior;

  // lattice geometry: centers at origin + sigma_l*(i+1/2) per axis
  std::vector<double> lattice_origin;
  std::vector<long> lattice_caps;

  // estimated constants, all stamped into reports
  double C1 = 0.0;
  double a_cal = 0.0;
  double N_cal = 8.0;
  double c_const = 0.0;  // composite-base coefficient (construction 2)
  double c4 = 0.0, c16 = 0.0;
  double kappa1 = 0.0;
  double M_real = 0.0, rounding_slack = 0.0;
  double psi_n = 0.0;
  double z = 0.0, z_prime = 0.0;
  double t = 0.0;  // construction 2 only

  // prior bookkeeping; every family here is exchangeable, so per-bump
  // quantities are scalars (M can be ~1e9, vectors would not fit)
  double lambda_value = 0.0;  // lambda_m, equal across m
  double Sigma_M = 0.0, frakS_M = 0.0, frakD_M = 0.0;
  double S_value = 0.0;  // closed form; verifier re-derives by quadrature

  // cached values
  double base_l2 = 0.0;
  double sigma_prod = 1.0;
  double plateau = 0.0;  // base value on the bump region

  long center_count() const { return M; }
  std::vector<double> center(long m) const;
  /// Index of the rectangle containing x, or -1.
  long locate(std::span<const double> x) const;

  double rho_y(std::span<const double> y) const;
  double eval(std::span<const double> y, std::span<const double> x) const;
  std::vector<double> draw_y(Rng& rng) const;
  /// Exact sampler by region decomposition; row-major n x d.
  std::vector<double> sample(std::span<const double> y, long count,
                             Rng& rng) const;
};

/// Two-class lattice family in the sparse-smoothness regime (tau(2) >= 1):
/// amplitude (sqrt(ln n)/n)^{2z}, lattice inside the plateau.  kappa <= 0
/// selects the automatic choice satisfying every budget with a safety
/// factor.
PerturbationFamily build_family_I(const ClassParams& theta,
                                  const ClassParams& theta_prime, long n,
                                  double kappa = 0.0);

/// Shrunk composite family in the dense regime (tau(2) < 1, tau(q) < 0);
/// kappa <= 0 again selects automatically.
PerturbationFamily build_family_II(const ClassParams& theta,
                                   const ClassParams& theta_prime, long n,
                                   double kappa = 0.0, double delta = 1.0);

/// Synthetic family with nonnegative bumps and Bernoulli weights on {0,1},
/// sized so that 256 * frakS^2 * M * n <= budget (default 1/2).  Used to
/// exercise the nontrivial branches of the sandwich and moment lemmas.
PerturbationFamily build_family_nonneg_unit(long M, long n,
                                            double budget = 0.5);

struct NormReport {
  double f0_l2 = 0.0;
  double fy_l2 = 0.0;      // closed form, y-free for sign priors
  double fy_q = 0.0;       // upper bound via triangle inequality
  double separation = 0.0; // |‖f_y‖_2 - ‖f_0‖_2|, minimum over y_set
  double cross_term = 0.0; // quadrature cross term (construction 2 report)
  bool sep_exceeds_2psi = false;
};

/// Norm decomposition ‖f_y‖_2^2 = ‖f_0‖_2^2 + A^2 sigma M ‖Λ‖_2^2 and the
/// separation against the family's 2*psi_n threshold.
NormReport functional_norms(const PerturbationFamily& fam,
                            std::span<const std::vector<double>> y_set);

/// Separable components of the base density with coefficients folded in:
/// one component for the smoothed uniform, two (far, then near) for the
/// shrunk composite.  Used for smoothness-membership checks.
std::vector<SeparableFn> base_separable_components(
    const PerturbationFamily& fam);

/// Total mass of f_y by region decomposition: quadrature of the base over
/// its support plus the per-cell bump masses (cells are translates, so one
/// high-precision cell quadrature covers all of them).
double total_integral_given_y(const PerturbationFamily& fam,
                              std::span<const double> y);

}  // namespace l2lb
