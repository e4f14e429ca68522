#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "l2lb/family.hpp"

namespace l2lb {

// Named constants of the lower-bound proof chain.
inline constexpr double kMassThreshold = 230.0 / 231.0;
inline constexpr double kKappaGeneralBound = 143.0 / 144.0;
inline constexpr double kExceptionalMass = 1.0 / 64.0;
inline const double kAsymptote = 107.0 / (144.0 * std::exp(1.0));

struct CheckEntry {
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

enum class LambdaBranch { ZeroLambda, NonnegUnit };

struct AssumptionChecklist {
  CheckEntry a1_disjoint_supports;
  CheckEntry a2_positive_base;
  CheckEntry a3_class_mass;       // threshold 230/231
  CheckEntry a4_separation_mass;  // threshold 230/231
  CheckEntry a5_sigma_bound;      // Sigma_M <= 0.25
  CheckEntry a5_budget;           // 256 S^2 M n <= 1
  LambdaBranch a5_branch = LambdaBranch::ZeroLambda;
  double a3_mc_error = 0.0;
  long y_draws = 0;
  bool all_pass() const {
    return a1_disjoint_supports.pass && a2_positive_base.pass &&
           a3_class_mass.pass && a4_separation_mass.pass &&
           a5_sigma_bound.pass && a5_budget.pass;
  }
};

enum class ChiMode { CoshProduct, ExactEnum, GeneralBranchBound };

struct ChiBudget {
  ChiMode mode = ChiMode::CoshProduct;
  double value = 1.0;
  std::vector<double> per_m;  // representative entries, capped in length
  long n = 0;
  double alpha_sq = 0.0;
  double ratio = 0.0;  // value / alpha_sq (value itself if no comparison)
  double mc_stderr = 0.0;
};

/// Per-bump information weights S_m = ∫ (A Λ_m)^2 / f0 by quadrature.
/// At most max_m entries are computed (all cells are translates).
std::vector<double> compute_Sm(const PerturbationFamily& fam,
                               long max_m = 100000);

/// Pair-affinity budget E[Z^2] for sign priors or its bound for the
/// nonnegative branch.  `c` scales the comparison exponent (alpha = c z');
/// c <= 0 selects the midpoint default.
ChiBudget chi_budget(const PerturbationFamily& fam, long n, double c,
                     ChiMode mode, long mc_reps = 100000,
                     std::uint64_t seed = 1);

// Exposed kernels (oracle-tested building blocks of chi_budget).
/// 2^{-M} sum over sign vectors w of (1 + sum_m S_m w_m)^n.
double chi_enum_rademacher(std::span<const double> S, long n);
/// Binomial collapse of the same sum for equal weights; windowed
/// log-space evaluation valid for M up to ~1e10.
double chi_collapse_equal(long M, double S, long n);
/// prod_m cosh(i_factor * n * S_m).
double chi_cosh_product(std::span<const double> S, long n, int i_factor);
double chi_cosh_product_equal(long M, double S, long n, int i_factor);

AssumptionChecklist verify_assumptions(const PerturbationFamily& fam, long n,
                                       long y_mc, std::uint64_t seed);

struct Certificate {
  double kappa = 1.0;     // E^M[I_y]: exactly 1 for zero-lambda families
  double ez2 = 1.0;       // E[Z^2] or its bound
  double alpha_sq = 0.0;  // alpha_n^2(c)
  double R_term = 0.125;  // 1/8 zero-lambda, sqrt(2)/8 general
  double ez_min_bound = 0.0;  // lower bound on E[Z ^ alpha^2]
  double final_bound = 0.0;   // max(0, e^{-1}(ez_min_bound - R_term))
  double asymptote = kAsymptote;
  bool conservative = false;  // cosh bound used in place of exact E[Z^2]
};

/// Lower-bound certificate from the min-risk algebra; ez2_override forces
/// the budget value (used to recover the clean-limit identity).
Certificate certificate(const PerturbationFamily& fam, long n, double c,
                        std::optional<double> ez2_override = {});

/// The same algebra on raw inputs (oracle-tested):
/// ez_min = (kappa + a^2 - sqrt(ez2 - 2 a^2 kappa + a^4)) / 2.
Certificate certificate_from_values(double kappa, double ez2,
                                    double alpha_sq, double R_term);

struct SandwichReport {
  long total_y = 0;
  long filtered_y = 0;  // |rho_y - Sigma_M| <= 12 D_M
  long grid_points = 0;
  double worst_upper_margin = 0.0;  // min of f*_y - f_y
  double worst_lower_margin = 0.0;  // min of f_y - e^{-1/n} f*_y
  bool pass = false;
};

/// Pointwise envelope check f*_y >= f_y >= e^{-1/n} f*_y on a grid.
SandwichReport check_lemma_sandwich(const PerturbationFamily& fam, long y_mc,
                                    long grid_points, std::uint64_t seed);

struct WjkReport {
  double W_hat = 1.0;
  double stderr_value = 0.0;
  double premise = 0.0;  // 2 b J * 5 T^2 A_K^2 K, must be <= 1
  bool exact = false;    // enumerated rather than Monte-Carlo
  bool pass = false;     // W_hat + 3 stderr <= 2
};

/// Moment bound W = E[(1 + b chi_K^2)^J] with chi_K = sum a_k zeta_k,
/// zeta_k = T * (Rademacher sign).  Refuses when the premise exceeds 1.
WjkReport check_lemma_wjk(long J, long K, double b, double T,
                          std::span<const double> a_vec, long reps,
                          std::uint64_t seed);

}  // namespace l2lb
