#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "l2lb/family.hpp"

namespace l2lb {

/// Reference quadratic-functional estimator: pairwise U-statistic with a
/// product biweight kernel.  h has one entry per axis (a single entry is
/// broadcast); clamp takes the negative part to zero before the root.
struct EstimatorSpec {
  std::vector<double> h;
  bool clamp = true;
};

/// Biweight kernel (15/16)(1-u^2)^2 on |u| <= 1.
double biweight(double u);

/// sqrt of theta_hat = (n(n-1))^{-1} sum_{i != j} prod_l h_l^{-1}
/// K((X_il - X_jl)/h_l) on a row-major n x d sample.  Throws for n < 2.
double estimate_l2(std::span<const double> sample, int d,
                   const EstimatorSpec& spec);

/// All bandwidths of a scalar grid in one sorted pass (d = 1 only).
std::vector<double> estimate_l2_multi(std::span<const double> sample,
                                      std::span<const double> h_grid,
                                      bool clamp);

struct RiskRow {
  std::string density_id;
  long n = 0;
  long reps = 0;
  double truth = 0.0;  // quadrature/closed-form L2 norm of the density
  double mse = 0.0;
  double stderr_value = 0.0;  // batch-means; defined only for reps >= 2
  bool stderr_defined = false;
};

/// Monte-Carlo risk of the estimator on one density of the family; an
/// empty y selects the base density.  Deterministic in (seed, rep index).
RiskRow empirical_risk(const PerturbationFamily& fam,
                       std::span<const double> y, long n, long reps,
                       const EstimatorSpec& spec, std::uint64_t seed);

struct CombinedEntry {
  long n = 0;
  std::size_t spec_index = 0;
  double h_ref = 0.0;       // first bandwidth entry of the spec
  double mse_base = 0.0;    // faster-class representative (base density)
  double mse_family = 0.0;  // worst perturbed row
  double term_base = 0.0;   // n^{2 alpha} * mse_base
  double term_family = 0.0; // psi_n^{-2} * mse_family
  double combined = 0.0;    // term_base + term_family
  double combined_bare = 0.0;  // family term normalized by the bare rate
  double stderr_combined = 0.0;
  double certificate_final = 0.0;
  bool above_certificate = false;  // combined >= final - 3 stderr
  bool both_small = false;         // both terms <= final / 2
};

struct RiskTable {
  std::vector<RiskRow> rows;
  std::vector<CombinedEntry> entries;
  double alpha = 0.0;  // comparison exponent (midpoint of the rate gap)
  double min_combined = 0.0;
};

/// Two-class tradeoff experiment: for each n in the increasing grid,
/// builds the perturbation family, runs every estimator spec on the base
/// density and on family draws, and normalizes the two risk terms so that
/// their sum is comparable with the certificate lower bound.
RiskTable two_class_experiment(const ClassParams& theta,
                               const ClassParams& theta_prime,
                               std::span<const long> n_grid, double kappa,
                               long reps,
                               std::span<const EstimatorSpec> spec_grid,
                               std::uint64_t seed, double delta = 1.0,
                               long family_rows = 2);

}  // namespace l2lb
