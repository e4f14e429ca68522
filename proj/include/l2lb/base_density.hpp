#pragma once

#include <span>
#include <vector>

#include "l2lb/quadrature.hpp"
#include "l2lb/rng.hpp"

namespace l2lb {

/// Normalized 1-D mollifier u(z) = R^{-1} exp(-1/(1-z^2)) on (-1,1),
/// with cached cumulative table and rejection sampler.
class MollifierProfile {
 public:
  static const MollifierProfile& instance();

  double density(double z) const;
  /// Integral of the density from -1 to z.
  double cdf(double z) const;
  /// Integral over [lo, hi] intersected with [-1,1].
  double mass(double lo, double hi) const;
  double normalizer() const { return R_; }
  double sample(Rng& rng) const;

 private:
  MollifierProfile();
  CumulativeTable table_;  // unnormalized
  double R_ = 1.0;
};

/// 1-D factor g_N(x) = integral of u over [1-x, N+1-x]; equals 1 exactly
/// on the plateau x in [2, N], vanishes outside [0, N+2].
double plateau_factor(double N, double x);

/// Smoothed uniform density on [0,(N+2)/a]^d with plateau value a^d N^{-d},
/// or its shrunk composite variant: a reflected vanishing-width copy
/// carrying mass 1 - c t^{1-1/q} plus a near component of mass c t^{1-1/q}
/// obtained by anisotropic dilation x -> x/h of the smoothed uniform.
struct BaseDensity {
  enum class Kind { MollifiedUniform, ShrunkComposite };
  Kind kind = Kind::MollifiedUniform;
  int d = 1;

  // MollifiedUniform; also the near component of the composite
  double N = 8.0;
  double a = 1.0;

  // ShrunkComposite only
  double t = 0.0;
  double c_const = 0.0;
  double q = 2.0;
  long n_build = 0;  // far-component width is exp(-n_build)
  std::vector<double> h_vec;

  static BaseDensity mollified_uniform(int d, double N, double a);
  static BaseDensity shrunk_composite(int d, double N, double a, double t,
                                      double c_const, double q, long n_build,
                                      std::vector<double> h_vec);

  double operator()(std::span<const double> x) const;

  /// Exact value on the bump region (the plateau of the active component).
  double plateau_value() const;

  /// L_p norm (p = inf supported); separable per-axis quadrature.
  double lp_norm(double p) const;

  /// Total integral by separable quadrature (sanity oracle, should be 1).
  double total_integral() const;

  /// Draws n points (row-major, stride d) by the convolution construction.
  std::vector<double> sample(long n, Rng& rng) const;

  /// Axis breakpoints bracketing the support of the MollifiedUniform kind.
  std::vector<double> axis_breakpoints() const;
};

}  // namespace l2lb
