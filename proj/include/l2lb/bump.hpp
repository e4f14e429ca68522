#pragma once

#include <span>
#include <vector>

namespace l2lb {

/// Smooth 1-D mollifier profile exp(-1/(1-16 t^2)) on |t| < 1/4, 0 outside.
double mollifier_quarter(double t);

/// Tensor-product bump supported in [-1/2,1/2]^d with sup-norm 1.
/// Zero-mean variant: antisymmetric two-lobe profile on the first axis,
/// mollifier profile on the rest.  Nonnegative variant: pure product of
/// compressed mollifiers (used only by synthetic nonnegative-prior
/// families).  Each axis factor individually has sup-norm 1, so every
/// L_p norm factorizes over axes.
struct BumpShape {
  int d = 1;
  bool nonnegative = false;
  double l2_norm = 0.0;
  double linf_norm = 1.0;
  double integral = 0.0;

  /// Axis factor j evaluated at t; sup over t equals 1.
  double axis_factor(int j, double t) const;

  /// L_p norm of axis factor j (p = inf gives 1).
  double axis_lp(int j, double p) const;

  /// Full d-dimensional L_p norm (product of axis norms).
  double lp_norm(double p) const;

  double operator()(std::span<const double> x) const;
};

BumpShape make_bump(int d, bool nonnegative = false);

}  // namespace l2lb
