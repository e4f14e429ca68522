#pragma once

#include <functional>
#include <span>
#include <vector>

#include "l2lb/bump.hpp"
#include "l2lb/params.hpp"

namespace l2lb {

using Fn1D = std::function<double(double)>;
using FnND = std::function<double(std::span<const double>)>;

/// k-th forward difference with step u along axis j (0-based):
/// sum_l (-1)^{l+k} C(k,l) G(x + u l e_j).
FnND finite_difference(FnND G, int k, double u, int j);
Fn1D finite_difference_1d(Fn1D g, int k, double u);

/// Log-spaced step grid for the ratio supremum.
std::vector<double> default_u_grid(double lo = 1e-3, double hi = 1.0,
                                   int count = 40);

struct DirectionReport {
  int j = 0;
  int k = 0;              // difference order floor(beta_j)+1
  double worst_ratio = 0.0;
  double worst_u = 0.0;
  double norm_value = 0.0;
  bool ratio_ok = false;  // worst_ratio <= scale*L_j*(1+tol)
  bool norm_ok = false;   // norm_value <= scale*L_j*(1+tol)
};

struct MembershipReport {
  std::vector<DirectionReport> per_direction;
  bool verdict = false;
  double tolerance = 1e-2;
  double scale = 1.0;
};

/// Full-grid quadrature domain for the generic check (d <= 3).
struct QuadGrid {
  std::vector<double> lo, hi;
  int nodes_per_axis = 64;
};

/// Generic membership check of G against the ball with radii scale*L.
MembershipReport membership_check(const FnND& G, const ClassParams& theta,
                                  double scale, std::span<const double> u_grid,
                                  const QuadGrid& quad, double tol = 1e-2);

/// Product function: G(x) = prod_j factors[j](x_j).  Per-axis breakpoints
/// must bracket each factor's support.
struct SeparableFn {
  std::vector<Fn1D> factors;
  std::vector<std::vector<double>> breakpoints;
};
MembershipReport membership_check_separable(const SeparableFn& G,
                                            const ClassParams& theta,
                                            double scale,
                                            std::span<const double> u_grid,
                                            double tol = 1e-2);

/// Superposition of M disjoint unit-sign bumps A*Lambda((x-x_m)/sigma) on
/// a lattice with per-axis spacing sigma_j.  The reported ratio is a sound
/// upper bound: the exact M^{1/r} mass scaling times a shift-overlap
/// multiplicity factor (at most k+1 shifted copies cover any point).
struct BumpSumSpec {
  const BumpShape* shape = nullptr;
  double A = 0.0;
  std::vector<double> sigma;
  long M = 1;
};
MembershipReport membership_check_bump_sum(const BumpSumSpec& spec,
                                           const ClassParams& theta,
                                           double scale,
                                           std::span<const double> u_grid,
                                           double tol = 1e-2);

/// Direction functional of the normalized bump: sup over v of the bounded
/// difference-ratio envelope used by the bump-sum check (v in units of the
/// bump width).
double bump_direction_functional(const BumpShape& shape, int j, int k,
                                 double beta, double r,
                                 std::span<const double> v_grid);

/// Smoothness budget constant: largest C1 such that bump superpositions
/// obeying A sigma_j^{-beta_j} (sigma M)^{1/r_j} <= C1 L_j land inside the
/// half-radius ball for every listed parameter point.
double calibrate_C1(const BumpShape& shape,
                    std::span<const ClassParams> thetas);

/// Difference order used throughout: floor(beta)+1.
int difference_order(double beta);

}  // namespace l2lb
