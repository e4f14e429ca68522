#pragma once

#include <functional>
#include <span>
#include <vector>

namespace l2lb {

/// 1-D adaptive Simpson integration of f over [a,b] with absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-8);

/// Integrates piecewise over consecutive breakpoints (sorted ascending).
/// The per-piece tolerance is abs_tol divided by the number of pieces.
double integrate_pieces(const std::function<double(double)>& f,
                        std::span<const double> breakpoints,
                        double abs_tol = 1e-8);

/// L_p norm of a 1-D function supported (up to negligible mass) inside
/// [breakpoints.front(), breakpoints.back()].  p = infinity is evaluated
/// as a maximum over a dense grid refined around each breakpoint.
double lp_norm_1d(const std::function<double(double)>& f,
                  std::span<const double> breakpoints, double p,
                  double abs_tol = 1e-8, int inf_grid = 4096);

/// Fixed-node composite Simpson rule; n_intervals is rounded up to even.
double simpson_fixed(const std::function<double(double)>& f, double a, double b,
                     int n_intervals);

/// Cumulative integral table of a smooth function on [a,b]; query exact
/// to the table resolution via local Simpson on the partial cell.
class CumulativeTable {
 public:
  CumulativeTable() = default;
  CumulativeTable(std::function<double(double)> f, double a, double b,
                  int cells = 4096);

  /// Integral of f from a to t (clamped to [a,b]).
  double prefix(double t) const;
  /// Integral of f over [lo,hi] intersected with [a,b].
  double range(double lo, double hi) const;
  double total() const { return cum_.empty() ? 0.0 : cum_.back(); }

 private:
  std::function<double(double)> f_;
  double a_ = 0.0, b_ = 0.0, h_ = 0.0;
  std::vector<double> cum_;  // cum_[i] = integral from a to a+i*h
};

}  // namespace l2lb
