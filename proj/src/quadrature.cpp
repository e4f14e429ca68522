#include "l2lb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace l2lb {

namespace {

double simpson(double h, double fa, double fc, double fb) {
  return (fa + 4.0 * fc + fb) * (h / 6.0);
}

double adapt(const std::function<double(double)>& f, double a, double c,
             double b, double fa, double fc, double fb, double whole,
             double tol, int depth) {
  const double ca = 0.5 * (a + c);
  const double cb = 0.5 * (c + b);
  const double fca = f(ca);
  const double fcb = f(cb);
  const double h = b - a;
  const double left = simpson(0.5 * h, fa, fca, fc);
  const double right = simpson(0.5 * h, fc, fcb, fb);
  const double err = (left + right - whole) / 15.0;
  if (depth <= 0 || std::abs(err) <= tol) return left + right + err;
  return adapt(f, a, ca, c, fa, fca, fc, left, 0.5 * tol, depth - 1) +
         adapt(f, c, cb, b, fc, fcb, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (a == b) return 0.0;
  const double c = 0.5 * (a + b);
  const double fa = f(a);
  const double fc = f(c);
  const double fb = f(b);
  const double whole = simpson(b - a, fa, fc, fb);
  return adapt(f, a, c, b, fa, fc, fb, whole, abs_tol, 40);
}

double integrate_pieces(const std::function<double(double)>& f,
                        std::span<const double> breakpoints, double abs_tol) {
  if (breakpoints.size() < 2) return 0.0;
  const double per = abs_tol / static_cast<double>(breakpoints.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    sum += integrate(f, breakpoints[i], breakpoints[i + 1], per);
  return sum;
}

double lp_norm_1d(const std::function<double(double)>& f,
                  std::span<const double> breakpoints, double p,
                  double abs_tol, int inf_grid) {
  if (breakpoints.size() < 2) return 0.0;
  if (std::isinf(p)) {
    double best = 0.0;
    const double lo = breakpoints.front();
    const double hi = breakpoints.back();
    const double h = (hi - lo) / inf_grid;
    for (int i = 0; i <= inf_grid; ++i)
      best = std::max(best, std::abs(f(lo + i * h)));
    // refine near breakpoints where kinks or peaks concentrate
    for (double bp : breakpoints) {
      for (int i = -64; i <= 64; ++i) {
        const double x = bp + i * (h / 64.0);
        if (x < lo || x > hi) continue;
        best = std::max(best, std::abs(f(x)));
      }
    }
    return best;
  }
  if (p < 1.0) throw std::invalid_argument("lp_norm_1d: p must be >= 1");
  auto g = [&](double x) { return std::pow(std::abs(f(x)), p); };
  const double val = integrate_pieces(g, breakpoints, abs_tol);
  return std::pow(std::max(val, 0.0), 1.0 / p);
}

double simpson_fixed(const std::function<double(double)>& f, double a, double b,
                     int n_intervals) {
  int n = std::max(2, n_intervals);
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

CumulativeTable::CumulativeTable(std::function<double(double)> f, double a,
                                 double b, int cells)
    : f_(std::move(f)), a_(a), b_(b) {
  if (cells < 1) cells = 1;
  h_ = (b - a) / cells;
  cum_.resize(cells + 1);
  cum_[0] = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double lo = a_ + i * h_;
    cum_[i + 1] = cum_[i] + simpson_fixed(f_, lo, lo + h_, 8);
  }
}

double CumulativeTable::prefix(double t) const {
  if (cum_.empty() || t <= a_) return 0.0;
  if (t >= b_) return cum_.back();
  const double pos = (t - a_) / h_;
  const auto cell = static_cast<std::size_t>(pos);
  const double lo = a_ + cell * h_;
  return cum_[cell] + simpson_fixed(f_, lo, t, 8);
}

double CumulativeTable::range(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return prefix(hi) - prefix(lo);
}

}  // namespace l2lb
