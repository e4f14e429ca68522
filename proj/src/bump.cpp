#include "l2lb/bump.hpp"

#include <cmath>
#include <stdexcept>

#include "l2lb/quadrature.hpp"

namespace l2lb {

double mollifier_quarter(double t) {
  const double u = 16.0 * t * t;
  if (u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u));
}

namespace {

// two disjoint lobes of opposite sign; sup equals sup of the mollifier
double two_lobe(double t) {
  return mollifier_quarter(t - 0.25) - mollifier_quarter(t + 0.25);
}

const double kE = std::exp(1.0);

}  // namespace

double BumpShape::axis_factor(int j, double t) const {
  if (nonnegative) return kE * mollifier_quarter(2.0 * t);
  if (j == 0) return kE * two_lobe(t);
  return kE * mollifier_quarter(t);
}

double BumpShape::axis_lp(int j, double p) const {
  if (std::isinf(p)) return 1.0;
  static const std::vector<double> bp_full = {-0.5, -0.25, 0.0, 0.25, 0.5};
  static const std::vector<double> bp_quarter = {-0.25, 0.0, 0.25};
  const auto& bp = (!nonnegative && j == 0) ? bp_full : bp_quarter;
  return lp_norm_1d([this, j](double t) { return axis_factor(j, t); }, bp, p,
                    1e-12);
}

double BumpShape::lp_norm(double p) const {
  double out = 1.0;
  for (int j = 0; j < d; ++j) out *= axis_lp(j, p);
  return out;
}

double BumpShape::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("BumpShape: dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < d; ++j) {
    v *= axis_factor(j, x[j]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

BumpShape make_bump(int d, bool nonnegative) {
  if (d < 1) throw std::invalid_argument("make_bump: d must be >= 1");
  BumpShape b;
  b.d = d;
  b.nonnegative = nonnegative;
  b.l2_norm = b.lp_norm(2.0);
  b.linf_norm = 1.0;
  if (nonnegative) {
    double v = 1.0;
    for (int j = 0; j < d; ++j)
      v *= integrate([&](double t) { return b.axis_factor(j, t); }, -0.25, 0.25,
                     1e-12);
    b.integral = v;
  } else {
    b.integral = 0.0;  // exact by antisymmetry of the first-axis factor
  }
  return b;
}

}  // namespace l2lb
