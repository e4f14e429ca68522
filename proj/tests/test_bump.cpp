#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "l2lb/bump.hpp"
#include "l2lb/params.hpp"
#include "l2lb/quadrature.hpp"

using namespace l2lb;

TEST_CASE("profile support and smooth decay") {
  CHECK(mollifier_quarter(0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(mollifier_quarter(0.25) == 0.0);
  CHECK(mollifier_quarter(-0.3) == 0.0);
  CHECK(mollifier_quarter(0.2499) < 1e-200);
}

TEST_CASE("zero-mean bump basics") {
  for (int d : {1, 2, 3}) {
    BumpShape b = make_bump(d, false);
    CHECK(b.integral == 0.0);
    CHECK(b.linf_norm == 1.0);
    // sup-norm realized: first-axis lobe peak at t=1/4, others at 0
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    x[0] = 0.25;
    CHECK(b(x) == doctest::Approx(1.0).epsilon(1e-12));
    x[0] = -0.25;
    CHECK(b(x) == doctest::Approx(-1.0).epsilon(1e-12));
    // support inside [-1/2,1/2]^d
    x.assign(static_cast<std::size_t>(d), 0.0);
    x[0] = 0.51;
    CHECK(b(x) == 0.0);
    if (d > 1) {
      x[0] = 0.25;
      x[1] = 0.26;
      CHECK(b(x) == 0.0);
    }
  }
}

TEST_CASE("zero-mean integral vanishes under quadrature") {
  BumpShape b = make_bump(1, false);
  const std::array<double, 5> bp = {-0.5, -0.25, 0.0, 0.25, 0.5};
  const double v = integrate_pieces([&](double t) { return b.axis_factor(0, t); },
                                    bp, 1e-10);
  CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("l2 norm against brute-force Riemann oracle") {
  BumpShape b = make_bump(1, false);
  const int nodes = 1000000;
  const double h = 1.0 / nodes;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = -0.5 + (i + 0.5) * h;
    const double v = b.axis_factor(0, t);
    acc += v * v * h;
  }
  CHECK(b.l2_norm * b.l2_norm == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("lp norms factorize over axes") {
  BumpShape b2 = make_bump(2, false);
  BumpShape b1 = make_bump(1, false);
  CHECK(b2.lp_norm(2.0) ==
        doctest::Approx(b1.axis_lp(0, 2.0) * b2.axis_lp(1, 2.0)).epsilon(1e-10));
  CHECK(b2.lp_norm(kInf) == 1.0);
}

TEST_CASE("nonnegative bump") {
  BumpShape b = make_bump(2, true);
  CHECK(b.nonnegative);
  CHECK(b.integral > 0.0);
  const std::array<double, 2> peak = {0.0, 0.0};
  CHECK(b(peak) == doctest::Approx(1.0).epsilon(1e-12));
  const std::array<double, 2> out = {0.2, 0.0};
  CHECK(b(out) == 0.0);  // compressed support |t| < 1/8
  // everywhere nonnegative on a grid
  for (double u = -0.5; u <= 0.5; u += 0.01)
    for (double v = -0.5; v <= 0.5; v += 0.01) {
      const std::array<double, 2> x = {u, v};
      CHECK(b(x) >= 0.0);
    }
}
