#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "l2lb/risk.hpp"
#include "l2lb/verifier.hpp"

using namespace l2lb;

TEST_CASE("kernel shape") {
  CHECK(biweight(0.0) == doctest::Approx(15.0 / 16.0));
  CHECK(biweight(1.0) == 0.0);
  CHECK(biweight(-0.5) == biweight(0.5));
  // unit mass and second-moment value by midpoint quadrature
  double mass = 0.0, m2 = 0.0;
  const int G = 20000;
  for (int i = 0; i < G; ++i) {
    const double u = -1.0 + (i + 0.5) * 2.0 / G;
    mass += biweight(u) * 2.0 / G;
    m2 += u * u * biweight(u) * 2.0 / G;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m2 == doctest::Approx(1.0 / 7.0).epsilon(1e-6));
}

TEST_CASE("two-point sample evaluates the kernel once") {
  EstimatorSpec spec{{0.5}, true};
  const std::vector<double> s = {0.3, 0.4};
  const double theta = biweight(0.1 / 0.5) / 0.5;
  CHECK(estimate_l2(s, 1, spec) == doctest::Approx(std::sqrt(theta)));
  // disjoint points: clamp floor at zero
  const std::vector<double> far = {0.0, 10.0};
  CHECK(estimate_l2(far, 1, spec) == 0.0);
  CHECK_THROWS(estimate_l2(std::vector<double>{1.0}, 1, spec));
  CHECK_THROWS(estimate_l2(s, 1, EstimatorSpec{{-1.0}, true}));
}

TEST_CASE("multi-bandwidth pass matches the single-bandwidth estimator") {
  Rng rng(4);
  std::vector<double> s(400);
  for (auto& v : s) v = rng.uniform(0.0, 1.0);
  const std::vector<double> grid = {0.01, 0.07, 0.3, 2.0};
  const auto multi = estimate_l2_multi(s, grid, true);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EstimatorSpec spec{{grid[k]}, true};
    CHECK(multi[k] == doctest::Approx(estimate_l2(s, 1, spec)).epsilon(1e-12));
  }
  // point-relabeling invariance (U-statistic symmetry)
  std::vector<double> shuffled = s;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i)
    std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
  CHECK(estimate_l2_multi(shuffled, grid, true)[2] == multi[2]);
}

TEST_CASE("uniform density: expectation matches the boundary-exact value") {
  // E theta_hat = 1 - (5/16) h for the uniform density on [0,1]
  const double h = 0.05;
  Rng rng(11);
  double sum = 0.0, sumsq = 0.0;
  const int reps = 200, n = 500;
  std::vector<double> s(n);
  for (int r = 0; r < reps; ++r) {
    for (auto& v : s) v = rng.uniform(0.0, 1.0);
    const auto est = estimate_l2_multi(s, std::vector<double>{h}, true);
    const double th = est[0] * est[0];
    sum += th;
    sumsq += th * th;
  }
  const double mean = sum / reps;
  const double se =
      std::sqrt((sumsq / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - (1.0 - 5.0 * h / 16.0)) <= 3.0 * se + 1e-12);
}

TEST_CASE("empirical risk basics on the reference family") {
  auto fam = build_family_I(ClassParams::isotropic(1, 0.4, 2.0, kInf),
                            ClassParams::isotropic(1, 0.45, 2.0, kInf), 1000);
  EstimatorSpec spec{{0.05}, true};
  // base row: truth is the base norm; determinism in the seed
  auto r1 = empirical_risk(fam, {}, 400, 8, spec, 21);
  auto r2 = empirical_risk(fam, {}, 400, 8, spec, 21);
  CHECK(r1.truth == doctest::Approx(fam.base_l2));
  CHECK(r1.mse == r2.mse);
  CHECK(r1.stderr_value == r2.stderr_value);
  CHECK(r1.stderr_defined);
  auto r3 = empirical_risk(fam, {}, 400, 8, spec, 22);
  CHECK(r1.mse != r3.mse);
  // reps = 1: no error bar
  auto r4 = empirical_risk(fam, {}, 400, 1, spec, 21);
  CHECK_FALSE(r4.stderr_defined);
  // huge bandwidth: the estimate collapses to ~0, mse ~ truth^2
  EstimatorSpec wide{{1e7}, true};
  auto r5 = empirical_risk(fam, {}, 400, 4, wide, 21);
  CHECK(r5.mse == doctest::Approx(r1.truth * r1.truth).epsilon(1e-3));
  // perturbed rows: sign flip leaves the risk unchanged within error
  Rng yr(5);
  auto y = fam.draw_y(yr);
  auto flip = y;
  for (auto& v : flip) v = -v;
  auto ry = empirical_risk(fam, y, 400, 24, spec, 31);
  auto rf = empirical_risk(fam, flip, 400, 24, spec, 31);
  CHECK(ry.truth == doctest::Approx(rf.truth));
  const double tol =
      4.0 * (ry.stderr_value + rf.stderr_value) + 1e-12;
  CHECK(std::abs(ry.mse - rf.mse) <= tol);
}

TEST_CASE("two-class experiment table") {
  const auto theta = ClassParams::isotropic(1, 0.4, 2.0, kInf);
  const auto theta_p = ClassParams::isotropic(1, 0.45, 2.0, kInf);
  const std::vector<long> n_grid = {1000};
  std::vector<EstimatorSpec> specs;
  for (double h : {3e-4, 3e-3, 0.05, 1.0}) specs.push_back({{h}, true});
  auto t1 = two_class_experiment(theta, theta_p, n_grid, 0.0, 12, specs, 7);
  auto t2 = two_class_experiment(theta, theta_p, n_grid, 0.0, 12, specs, 7);
  CHECK(t1.rows.size() == specs.size() * 3);  // base + two family rows
  CHECK(t1.entries.size() == specs.size());
  REQUIRE(!t1.entries.empty());
  for (std::size_t k = 0; k < t1.entries.size(); ++k) {
    const auto& e = t1.entries[k];
    CHECK(e.combined ==
          doctest::Approx(e.term_base + e.term_family).epsilon(1e-12));
    CHECK(e.certificate_final > 0.0);
    CHECK(e.above_certificate);
    CHECK_FALSE(e.both_small);
    CHECK(e.mse_family >= 0.0);
    // determinism
    CHECK(e.combined == t2.entries[k].combined);
  }
  CHECK(t1.min_combined >=
        t1.entries[0].certificate_final - 3.0 * t1.entries[0].stderr_combined);
  CHECK(t1.alpha > 0.0);
  // malformed grids are refused
  const std::vector<long> bad = {1000, 1000};
  CHECK_THROWS(two_class_experiment(theta, theta_p, bad, 0.0, 2, specs, 7));
  CHECK_THROWS(two_class_experiment(theta, theta_p, n_grid, 0.0, 2, {}, 7));
}
