#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "l2lb/params.hpp"
#include "l2lb/rng.hpp"

using namespace l2lb;

namespace {

ClassParams iso(double beta, double r, double q, int d = 1) {
  return ClassParams::isotropic(d, beta, r, q);
}

ClassParams random_theta(Rng& rng, bool force_iso) {
  const int d = force_iso ? 1 + static_cast<int>(rng.below(4))
                          : 1 + static_cast<int>(rng.below(4));
  ClassParams p;
  p.d = d;
  auto draw_r = [&] {
    const double u = rng.uniform();
    if (u < 0.2) return kInf;
    return 1.0 + 9.0 * rng.uniform();
  };
  const double b0 = std::exp(rng.uniform(-1.5, 1.5));
  const double r0 = draw_r();
  for (int j = 0; j < d; ++j) {
    p.beta.push_back(force_iso ? b0 : std::exp(rng.uniform(-1.5, 1.5)));
    p.r.push_back(force_iso ? r0 : draw_r());
    p.L.push_back(1.0);
  }
  const double uq = rng.uniform();
  p.q = uq < 0.3 ? kInf : 2.0 + 8.0 * rng.uniform();
  p.Q = 2.0;
  return p;
}

}  // namespace

TEST_CASE("diagnostics hand values") {
  {
    auto s = smoothness_diagnostics(iso(10.0, kInf, kInf));
    CHECK(s.inv_omega == 0.0);
    CHECK(s.tau(kInf) == 1.0);
  }
  {
    auto s = smoothness_diagnostics(ClassParams::isotropic(2, 1.0, 1.0, kInf));
    CHECK(s.inv_omega == 2.0);
    CHECK(s.tau(1.0) == doctest::Approx(1.0));
  }
  {
    auto s = smoothness_diagnostics(iso(0.4, 2.0, kInf));
    CHECK(s.inv_omega == doctest::Approx(1.25));
    CHECK(s.tau(2.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("validation rejects bad fields") {
  ClassParams p = iso(1.0, 2.0, kInf);
  CHECK_NOTHROW(p.validate());
  p.q = 1.5;
  CHECK_THROWS(p.validate());
  p = iso(1.0, 0.5, kInf);
  CHECK_THROWS(p.validate());
  p = iso(-1.0, 2.0, kInf);
  CHECK_THROWS(p.validate());
  p = iso(1.0, 2.0, kInf);
  p.L.pop_back();
  CHECK_THROWS(p.validate());
}

TEST_CASE("rate exponent hand values") {
  {
    auto rep = rate_exponent(iso(0.4, 2.0, kInf));
    CHECK(rep.z == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(rep.regime == Regime::ThetaPrime);
    CHECK(rate_exponent_isotropic_sup_norm(iso(0.4, 2.0, kInf)) ==
          doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  }
  {
    auto rep = rate_exponent(iso(10.0, kInf, kInf));
    CHECK(rep.z == 0.5);
    CHECK(rep.regime == Regime::Parametric);
  }
  {
    auto rep = rate_exponent(iso(0.5, 1.0, 4.0));
    CHECK(rep.z == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rep.regime == Regime::ThetaDoublePrime);
  }
  {
    auto rep = rate_exponent(iso(0.8, 1.0, 2.0));
    CHECK(rep.z == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(rep.regime == Regime::ThetaTriplePrime);
  }
}

TEST_CASE("rates_at_n normalizations") {
  CHECK_THROWS(rates_at_n(iso(0.4, 2.0, kInf), 2));
  auto rep = rates_at_n(iso(0.4, 2.0, kInf), 10000);
  const double ln = std::log(1e4);
  CHECK(rep.psi_n == doctest::Approx(std::pow(std::sqrt(ln) / 1e4, 4.0 / 9.0)));
  CHECK(rep.phi_n == doctest::Approx(std::pow(1e4, -4.0 / 9.0)));
  CHECK(rep.psi_n / rep.phi_n == doctest::Approx(std::pow(ln, 2.0 / 9.0)));
  CHECK(rep.price == doctest::Approx(std::pow(ln, 2.0 / 9.0)));

  // smooth case: psi_n = (sqrt(ln n)/n)^{1/2}
  auto par = rates_at_n(iso(10.0, kInf, kInf), 100);
  CHECK(par.psi_n ==
        doctest::Approx(std::sqrt(std::sqrt(std::log(100.0)) / 100.0)));
  CHECK(par.price == doctest::Approx(std::pow(std::log(100.0), 0.25)));
}

TEST_CASE("compare_thetas hand values") {
  {
    // isotropic, q = inf: rho collapses to d/(beta r)
    auto rel = compare_thetas(ClassParams::isotropic(3, 0.5, 2.0, kInf),
                              ClassParams::isotropic(3, 0.5, 2.0, kInf));
    CHECK(rel.rho == doctest::Approx(3.0 / (0.5 * 2.0)));
    CHECK(rel.in_theta_zero);
    CHECK_FALSE(rel.in_theta_plus);
  }
  {
    auto rel = compare_thetas(iso(0.4, 2.0, kInf), iso(0.45, 2.0, kInf));
    CHECK(rel.z_theta == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(rel.z_theta_prime == doctest::Approx(0.9 / 1.9).epsilon(1e-14));
    CHECK(rel.in_theta_plus);
    CHECK(rel.in_regime_set_prime);
    CHECK(rel.c == doctest::Approx(0.5 + rel.z_theta / (2.0 * rel.z_theta_prime)));
    // exponent of n in alpha_n: c z' - z = (z' - z)/2
    CHECK(rel.alpha_exponent ==
          doctest::Approx(0.5 * (rel.z_theta_prime - rel.z_theta)));
    CHECK(rel.alpha_n(100) ==
          doctest::Approx(std::pow(100.0, rel.alpha_exponent)));
  }
  {
    // z(theta') = 0 corner: q = 2, tau(2) < 0
    CHECK_THROWS(compare_thetas(iso(0.4, 1.0, 2.0), iso(0.4, 1.0, 2.0)));
  }
  {
    // alpha override validation
    auto a = iso(0.4, 2.0, kInf);
    auto b = iso(0.45, 2.0, kInf);
    CHECK_THROWS(compare_thetas(a, b, 0.1));
    auto rel = compare_thetas(a, b, 0.46);
    CHECK(rel.c == doctest::Approx(0.46 / (0.9 / 1.9)));
  }
}

TEST_CASE("sup-norm route agreement on random grid") {
  Rng rng(20260826);
  for (int it = 0; it < 10000; ++it) {
    ClassParams p = random_theta(rng, false);
    p.q = kInf;
    const RateReport rep = rate_exponent(p);
    const double z4 = rate_exponent_sup_norm(p);
    CHECK(rep.z == doctest::Approx(z4).epsilon(1e-12));
    if (p.is_isotropic()) {
      CHECK(z4 ==
            doctest::Approx(rate_exponent_isotropic_sup_norm(p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("isotropic sup-norm route agreement") {
  Rng rng(7);
  for (int it = 0; it < 10000; ++it) {
    ClassParams p = random_theta(rng, true);
    p.q = kInf;
    CHECK(rate_exponent_sup_norm(p) ==
          doctest::Approx(rate_exponent_isotropic_sup_norm(p)).epsilon(1e-12));
  }
}

TEST_CASE("regime trichotomy and exponent range") {
  Rng rng(99);
  for (int it = 0; it < 10000; ++it) {
    ClassParams p = random_theta(rng, false);
    if (p.q == 2.0) p.q = 2.5;  // avoid the degenerate z=0 corner at q=2
    const SmoothnessDiagnostics s = smoothness_diagnostics(p);
    const int c1 = s.tau(2.0) >= 1.0;
    const int c2 = s.tau(2.0) < 1.0 && s.tau(p.q) < 0.0;
    const int c3 = s.tau(2.0) < 1.0 && s.tau(p.q) >= 0.0;
    CHECK(c1 + c2 + c3 == 1);
    const RateReport rep = rate_exponent(p);
    CHECK(rep.z > 0.0);
    CHECK(rep.z <= 0.5);
    CHECK((rep.regime == Regime::Parametric) == (rep.z == 0.5));
    // tau identity behind the third-case threshold
    CHECK(2.0 * s.tau(2.0) - s.tau(1.0) == doctest::Approx(s.tau(kInf)));
  }
}

TEST_CASE("tau monotone nonincreasing in s") {
  Rng rng(5);
  for (int it = 0; it < 2000; ++it) {
    ClassParams p = random_theta(rng, false);
    const SmoothnessDiagnostics s = smoothness_diagnostics(p);
    double prev = s.tau(1.0);
    for (double v : {1.5, 2.0, 4.0, 10.0, 100.0, kInf}) {
      CHECK(s.tau(v) <= prev + 1e-15);
      prev = s.tau(v);
    }
  }
}

TEST_CASE("second-case exponent nondecreasing in q") {
  Rng rng(11);
  int found = 0;
  for (int it = 0; it < 20000 && found < 300; ++it) {
    ClassParams p = random_theta(rng, false);
    if (std::isinf(p.q)) continue;
    if (rate_exponent(p).regime != Regime::ThetaDoublePrime) continue;
    ++found;
    double prev = rate_exponent(p).z;
    ClassParams q = p;
    for (double step = 0.25; step <= 2.0; step += 0.25) {
      q.q = p.q + step;
      if (rate_exponent(q).regime != Regime::ThetaDoublePrime) break;
      const double z = rate_exponent(q).z;
      CHECK(z >= prev - 1e-15);
      prev = z;
    }
  }
  CHECK(found >= 100);
}

TEST_CASE("self-overlap exceeds 1 exactly on negative tau(q)") {
  Rng rng(13);
  int neg = 0;
  for (int it = 0; it < 5000; ++it) {
    ClassParams p = random_theta(rng, true);
    const SmoothnessDiagnostics s = smoothness_diagnostics(p);
    const double z_prime = rate_exponent(p).z;
    if (z_prime == 0.0) continue;
    const double rho = compare_thetas(p, p).rho;
    if (s.tau(p.q) < 0.0) {
      CHECK(rho > 1.0);
      ++neg;
    } else {
      CHECK(rho <= 1.0 + 1e-12);
    }
  }
  CHECK(neg > 50);
}

TEST_CASE("conditions on a small grid") {
  // beta < 0.5 with r=2 keeps tau(1) > 2, so exponents are all distinct;
  // the single smooth point is isolated and cannot form a flat patch
  std::vector<ClassParams> grid = {
      iso(0.3, 2.0, kInf),  iso(0.35, 2.0, kInf), iso(0.4, 2.0, kInf),
      iso(0.45, 2.0, kInf), iso(10.0, kInf, kInf),
  };
  const ConditionReport rep = check_conditions_A(grid);
  CHECK(rep.grid_size == 5);
  CHECK(rep.a1_pass);
  CHECK(rep.a2_pass);
  CHECK(rep.a3_pass);
  CHECK_FALSE(rep.zero_interior_found);
  CHECK(!rep.pairs.empty());
  for (const auto& pc : rep.pairs) {
    const double z = rate_exponent(grid[pc.i]).z;
    const double zp = rate_exponent(grid[pc.j]).z;
    CHECK(zp > z);
    CHECK(pc.a2_exponent == doctest::Approx(0.5 * (zp - z)));
    CHECK(pc.a3_exponent == doctest::Approx((1.0 - pc.c) * zp));
    CHECK(pc.a2_pass);
    CHECK(pc.a3_pass);
  }
  CHECK_THROWS(check_conditions_A(std::span<const ClassParams>{}));
}

TEST_CASE("interior of the same-rate set is flagged") {
  // a run of parametric points forms a flat patch: every interior point of
  // the patch has all its neighbors at the same exponent
  std::vector<ClassParams> grid;
  for (double b = 2.0; b <= 4.01; b += 0.25) grid.push_back(iso(b, kInf, kInf));
  grid.push_back(iso(0.4, 2.0, kInf));
  const ConditionReport rep = check_conditions_A(grid);
  CHECK(rep.zero_interior_found);
  CHECK_FALSE(rep.a1_pass);
}
