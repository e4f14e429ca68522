#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "l2lb/verifier.hpp"

using namespace l2lb;

namespace {

PerturbationFamily reference_family(long n) {
  return build_family_I(ClassParams::isotropic(1, 0.4, 2.0, kInf),
                        ClassParams::isotropic(1, 0.45, 2.0, kInf), n);
}

}  // namespace

TEST_CASE("per-bump weights by quadrature match the closed form") {
  auto fam = reference_family(10000);
  auto S = compute_Sm(fam, 10);
  REQUIRE(S.size() == 10);
  for (double s : S)
    CHECK(s == doctest::Approx(fam.S_value).epsilon(1e-6));
  // identical across m
  const auto [mn, mx] = std::minmax_element(S.begin(), S.end());
  CHECK(*mx - *mn <= 1e-10 * *mx);
  // doubling the amplitude quadruples the weight
  auto fam2 = fam;
  fam2.A *= 2.0;
  auto S2 = compute_Sm(fam2, 3);
  CHECK(S2[0] == doctest::Approx(4.0 * S[0]).epsilon(1e-9));
  // zero amplitude kills the weights
  fam2.A = 0.0;
  for (double s : compute_Sm(fam2, 3)) CHECK(s == 0.0);
}

TEST_CASE("enumeration kernel hand values") {
  // all zero weights
  const std::vector<double> z = {0.0, 0.0, 0.0};
  CHECK(chi_enum_rademacher(z, 7) == doctest::Approx(1.0));
  CHECK(chi_cosh_product(z, 7, 1) == doctest::Approx(1.0));
  // M=1, n=2: ((1+s)^2 + (1-s)^2)/2 = 1 + s^2 <= cosh(2s)
  for (double s : {0.05, 0.2, 0.7}) {
    const std::vector<double> one = {s};
    CHECK(chi_enum_rademacher(one, 2) == doctest::Approx(1.0 + s * s));
    CHECK(chi_cosh_product(one, 2, 1) >= 1.0 + s * s);
  }
  // M=2, n=1: linear in zero-mean signs
  const std::vector<double> two = {0.3, 0.3};
  CHECK(chi_enum_rademacher(two, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("binomial collapse equals enumeration for equal weights") {
  Rng rng(31);
  for (int it = 0; it < 40; ++it) {
    const long M = 1 + static_cast<long>(rng.below(20));
    const double s = rng.uniform(1e-4, 0.8 / static_cast<double>(M));
    const long n = 1 + static_cast<long>(rng.below(60));
    const std::vector<double> S(static_cast<std::size_t>(M), s);
    const double a = chi_enum_rademacher(S, n);
    const double b = chi_collapse_equal(M, s, n);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("collapse stays below the cosh bound at large M") {
  for (long M : {1000L, 1000000L}) {
    const double s = 1e-7;
    const long n = 100000;
    const double a = chi_collapse_equal(M, s, n);
    const double b = chi_cosh_product_equal(M, s, n, 1);
    CHECK(a >= 1.0);
    CHECK(a <= b * (1.0 + 1e-12));
  }
  // windowed path (M beyond the dense-sum threshold): with n*S this small
  // the exact value sits just below and very close to the cosh bound
  const double windowed = chi_collapse_equal(2000001, 2e-9, 1000000);
  const double bound = chi_cosh_product_equal(2000001, 2e-9, 1000000, 1);
  CHECK(windowed <= bound * (1.0 + 1e-12));
  CHECK(windowed == doctest::Approx(bound).epsilon(1e-4));
}

TEST_CASE("enumeration below cosh on random families") {
  Rng rng(77);
  for (int it = 0; it < 100; ++it) {
    const long M = 1 + static_cast<long>(rng.below(12));
    const long n = 1 + static_cast<long>(rng.below(50));
    std::vector<double> S(static_cast<std::size_t>(M));
    for (auto& s : S) s = rng.uniform(0.0, 0.9 / static_cast<double>(M));
    const double a = chi_enum_rademacher(S, n);
    const double b = chi_cosh_product(S, n, 1);
    CHECK(a >= 1.0 - 1e-12);  // nonnegative weights
    CHECK(a <= b * (1.0 + 1e-12));
    // permutation invariance
    std::vector<double> P = S;
    std::reverse(P.begin(), P.end());
    CHECK(chi_enum_rademacher(P, n) == doctest::Approx(a).epsilon(1e-13));
  }
}

TEST_CASE("budget ratio decreases in n on the reference pair") {
  double prev = kInf;
  for (long n : {1000L, 10000L, 100000L}) {
    auto fam = reference_family(n);
    auto exact = chi_budget(fam, n, 0.0, ChiMode::ExactEnum);
    auto cosh_b = chi_budget(fam, n, 0.0, ChiMode::CoshProduct);
    CHECK(exact.value <= cosh_b.value * (1.0 + 1e-12));
    CHECK(exact.alpha_sq > 1.0);
    CHECK(exact.ratio < prev);
    prev = exact.ratio;
  }
}

TEST_CASE("assumption checklist passes on the reference family") {
  auto fam = reference_family(10000);
  auto rep = verify_assumptions(fam, 10000, 200, 42);
  CHECK(rep.a1_disjoint_supports.pass);
  CHECK(rep.a2_positive_base.pass);
  CHECK(rep.a3_class_mass.pass);
  CHECK(rep.a3_class_mass.value == 1.0);
  CHECK(rep.a4_separation_mass.pass);
  CHECK(rep.a4_separation_mass.value == 1.0);
  CHECK(rep.a5_sigma_bound.pass);
  CHECK(rep.a5_budget.pass);
  CHECK(rep.a5_branch == LambdaBranch::ZeroLambda);
  CHECK(rep.all_pass());
  // inflating the amplitude far beyond the smoothness budget breaks a3
  auto bad = fam;
  bad.A *= 1000.0;
  auto rep2 = verify_assumptions(bad, 10000, 200, 42);
  CHECK_FALSE(rep2.a3_class_mass.pass);
}

TEST_CASE("certificate algebra hand values") {
  // ez2 = kappa^2 with alpha^2 > kappa: ez_min = kappa exactly
  auto c1 = certificate_from_values(1.0, 1.0, 2.0, 0.125);
  CHECK(c1.ez_min_bound == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c1.final_bound ==
        doctest::Approx(0.875 * std::exp(-1.0)).epsilon(1e-12));
  // direct evaluation
  auto c2 = certificate_from_values(1.0, 2.0, 100.0, 0.125);
  CHECK(c2.ez_min_bound ==
        doctest::Approx((101.0 - std::sqrt(9802.0)) / 2.0).epsilon(1e-12));
  CHECK(c2.final_bound == doctest::Approx(0.3209).epsilon(1e-3));
  // clamp when ez2 >= kappa^2 + 4 kappa alpha^2
  auto c3 = certificate_from_values(1.0, 1.0 + 4.0 * 2.0, 2.0, 0.125);
  CHECK(c3.final_bound == 0.0);
  // Cauchy-Schwarz violation rejected
  CHECK_THROWS(certificate_from_values(1.0, 0.5, 2.0, 0.125));
}

TEST_CASE("certificate monotonicity") {
  const double base = certificate_from_values(1.0, 1.1, 1.4, 0.125).final_bound;
  CHECK(certificate_from_values(1.0, 1.2, 1.4, 0.125).final_bound <= base);
  CHECK(certificate_from_values(1.0, 1.1, 1.6, 0.125).final_bound >= base);
  CHECK(base <= std::exp(-1.0) * (1.0 - 0.125) + 1e-15);
}

TEST_CASE("certificate on the reference family") {
  auto fam = reference_family(10000);
  auto cert = certificate(fam, 10000, 0.0);
  CHECK(cert.kappa == 1.0);
  CHECK(cert.R_term == 0.125);
  CHECK_FALSE(cert.conservative);
  CHECK(cert.ez2 >= 1.0);
  CHECK(cert.final_bound > cert.asymptote);
  CHECK(cert.asymptote == doctest::Approx(0.27333).epsilon(1e-4));
  // forcing ez2 to kappa^2 recovers the clean-limit identity exactly
  auto forced = certificate(fam, 10000, 0.0, 1.0);
  CHECK(forced.final_bound ==
        doctest::Approx(std::exp(-1.0) * (1.0 - 0.125)).epsilon(1e-12));
}

TEST_CASE("sandwich is an identity for sign families") {
  auto fam = reference_family(1000);
  auto rep = check_lemma_sandwich(fam, 5, 2000, 9);
  CHECK(rep.filtered_y == 5);
  CHECK(std::abs(rep.worst_upper_margin) <= 1e-15);
  CHECK(std::abs(rep.worst_lower_margin) <= 1e-6);  // e^{-1/n} slack helps
  CHECK(rep.worst_lower_margin >= 0.0);
  CHECK(rep.pass);
}

TEST_CASE("sandwich on the nonnegative synthetic family") {
  auto fam = build_family_nonneg_unit(16, 64);
  auto rep = check_lemma_sandwich(fam, 100, 10000, 13);
  CHECK(rep.filtered_y > 0);
  CHECK(rep.worst_upper_margin >= 0.0);
  CHECK(rep.worst_lower_margin >= 0.0);
  CHECK(rep.pass);
}

TEST_CASE("moment lemma checks") {
  // b = 0 gives W = 1 exactly
  const std::vector<double> a1 = {1.0};
  auto w0 = check_lemma_wjk(3, 1, 0.0, 1.0, a1, 1000, 5);
  CHECK(w0.W_hat == doctest::Approx(1.0));
  CHECK(w0.pass);
  // boundary case: exact 1.1
  auto w1 = check_lemma_wjk(1, 1, 0.1, 1.0, a1, 1000, 5);
  CHECK(w1.exact);
  CHECK(w1.premise == doctest::Approx(1.0));
  CHECK(w1.W_hat == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(w1.pass);
  // Monte-Carlo under the premise
  std::vector<double> aK(50, 1.0 / std::sqrt(50.0));
  auto w2 = check_lemma_wjk(10, 50, 0.01, 1.0, aK, 100000, 5);
  CHECK_FALSE(w2.exact);
  CHECK(w2.premise <= 1.0 + 1e-12);
  CHECK(w2.pass);
  // premise violation refused
  CHECK_THROWS(check_lemma_wjk(10, 50, 0.5, 1.0, aK, 1000, 5));
  // determinism
  auto w3 = check_lemma_wjk(10, 50, 0.01, 1.0, aK, 20000, 5);
  auto w4 = check_lemma_wjk(10, 50, 0.01, 1.0, aK, 20000, 5);
  CHECK(w3.W_hat == w4.W_hat);
}

TEST_CASE("general-branch budget on the nonnegative family") {
  auto fam = build_family_nonneg_unit(16, 64);
  auto b1 = chi_budget(fam, 64, 0.0, ChiMode::GeneralBranchBound, 20000, 3);
  auto b2 = chi_budget(fam, 64, 0.0, ChiMode::GeneralBranchBound, 20000, 3);
  CHECK(b1.value == b2.value);  // determinism
  CHECK(b1.value >= 1.0);
  // half cosh + half bounded Upsilon term stays modest under the premise
  CHECK(b1.value <= 2.0);
  CHECK_THROWS(chi_budget(fam, 64, 0.0, ChiMode::ExactEnum));
  auto sign_fam = reference_family(1000);
  CHECK_THROWS(
      chi_budget(sign_fam, 1000, 0.0, ChiMode::GeneralBranchBound));
}
