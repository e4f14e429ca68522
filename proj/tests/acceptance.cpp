// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "l2lb/json_io.hpp"

using namespace l2lb;

namespace {

int g_failures = 0;

class Criterion {
 public:
  explicit Criterion(int id, const char* title) : id_(id), title_(title) {
    start_ = std::chrono::steady_clock::now();
  }
  void fail(const std::string& why) {
    ok_ = false;
    if (!why_.empty()) why_ += "; ";
    why_ += why;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
  ~Criterion() {
    const auto dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
    std::printf("criterion %d (%s): %s  [%.1f s]%s%s\n", id_, title_,
                ok_ ? "PASS" : "FAIL", dt, ok_ ? "" : "  -- ",
                ok_ ? "" : why_.c_str());
    std::fflush(stdout);
    if (!ok_) ++g_failures;
  }

 private:
  int id_;
  const char* title_;
  bool ok_ = true;
  std::string why_;
  std::chrono::steady_clock::time_point start_;
};

bool rel_close(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

ClassParams random_params(Rng& rng, bool isotropic, bool sup_norm) {
  const int d = 1 + static_cast<int>(rng.below(4));
  ClassParams p;
  p.d = d;
  auto rand_r = [&]() -> double {
    const auto pick = rng.below(3);
    if (pick == 0) return kInf;
    if (pick == 1) return 1.0 + rng.uniform(0.0, 9.0);
    return 1.0;
  };
  if (isotropic) {
    p.beta.assign(static_cast<std::size_t>(d), rng.uniform(0.05, 3.0));
    p.r.assign(static_cast<std::size_t>(d), rand_r());
    p.L.assign(static_cast<std::size_t>(d), 1.0);
  } else {
    for (int j = 0; j < d; ++j) {
      p.beta.push_back(rng.uniform(0.05, 3.0));
      p.r.push_back(rand_r());
      p.L.push_back(rng.uniform(0.5, 4.0));
    }
  }
  p.q = sup_norm ? kInf
                 : (rng.below(2) ? kInf : 2.0 + rng.uniform(0.0, 18.0));
  return p;
}

ClassParams ref_theta() { return ClassParams::isotropic(1, 0.4, 2.0, kInf); }
ClassParams ref_theta_prime() {
  return ClassParams::isotropic(1, 0.45, 2.0, kInf);
}

void criterion_1() {
  Criterion c(1, "rate-calculus consistency");
  Rng rng(1001);
  for (int it = 0; it < 10000; ++it) {
    const bool iso = rng.below(2) == 0;
    const auto theta = random_params(rng, iso, /*sup_norm=*/true);
    const auto rep = rate_exponent(theta);
    const double z4 = rate_exponent_sup_norm(theta);
    if (!rel_close(rep.z, z4, 1e-12)) {
      c.fail("general formula disagrees with the sup-norm closed form");
      break;
    }
    if (theta.is_isotropic()) {
      const double z8 = rate_exponent_isotropic_sup_norm(theta);
      if (!rel_close(z4, z8, 1e-12)) {
        c.fail("sup-norm form disagrees with the isotropic four-branch form");
        break;
      }
    }
    // zone conditions evaluated independently of the classifier
    const auto s = smoothness_diagnostics(theta);
    const bool zone1 = s.tau(2.0) >= 1.0;
    const bool zone2 = s.tau(2.0) < 1.0 && s.tau(theta.q) < 0.0;
    const bool zone3 = s.tau(2.0) < 1.0 && s.tau(theta.q) >= 0.0;
    const int hits = (zone1 ? 1 : 0) + (zone2 ? 1 : 0) + (zone3 ? 1 : 0);
    if (hits != 1) {
      c.fail("zone conditions not a partition");
      break;
    }
    bool label_ok = false;
    switch (rep.regime) {
      case Regime::ThetaPrime: label_ok = zone1 && s.tau(1.0) > 2.0; break;
      case Regime::ThetaDoublePrime: label_ok = zone2; break;
      case Regime::ThetaTriplePrime: label_ok = zone3 && s.tau(kInf) < 0.0; break;
      case Regime::Parametric:
        label_ok = (zone1 && s.tau(1.0) <= 2.0) ||
                   (zone3 && s.tau(kInf) >= 0.0);
        break;
    }
    if (!label_ok) {
      c.fail("regime label inconsistent with the zone conditions");
      break;
    }
    // mixed-q draws keep the classifier total (no throw, finite z)
    const auto mixed = random_params(rng, iso, /*sup_norm=*/false);
    const auto mrep = rate_exponent(mixed);
    if (!(std::isfinite(mrep.z) && mrep.z > 0.0)) {
      c.fail("non-finite or non-positive exponent");
      break;
    }
  }
}

void criterion_2() {
  Criterion c(2, "sparse-regime construction verification");
  const auto fam = build_family_I(ref_theta(), ref_theta_prime(), 10000);
  const auto rep = verify_assumptions(fam, 10000, 200, 2024);
  c.require(rep.all_pass(), "assumption checklist failed");

  Rng rng(77);
  double worst_mass = 0.0;
  for (int it = 0; it < 200; ++it) {
    const auto y = fam.draw_y(rng);
    const double mass = total_integral_given_y(fam, y);
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
  }
  c.require(worst_mass <= 1e-6, "total mass off by " +
                                    std::to_string(worst_mass));

  const auto y = fam.draw_y(rng);
  const double hi =
      (fam.N_cal + 2.0) / fam.a_cal;
  double min_val = kInf;
  std::vector<double> x(1);
  for (long i = 0; i < 100000; ++i) {
    x[0] = hi * (static_cast<double>(i) + 0.5) / 100000.0;
    min_val = std::min(min_val, fam.eval(y, x));
  }
  c.require(min_val >= -1e-12, "density negative on the grid");

  // full-radius membership: base and bump superposition separately at
  // half scale each, for both parameter points
  const auto grid = default_u_grid(1e-3, 16.0, 48);
  const auto comps = base_separable_components(fam);
  BumpSumSpec bumps{&fam.shape, fam.A, fam.sigma, fam.M};
  for (const auto* th : {&fam.theta, &fam.theta_prime}) {
    for (const auto& comp : comps) {
      const auto m = membership_check_separable(
          comp, *th, 0.5 / static_cast<double>(comps.size()), grid);
      c.require(m.verdict, "base component outside the half-scale ball");
    }
    const auto mb = membership_check_bump_sum(bumps, *th, 0.5, grid);
    c.require(mb.verdict, "bump superposition outside the half-scale ball");
  }
}

void criterion_3() {
  Criterion c(3, "pair-affinity budget exactness and scaling");
  Rng rng(33);
  for (int it = 0; it < 60; ++it) {
    const long M = 1 + static_cast<long>(rng.below(20));
    const double s = rng.uniform(1e-5, 0.8 / static_cast<double>(M));
    const long n = 1 + static_cast<long>(rng.below(200));
    const std::vector<double> S(static_cast<std::size_t>(M), s);
    if (!rel_close(chi_enum_rademacher(S, n), chi_collapse_equal(M, s, n),
                   1e-10)) {
      c.fail("enumeration and collapse disagree");
      break;
    }
  }
  // large-M collapse stays within the analytic bracket
  const double large = chi_collapse_equal(1000000, 3e-9, 1000000);
  const double large_bound = chi_cosh_product_equal(1000000, 3e-9, 1000000, 1);
  c.require(large >= 1.0 && large <= large_bound * (1.0 + 1e-12),
            "large-M collapse escapes [1, cosh bound]");

  for (int it = 0; it < 100; ++it) {
    const long M = 1 + static_cast<long>(rng.below(12));
    const long n = 1 + static_cast<long>(rng.below(60));
    std::vector<double> S(static_cast<std::size_t>(M));
    for (auto& v : S) v = rng.uniform(0.0, 0.9 / static_cast<double>(M));
    if (chi_enum_rademacher(S, n) >
        chi_cosh_product(S, n, 1) * (1.0 + 1e-12)) {
      c.fail("exact budget exceeds the cosh product");
      break;
    }
  }

  double prev = kInf;
  for (long n : {1000L, 10000L, 100000L, 1000000L}) {
    const auto fam = build_family_I(ref_theta(), ref_theta_prime(), n);
    const auto b = chi_budget(fam, n, 0.0, ChiMode::ExactEnum);
    if (!(b.ratio < prev)) {
      c.fail("budget-to-normalization ratio not strictly decreasing at n=" +
             std::to_string(n));
      break;
    }
    prev = b.ratio;
  }
}

void criterion_4() {
  Criterion c(4, "certificate at n=1e6");
  const auto fam = build_family_I(ref_theta(), ref_theta_prime(), 1000000);
  const auto cert = certificate(fam, 1000000, 0.0);
  c.require(cert.final_bound >= 0.3,
            "final bound " + std::to_string(cert.final_bound) + " < 0.3");
  c.require(cert.final_bound > cert.asymptote,
            "final bound does not exceed the general-branch asymptote");
  c.require(cert.kappa == 1.0 && cert.R_term == 0.125,
            "wrong branch constants");
  const auto forced = certificate(fam, 1000000, 0.0, cert.kappa * cert.kappa);
  c.require(rel_close(forced.final_bound,
                      std::exp(-1.0) * (cert.kappa - 0.125), 1e-14),
            "clean-limit identity not recovered");
}

void criterion_5() {
  Criterion c(5, "moment bound");
  Rng rng(55);
  for (int it = 0; it < 20; ++it) {
    const long J = 1 + static_cast<long>(rng.below(30));
    const long K = 1 + static_cast<long>(rng.below(60));
    const double T = rng.uniform(0.2, 1.5);
    std::vector<double> a(static_cast<std::size_t>(K));
    double sup = 0.0;
    for (auto& v : a) {
      v = rng.uniform(-1.0, 1.0);
      sup = std::max(sup, std::abs(v));
    }
    const double cap = 1.0 / (2.0 * static_cast<double>(J) * 5.0 * T * T *
                              sup * sup * static_cast<double>(K));
    const double b = rng.uniform(0.0, cap);
    const auto w = check_lemma_wjk(J, K, b, T, a, 100000, 550 + it);
    if (!w.pass) {
      c.fail("W + 3 se exceeds 2 at configuration " + std::to_string(it));
      break;
    }
  }
  const std::vector<double> a1 = {1.0};
  const auto boundary = check_lemma_wjk(1, 1, 0.1, 1.0, a1, 1, 5);
  c.require(std::abs(boundary.W_hat - 1.1) <= 1e-3,
            "boundary value not 1.1");
}

void criterion_6() {
  Criterion c(6, "pointwise envelope");
  const auto sign_fam = build_family_I(ref_theta(), ref_theta_prime(), 10000);
  const auto sr = check_lemma_sandwich(sign_fam, 20, 10000, 61);
  c.require(sr.pass, "sign-family envelope failed");
  const double scale = sign_fam.plateau + sign_fam.A;
  c.require(std::abs(sr.worst_upper_margin) <= 16 *
                std::numeric_limits<double>::epsilon() * scale,
            "upper envelope is not a pointwise identity");

  const auto nn_fam = build_family_nonneg_unit(16, 64);
  const auto nr = check_lemma_sandwich(nn_fam, 120, 10000, 62);
  c.require(nr.filtered_y >= 100, "fewer than 100 draws pass the filter");
  c.require(nr.pass, "nonnegative-family envelope failed");
}

void criterion_7() {
  Criterion c(7, "two-class risk tradeoff");
  const std::vector<long> n_grid = {1000, 10000};
  std::vector<EstimatorSpec> specs;
  for (double h : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0})
    specs.push_back({{h}, true});
  const auto table = two_class_experiment(ref_theta(), ref_theta_prime(),
                                          n_grid, 0.0, 100, specs, 700);
  for (const auto& e : table.entries) {
    if (!e.above_certificate)
      c.fail("combined risk below the certificate at n=" +
             std::to_string(e.n) + ", h=" + std::to_string(e.h_ref));
    if (e.both_small)
      c.fail("both normalized terms small at n=" + std::to_string(e.n) +
             ", h=" + std::to_string(e.h_ref));
  }
  c.require(table.entries.size() == n_grid.size() * specs.size(),
            "missing table entries");
}

void criterion_8() {
  Criterion c(8, "seeded byte determinism");
  const auto fam = build_family_I(ref_theta(), ref_theta_prime(), 2000);
  auto render = [&](std::uint64_t seed) {
    json doc;
    doc["checklist"] =
        checklist_to_json(verify_assumptions(fam, 2000, 100, seed));
    std::vector<EstimatorSpec> specs = {{{0.01}, true}, {{0.3}, true}};
    const std::vector<long> ng = {500};
    doc["risk"] = risk_table_to_json(two_class_experiment(
        ref_theta(), ref_theta_prime(), ng, 0.0, 5, specs, seed));
    const auto nn = build_family_nonneg_unit(16, 64);
    doc["budget"] = chi_to_json(
        chi_budget(nn, 64, 0.0, ChiMode::GeneralBranchBound, 20000, seed));
    doc["envelope"] = sandwich_to_json(check_lemma_sandwich(nn, 50, 2000, seed));
    return canonical_dump(doc);
  };
  const std::string a = render(99), b = render(99), d = render(100);
  c.require(a == b, "repeated seed output differs");
  c.require(a != d, "seed does not influence the stochastic output");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures == 0) {
    std::printf("all acceptance criteria pass\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
