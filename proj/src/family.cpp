#include "l2lb/family.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "l2lb/nikolskii.hpp"
#include "l2lb/quadrature.hpp"

namespace l2lb {

namespace {

// Separable representation of the smoothed-uniform density with given N, a.
SeparableFn smoothed_uniform_separable(int d, double N, double a,
                                       double coefficient) {
  SeparableFn s;
  for (int j = 0; j < d; ++j) {
    const double c = (j == 0) ? coefficient : 1.0;
    s.factors.push_back(
        [N, a, c](double x) { return c * (a / N) * plateau_factor(N, a * x); });
    s.breakpoints.push_back(
        {0.0, 1.0 / a, 2.0 / a, N / a, (N + 1.0) / a, (N + 2.0) / a});
  }
  return s;
}

// Vanishing-width far component of the shrunk composite (limit form),
// reflected to the negative orthant.
SeparableFn far_component_separable(int d, double a, double coefficient) {
  const auto& prof = MollifierProfile::instance();
  SeparableFn s;
  for (int j = 0; j < d; ++j) {
    const double c = (j == 0) ? coefficient : 1.0;
    s.factors.push_back(
        [&prof, a, c](double x) { return c * a * prof.density(1.0 + a * x); });
    s.breakpoints.push_back({-2.0 / a, -1.0 / a, 0.0});
  }
  return s;
}

// Near component: coefficient * prod_j (a/N) g_N(a x_j / h_j).
SeparableFn near_component_separable(int d, double N, double a,
                                     std::span<const double> h,
                                     double coefficient) {
  SeparableFn s;
  for (int j = 0; j < d; ++j) {
    const double c = (j == 0) ? coefficient : 1.0;
    const double hj = h[static_cast<std::size_t>(j)];
    s.factors.push_back([N, a, c, hj](double x) {
      return c * (a / N) * plateau_factor(N, a * x / hj);
    });
    std::vector<double> bp;
    for (double b : {0.0, 1.0, 2.0, N, N + 1.0, N + 2.0})
      bp.push_back(b * hj / a);
    s.breakpoints.push_back(bp);
  }
  return s;
}

bool separable_in_ball(const SeparableFn& s, const ClassParams& theta,
                       const ClassParams& theta_prime, double scale) {
  const double u_hi = 16.0;
  const auto u = default_u_grid(1e-3, u_hi, 32);
  for (const ClassParams* th : {&theta, &theta_prime}) {
    const auto rep = membership_check_separable(s, *th, scale, u, 1e-2);
    if (!rep.verdict) return false;
    // shifts beyond the grid: ‖Δ^k_u‖ <= 2^k ‖G‖, so the ratio past u_hi
    // is dominated by 2^k norm / u_hi^beta
    for (const auto& dir : rep.per_direction) {
      const auto ju = static_cast<std::size_t>(dir.j);
      const double tail = std::pow(2.0, dir.k) * dir.norm_value /
                          std::pow(u_hi, th->beta[ju]);
      if (tail > scale * th->L[ju] * (1.0 + rep.tolerance)) return false;
    }
  }
  return true;
}

double ln_amplitude(long n, double z) {
  // ln of (sqrt(ln n)/n)^{2z}
  const double ln_n = std::log(static_cast<double>(n));
  return 2.0 * z * (0.5 * std::log(ln_n) - ln_n);
}

void finalize_lattice(PerturbationFamily& fam,
                      const std::vector<double>& width) {
  fam.lattice_caps.resize(static_cast<std::size_t>(fam.theta.d));
  double log_capacity = 0.0;
  for (int l = 0; l < fam.theta.d; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    const double slots = std::floor(width[lu] / fam.sigma[lu]);
    if (slots < 1.0)
      throw std::runtime_error("family: lattice axis admits no bump");
    fam.lattice_caps[lu] = slots > 4e18 ? static_cast<long>(4e18)
                                        : static_cast<long>(slots);
    log_capacity += std::log(slots);
  }
  if (log_capacity < std::log(static_cast<double>(fam.M)))
    throw std::runtime_error("family: lattice capacity below bump count");
}

void finalize_prior_free_stats(PerturbationFamily& fam) {
  fam.sigma_prod = 1.0;
  for (double s : fam.sigma) fam.sigma_prod *= s;
  fam.plateau = fam.base.plateau_value();
  fam.base_l2 = fam.base.lp_norm(2.0);
  fam.S_value = fam.A * fam.A * fam.sigma_prod * fam.shape.l2_norm *
                fam.shape.l2_norm / fam.plateau;
}

// Separation |‖f_y‖_2 - ‖f_0‖_2| from the orthogonal decomposition.
double closed_form_separation(const PerturbationFamily& fam) {
  const double b = fam.base_l2;
  const double s2 = fam.A * fam.A * fam.sigma_prod *
                    static_cast<double>(fam.M) * fam.shape.l2_norm *
                    fam.shape.l2_norm;
  return std::sqrt(b * b + s2) - b;
}

}  // namespace

std::vector<double> PerturbationFamily::center(long m) const {
  if (m < 0 || m >= M) throw std::out_of_range("center: index");
  std::vector<double> c(static_cast<std::size_t>(theta.d));
  long rem = m;
  for (int l = 0; l < theta.d; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    const long i = rem % lattice_caps[lu];
    rem /= lattice_caps[lu];
    c[lu] = lattice_origin[lu] + sigma[lu] * (static_cast<double>(i) + 0.5);
  }
  return c;
}

long PerturbationFamily::locate(std::span<const double> x) const {
  long m = 0, stride = 1;
  for (int l = 0; l < theta.d; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    const double rel = (x[lu] - lattice_origin[lu]) / sigma[lu];
    if (rel < 0.0) return -1;
    const double fi = std::floor(rel);
    if (fi >= static_cast<double>(lattice_caps[lu])) return -1;
    m += static_cast<long>(fi) * stride;
    stride *= lattice_caps[lu];
  }
  return m < M ? m : -1;
}

double PerturbationFamily::rho_y(std::span<const double> y) const {
  if (lambda_value == 0.0) return 0.0;
  double s = 0.0;
  for (double v : y) s += v;
  return lambda_value * s;
}

double PerturbationFamily::eval(std::span<const double> y,
                                std::span<const double> x) const {
  const double f0 = base(x);
  double bump = 0.0;
  const long m = locate(x);
  if (m >= 0 && m < static_cast<long>(y.size())) {
    std::vector<double> v(static_cast<std::size_t>(theta.d));
    const auto c = center(m);
    for (int l = 0; l < theta.d; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      v[lu] = (x[lu] - c[lu]) / sigma[lu];
    }
    bump = A * y[static_cast<std::size_t>(m)] * shape(v);
  }
  return (1.0 - rho_y(y)) * f0 + bump;
}

std::vector<double> PerturbationFamily::draw_y(Rng& rng) const {
  std::vector<double> y(static_cast<std::size_t>(M));
  for (auto& v : y)
    v = prior.kind == PriorSpec::Kind::Rademacher
            ? static_cast<double>(rng.sign())
            : (rng.bernoulli(prior.p) ? 1.0 : 0.0);
  return y;
}

std::vector<double> PerturbationFamily::sample(std::span<const double> y,
                                               long count, Rng& rng) const {
  if (static_cast<long>(y.size()) != M)
    throw std::invalid_argument("sample: y size mismatch");
  const auto d = static_cast<std::size_t>(theta.d);
  std::vector<double> out(static_cast<std::size_t>(count) * d);
  std::vector<double> v(d);
  if (prior.kind == PriorSpec::Kind::BernoulliOnUnit) {
    // additive mixture: (1 - rho_y) f0 + sum_m y_m A Lambda_m
    const double rho = rho_y(y);
    std::vector<long> active;
    for (long m = 0; m < M; ++m)
      if (y[static_cast<std::size_t>(m)] != 0.0) active.push_back(m);
    for (long i = 0; i < count; ++i) {
      double* row = out.data() + static_cast<std::size_t>(i) * d;
      if (rng.uniform() >= rho || active.empty()) {
        auto x = base.sample(1, rng);
        std::copy(x.begin(), x.end(), row);
      } else {
        const long m = active[rng.below(active.size())];
        const auto c = center(m);
        for (;;) {  // v ~ Lambda by rejection, sup Lambda = 1
          for (auto& vi : v) vi = rng.uniform(-0.5, 0.5);
          if (rng.uniform() < shape(v)) break;
        }
        for (std::size_t l = 0; l < d; ++l) row[l] = c[l] + sigma[l] * v[l];
      }
    }
    return out;
  }
  // sign prior: zero-mean bumps riding the exact plateau.  Cell region
  // carries mass M * sigma_prod * plateau; within a cell the density is
  // plateau + A y_m Lambda(v) <= plateau + A.
  const double cell_mass =
      static_cast<double>(M) * sigma_prod * plateau;
  for (long i = 0; i < count; ++i) {
    double* row = out.data() + static_cast<std::size_t>(i) * d;
    if (rng.uniform() >= cell_mass) {
      for (;;) {  // base conditioned outside the bump region
        auto x = base.sample(1, rng);
        if (locate(std::span<const double>(x.data(), d)) < 0) {
          std::copy(x.begin(), x.end(), row);
          break;
        }
      }
    } else {
      const long m = static_cast<long>(rng.below(static_cast<unsigned long>(M)));
      const auto c = center(m);
      const double ym = y[static_cast<std::size_t>(m)];
      for (;;) {
        for (auto& vi : v) vi = rng.uniform(-0.5, 0.5);
        const double accept = (plateau + A * ym * shape(v)) / (plateau + A);
        if (rng.uniform() < accept) break;
      }
      for (std::size_t l = 0; l < d; ++l) row[l] = c[l] + sigma[l] * v[l];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// construction I

PerturbationFamily build_family_I(const ClassParams& theta,
                                  const ClassParams& theta_prime, long n,
                                  double kappa) {
  theta.validate();
  theta_prime.validate();
  if (n < 3) throw std::invalid_argument("build_family_I: n must be >= 3");
  const auto rel = compare_thetas(theta, theta_prime);
  const auto rate = rate_exponent(theta);
  const auto rate_p = rate_exponent(theta_prime);
  if (rate.regime != Regime::ThetaPrime || rate_p.regime != Regime::ThetaPrime)
    throw std::invalid_argument(
        "build_family_I: both points must lie in the sparse-smoothness "
        "regime tau(2) >= 1, tau(1) > 2");
  if (!rel.in_theta_plus)
    throw std::invalid_argument(
        "build_family_I: theta' must have a strictly faster rate");
  const auto diag = smoothness_diagnostics(theta);
  const int d = theta.d;

  PerturbationFamily fam;
  fam.construction = 1;
  fam.theta = theta;
  fam.theta_prime = theta_prime;
  fam.n = n;
  fam.z = rel.z_theta;
  fam.z_prime = rel.z_theta_prime;
  fam.shape = make_bump(d, false);
  fam.prior = {PriorSpec::Kind::Rademacher, 0.5, 0.0};

  const std::array<ClassParams, 1> cal = {theta};
  fam.C1 = calibrate_C1(fam.shape, cal);

  const double A0 = std::exp(ln_amplitude(n, fam.z));

  // calibrate the plateau slope: largest a on a geometric ladder whose
  // smoothed uniform sits inside both half-radius balls
  double a = 0.5, N = 0.0;
  bool found = false;
  for (int it = 0; it < 20; ++it, a *= 0.7) {
    N = a * std::pow(A0, -1.0 / d);
    if (N < 8.0) break;
    auto s = smoothed_uniform_separable(d, N, a, 1.0);
    if (separable_in_ball(s, theta, theta_prime, 0.5)) {
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error(
        "build_family_I: no admissible plateau slope (n too small for the "
        "requested radii)");
  fam.a_cal = a;
  fam.N_cal = N;
  // snap the amplitude to the realized plateau so f0 + A y Lambda >= 0
  // holds exactly in floating point
  const double A = std::pow(a / N, d);
  fam.A = A;
  fam.base = BaseDensity::mollified_uniform(d, N, a);

  const double ln_bold_L = std::log(diag.bold_L);
  const double chi_coef = std::pow(fam.shape.l2_norm, 4.0) /
                          (2.0 * std::exp(diag.inv_beta * std::log(fam.C1) +
                                          ln_bold_L));
  const bool kappa_explicit = kappa > 0.0;
  double kappa1;
  if (kappa_explicit) {
    if (kappa >= std::pow(2.0, -d))
      throw std::invalid_argument("build_family_I: kappa must be < 2^-d");
    kappa1 = std::pow(a, d) * kappa;
  } else {
    // automatic choice: keep the information budget exponent at a safe
    // fraction of the detectable gap, respect the packing cap
    const double gap = fam.z_prime - fam.z;
    kappa1 = std::pow(0.15 * gap / chi_coef, 1.0 / (1.0 + diag.inv_omega));
    kappa1 = std::min(kappa1, 0.9 * std::pow(2.0, -d) * std::pow(a, d));
    kappa = kappa1 / std::pow(a, d);
  }
  fam.kappa = kappa;

  for (int attempt = 0;; ++attempt) {
    if (attempt > 60)
      throw std::runtime_error("build_family_I: no feasible kappa");
    fam.kappa1 = kappa1;
    // M = C1^{1/beta} bold_L A^{-tau(1)} kappa1^{1 - 1/omega}
    const double ln_M = diag.inv_beta * std::log(fam.C1) + ln_bold_L -
                        diag.tau(1.0) * std::log(A) +
                        (1.0 - diag.inv_omega) * std::log(kappa1);
    fam.M_real = std::exp(ln_M);
    if (!(fam.M_real >= 2.0 && fam.M_real < 9e18))
      throw std::runtime_error("build_family_I: bump count out of range");
    fam.M = static_cast<long>(std::floor(fam.M_real));
    fam.rounding_slack = fam.M_real / static_cast<double>(fam.M) - 1.0;

    fam.sigma.assign(static_cast<std::size_t>(d), 0.0);
    bool sigma_ok = true;
    for (int l = 0; l < d; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      const double bl = theta.beta[lu];
      const double irl = recip(theta.r[lu]);
      const double lnsig = (-std::log(fam.C1 * theta.L[lu]) +
                            (1.0 - irl) * std::log(A) +
                            irl * std::log(kappa1)) /
                           bl;
      fam.sigma[lu] = std::exp(lnsig);
      sigma_ok = sigma_ok && fam.sigma[lu] <= 1.0;
    }
    if (sigma_ok) break;
    if (kappa_explicit)
      throw std::runtime_error(
          "build_family_I: supplied kappa yields a bandwidth above 1");
    kappa1 *= 0.5;
    kappa = kappa1 / std::pow(a, d);
    fam.kappa = kappa;
    if (kappa1 < 1e-300)
      throw std::runtime_error(
          "build_family_I: bandwidths exceed 1 (n too small)");
  }

  fam.lattice_origin.assign(static_cast<std::size_t>(d), 2.0 / a);
  finalize_lattice(fam, std::vector<double>(static_cast<std::size_t>(d),
                                            (N - 2.0) / a));
  finalize_prior_free_stats(fam);

  const double sep = closed_form_separation(fam);
  const double root_A = std::exp(0.5 * ln_amplitude(n, fam.z));
  fam.c4 = 0.95 * sep / (fam.kappa * root_A);
  fam.psi_n = 0.5 * fam.c4 * fam.kappa * root_A;
  fam.lambda_value = 0.0;
  fam.Sigma_M = fam.frakS_M = fam.frakD_M = 0.0;
  fam.delta = 0.0;
  return fam;
}

// ---------------------------------------------------------------------------
// construction II

PerturbationFamily build_family_II(const ClassParams& theta,
                                   const ClassParams& theta_prime, long n,
                                   double kappa, double delta) {
  theta.validate();
  theta_prime.validate();
  if (n < 3 || delta <= 0.0)
    throw std::invalid_argument("build_family_II: need n >= 3, delta > 0");
  const auto rel = compare_thetas(theta, theta_prime);
  if (!rel.in_regime_set_double_prime)
    throw std::invalid_argument(
        "build_family_II: pair must satisfy the dense-regime comparison "
        "conditions (both tau(2) < 1, tau(q) < 0, rho >= 1, q' <= q)");
  const auto diag = smoothness_diagnostics(theta);
  const int d = theta.d;
  const double q = theta.q;
  const double iq = recip(q);
  const double tau_q = diag.tau(q);
  const double ln_n = std::log(static_cast<double>(n));

  PerturbationFamily fam;
  fam.construction = 2;
  fam.theta = theta;
  fam.theta_prime = theta_prime;
  fam.n = n;
  fam.delta = delta;
  fam.z = rel.z_theta;
  fam.z_prime = rel.z_theta_prime;
  fam.shape = make_bump(d, false);
  fam.prior = {PriorSpec::Kind::Rademacher, 0.5, 0.0};

  const std::array<ClassParams, 1> cal = {theta};
  fam.C1 = calibrate_C1(fam.shape, cal);

  // per-axis overlap exponents rho_l (their sum is rel.rho)
  std::vector<double> rho_l(static_cast<std::size_t>(d));
  for (int l = 0; l < d; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    const double t1 = (recip(theta.r[lu]) - recip(theta.q)) / theta.beta[lu];
    const double t2 = (recip(theta_prime.r[lu]) - recip(theta_prime.q)) /
                      theta_prime.beta[lu];
    rho_l[lu] = std::min(t1, t2);
  }

  // bump count from the dense-regime display
  const double ln_M0 = tau_q / (2.0 - 2.0 * iq - tau_q) *
                       (std::log(delta) + std::log(ln_n) - 2.0 * ln_n);
  fam.M_real = std::exp(ln_M0);
  if (!(fam.M_real >= 2.0 && fam.M_real < 9e18))
    throw std::runtime_error("build_family_II: bump count out of range");
  fam.M = static_cast<long>(std::floor(fam.M_real));
  fam.rounding_slack = fam.M_real / static_cast<double>(fam.M) - 1.0;

  // plateau slope from the vanishing-width far component
  double a = 0.5;
  {
    bool found = false;
    for (int it = 0; it < 20; ++it, a *= 0.7) {
      auto s = far_component_separable(d, a, 1.0);
      if (separable_in_ball(s, theta, theta_prime, 0.25)) {
        found = true;
        break;
      }
    }
    if (!found)
      throw std::runtime_error(
          "build_family_II: no admissible far-component slope");
  }
  fam.a_cal = a;
  const double N = 8.0;
  fam.N_cal = N;

  double c_small = kInf;
  for (int l = 0; l < d; ++l) {
    const auto lu = static_cast<std::size_t>(l);
    c_small = std::min(c_small, fam.C1 * std::min(theta.L[lu],
                                                  theta_prime.L[lu]));
  }
  c_small = std::min(c_small, 0.9);  // the composite needs c < 1

  const bool kappa_auto = kappa <= 0.0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 80)
      throw std::runtime_error("build_family_II: no feasible kappa / c");
    double k = kappa;
    if (kappa_auto) {
      k = 0.9 * c_small * std::pow(a / N, d);
      for (int l = 0; l < d; ++l) {
        const auto lu = static_cast<std::size_t>(l);
        k = std::min(k, 0.9 * fam.C1 * theta.L[lu]);
      }
      k = std::min(k, 0.5 * theta.Q);
      k *= std::pow(0.85, attempt);  // relax along the retry ladder
    } else if (attempt > 0) {
      throw std::runtime_error(
          "build_family_II: supplied kappa infeasible");
    }
    if (k >= c_small * std::pow(a / N, d) || k <= 0.0) {
      if (!kappa_auto)
        throw std::invalid_argument(
            "build_family_II: kappa must lie in (0, c a^d N^-d)");
      continue;
    }
    fam.kappa = k;

    // B = (kappa/C1)^{1/beta} M / bold_L must exceed 1 so that t < 1
    const double ln_B = diag.inv_beta * std::log(k / fam.C1) + ln_M0 -
                        std::log(diag.bold_L);
    if (ln_B <= 0.0)
      throw std::runtime_error(
          "build_family_II: shrink factor t >= 1; increase n or decrease "
          "delta");
    const double ln_t = ln_B / tau_q;  // negative
    fam.t = std::exp(ln_t);
    fam.A = k * std::exp(-iq * ln_t);

    fam.sigma.assign(static_cast<std::size_t>(d), 0.0);
    std::vector<double> h(static_cast<std::size_t>(d));
    bool geom_ok = true;
    for (int l = 0; l < d; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      const double bl = theta.beta[lu];
      const double irl = recip(theta.r[lu]);
      const double lnsig = (std::log(k / (fam.C1 * theta.L[lu])) +
                            (irl - iq) / tau_q * ln_B) /
                           bl;
      fam.sigma[lu] = std::exp(lnsig);
      h[lu] = std::exp(ln_t * rho_l[lu] / rel.rho);
      geom_ok = geom_ok && fam.sigma[lu] <= h[lu] && fam.sigma[lu] <= 1.0;
    }
    if (!geom_ok) {
      if (kappa_auto) continue;
      throw std::runtime_error(
          "build_family_II: bandwidth exceeds its window");
    }

    // the dilated near component must sit inside the quarter-radius balls;
    // shrink its coefficient if not
    double c_use = c_small;
    bool near_ok = false;
    for (int it = 0; it < 25; ++it, c_use *= 0.7) {
      if (k >= c_use * std::pow(a / N, d)) break;  // would break A <= P
      auto near = near_component_separable(d, N, a, h,
                                           c_use * std::exp(-iq * ln_t));
      if (separable_in_ball(near, theta, theta_prime, 0.25)) {
        near_ok = true;
        break;
      }
    }
    if (!near_ok) {
      if (kappa_auto) continue;
      throw std::runtime_error(
          "build_family_II: near component violates the quarter-radius "
          "balls");
    }
    fam.c_const = c_use;
    fam.base = BaseDensity::shrunk_composite(d, N, a, fam.t, c_use, q, n,
                                             std::vector<double>(h));
    fam.lattice_origin.resize(static_cast<std::size_t>(d));
    std::vector<double> width(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      fam.lattice_origin[lu] = 2.0 * h[lu] / a;
      width[lu] = (N - 2.0) * h[lu] / a;
    }
    finalize_lattice(fam, width);
    finalize_prior_free_stats(fam);

    // information budget: keep the pair-affinity exponent well below the
    // detectable gap 2(alpha - z)
    const double log_cosh = fam.M >= 1
                                ? static_cast<double>(fam.M) *
                                      (std::abs(n * fam.S_value) +
                                       std::log1p(std::exp(
                                           -2.0 * std::abs(n * fam.S_value))) -
                                       std::log(2.0))
                                : 0.0;
    if (log_cosh > 0.5 * 2.0 * (rel.alpha - rel.z_theta) * ln_n) {
      if (kappa_auto) continue;
      throw std::runtime_error(
          "build_family_II: information budget exceeded for this kappa");
    }
    break;
  }
  fam.kappa1 = fam.kappa;  // reported as-is for the dense construction

  const double sep = closed_form_separation(fam);
  const double z2 = (1.0 - 2.0 * iq) / (2.0 - 2.0 * iq - tau_q);
  const double rate_n = std::exp(z2 * (0.5 * std::log(ln_n) - ln_n));
  fam.c16 = 0.95 * sep / rate_n;
  fam.psi_n = 0.5 * fam.c16 * rate_n;
  fam.c4 = 0.0;
  fam.lambda_value = 0.0;
  fam.Sigma_M = fam.frakS_M = fam.frakD_M = 0.0;
  return fam;
}

// ---------------------------------------------------------------------------
// synthetic nonnegative family

PerturbationFamily build_family_nonneg_unit(long M, long n, double budget) {
  if (M < 1 || n < 1 || budget <= 0.0 || budget > 1.0)
    throw std::invalid_argument("build_family_nonneg_unit: bad arguments");
  PerturbationFamily fam;
  fam.construction = 0;
  const int d = 1;
  fam.theta = ClassParams::isotropic(d, 0.4, 2.0, kInf);
  fam.theta_prime = fam.theta;
  fam.n = n;
  fam.M = M;
  fam.M_real = static_cast<double>(M);
  fam.shape = make_bump(d, true);
  fam.prior = {PriorSpec::Kind::BernoulliOnUnit, 0.5, 0.5};

  const double N = 8.0, a = 0.5;
  fam.base = BaseDensity::mollified_uniform(d, N, a);
  fam.a_cal = a;
  fam.N_cal = N;
  const double span = (N - 2.0) / a;  // plateau width
  const double sigma = std::min(1.0, span / static_cast<double>(M));
  fam.sigma = {sigma};
  fam.lattice_origin = {2.0 / a};
  finalize_lattice(fam, {span});

  // lambda = A sigma * integral(Lambda); sized so 256 lambda^2 M n = budget
  const double lambda =
      std::sqrt(budget / (256.0 * static_cast<double>(M) *
                          static_cast<double>(n)));
  fam.A = lambda / (sigma * fam.shape.integral);
  fam.lambda_value = lambda;
  fam.Sigma_M = fam.prior.first_moment * static_cast<double>(M) * lambda;
  fam.frakS_M = lambda;
  fam.frakD_M = std::sqrt(static_cast<double>(M)) * lambda;
  finalize_prior_free_stats(fam);
  fam.z = fam.z_prime = 0.0;
  fam.psi_n = 0.0;
  return fam;
}

// ---------------------------------------------------------------------------

NormReport functional_norms(const PerturbationFamily& fam,
                            std::span<const std::vector<double>> y_set) {
  NormReport rep;
  rep.f0_l2 = fam.base_l2;
  const double b2 = fam.base_l2 * fam.base_l2;
  const double unit2 = fam.A * fam.A * fam.sigma_prod * fam.shape.l2_norm *
                       fam.shape.l2_norm;
  const double cross_unit =
      fam.A * fam.plateau * fam.sigma_prod * fam.shape.integral;

  double min_sep = kInf;
  auto norm_for = [&](double rho, double w_sum, double w_sq) {
    const double sq = (1.0 - rho) * (1.0 - rho) * b2 +
                      2.0 * (1.0 - rho) * cross_unit * w_sum + unit2 * w_sq;
    return std::sqrt(std::max(sq, 0.0));
  };
  if (y_set.empty()) {
    // sign priors: ‖f_y‖ is the same for every y
    rep.fy_l2 = norm_for(0.0, 0.0, static_cast<double>(fam.M));
    min_sep = std::abs(rep.fy_l2 - rep.f0_l2);
  } else {
    for (const auto& y : y_set) {
      double w_sum = 0.0, w_sq = 0.0;
      for (double v : y) {
        w_sum += v;
        w_sq += v * v;
      }
      rep.fy_l2 = norm_for(fam.rho_y(y), w_sum, w_sq);
      min_sep = std::min(min_sep, std::abs(rep.fy_l2 - rep.f0_l2));
    }
  }
  rep.separation = min_sep;
  rep.sep_exceeds_2psi = fam.psi_n > 0.0 && min_sep >= 2.0 * fam.psi_n;

  // boundedness budget: triangle inequality in L_q
  const double q = fam.theta.q;
  const double mass_pow =
      std::isinf(q) ? 1.0
                    : std::pow(fam.sigma_prod * static_cast<double>(fam.M),
                               recip(q));
  rep.fy_q = fam.base.lp_norm(q) + fam.A * mass_pow * fam.shape.lp_norm(q);

  // numeric confirmation that a bump and the base do not interact (d = 1)
  if (fam.theta.d == 1 && fam.M >= 1) {
    const auto c = fam.center(0);
    const double s = fam.sigma[0];
    rep.cross_term = integrate(
        [&](double x) {
          const std::array<double, 1> p = {x};
          const std::array<double, 1> v = {(x - c[0]) / s};
          return fam.base(p) * fam.A * fam.shape(v);
        },
        c[0] - 0.5 * s, c[0] + 0.5 * s, 1e-14);
  }
  return rep;
}

std::vector<SeparableFn> base_separable_components(
    const PerturbationFamily& fam) {
  const int d = fam.theta.d;
  if (fam.base.kind == BaseDensity::Kind::MollifiedUniform)
    return {smoothed_uniform_separable(d, fam.base.N, fam.base.a, 1.0)};
  const double iq = recip(fam.base.q);
  const double far_w =
      1.0 - fam.base.c_const * std::pow(fam.base.t, 1.0 - iq);
  const double near_c = fam.base.c_const * std::pow(fam.base.t, -iq);
  return {far_component_separable(d, fam.base.a, far_w),
          near_component_separable(d, fam.base.N, fam.base.a,
                                   fam.base.h_vec, near_c)};
}

double total_integral_given_y(const PerturbationFamily& fam,
                              std::span<const double> y) {
  if (static_cast<long>(y.size()) != fam.M)
    throw std::invalid_argument("total_integral_given_y: y size mismatch");
  double w_sum = 0.0;
  for (double v : y) w_sum += v;
  // one-cell bump mass by tensor quadrature (all cells are translates)
  double cell_bump = fam.A * fam.sigma_prod;
  double shape_mass = 1.0;
  if (fam.theta.d == 1) {
    shape_mass = integrate(
        [&](double t) {
          const std::array<double, 1> v = {t};
          return fam.shape(v);
        },
        -0.5, 0.5, 1e-14);
  } else {
    // separable: product of per-axis (signed) factor integrals
    for (int j = 0; j < fam.theta.d; ++j)
      shape_mass *= integrate(
          [&, j](double t) { return fam.shape.axis_factor(j, t); }, -0.5, 0.5,
          1e-14);
  }
  cell_bump *= shape_mass;
  return (1.0 - fam.rho_y(y)) * fam.base.total_integral() + cell_bump * w_sum;
}

}  // namespace l2lb
