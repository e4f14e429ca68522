#include "l2lb/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "l2lb/nikolskii.hpp"
#include "l2lb/quadrature.hpp"

namespace l2lb {

namespace {

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// signed (base)^n in log magnitude; returns {log|value|, sign}
std::pair<double, int> signed_pow_n(double base, long n) {
  if (base == 0.0) return {-kInf, 0};
  const int sign = (base < 0.0 && (n % 2 != 0)) ? -1 : 1;
  return {static_cast<double>(n) * std::log(std::abs(base)), sign};
}

// alpha_n^2(c) when the family carries a genuine comparison pair
std::optional<double> family_alpha_sq(const PerturbationFamily& fam, long n,
                                      double c) {
  if (!(fam.z_prime > fam.z)) return std::nullopt;
  std::optional<double> alpha;
  if (c > 0.0) alpha = c * fam.z_prime;
  const auto rel = compare_thetas(fam.theta, fam.theta_prime, alpha);
  return rel.alpha_n_sq(n);
}

}  // namespace

std::vector<double> compute_Sm(const PerturbationFamily& fam, long max_m) {
  if (fam.plateau <= 0.0)
    throw std::runtime_error("compute_Sm: base vanishes on the bump region");
  const long count = std::min(fam.M, max_m);
  const int d = fam.theta.d;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long m = 0; m < count; ++m) {
    const auto c = fam.center(m);
    double val = 0.0;
    if (d == 1) {
      const double s = fam.sigma[0];
      const std::vector<double> bp = {c[0] - 0.5 * s, c[0] - 0.25 * s, c[0],
                                      c[0] + 0.25 * s, c[0] + 0.5 * s};
      val = integrate_pieces(
          [&](double x) {
            const std::array<double, 1> p = {x};
            const std::array<double, 1> v = {(x - c[0]) / s};
            const double f0 = fam.base(p);
            if (f0 <= 0.0)
              throw std::runtime_error("compute_Sm: base vanishes in a cell");
            const double b = fam.A * fam.shape(v);
            return b * b / f0;
          },
          bp, 1e-14);
    } else {
      // the base is exactly its plateau value on every cell; factorize
      std::vector<double> pc(c.begin(), c.end());
      const double f0 = fam.base(pc);
      if (f0 <= 0.0)
        throw std::runtime_error("compute_Sm: base vanishes in a cell");
      double prod = 1.0;
      for (int j = 0; j < d; ++j) {
        const double axis_sq = integrate(
            [&](double t) {
              const double u = fam.shape.axis_factor(j, t);
              return u * u;
            },
            -0.5, 0.5, 1e-13);
        prod *= fam.sigma[static_cast<std::size_t>(j)] * axis_sq;
      }
      val = fam.A * fam.A * prod / f0;
    }
    out[static_cast<std::size_t>(m)] = val;
  }
  return out;
}

// ---------------------------------------------------------------------------
// chi-square style budget kernels

double chi_enum_rademacher(std::span<const double> S, long n) {
  const auto M = S.size();
  if (M > 25)
    throw std::invalid_argument("chi_enum_rademacher: too many weights");
  const std::uint64_t total = 1ULL << M;
  long double acc = 0.0L;
  for (std::uint64_t w = 0; w < total; ++w) {
    double dot = 0.0;
    for (std::size_t m = 0; m < M; ++m)
      dot += (w >> m) & 1U ? S[m] : -S[m];
    const auto [lg, sg] = signed_pow_n(1.0 + dot, n);
    if (sg != 0) acc += sg * std::exp(static_cast<long double>(lg));
  }
  return static_cast<double>(acc / static_cast<long double>(total));
}

double chi_collapse_equal(long M, double S, long n) {
  if (M < 1) throw std::invalid_argument("chi_collapse_equal: M < 1");
  // value = sum_k C(M,k) 2^-M (1 + (2k - M) S)^n, windowed around the
  // tilted-binomial peak k* = (M + M tanh(nS))/2
  const double dM = static_cast<double>(M);
  long lo = 0, hi = M;
  if (M > 2000000) {
    const double shift = dM * std::tanh(static_cast<double>(n) * S);
    const double k_star = 0.5 * (dM + shift);
    const double half_width = 60.0 * std::sqrt(0.25 * dM) + 64.0;
    lo = static_cast<long>(std::max(0.0, std::floor(k_star - half_width)));
    hi = static_cast<long>(std::min(dM, std::ceil(k_star + half_width)));
  }
  const double ln2 = std::log(2.0);
  const double lgM = std::lgamma(dM + 1.0);
  double max_lg = -kInf;
  std::vector<double> lgs(static_cast<std::size_t>(hi - lo + 1));
  std::vector<int> sgs(static_cast<std::size_t>(hi - lo + 1));
  for (long k = lo; k <= hi; ++k) {
    const double dk = static_cast<double>(k);
    const double base = 1.0 + (2.0 * dk - dM) * S;
    const auto [lp, sg] = signed_pow_n(base, n);
    const double lg = lgM - std::lgamma(dk + 1.0) -
                      std::lgamma(dM - dk + 1.0) - dM * ln2 + lp;
    lgs[static_cast<std::size_t>(k - lo)] = lg;
    sgs[static_cast<std::size_t>(k - lo)] = sg;
    if (sg != 0) max_lg = std::max(max_lg, lg);
  }
  if (max_lg == -kInf) return 0.0;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < lgs.size(); ++i)
    if (sgs[i] != 0)
      acc += sgs[i] * std::exp(static_cast<long double>(lgs[i] - max_lg));
  if (acc <= 0.0L) return 0.0;
  return static_cast<double>(
      std::exp(static_cast<long double>(max_lg) + std::log(acc)));
}

double chi_cosh_product(std::span<const double> S, long n, int i_factor) {
  double lg = 0.0;
  for (double s : S)
    lg += log_cosh(static_cast<double>(i_factor) * static_cast<double>(n) * s);
  return std::exp(lg);
}

double chi_cosh_product_equal(long M, double S, long n, int i_factor) {
  return std::exp(static_cast<double>(M) *
                  log_cosh(static_cast<double>(i_factor) *
                           static_cast<double>(n) * S));
}

ChiBudget chi_budget(const PerturbationFamily& fam, long n, double c,
                     ChiMode mode, long mc_reps, std::uint64_t seed) {
  ChiBudget rep;
  rep.mode = mode;
  rep.n = n;
  const long keep = std::min<long>(fam.M, 64);
  rep.per_m.assign(static_cast<std::size_t>(keep), fam.S_value);

  const bool sign_prior = fam.prior.kind == PriorSpec::Kind::Rademacher;
  switch (mode) {
    case ChiMode::CoshProduct:
      if (!sign_prior)
        throw std::invalid_argument("chi_budget: CoshProduct needs the sign "
                                    "prior");
      rep.value = chi_cosh_product_equal(fam.M, fam.S_value, n, 1);
      break;
    case ChiMode::ExactEnum: {
      if (!sign_prior)
        throw std::invalid_argument("chi_budget: ExactEnum needs the sign "
                                    "prior");
      if (fam.M <= 20) {
        std::vector<double> S(static_cast<std::size_t>(fam.M), fam.S_value);
        rep.value = chi_enum_rademacher(S, n);
      } else {
        rep.value = chi_collapse_equal(fam.M, fam.S_value, n);
      }
      break;
    }
    case ChiMode::GeneralBranchBound: {
      if (sign_prior)
        throw std::invalid_argument(
            "chi_budget: GeneralBranchBound needs the nonnegative prior");
      const double budget = 256.0 * fam.frakS_M * fam.frakS_M *
                            static_cast<double>(fam.M) *
                            static_cast<double>(n);
      if (budget > 1.0)
        throw std::invalid_argument(
            "chi_budget: moment-lemma premise 256 S^2 M n <= 1 violated");
      const double first =
          0.5 * chi_cosh_product_equal(fam.M, fam.S_value, n, 2);
      // Monte-Carlo of (1 + 4(e+1) Upsilon^2)^n, Upsilon = rho_y - Sigma_M
      const double b = 4.0 * (std::exp(1.0) + 1.0);
      Rng rng(seed);
      double sum = 0.0, sum_sq = 0.0;
      for (long r = 0; r < mc_reps; ++r) {
        double ups = 0.0;
        for (long m = 0; m < fam.M; ++m)
          ups += fam.lambda_value *
                 (static_cast<double>(rng.bernoulli(fam.prior.p)) -
                  fam.prior.first_moment);
        const double term = std::exp(static_cast<double>(n) *
                                     std::log1p(b * ups * ups));
        sum += term;
        sum_sq += term * term;
      }
      const double mean = sum / static_cast<double>(mc_reps);
      const double var =
          std::max(0.0, sum_sq / static_cast<double>(mc_reps) - mean * mean);
      // the two Upsilon terms are iid copies, each weighted 1/4
      rep.value = first + 0.5 * mean;
      rep.mc_stderr =
          0.5 * std::sqrt(var / static_cast<double>(mc_reps));
      break;
    }
  }
  if (auto a2 = family_alpha_sq(fam, n, c)) {
    rep.alpha_sq = *a2;
    rep.ratio = rep.value / *a2;
  } else {
    rep.alpha_sq = 0.0;
    rep.ratio = rep.value;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// assumption checklist

AssumptionChecklist verify_assumptions(const PerturbationFamily& fam, long n,
                                       long y_mc, std::uint64_t seed) {
  if (y_mc < 100)
    throw std::invalid_argument("verify_assumptions: y_mc must be >= 100");
  AssumptionChecklist rep;
  Rng rng(seed);
  const int d = fam.theta.d;

  // A1/A2: bump rectangles tile a region where the base equals its
  // (positive) plateau value exactly; spot-check random cells
  {
    long ok = 0;
    const long probes = 50;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (long i = 0; i < probes; ++i) {
      const long m =
          static_cast<long>(rng.below(static_cast<std::uint64_t>(fam.M)));
      const auto c = fam.center(m);
      bool cell_ok = true;
      for (int corner = 0; corner < 2; ++corner) {
        for (int l = 0; l < d; ++l)
          x[static_cast<std::size_t>(l)] =
              c[static_cast<std::size_t>(l)] +
              (corner ? 0.499 : -0.499) * fam.sigma[static_cast<std::size_t>(l)];
        cell_ok = cell_ok && fam.base(x) == fam.plateau;
      }
      ok += cell_ok;
    }
    rep.a1_disjoint_supports = {ok == probes,
                               static_cast<double>(ok) /
                                   static_cast<double>(probes),
                               1.0};
    rep.a2_positive_base = {fam.plateau > 0.0, fam.plateau, 0.0};
  }

  // A3: class membership of f_y at full radii via the half/half split
  bool member = true;
  {
    const auto components = base_separable_components(fam);
    const double per_comp = 0.5 / static_cast<double>(components.size());
    const auto u = default_u_grid(1e-3, 16.0, 32);
    for (const ClassParams* th : {&fam.theta, &fam.theta_prime}) {
      std::vector<double> ratio_sum(static_cast<std::size_t>(d), 0.0);
      std::vector<double> norm_sum(static_cast<std::size_t>(d), 0.0);
      for (const auto& comp : components) {
        const auto r = membership_check_separable(comp, *th, per_comp, u,
                                                  1e-2);
        for (int j = 0; j < d; ++j) {
          const auto ju = static_cast<std::size_t>(j);
          ratio_sum[ju] += std::max(
              r.per_direction[ju].worst_ratio,
              std::pow(2.0, r.per_direction[ju].k) *
                  r.per_direction[ju].norm_value /
                  std::pow(16.0, th->beta[ju]));
          norm_sum[ju] += r.per_direction[ju].norm_value;
        }
      }
      BumpSumSpec spec{&fam.shape, fam.A, fam.sigma, fam.M};
      const auto rb = membership_check_bump_sum(spec, *th, 0.5, u, 1e-2);
      for (int j = 0; j < d; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double cap = th->L[ju] * (1.0 + 1e-2);
        member = member &&
                 ratio_sum[ju] + rb.per_direction[ju].worst_ratio <= cap &&
                 norm_sum[ju] + rb.per_direction[ju].norm_value <= cap;
      }
    }
    // L_q budget via the triangle inequality
    const auto nr = functional_norms(fam, {});
    member = member && nr.fy_q <= fam.theta.Q * (1.0 + 1e-9);
  }
  // the bounds above hold uniformly over sign patterns, so every drawn y
  // yields the same verdict and the frequency estimate is degenerate
  {
    rep.y_draws = y_mc;
    const double freq = member ? 1.0 : 0.0;
    rep.a3_class_mass = {freq >= kMassThreshold, freq, kMassThreshold};
    rep.a3_mc_error =
        std::sqrt(freq * (1.0 - freq) / static_cast<double>(y_mc));
  }

  // A4: L2 separation of every f_y from the base against 2 psi_n
  {
    const auto nr = functional_norms(fam, {});
    const double freq =
        fam.psi_n > 0.0 && nr.separation >= 2.0 * fam.psi_n ? 1.0 : 0.0;
    rep.a4_separation_mass = {freq >= kMassThreshold, freq, kMassThreshold};
  }

  // A5 per branch
  rep.a5_branch = fam.lambda_value == 0.0 ? LambdaBranch::ZeroLambda
                                          : LambdaBranch::NonnegUnit;
  const double budget = 256.0 * fam.frakS_M * fam.frakS_M *
                        static_cast<double>(fam.M) * static_cast<double>(n);
  rep.a5_sigma_bound = {fam.Sigma_M <= 0.25, fam.Sigma_M, 0.25};
  rep.a5_budget = {budget <= 1.0, budget, 1.0};
  return rep;
}

// ---------------------------------------------------------------------------
// certificate

Certificate certificate_from_values(double kappa, double ez2,
                                    double alpha_sq, double R_term) {
  Certificate cert;
  cert.kappa = kappa;
  cert.R_term = R_term;
  cert.ez2 = ez2;
  cert.alpha_sq = alpha_sq;
  if (ez2 < kappa * kappa * (1.0 - 1e-12))
    throw std::runtime_error(
        "certificate: E[Z^2] below kappa^2 contradicts Cauchy-Schwarz");
  const double rad =
      std::max(ez2 - 2.0 * alpha_sq * kappa + alpha_sq * alpha_sq, 0.0);
  cert.ez_min_bound = 0.5 * (kappa + alpha_sq - std::sqrt(rad));
  cert.final_bound =
      std::max(0.0, std::exp(-1.0) * (cert.ez_min_bound - R_term));
  return cert;
}

Certificate certificate(const PerturbationFamily& fam, long n, double c,
                        std::optional<double> ez2_override) {
  const bool zero_lambda = fam.lambda_value == 0.0;
  const double kappa = zero_lambda ? 1.0 : kKappaGeneralBound;
  const double R_term = zero_lambda ? 0.125 : std::sqrt(2.0) / 8.0;

  double ez2;
  bool conservative;
  if (ez2_override) {
    ez2 = *ez2_override;
    conservative = false;
  } else if (zero_lambda) {
    ez2 = chi_budget(fam, n, c, ChiMode::ExactEnum).value;
    conservative = false;
  } else {
    ez2 = chi_budget(fam, n, c, ChiMode::GeneralBranchBound).value;
    conservative = true;
  }
  const auto a2 = family_alpha_sq(fam, n, c);
  if (!a2)
    throw std::invalid_argument(
        "certificate: family lacks a comparison pair with z' > z");
  Certificate cert = certificate_from_values(kappa, ez2, *a2, R_term);
  cert.conservative = conservative;
  return cert;
}

// ---------------------------------------------------------------------------
// lemma checks

SandwichReport check_lemma_sandwich(const PerturbationFamily& fam, long y_mc,
                                    long grid_points, std::uint64_t seed) {
  if (fam.theta.d != 1)
    throw std::invalid_argument("check_lemma_sandwich: implemented for d=1");
  SandwichReport rep;
  rep.total_y = y_mc;
  rep.grid_points = grid_points;
  Rng rng(seed);
  const bool composite =
      fam.base.kind == BaseDensity::Kind::ShrunkComposite;
  const double lo = composite ? -2.0 / fam.base.a : 0.0;
  double h_max = 1.0;
  if (composite)
    for (double h : fam.base.h_vec) h_max = std::max(h_max, h);
  const double hi = (fam.base.N + 2.0) * (composite ? h_max : 1.0) /
                    fam.base.a;
  const double shrink = std::exp(-1.0 / static_cast<double>(fam.n));
  const double one_m_sigma = 1.0 - fam.Sigma_M;
  double worst_up = kInf, worst_lo = kInf;
  for (long i = 0; i < y_mc; ++i) {
    auto y = fam.draw_y(rng);
    const double rho = fam.rho_y(y);
    if (std::abs(rho - fam.Sigma_M) > 12.0 * fam.frakD_M) continue;
    ++rep.filtered_y;
    const double star_coef =
        one_m_sigma * std::exp(-(rho - fam.Sigma_M) / one_m_sigma);
    for (long g = 0; g < grid_points; ++g) {
      const double x = lo + (hi - lo) * (static_cast<double>(g) + 0.5) /
                                static_cast<double>(grid_points);
      const std::array<double, 1> p = {x};
      const double f0 = fam.base(p);
      double bump = 0.0;
      const long m = fam.locate(p);
      if (m >= 0) {
        const auto cc = fam.center(m);
        const std::array<double, 1> v = {(x - cc[0]) / fam.sigma[0]};
        bump = fam.A * y[static_cast<std::size_t>(m)] * fam.shape(v);
      }
      const double fy = (1.0 - rho) * f0 + bump;
      const double fstar = star_coef * f0 + bump;
      worst_up = std::min(worst_up, fstar - fy);
      worst_lo = std::min(worst_lo, fy - shrink * fstar);
    }
  }
  rep.worst_upper_margin = worst_up == kInf ? 0.0 : worst_up;
  rep.worst_lower_margin = worst_lo == kInf ? 0.0 : worst_lo;
  const double tol = 1e-13 * std::max(1.0, fam.plateau + fam.A);
  rep.pass = rep.worst_upper_margin >= -tol && rep.worst_lower_margin >= -tol;
  return rep;
}

WjkReport check_lemma_wjk(long J, long K, double b, double T,
                          std::span<const double> a_vec, long reps,
                          std::uint64_t seed) {
  if (J < 1 || K < 1 || b < 0.0 || T <= 0.0 ||
      static_cast<long>(a_vec.size()) != K)
    throw std::invalid_argument("check_lemma_wjk: bad arguments");
  double a_max = 0.0;
  for (double a : a_vec) a_max = std::max(a_max, std::abs(a));
  WjkReport rep;
  rep.premise = 2.0 * b * static_cast<double>(J) * 5.0 * T * T * a_max *
                a_max * static_cast<double>(K);
  if (rep.premise > 1.0)
    throw std::invalid_argument(
        "check_lemma_wjk: premise 2bJ*5T^2A^2K <= 1 violated; the bound is "
        "not claimed there");
  const double dJ = static_cast<double>(J);
  auto value_of = [&](double chi) {
    return std::exp(dJ * std::log1p(b * chi * chi));
  };
  if (K <= 20) {
    rep.exact = true;
    const std::uint64_t total = 1ULL << K;
    long double acc = 0.0L;
    for (std::uint64_t w = 0; w < total; ++w) {
      double chi = 0.0;
      for (long k = 0; k < K; ++k)
        chi += ((w >> k) & 1U ? T : -T) * a_vec[static_cast<std::size_t>(k)];
      acc += value_of(chi);
    }
    rep.W_hat = static_cast<double>(acc / static_cast<long double>(total));
    rep.stderr_value = 0.0;
  } else {
    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (long r = 0; r < reps; ++r) {
      double chi = 0.0;
      for (long k = 0; k < K; ++k)
        chi += T * static_cast<double>(rng.sign()) *
               a_vec[static_cast<std::size_t>(k)];
      const double v = value_of(chi);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(reps);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(reps) - mean * mean);
    rep.W_hat = mean;
    rep.stderr_value = std::sqrt(var / static_cast<double>(reps));
  }
  rep.pass = rep.W_hat + 3.0 * rep.stderr_value <= 2.0;
  return rep;
}

}  // namespace l2lb
