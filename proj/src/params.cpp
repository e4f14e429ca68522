#include "l2lb/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace l2lb {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ClassParams ClassParams::isotropic(int d, double beta, double r, double q,
                                   double L, double Q) {
  ClassParams p;
  p.d = d;
  p.beta.assign(static_cast<std::size_t>(d), beta);
  p.r.assign(static_cast<std::size_t>(d), r);
  p.q = q;
  p.L.assign(static_cast<std::size_t>(d), L);
  p.Q = Q;
  return p;
}

void ClassParams::validate() const {
  require(d >= 1, "ClassParams: d must be a positive integer");
  const auto n = static_cast<std::size_t>(d);
  require(beta.size() == n, "ClassParams: beta must have d entries");
  require(r.size() == n, "ClassParams: r must have d entries");
  require(L.size() == n, "ClassParams: L must have d entries");
  for (double b : beta)
    require(b > 0.0 && std::isfinite(b), "ClassParams: beta_j must be finite and > 0");
  for (double rj : r)
    require(rj >= 1.0, "ClassParams: r_j must lie in [1, inf]");
  require(q >= 2.0, "ClassParams: q must lie in [2, inf]");
  for (double lj : L)
    require(lj > 0.0 && std::isfinite(lj), "ClassParams: L_j must be finite and > 0");
  require(Q > 0.0 && std::isfinite(Q), "ClassParams: Q must be finite and > 0");
}

bool ClassParams::is_isotropic() const {
  for (int j = 1; j < d; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (beta[k] != beta[0] || r[k] != r[0] || L[k] != L[0]) return false;
  }
  return true;
}

SmoothnessDiagnostics smoothness_diagnostics(const ClassParams& theta) {
  theta.validate();
  SmoothnessDiagnostics s;
  for (int j = 0; j < theta.d; ++j) {
    const auto k = static_cast<std::size_t>(j);
    s.inv_omega += recip(theta.beta[k]) * recip(theta.r[k]);
    s.inv_beta += recip(theta.beta[k]);
    s.bold_L *= std::pow(theta.L[k], recip(theta.beta[k]));
  }
  return s;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::ThetaPrime: return "ThetaPrime";
    case Regime::ThetaDoublePrime: return "ThetaDoublePrime";
    case Regime::ThetaTriplePrime: return "ThetaTriplePrime";
    case Regime::Parametric: return "Parametric";
  }
  return "?";
}

RateReport rate_exponent(const ClassParams& theta) {
  const SmoothnessDiagnostics s = smoothness_diagnostics(theta);
  const double tau2 = s.tau(2.0);
  const double tauq = s.tau(theta.q);
  const double tau1 = s.tau(1.0);
  const double tau_inf = s.tau(kInf);
  RateReport out;
  if (tau2 >= 1.0) {
    out.z = std::min(0.5, 1.0 / tau1);
    out.regime = tau1 > 2.0 ? Regime::ThetaPrime : Regime::Parametric;
  } else if (tauq < 0.0) {
    const double iq = recip(theta.q);
    out.z = (1.0 - 2.0 * iq) / (2.0 - 2.0 * iq - tauq);
    out.regime = Regime::ThetaDoublePrime;
  } else {
    out.z = std::min(0.5, tau2 / tau1);
    out.regime = tau_inf < 0.0 ? Regime::ThetaTriplePrime : Regime::Parametric;
  }
  return out;
}

double rate_exponent_sup_norm(const ClassParams& theta) {
  const SmoothnessDiagnostics s = smoothness_diagnostics(theta);
  const double tau2 = s.tau(2.0);
  const double tau_inf = s.tau(kInf);
  if (tau2 >= 1.0) return std::min(0.5, 1.0 / s.tau(1.0));
  if (tau_inf < 0.0) return 1.0 / (2.0 - tau_inf);
  return 0.5;
}

double rate_exponent_isotropic_sup_norm(const ClassParams& theta) {
  theta.validate();
  if (!theta.is_isotropic())
    throw std::invalid_argument("rate_exponent_isotropic_sup_norm: anisotropic input");
  const double b = theta.beta[0];
  const double r = theta.r[0];
  const double d = theta.d;
  if (std::isinf(r)) {
    // limit of the r >= 2 branch: beta*r vs d(r-1) compares beta vs d
    if (b < d) return b / (b + d);
    return 0.5;
  }
  const double br = b * r;
  if (r >= 2.0) {
    if (br < d * (r - 1.0)) return br / (br + d * (r - 1.0));
    return 0.5;
  }
  if (br < d) return br / (br + d);
  return 0.5;
}

RateReport rates_at_n(const ClassParams& theta, long n) {
  if (n < 3) throw std::invalid_argument("rates_at_n: n must be >= 3");
  RateReport out = rate_exponent(theta);
  out.n = n;
  const double dn = static_cast<double>(n);
  const double ln = std::log(dn);
  out.psi_n = std::pow(std::sqrt(ln) / dn, out.z);
  out.phi_n = std::pow(dn, -out.z);
  out.price = std::pow(ln, 0.5 * out.z);
  return out;
}

double RelationReport::alpha_n(long n) const {
  return std::pow(static_cast<double>(n), alpha_exponent);
}

double RelationReport::alpha_n_sq(long n) const {
  return std::pow(static_cast<double>(n), 2.0 * alpha_exponent);
}

RelationReport compare_thetas(const ClassParams& theta,
                              const ClassParams& theta_prime,
                              std::optional<double> alpha_override) {
  theta.validate();
  theta_prime.validate();
  const RateReport a = rate_exponent(theta);
  const RateReport b = rate_exponent(theta_prime);
  if (b.z == 0.0)
    throw std::invalid_argument("compare_thetas: rate exponent of theta_prime is 0");

  RelationReport rel;
  rel.z_theta = a.z;
  rel.z_theta_prime = b.z;

  // overlap functional over the common coordinates
  const int dmin = std::min(theta.d, theta_prime.d);
  const double iq = recip(theta.q);
  const double iqp = recip(theta_prime.q);
  for (int j = 0; j < dmin; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double lhs = recip(theta.beta[k]) * (recip(theta.r[k]) - iq);
    const double rhs = recip(theta_prime.beta[k]) * (recip(theta_prime.r[k]) - iqp);
    rel.rho += std::min(lhs, rhs);
  }

  rel.in_theta_plus = b.z > a.z;
  rel.in_theta_zero = b.z == a.z;
  rel.in_regime_set_prime = a.regime == Regime::ThetaPrime &&
                            b.regime == Regime::ThetaPrime && rel.in_theta_plus;
  rel.in_regime_set_double_prime =
      a.regime == Regime::ThetaDoublePrime &&
      b.regime == Regime::ThetaDoublePrime && rel.in_theta_plus &&
      rel.rho >= 1.0 && theta_prime.q <= theta.q;

  if (alpha_override) {
    const double al = *alpha_override;
    if (!(al > a.z && al < b.z))
      throw std::invalid_argument(
          "compare_thetas: alpha override must lie strictly between the two exponents");
    rel.alpha = al;
  } else {
    rel.alpha = 0.5 * (a.z + b.z);
  }
  rel.c = rel.alpha / b.z;
  rel.alpha_exponent = rel.c * b.z - a.z;  // = (z' - z)/2 at the midpoint
  return rel;
}

ConditionReport check_conditions_A(std::span<const ClassParams> grid) {
  if (grid.empty()) throw std::invalid_argument("check_conditions_A: empty grid");
  const std::size_t n = grid.size();

  std::vector<RateReport> rates(n);
  for (std::size_t i = 0; i < n; ++i) rates[i] = rate_exponent(grid[i]);
  const double zmax =
      std::max_element(rates.begin(), rates.end(),
                       [](const RateReport& a, const RateReport& b) {
                         return a.z < b.z;
                       })
          ->z;

  ConditionReport rep;
  rep.grid_size = n;
  rep.a2_pass = true;
  rep.a3_pass = true;

  // Euclidean embedding for the interior test; points of different
  // dimension are never neighbors.
  auto features = [](const ClassParams& p) {
    std::vector<double> v;
    v.push_back(static_cast<double>(p.d));
    for (double b : p.beta) v.push_back(b);
    for (double r : p.r) v.push_back(recip(r));
    v.push_back(recip(p.q));
    return v;
  };
  std::vector<std::vector<double>> feats(n);
  for (std::size_t i = 0; i < n; ++i) feats[i] = features(grid[i]);
  auto dist = [&](std::size_t i, std::size_t j) {
    if (grid[i].d != grid[j].d) return kInf;
    double s = 0.0;
    for (std::size_t k = 0; k < feats[i].size(); ++k) {
      const double t = feats[i][k] - feats[j][k];
      s += t * t;
    }
    return std::sqrt(s);
  };

  double min_frac_plus = 1.0;
  bool any_comparable = false;
  double max_frac_zero = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t plus = 0, zero = 0;
    std::vector<std::size_t> zero_idx;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (rates[j].z > rates[i].z) {
        ++plus;
        RelationReport rel = compare_thetas(grid[i], grid[j]);
        PairCondition pc;
        pc.i = i;
        pc.j = j;
        pc.c = rel.c;
        pc.a2_exponent = rel.alpha_exponent;
        pc.a2_pass = pc.a2_exponent > 0.0;
        // price bound squared is (ln n)^{1/2}; it loses to any polynomial
        // decay, so the verdict rides on the n-exponent alone.
        pc.a3_exponent = (1.0 - rel.c) * rel.z_theta_prime;
        pc.a3_pass = pc.a3_exponent > 0.0;
        rep.a2_pass = rep.a2_pass && pc.a2_pass;
        rep.a3_pass = rep.a3_pass && pc.a3_pass;
        rep.pairs.push_back(pc);
      } else if (rates[j].z == rates[i].z) {
        ++zero;
        zero_idx.push_back(j);
      }
    }
    const double denom = static_cast<double>(n - 1);
    if (denom > 0.0) {
      // the grid's maximal-exponent points cannot have faster neighbors on
      // a finite grid; exclude them from the nonemptiness statistic
      if (rates[i].z < zmax) {
        any_comparable = true;
        min_frac_plus = std::min(min_frac_plus, static_cast<double>(plus) / denom);
      }
      max_frac_zero = std::max(max_frac_zero, static_cast<double>(zero) / denom);
    }

    // interior test: a same-exponent point all of whose grid neighbors
    // (within 1.5x its nearest-neighbor distance) share the exponent
    for (std::size_t j : zero_idx) {
      double nn = kInf;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) nn = std::min(nn, dist(j, k));
      if (!std::isfinite(nn) || nn == 0.0) continue;
      const double radius = 1.5 * nn;
      rep.grid_resolution = std::max(rep.grid_resolution, radius);
      std::size_t nbrs = 0;
      bool all_zero = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || dist(j, k) > radius) continue;
        ++nbrs;
        all_zero = all_zero && rates[k].z == rates[i].z;
      }
      if (nbrs >= 2 && all_zero) rep.zero_interior_found = true;
    }
  }

  rep.min_frac_plus = any_comparable ? min_frac_plus : 0.0;
  rep.max_frac_zero = max_frac_zero;
  rep.a1_pass = any_comparable && rep.min_frac_plus > 0.0 && !rep.zero_interior_found;
  return rep;
}

}  // namespace l2lb
