#include "l2lb/nikolskii.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "l2lb/quadrature.hpp"

namespace l2lb {

namespace {

std::vector<double> binomial_row(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 1.0);
  for (int l = 1; l <= k; ++l)
    c[static_cast<std::size_t>(l)] =
        c[static_cast<std::size_t>(l - 1)] * (k - l + 1) / l;
  return c;
}

std::vector<double> shifted_breakpoints(std::span<const double> bp, int k,
                                        double u) {
  std::vector<double> out;
  for (int l = 0; l <= k; ++l)
    for (double b : bp) out.push_back(b - l * u);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

int difference_order(double beta) {
  return static_cast<int>(std::floor(beta)) + 1;
}

FnND finite_difference(FnND G, int k, double u, int j) {
  if (k < 1 || j < 0) throw std::invalid_argument("finite_difference: bad k or j");
  auto coef = binomial_row(k);
  return [G = std::move(G), coef, k, u, j](std::span<const double> x) {
    std::vector<double> p(x.begin(), x.end());
    double acc = 0.0;
    for (int l = 0; l <= k; ++l) {
      p[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + u * l;
      const double sgn = ((l + k) % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * coef[static_cast<std::size_t>(l)] * G(p);
    }
    return acc;
  };
}

Fn1D finite_difference_1d(Fn1D g, int k, double u) {
  if (k < 1) throw std::invalid_argument("finite_difference_1d: k must be >= 1");
  auto coef = binomial_row(k);
  return [g = std::move(g), coef, k, u](double x) {
    double acc = 0.0;
    for (int l = 0; l <= k; ++l) {
      const double sgn = ((l + k) % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * coef[static_cast<std::size_t>(l)] * g(x + u * l);
    }
    return acc;
  };
}

std::vector<double> default_u_grid(double lo, double hi, int count) {
  std::vector<double> u(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i)
    u[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  return u;
}

// ---------------------------------------------------------------------------
// generic full-grid check

namespace {

// tensor-grid L_r norm over a box; r = inf -> grid max
double box_lr_norm(const FnND& G, const std::vector<double>& lo,
                   const std::vector<double>& hi, int nodes, double r) {
  const auto d = lo.size();
  if (d > 3) throw std::invalid_argument("box_lr_norm: d > 3 unsupported");
  // iterate a tensor Simpson grid (odd node count per axis)
  int n = nodes;
  if (n % 2) ++n;
  std::vector<double> h(d), w(d);
  for (std::size_t j = 0; j < d; ++j) h[j] = (hi[j] - lo[j]) / n;
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  double acc = 0.0, best = 0.0;
  const long total = static_cast<long>(std::pow(n + 1, static_cast<double>(d)));
  for (long it = 0; it < total; ++it) {
    long rem = it;
    double wt = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const int i = static_cast<int>(rem % (n + 1));
      rem /= (n + 1);
      x[j] = lo[j] + i * h[j];
      const double wj = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      wt *= wj * h[j] / 3.0;
    }
    const double v = std::abs(G(x));
    best = std::max(best, v);
    if (!std::isinf(r)) acc += wt * std::pow(v, r);
  }
  if (std::isinf(r)) return best;
  return std::pow(std::max(acc, 0.0), 1.0 / r);
}

}  // namespace

MembershipReport membership_check(const FnND& G, const ClassParams& theta,
                                  double scale, std::span<const double> u_grid,
                                  const QuadGrid& quad, double tol) {
  theta.validate();
  if (static_cast<int>(quad.lo.size()) != theta.d ||
      static_cast<int>(quad.hi.size()) != theta.d)
    throw std::invalid_argument("membership_check: quad box dimension mismatch");
  MembershipReport rep;
  rep.tolerance = tol;
  rep.scale = scale;
  rep.verdict = true;
  for (int j = 0; j < theta.d; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    DirectionReport dir;
    dir.j = j;
    dir.k = difference_order(theta.beta[ju]);
    const double r = theta.r[ju];
    dir.norm_value = box_lr_norm(G, quad.lo, quad.hi, quad.nodes_per_axis, r);
    for (double u : u_grid) {
      FnND diff = finite_difference(G, dir.k, u, j);
      auto lo = quad.lo;
      lo[ju] -= dir.k * u;  // shifted supports extend backwards
      const double dn = box_lr_norm(diff, lo, quad.hi, quad.nodes_per_axis, r);
      const double ratio = dn / std::pow(u, theta.beta[ju]);
      if (ratio > dir.worst_ratio) {
        dir.worst_ratio = ratio;
        dir.worst_u = u;
      }
    }
    const double cap = scale * theta.L[ju] * (1.0 + tol);
    dir.ratio_ok = dir.worst_ratio <= cap;
    dir.norm_ok = dir.norm_value <= cap;
    rep.verdict = rep.verdict && dir.ratio_ok && dir.norm_ok;
    rep.per_direction.push_back(dir);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// separable product check

MembershipReport membership_check_separable(const SeparableFn& G,
                                            const ClassParams& theta,
                                            double scale,
                                            std::span<const double> u_grid,
                                            double tol) {
  theta.validate();
  if (static_cast<int>(G.factors.size()) != theta.d ||
      G.breakpoints.size() != G.factors.size())
    throw std::invalid_argument("membership_check_separable: dimension mismatch");
  MembershipReport rep;
  rep.tolerance = tol;
  rep.scale = scale;
  rep.verdict = true;
  for (int j = 0; j < theta.d; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    DirectionReport dir;
    dir.j = j;
    dir.k = difference_order(theta.beta[ju]);
    const double r = theta.r[ju];
    double other = 1.0;
    for (int i = 0; i < theta.d; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (i != j)
        other *= lp_norm_1d(G.factors[iu], G.breakpoints[iu], r, 1e-10);
    }
    dir.norm_value =
        other * lp_norm_1d(G.factors[ju], G.breakpoints[ju], r, 1e-10);
    for (double u : u_grid) {
      Fn1D diff = finite_difference_1d(G.factors[ju], dir.k, u);
      const auto bp = shifted_breakpoints(G.breakpoints[ju], dir.k, u);
      const double dn = lp_norm_1d(diff, bp, r, 1e-10);
      const double ratio = other * dn / std::pow(u, theta.beta[ju]);
      if (ratio > dir.worst_ratio) {
        dir.worst_ratio = ratio;
        dir.worst_u = u;
      }
    }
    const double cap = scale * theta.L[ju] * (1.0 + tol);
    dir.ratio_ok = dir.worst_ratio <= cap;
    dir.norm_ok = dir.norm_value <= cap;
    rep.verdict = rep.verdict && dir.ratio_ok && dir.norm_ok;
    rep.per_direction.push_back(dir);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// disjoint bump superposition

namespace {

const std::vector<double> kBumpBp = {-0.5, -0.25, 0.0, 0.25, 0.5};

}  // namespace

double bump_direction_functional(const BumpShape& shape, int j, int k,
                                 double beta, double r,
                                 std::span<const double> v_grid) {
  double other = 1.0;
  for (int i = 0; i < shape.d; ++i)
    if (i != j) other *= shape.axis_lp(i, r);
  const double lam_r = other * shape.axis_lp(j, r);
  const double pow2k = std::pow(2.0, k);
  const double exp_mult = std::isinf(r) ? 1.0 : 1.0 - 1.0 / r;
  double best = 0.0;
  for (double v : v_grid) {
    Fn1D diff = finite_difference_1d(
        [&shape, j](double t) { return shape.axis_factor(j, t); }, k, v);
    const auto bp = shifted_breakpoints(kBumpBp, k, v);
    const double dn = other * lp_norm_1d(diff, bp, r, 1e-10);
    const double mult = 1.0 + std::min<double>(k, std::ceil(k * v));
    const double env =
        std::min(std::pow(mult, exp_mult) * dn, pow2k * lam_r);
    best = std::max(best, env / std::pow(v, beta));
  }
  return best;
}

MembershipReport membership_check_bump_sum(const BumpSumSpec& spec,
                                           const ClassParams& theta,
                                           double scale,
                                           std::span<const double> u_grid,
                                           double tol) {
  theta.validate();
  if (spec.shape == nullptr || spec.shape->d != theta.d ||
      static_cast<int>(spec.sigma.size()) != theta.d || spec.M < 1)
    throw std::invalid_argument("membership_check_bump_sum: bad spec");
  MembershipReport rep;
  rep.tolerance = tol;
  rep.scale = scale;
  rep.verdict = true;
  double sigma_prod = 1.0;
  for (double s : spec.sigma) sigma_prod *= s;
  for (int j = 0; j < theta.d; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    DirectionReport dir;
    dir.j = j;
    dir.k = difference_order(theta.beta[ju]);
    const double r = theta.r[ju];
    const double mass_pow =
        std::isinf(r)
            ? 1.0
            : std::pow(sigma_prod * static_cast<double>(spec.M), 1.0 / r);
    dir.norm_value = spec.A * mass_pow * spec.shape->lp_norm(r);
    // the supremum is taken over v = u/sigma_j so the grid brackets the
    // bump width regardless of sigma
    std::vector<double> v_grid;
    for (double u : u_grid) v_grid.push_back(u / spec.sigma[ju]);
    const double wb = bump_direction_functional(*spec.shape, j, dir.k,
                                                theta.beta[ju], r, v_grid);
    dir.worst_ratio =
        spec.A * std::pow(spec.sigma[ju], -theta.beta[ju]) * mass_pow * wb;
    dir.worst_u = spec.sigma[ju];
    const double cap = scale * theta.L[ju] * (1.0 + tol);
    dir.ratio_ok = dir.worst_ratio <= cap;
    dir.norm_ok = dir.norm_value <= cap;
    rep.verdict = rep.verdict && dir.ratio_ok && dir.norm_ok;
    rep.per_direction.push_back(dir);
  }
  return rep;
}

double calibrate_C1(const BumpShape& shape,
                    std::span<const ClassParams> thetas) {
  if (thetas.empty()) throw std::invalid_argument("calibrate_C1: no parameters");
  const auto v_grid = default_u_grid(1e-3, 8.0, 60);
  double worst = 0.0;
  for (const auto& th : thetas) {
    th.validate();
    if (th.d != shape.d)
      throw std::invalid_argument("calibrate_C1: dimension mismatch");
    for (int j = 0; j < th.d; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const int k = difference_order(th.beta[ju]);
      const double wb = bump_direction_functional(shape, j, k, th.beta[ju],
                                                  th.r[ju], v_grid);
      worst = std::max(worst, std::max(wb, shape.lp_norm(th.r[ju])));
    }
  }
  return 0.5 / worst;
}

}  // namespace l2lb
