#include "l2lb/base_density.hpp"

#include <cmath>
#include <stdexcept>

namespace l2lb {

namespace {

double raw_mollifier(double z) {
  const double u = z * z;
  if (u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u));
}

}  // namespace

MollifierProfile::MollifierProfile()
    : table_(raw_mollifier, -1.0, 1.0, 8192) {
  R_ = table_.total();
}

const MollifierProfile& MollifierProfile::instance() {
  static const MollifierProfile p;
  return p;
}

double MollifierProfile::density(double z) const { return raw_mollifier(z) / R_; }

double MollifierProfile::cdf(double z) const { return table_.prefix(z) / R_; }

double MollifierProfile::mass(double lo, double hi) const {
  return table_.range(lo, hi) / R_;
}

double MollifierProfile::sample(Rng& rng) const {
  const double peak = std::exp(-1.0);
  for (;;) {
    const double z = rng.uniform(-1.0, 1.0);
    if (rng.uniform() * peak < raw_mollifier(z)) return z;
  }
}

double plateau_factor(double N, double x) {
  if (x <= 0.0 || x >= N + 2.0) return 0.0;
  if (x >= 2.0 && x <= N) return 1.0;  // the window covers the full mass
  return MollifierProfile::instance().mass(1.0 - x, N + 1.0 - x);
}

BaseDensity BaseDensity::mollified_uniform(int d, double N, double a) {
  if (d < 1 || N < 1.0 || a <= 0.0 || a > 1.0)
    throw std::invalid_argument("BaseDensity: need d>=1, N>=1, a in (0,1]");
  BaseDensity b;
  b.kind = Kind::MollifiedUniform;
  b.d = d;
  b.N = N;
  b.a = a;
  return b;
}

BaseDensity BaseDensity::shrunk_composite(int d, double N, double a, double t,
                                          double c_const, double q, long n_build,
                                          std::vector<double> h_vec) {
  if (d < 1 || N < 1.0 || a <= 0.0 || a > 1.0)
    throw std::invalid_argument("BaseDensity: need d>=1, N>=1, a in (0,1]");
  if (!(t > 0.0 && t < 1.0) || !(c_const > 0.0 && c_const < 1.0))
    throw std::invalid_argument("BaseDensity: need t, c_const in (0,1)");
  if (static_cast<int>(h_vec.size()) != d)
    throw std::invalid_argument("BaseDensity: h_vec must have d entries");
  BaseDensity b;
  b.kind = Kind::ShrunkComposite;
  b.d = d;
  b.N = N;
  b.a = a;
  b.t = t;
  b.c_const = c_const;
  b.q = q;
  b.n_build = n_build;
  b.h_vec = std::move(h_vec);
  return b;
}

double BaseDensity::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("BaseDensity: dimension mismatch");
  if (kind == Kind::MollifiedUniform) {
    double v = 1.0;
    for (int j = 0; j < d; ++j) {
      v *= (a / N) * plateau_factor(N, a * x[j]);
      if (v == 0.0) return 0.0;
    }
    return v;
  }
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double near_mass = c_const * std::pow(t, 1.0 - iq);
  // far component: reflected copy of vanishing width exp(-n_build); below
  // representable widths it degenerates to the pure mollifier profile
  double far = 1.0 - near_mass;
  const auto& prof = MollifierProfile::instance();
  if (n_build >= 30) {
    for (int j = 0; j < d && far != 0.0; ++j)
      far *= a * prof.density(1.0 + a * x[j]);
  } else {
    const double w = std::exp(-static_cast<double>(n_build));
    for (int j = 0; j < d && far != 0.0; ++j)
      far *= (a / w) * plateau_factor(w, -a * x[j]);
  }
  double near = c_const * std::pow(t, -iq);
  for (int j = 0; j < d && near != 0.0; ++j) {
    const auto k = static_cast<std::size_t>(j);
    near *= (a / N) * plateau_factor(N, a * x[j] / h_vec[k]);
  }
  return far + near;
}

double BaseDensity::plateau_value() const {
  const double p = std::pow(a / N, d);
  if (kind == Kind::MollifiedUniform) return p;
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  return c_const * std::pow(t, -iq) * p;
}

std::vector<double> BaseDensity::axis_breakpoints() const {
  return {0.0, 1.0 / a, 2.0 / a, N / a, (N + 1.0) / a, (N + 2.0) / a};
}

double BaseDensity::lp_norm(double p) const {
  const auto& prof = MollifierProfile::instance();
  if (kind == Kind::MollifiedUniform) {
    if (std::isinf(p)) return std::pow(a / N, d);
    auto g = [&](double x) { return (a / N) * plateau_factor(N, a * x); };
    const double axis =
        integrate_pieces([&](double x) { return std::pow(g(x), p); },
                         axis_breakpoints(), 1e-12);
    return std::pow(axis, static_cast<double>(d) / p);
  }
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double near_mass = c_const * std::pow(t, 1.0 - iq);
  const double far_coef = 1.0 - near_mass;
  const double near_coef = c_const * std::pow(t, -iq);
  if (std::isinf(p)) {
    const double far_sup =
        far_coef * std::pow(a * prof.density(0.0), d);
    const double near_sup = near_coef * std::pow(a / N, d);
    return std::max(far_sup, near_sup);
  }
  // the two components live on opposite orthants: p-th powers add
  auto far_axis_fn = [&](double x) {
    return std::pow(a * prof.density(1.0 + a * x), p);
  };
  const std::vector<double> far_bp = {-2.0 / a, -1.0 / a, 0.0};
  const double far_axis = integrate_pieces(far_axis_fn, far_bp, 1e-12);
  double far_p = std::pow(far_coef, p) * std::pow(far_axis, d);
  double near_p = std::pow(near_coef, p);
  for (int j = 0; j < d; ++j) {
    const double h = h_vec[static_cast<std::size_t>(j)];
    auto fn = [&](double x) {
      return std::pow((a / N) * plateau_factor(N, a * x / h), p);
    };
    std::vector<double> bp;
    for (double v : axis_breakpoints()) bp.push_back(v * h);
    near_p *= integrate_pieces(fn, bp, 1e-12);
  }
  return std::pow(far_p + near_p, 1.0 / p);
}

double BaseDensity::total_integral() const {
  if (kind == Kind::MollifiedUniform) {
    auto g = [&](double x) { return (a / N) * plateau_factor(N, a * x); };
    const double axis = integrate_pieces(g, axis_breakpoints(), 1e-12);
    return std::pow(axis, d);
  }
  const auto& prof = MollifierProfile::instance();
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double near_mass = c_const * std::pow(t, 1.0 - iq);
  auto far_axis_fn = [&](double x) { return a * prof.density(1.0 + a * x); };
  const std::vector<double> far_bp = {-2.0 / a, -1.0 / a, 0.0};
  const double far_axis = integrate_pieces(far_axis_fn, far_bp, 1e-12);
  double total = (1.0 - near_mass) * std::pow(far_axis, d);
  double near = c_const * std::pow(t, -iq);
  for (int j = 0; j < d; ++j) {
    const double h = h_vec[static_cast<std::size_t>(j)];
    auto fn = [&](double x) {
      return (a / N) * plateau_factor(N, a * x / h);
    };
    std::vector<double> bp;
    for (double v : axis_breakpoints()) bp.push_back(v * h);
    near *= integrate_pieces(fn, bp, 1e-12);
  }
  return total + near;
}

std::vector<double> BaseDensity::sample(long n, Rng& rng) const {
  const auto& prof = MollifierProfile::instance();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  const double near_mass =
      kind == Kind::ShrunkComposite ? c_const * std::pow(t, 1.0 - iq) : 0.0;
  for (long i = 0; i < n; ++i) {
    if (kind == Kind::MollifiedUniform) {
      for (int j = 0; j < d; ++j) {
        const double v = prof.sample(rng);
        const double w = rng.uniform(1.0, N + 1.0);
        out.push_back((v + w) / a);
      }
    } else if (rng.uniform() < near_mass) {
      for (int j = 0; j < d; ++j) {
        const double v = prof.sample(rng);
        const double w = rng.uniform(1.0, N + 1.0);
        out.push_back(h_vec[static_cast<std::size_t>(j)] * (v + w) / a);
      }
    } else {
      const double w_width = n_build >= 30 ? 0.0 : std::exp(-static_cast<double>(n_build));
      for (int j = 0; j < d; ++j) {
        const double v = prof.sample(rng);
        const double w = 1.0 + w_width * rng.uniform();
        out.push_back(-(v + w) / a);
      }
    }
  }
  return out;
}

}  // namespace l2lb
