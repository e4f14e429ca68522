#include "l2lb/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "l2lb/verifier.hpp"

namespace l2lb {

namespace {

// Kahan-compensated accumulator.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

std::vector<double> broadcast_h(const EstimatorSpec& spec, int d) {
  if (spec.h.empty()) throw std::invalid_argument("estimator: empty bandwidth");
  std::vector<double> h = spec.h;
  if (static_cast<int>(h.size()) == 1 && d > 1)
    h.assign(static_cast<std::size_t>(d), h[0]);
  if (static_cast<int>(h.size()) != d)
    throw std::invalid_argument("estimator: bandwidth dimension mismatch");
  for (double v : h)
    if (!(v > 0.0)) throw std::invalid_argument("estimator: bandwidth <= 0");
  return h;
}

double finish(double theta_hat, bool clamp) {
  if (clamp) return std::sqrt(std::max(theta_hat, 0.0));
  return std::sqrt(theta_hat);  // NaN signals an unclamped negative value
}

// Batch-means standard error of the mean of vals.
double batch_stderr(std::span<const double> vals, bool& defined) {
  const long reps = static_cast<long>(vals.size());
  if (reps < 2) {
    defined = false;
    return 0.0;
  }
  const long B = std::min<long>(10, reps);
  std::vector<double> means(static_cast<std::size_t>(B));
  for (long b = 0; b < B; ++b) {
    const long lo = b * reps / B, hi = (b + 1) * reps / B;
    Kahan acc;
    for (long i = lo; i < hi; ++i) acc.add(vals[static_cast<std::size_t>(i)]);
    means[static_cast<std::size_t>(b)] =
        acc.sum / static_cast<double>(hi - lo);
  }
  Kahan m;
  for (double v : means) m.add(v);
  const double mean = m.sum / static_cast<double>(B);
  Kahan s2;
  for (double v : means) s2.add((v - mean) * (v - mean));
  defined = true;
  return std::sqrt(s2.sum / static_cast<double>(B - 1) /
                   static_cast<double>(B));
}

double truth_for(const PerturbationFamily& fam, std::span<const double> y) {
  if (y.empty()) return fam.base_l2;
  std::vector<std::vector<double>> ys(1);
  ys[0].assign(y.begin(), y.end());
  return functional_norms(fam, ys).fy_l2;
}

std::uint64_t row_seed(std::uint64_t seed, std::uint64_t row) {
  return seed * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL * (row + 1);
}

// Shared-sample risk over a scalar bandwidth grid (d = 1): every
// bandwidth sees the identical replication samples.
void risk_rows_grid(const PerturbationFamily& fam, std::span<const double> y,
                    long n, long reps, std::span<const double> h_grid,
                    bool clamp, std::uint64_t seed,
                    std::vector<double>& mse_out,
                    std::vector<double>& se_out, double& truth_out) {
  const std::vector<double> y_base(
      y.empty() ? static_cast<std::size_t>(fam.M) : 0, 0.0);
  const std::span<const double> yy = y.empty() ? std::span<const double>(
                                                     y_base.data(),
                                                     y_base.size())
                                               : y;
  truth_out = truth_for(fam, y);
  const std::size_t H = h_grid.size();
  std::vector<std::vector<double>> sq(H);
  for (auto& v : sq) v.reserve(static_cast<std::size_t>(reps));
  const Rng base_rng(seed);
  for (long r = 0; r < reps; ++r) {
    Rng rng = base_rng.fork(static_cast<std::uint64_t>(r));
    const auto sample = fam.sample(yy, n, rng);
    const auto est = estimate_l2_multi(sample, h_grid, clamp);
    for (std::size_t k = 0; k < H; ++k) {
      const double e = est[k] - truth_out;
      sq[k].push_back(e * e);
    }
  }
  mse_out.assign(H, 0.0);
  se_out.assign(H, 0.0);
  for (std::size_t k = 0; k < H; ++k) {
    Kahan acc;
    for (double v : sq[k]) acc.add(v);
    mse_out[k] = acc.sum / static_cast<double>(reps);
    bool defined = false;
    se_out[k] = batch_stderr(sq[k], defined);
  }
}

}  // namespace

double biweight(double u) {
  const double t = 1.0 - u * u;
  return t > 0.0 ? (15.0 / 16.0) * t * t : 0.0;
}

double estimate_l2(std::span<const double> sample, int d,
                   const EstimatorSpec& spec) {
  if (d < 1) throw std::invalid_argument("estimator: d < 1");
  const long n = static_cast<long>(sample.size()) / d;
  if (n < 2) throw std::invalid_argument("estimator: need n >= 2");
  const auto h = broadcast_h(spec, d);
  if (d == 1) {
    const std::vector<double> grid = {h[0]};
    std::vector<double> vals(sample.begin(), sample.end());
    return estimate_l2_multi(vals, grid, spec.clamp)[0];
  }
  double hprod = 1.0;
  for (double v : h) hprod *= v;
  Kahan acc;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      double k = 1.0;
      for (int l = 0; l < d && k > 0.0; ++l) {
        const double u = (sample[static_cast<std::size_t>(i * d + l)] -
                          sample[static_cast<std::size_t>(j * d + l)]) /
                         h[static_cast<std::size_t>(l)];
        k *= biweight(u);
      }
      if (k > 0.0) acc.add(k);
    }
  const double theta_hat = 2.0 * acc.sum /
                           (static_cast<double>(n) *
                            static_cast<double>(n - 1) * hprod);
  return finish(theta_hat, spec.clamp);
}

std::vector<double> estimate_l2_multi(std::span<const double> sample,
                                      std::span<const double> h_grid,
                                      bool clamp) {
  const long n = static_cast<long>(sample.size());
  if (n < 2) throw std::invalid_argument("estimator: need n >= 2");
  for (double h : h_grid)
    if (!(h > 0.0)) throw std::invalid_argument("estimator: bandwidth <= 0");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double h_max = *std::max_element(h_grid.begin(), h_grid.end());
  std::vector<Kahan> acc(h_grid.size());
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      const double diff = x[static_cast<std::size_t>(j)] -
                          x[static_cast<std::size_t>(i)];
      if (diff > h_max) break;  // sorted: no further neighbor matches
      for (std::size_t k = 0; k < h_grid.size(); ++k)
        if (diff <= h_grid[k]) acc[k].add(biweight(diff / h_grid[k]));
    }
  std::vector<double> out(h_grid.size());
  const double norm =
      2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
  for (std::size_t k = 0; k < h_grid.size(); ++k)
    out[k] = finish(norm * acc[k].sum / h_grid[k], clamp);
  return out;
}

RiskRow empirical_risk(const PerturbationFamily& fam,
                       std::span<const double> y, long n, long reps,
                       const EstimatorSpec& spec, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("empirical_risk: need n >= 2");
  if (reps < 1) throw std::invalid_argument("empirical_risk: need reps >= 1");
  RiskRow row;
  row.density_id = y.empty() ? "base" : "perturbed";
  row.n = n;
  row.reps = reps;
  if (fam.theta.d == 1 && spec.h.size() == 1) {
    std::vector<double> mse, se;
    risk_rows_grid(fam, y, n, reps, spec.h, spec.clamp, seed, mse, se,
                   row.truth);
    row.mse = mse[0];
    row.stderr_value = se[0];
    row.stderr_defined = reps >= 2;
    return row;
  }
  const std::vector<double> y_base(
      y.empty() ? static_cast<std::size_t>(fam.M) : 0, 0.0);
  const std::span<const double> yy = y.empty() ? std::span<const double>(
                                                     y_base.data(),
                                                     y_base.size())
                                               : y;
  row.truth = truth_for(fam, y);
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(reps));
  const Rng base_rng(seed);
  for (long r = 0; r < reps; ++r) {
    Rng rng = base_rng.fork(static_cast<std::uint64_t>(r));
    const auto sample = fam.sample(yy, n, rng);
    const double e = estimate_l2(sample, fam.theta.d, spec) - row.truth;
    sq.push_back(e * e);
  }
  Kahan acc;
  for (double v : sq) acc.add(v);
  row.mse = acc.sum / static_cast<double>(reps);
  row.stderr_value = batch_stderr(sq, row.stderr_defined);
  return row;
}

RiskTable two_class_experiment(const ClassParams& theta,
                               const ClassParams& theta_prime,
                               std::span<const long> n_grid, double kappa,
                               long reps,
                               std::span<const EstimatorSpec> spec_grid,
                               std::uint64_t seed, double delta,
                               long family_rows) {
  if (n_grid.empty()) throw std::invalid_argument("experiment: empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("experiment: n grid must increase");
  if (spec_grid.empty())
    throw std::invalid_argument("experiment: empty estimator grid");
  if (family_rows < 1)
    throw std::invalid_argument("experiment: need at least one family row");

  const auto rel = compare_thetas(theta, theta_prime);
  RiskTable table;
  table.alpha = rel.alpha;
  table.min_combined = kInf;

  const bool sparse =
      rate_exponent(theta).regime == Regime::ThetaPrime &&
      rate_exponent(theta_prime).regime == Regime::ThetaPrime;

  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const long n = n_grid[ni];
    const auto fam = sparse
                         ? build_family_I(theta, theta_prime, n, kappa)
                         : build_family_II(theta, theta_prime, n, kappa,
                                           delta);
    const auto cert = certificate(fam, n, 0.0);
    const double n2a = std::pow(static_cast<double>(n), 2.0 * rel.alpha);
    const double psi_sq = fam.psi_n * fam.psi_n;
    const double bare_rate =
        std::pow(std::sqrt(std::log(static_cast<double>(n))) /
                     static_cast<double>(n),
                 2.0 * fam.z);

    // density rows: the base, then independent family draws
    std::vector<std::vector<double>> ys;
    Rng y_rng(row_seed(seed, 0xabcdULL + ni));
    for (long k = 0; k < family_rows; ++k) ys.push_back(fam.draw_y(y_rng));

    const bool scalar_specs =
        fam.theta.d == 1 &&
        std::all_of(spec_grid.begin(), spec_grid.end(),
                    [](const EstimatorSpec& s) { return s.h.size() == 1; });
    const bool clamp_uniform =
        std::all_of(spec_grid.begin(), spec_grid.end(),
                    [&](const EstimatorSpec& s) {
                      return s.clamp == spec_grid[0].clamp;
                    });

    // per row: mse/stderr per spec
    const std::size_t H = spec_grid.size();
    std::vector<std::vector<double>> mse(1 + static_cast<std::size_t>(
                                                 family_rows)),
        se(mse.size());
    std::vector<double> truths(mse.size());
    for (std::size_t rowi = 0; rowi < mse.size(); ++rowi) {
      const std::span<const double> y =
          rowi == 0 ? std::span<const double>()
                    : std::span<const double>(ys[rowi - 1]);
      const std::uint64_t rs =
          row_seed(seed, (ni << 8) + rowi);
      if (scalar_specs && clamp_uniform) {
        std::vector<double> grid(H);
        for (std::size_t k = 0; k < H; ++k) grid[k] = spec_grid[k].h[0];
        risk_rows_grid(fam, y, n, reps, grid, spec_grid[0].clamp, rs,
                       mse[rowi], se[rowi], truths[rowi]);
      } else {
        mse[rowi].resize(H);
        se[rowi].resize(H);
        for (std::size_t k = 0; k < H; ++k) {
          const auto r = empirical_risk(fam, y, n, reps, spec_grid[k], rs);
          mse[rowi][k] = r.mse;
          se[rowi][k] = r.stderr_value;
          truths[rowi] = r.truth;
        }
      }
      for (std::size_t k = 0; k < H; ++k) {
        RiskRow row;
        row.density_id = rowi == 0 ? "base" : "y-" + std::to_string(rowi - 1);
        row.n = n;
        row.reps = reps;
        row.truth = truths[rowi];
        row.mse = mse[rowi][k];
        row.stderr_value = se[rowi][k];
        row.stderr_defined = reps >= 2;
        table.rows.push_back(row);
      }
    }

    for (std::size_t k = 0; k < H; ++k) {
      CombinedEntry e;
      e.n = n;
      e.spec_index = k;
      e.h_ref = spec_grid[k].h[0];
      e.mse_base = mse[0][k];
      double worst = 0.0, worst_se = 0.0;
      for (long rowi = 1; rowi <= family_rows; ++rowi) {
        const auto ru = static_cast<std::size_t>(rowi);
        if (mse[ru][k] >= worst) {
          worst = mse[ru][k];
          worst_se = se[ru][k];
        }
      }
      e.mse_family = worst;
      e.term_base = n2a * e.mse_base;
      e.term_family = worst / psi_sq;
      e.combined = e.term_base + e.term_family;
      e.combined_bare = e.term_base + worst / bare_rate;
      e.stderr_combined = std::hypot(n2a * se[0][k], worst_se / psi_sq);
      e.certificate_final = cert.final_bound;
      e.above_certificate =
          e.combined >= cert.final_bound - 3.0 * e.stderr_combined;
      e.both_small = e.term_base <= 0.5 * cert.final_bound &&
                     e.term_family <= 0.5 * cert.final_bound;
      table.min_combined = std::min(table.min_combined, e.combined);
      table.entries.push_back(e);
    }
  }
  return table;
}

}  // namespace l2lb
