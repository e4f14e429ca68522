#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace l2lb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exact reciprocal with the convention 1/inf = 0.
inline double recip(double s) { return std::isinf(s) ? 0.0 : 1.0 / s; }

/// Nuisance parameter of an anisotropic Nikolskii ball of L_q-bounded
/// densities: directional smoothness beta, norm indices r (inf allowed),
/// boundedness index q in [2,inf], radii L and Q.
struct ClassParams {
  int d = 1;
  std::vector<double> beta;
  std::vector<double> r;
  double q = kInf;
  std::vector<double> L;
  double Q = 2.0;

  static ClassParams isotropic(int d, double beta, double r, double q,
                               double L = 1.0, double Q = 2.0);

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
  bool is_isotropic() const;
};

/// Aggregate smoothness functionals of a parameter point.
struct SmoothnessDiagnostics {
  double inv_omega = 0.0;  // sum of 1/(beta_j r_j)
  double inv_beta = 0.0;   // sum of 1/beta_j
  double bold_L = 1.0;     // product of L_j^(1/beta_j)

  /// tau(s) = 1 - inv_omega + inv_beta/s for s in [1,inf].
  double tau(double s) const { return 1.0 - inv_omega + inv_beta * recip(s); }
};

SmoothnessDiagnostics smoothness_diagnostics(const ClassParams& theta);

enum class Regime { ThetaPrime, ThetaDoublePrime, ThetaTriplePrime, Parametric };

const char* regime_name(Regime r);

struct RateReport {
  double z = 0.0;
  Regime regime = Regime::Parametric;
  // populated by rates_at_n only
  long n = 0;
  double psi_n = 0.0;    // (sqrt(ln n)/n)^z
  double phi_n = 0.0;    // n^(-z)
  double price = 0.0;    // psi_n/phi_n = (ln n)^(z/2)
};

/// Rate exponent and regime label from the three-case formula.
RateReport rate_exponent(const ClassParams& theta);

/// Closed form specialization at q = inf; must agree with rate_exponent
/// whenever theta.q is infinite.
double rate_exponent_sup_norm(const ClassParams& theta);

/// Isotropic q = inf four-branch form; requires theta.is_isotropic().
double rate_exponent_isotropic_sup_norm(const ClassParams& theta);

/// Adds the n-dependent normalizations; requires n >= 3.
RateReport rates_at_n(const ClassParams& theta, long n);

/// Pairwise comparison of parameter points: the overlap functional rho,
/// set memberships, and the risk-ratio exponent machinery.
struct RelationReport {
  double z_theta = 0.0;
  double z_theta_prime = 0.0;
  double rho = 0.0;
  bool in_regime_set_prime = false;        // theta' in Theta'[theta]
  bool in_regime_set_double_prime = false; // theta' in Theta''[theta]
  bool in_theta_plus = false;              // strictly faster rate
  bool in_theta_zero = false;              // same rate exponent
  double c = 0.0;                          // alpha / z(theta')
  double alpha = 0.0;                      // in (z, z') when in_theta_plus
  double alpha_exponent = 0.0;             // exponent of n in alpha_n(c)

  double alpha_n(long n) const;
  double alpha_n_sq(long n) const;
};

/// alpha_override, if given, must lie in (z(theta), z(theta')); it is
/// mapped to c = alpha / z(theta').  Default is the midpoint.
RelationReport compare_thetas(const ClassParams& theta,
                              const ClassParams& theta_prime,
                              std::optional<double> alpha_override = {});

struct PairCondition {
  std::size_t i = 0, j = 0;  // grid indices: theta = grid[i], theta' = grid[j]
  double c = 0.0;
  double a2_exponent = 0.0;  // exponent of n in alpha_n; pass iff > 0
  double a3_exponent = 0.0;  // polynomial decay rate of p_n^2 phi'^{1-c}; pass iff > 0
  bool a2_pass = false;
  bool a3_pass = false;
};

struct ConditionReport {
  std::vector<PairCondition> pairs;
  std::size_t grid_size = 0;
  double min_frac_plus = 0.0;  // min over theta of |Theta+[theta]| / grid
  double max_frac_zero = 0.0;
  bool zero_interior_found = false;  // a grid point whose whole neighborhood sits in Theta0
  double grid_resolution = 0.0;      // neighbor distance used for the interior test
  bool a1_pass = false;
  bool a2_pass = false;
  bool a3_pass = false;
  bool all_pass() const { return a1_pass && a2_pass && a3_pass; }
};

/// Checks the rate-comparison conditions on a finite grid of parameter
/// points.  Throws on an empty grid.
ConditionReport check_conditions_A(std::span<const ClassParams> grid);

}  // namespace l2lb
