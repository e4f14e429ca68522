#include "l2lb/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace l2lb {

namespace {

json prov(std::initializer_list<std::pair<const char*, const char*>> tags) {
  json p = json::object();
  for (const auto& [k, v] : tags) p[k] = v;
  return p;
}

}  // namespace

json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw std::invalid_argument("expected a number or \"inf\": " + j.dump());
}

json params_to_json(const ClassParams& p) {
  json j;
  j["d"] = p.d;
  j["beta"] = p.beta;
  json r = json::array();
  for (double v : p.r) r.push_back(real_to_json(v));
  j["r"] = r;
  j["q"] = real_to_json(p.q);
  j["L"] = p.L;
  j["Q"] = real_to_json(p.Q);
  return j;
}

ClassParams params_from_json(const json& j) {
  ClassParams p;
  p.d = j.at("d").get<int>();
  p.beta = j.at("beta").get<std::vector<double>>();
  p.r.clear();
  for (const auto& v : j.at("r")) p.r.push_back(real_from_json(v));
  p.q = real_from_json(j.at("q"));
  if (j.contains("L")) p.L = j.at("L").get<std::vector<double>>();
  if (p.L.empty()) p.L.assign(static_cast<std::size_t>(p.d), 1.0);
  if (j.contains("Q")) p.Q = real_from_json(j.at("Q"));
  p.validate();
  return p;
}

json rate_to_json(const RateReport& r) {
  json j;
  j["z"] = r.z;
  j["regime"] = regime_name(r.regime);
  if (r.n > 0) {
    j["n"] = r.n;
    j["psi_n"] = r.psi_n;
    j["phi_n"] = r.phi_n;
    j["price"] = r.price;
  }
  j["provenance"] = prov({{"z", "closed-form"},
                          {"psi_n", "closed-form"},
                          {"phi_n", "closed-form"},
                          {"price", "closed-form"}});
  return j;
}

json relation_to_json(const RelationReport& r) {
  json j;
  j["z_theta"] = r.z_theta;
  j["z_theta_prime"] = r.z_theta_prime;
  j["rho"] = r.rho;
  j["in_regime_set_prime"] = r.in_regime_set_prime;
  j["in_regime_set_double_prime"] = r.in_regime_set_double_prime;
  j["in_theta_plus"] = r.in_theta_plus;
  j["in_theta_zero"] = r.in_theta_zero;
  j["c"] = r.c;
  j["alpha"] = r.alpha;
  j["alpha_exponent"] = r.alpha_exponent;
  j["provenance"] = prov({{"z_theta", "closed-form"},
                          {"z_theta_prime", "closed-form"},
                          {"rho", "closed-form"},
                          {"alpha", "closed-form"}});
  return j;
}

json conditions_to_json(const ConditionReport& r) {
  json j;
  j["grid_size"] = r.grid_size;
  j["min_frac_plus"] = r.min_frac_plus;
  j["max_frac_zero"] = r.max_frac_zero;
  j["zero_interior_found"] = r.zero_interior_found;
  j["grid_resolution"] = r.grid_resolution;
  j["a1_pass"] = r.a1_pass;
  j["a2_pass"] = r.a2_pass;
  j["a3_pass"] = r.a3_pass;
  j["all_pass"] = r.all_pass();
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    json e;
    e["i"] = p.i;
    e["j"] = p.j;
    e["c"] = p.c;
    e["a2_exponent"] = p.a2_exponent;
    e["a3_exponent"] = p.a3_exponent;
    e["a2_pass"] = p.a2_pass;
    e["a3_pass"] = p.a3_pass;
    pairs.push_back(e);
  }
  j["pairs"] = pairs;
  j["provenance"] = prov({{"a2_exponent", "closed-form"},
                          {"a3_exponent", "closed-form"}});
  return j;
}

json family_to_json(const PerturbationFamily& fam) {
  json j;
  j["construction"] = fam.construction;
  j["theta"] = params_to_json(fam.theta);
  j["theta_prime"] = params_to_json(fam.theta_prime);
  j["n"] = fam.n;
  j["kappa"] = fam.kappa;
  j["delta"] = fam.delta;
  j["amplitude"] = fam.A;
  j["sigma"] = fam.sigma;
  j["bump_count"] = fam.M;
  j["prior"] = fam.prior.kind == PriorSpec::Kind::Rademacher
                   ? "rademacher"
                   : "bernoulli-on-unit";
  j["C1"] = fam.C1;
  j["a_cal"] = fam.a_cal;
  j["N_cal"] = fam.N_cal;
  j["c_const"] = fam.c_const;
  j["kappa1"] = fam.kappa1;
  j["M_real"] = fam.M_real;
  j["rounding_slack"] = fam.rounding_slack;
  j["psi_n"] = fam.psi_n;
  j["z"] = fam.z;
  j["z_prime"] = fam.z_prime;
  j["t"] = fam.t;
  j["lambda_value"] = fam.lambda_value;
  j["Sigma_M"] = fam.Sigma_M;
  j["S_value"] = fam.S_value;
  j["base_l2"] = fam.base_l2;
  j["plateau"] = fam.plateau;
  j["provenance"] = prov({{"amplitude", "closed-form"},
                          {"C1", "estimated-constant"},
                          {"a_cal", "estimated-constant"},
                          {"c_const", "estimated-constant"},
                          {"base_l2", "quadrature"},
                          {"S_value", "closed-form"}});
  return j;
}

namespace {
json entry_to_json(const CheckEntry& e) {
  json j;
  j["pass"] = e.pass;
  j["value"] = real_to_json(e.value);
  j["threshold"] = real_to_json(e.threshold);
  return j;
}
}  // namespace

json checklist_to_json(const AssumptionChecklist& r) {
  json j;
  j["a1_disjoint_supports"] = entry_to_json(r.a1_disjoint_supports);
  j["a2_positive_base"] = entry_to_json(r.a2_positive_base);
  j["a3_class_mass"] = entry_to_json(r.a3_class_mass);
  j["a4_separation_mass"] = entry_to_json(r.a4_separation_mass);
  j["a5_sigma_bound"] = entry_to_json(r.a5_sigma_bound);
  j["a5_budget"] = entry_to_json(r.a5_budget);
  j["a5_branch"] =
      r.a5_branch == LambdaBranch::ZeroLambda ? "zero-lambda" : "nonneg-unit";
  j["a3_mc_error"] = r.a3_mc_error;
  j["y_draws"] = r.y_draws;
  j["all_pass"] = r.all_pass();
  j["mass_threshold_anchor"] = "230/231";
  j["provenance"] = prov({{"a3_class_mass", "monte-carlo"},
                          {"a4_separation_mass", "closed-form"},
                          {"a5_budget", "closed-form"}});
  return j;
}

json chi_to_json(const ChiBudget& r) {
  json j;
  switch (r.mode) {
    case ChiMode::CoshProduct: j["mode"] = "cosh-product"; break;
    case ChiMode::ExactEnum: j["mode"] = "exact-enum"; break;
    case ChiMode::GeneralBranchBound: j["mode"] = "general-branch-bound"; break;
  }
  j["value"] = r.value;
  j["n"] = r.n;
  j["alpha_sq"] = r.alpha_sq;
  j["ratio"] = r.ratio;
  j["mc_stderr"] = r.mc_stderr;
  j["per_m_head"] = r.per_m;
  j["provenance"] =
      prov({{"value", r.mode == ChiMode::GeneralBranchBound
                          ? "monte-carlo"
                          : "closed-form"},
            {"alpha_sq", "closed-form"}});
  return j;
}

json certificate_to_json(const Certificate& r) {
  json j;
  j["kappa"] = r.kappa;
  j["ez2"] = r.ez2;
  j["alpha_sq"] = r.alpha_sq;
  j["R_term"] = r.R_term;
  j["ez_min_bound"] = r.ez_min_bound;
  j["final_bound"] = r.final_bound;
  j["asymptote"] = r.asymptote;
  j["conservative"] = r.conservative;
  j["named_constants"] = {{"mass_threshold", "230/231"},
                          {"kappa_general_bound", "143/144"},
                          {"exceptional_mass", "1/64"},
                          {"asymptote", "107/(144e)"}};
  j["provenance"] = prov({{"ez2", r.conservative ? "monte-carlo"
                                                 : "closed-form"},
                          {"final_bound", "closed-form"}});
  return j;
}

json sandwich_to_json(const SandwichReport& r) {
  json j;
  j["total_y"] = r.total_y;
  j["filtered_y"] = r.filtered_y;
  j["grid_points"] = r.grid_points;
  j["worst_upper_margin"] = r.worst_upper_margin;
  j["worst_lower_margin"] = r.worst_lower_margin;
  j["pass"] = r.pass;
  j["provenance"] = prov({{"worst_upper_margin", "monte-carlo"},
                          {"worst_lower_margin", "monte-carlo"}});
  return j;
}

json wjk_to_json(const WjkReport& r) {
  json j;
  j["W_hat"] = r.W_hat;
  j["stderr"] = r.stderr_value;
  j["premise"] = r.premise;
  j["exact"] = r.exact;
  j["pass"] = r.pass;
  j["provenance"] =
      prov({{"W_hat", r.exact ? "closed-form" : "monte-carlo"}});
  return j;
}

json risk_table_to_json(const RiskTable& r) {
  json j;
  j["alpha"] = r.alpha;
  j["min_combined"] = r.min_combined;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e;
    e["density_id"] = row.density_id;
    e["n"] = row.n;
    e["reps"] = row.reps;
    e["truth"] = row.truth;
    e["mse"] = row.mse;
    if (row.stderr_defined) e["stderr"] = row.stderr_value;
    rows.push_back(e);
  }
  j["rows"] = rows;
  json entries = json::array();
  for (const auto& c : r.entries) {
    json e;
    e["n"] = c.n;
    e["spec_index"] = c.spec_index;
    e["h"] = c.h_ref;
    e["mse_base"] = c.mse_base;
    e["mse_family"] = c.mse_family;
    e["term_base"] = c.term_base;
    e["term_family"] = c.term_family;
    e["combined"] = c.combined;
    e["combined_bare"] = c.combined_bare;
    e["stderr_combined"] = c.stderr_combined;
    e["certificate_final"] = c.certificate_final;
    e["above_certificate"] = c.above_certificate;
    e["both_small"] = c.both_small;
    entries.push_back(e);
  }
  j["entries"] = entries;
  j["provenance"] = prov({{"mse", "monte-carlo"},
                          {"truth", "quadrature"},
                          {"combined", "monte-carlo"},
                          {"certificate_final", "closed-form"}});
  return j;
}

std::string risk_table_to_csv(const RiskTable& r) {
  std::ostringstream os;
  os.precision(17);
  os << "density_id,n,reps,mse,stderr\n";
  for (const auto& row : r.rows) {
    os << row.density_id << ',' << row.n << ',' << row.reps << ','
       << row.mse << ',';
    if (row.stderr_defined) os << row.stderr_value;
    os << '\n';
  }
  return os.str();
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace l2lb
