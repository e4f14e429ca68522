// Batch front door: config parsing, subcommand dispatch, report emission.
//
// Subcommands: rate, regimes, construct, verify, certify, simulate, sweep,
// lemmas.  A JSON config file supplies defaults; command-line flags win.
// Exit codes: 0 pass, 1 check-failed, 2 usage error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "l2lb/json_io.hpp"

using namespace l2lb;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_real_str(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("malformed number: '" + s + "'");
  }
  if (pos != s.size())
    throw UsageError("malformed number: '" + s + "' (trailing '" +
                     s.substr(pos) + "')");
  return v;
}

// Option registry: every value is tracked so that a JSON config file can
// fill in anything the command line left unset, unknown keys are rejected,
// and the effective configuration can be hashed for output file names.
class OptionBag {
 public:
  explicit OptionBag(CLI::App* app) : app_(app) {
    app->add_option("--config", config_path_, "JSON config file (defaults)");
  }

  template <typename T>
  void add(const std::string& name, T& ref, const std::string& help) {
    auto* opt = app_->add_option("--" + name, ref, help);
    setters_[name] = [&ref, name](const json& v) { from_json_value(v, ref, name); };
    getters_[name] = [&ref]() { return to_json_value(ref); };
    opts_[name] = opt;
  }

  /// Applies config-file defaults and returns the effective config object.
  json finalize(const std::string& command) {
    json cfg;
    if (!config_path_.empty()) {
      std::ifstream is(config_path_);
      if (!is) throw UsageError("cannot read config file: " + config_path_);
      try {
        is >> cfg;
      } catch (const std::exception& e) {
        throw UsageError("config parse error: " + std::string(e.what()));
      }
      for (const auto& [key, value] : cfg.items()) {
        auto it = setters_.find(key);
        if (it == setters_.end())
          throw UsageError("unknown config key: '" + key + "'");
        if (opts_[key]->count() == 0) it->second(value);
      }
    }
    json effective;
    effective["command"] = command;
    for (const auto& [name, get] : getters_) effective[name] = get();
    return effective;
  }

  bool was_set(const std::string& name) const {
    auto it = opts_.find(name);
    return it != opts_.end() && it->second->count() > 0;
  }

 private:
  static void from_json_value(const json& v, double& ref,
                              const std::string& name) {
    try {
      ref = real_from_json(v);
    } catch (const std::exception&) {
      throw UsageError("config key '" + name + "': expected a number");
    }
  }
  static void from_json_value(const json& v, long& ref,
                              const std::string& name) {
    if (!v.is_number_integer())
      throw UsageError("config key '" + name + "': expected an integer");
    ref = v.get<long>();
  }
  static void from_json_value(const json& v, int& ref,
                              const std::string& name) {
    if (!v.is_number_integer())
      throw UsageError("config key '" + name + "': expected an integer");
    ref = v.get<int>();
  }
  static void from_json_value(const json& v, std::uint64_t& ref,
                              const std::string& name) {
    if (!v.is_number_integer())
      throw UsageError("config key '" + name + "': expected an integer");
    ref = v.get<std::uint64_t>();
  }
  static void from_json_value(const json& v, std::string& ref,
                              const std::string& name) {
    if (v.is_string())
      ref = v.get<std::string>();
    else if (v.is_number())
      ref = v.dump();
    else
      throw UsageError("config key '" + name + "': expected a string");
  }
  static void from_json_value(const json& v, std::vector<double>& ref,
                              const std::string& name) {
    if (!v.is_array())
      throw UsageError("config key '" + name + "': expected an array");
    ref.clear();
    for (const auto& e : v) ref.push_back(real_from_json(e));
  }
  static void from_json_value(const json& v, std::vector<long>& ref,
                              const std::string& name) {
    if (!v.is_array())
      throw UsageError("config key '" + name + "': expected an array");
    ref = v.get<std::vector<long>>();
  }
  static void from_json_value(const json& v, std::vector<std::string>& ref,
                              const std::string& name) {
    if (!v.is_array())
      throw UsageError("config key '" + name + "': expected an array");
    ref.clear();
    for (const auto& e : v)
      ref.push_back(e.is_string() ? e.get<std::string>() : e.dump());
  }

  static json to_json_value(const double& v) { return real_to_json(v); }
  static json to_json_value(const long& v) { return v; }
  static json to_json_value(const int& v) { return v; }
  static json to_json_value(const std::uint64_t& v) { return v; }
  static json to_json_value(const std::string& v) { return v; }
  static json to_json_value(const std::vector<double>& v) { return v; }
  static json to_json_value(const std::vector<long>& v) { return v; }
  static json to_json_value(const std::vector<std::string>& v) { return v; }

  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::function<void(const json&)>> setters_;
  std::map<std::string, std::function<json()>> getters_;
  std::map<std::string, CLI::Option*> opts_;
};

// Class-parameter options, optionally twice (primed copy for pairs).
struct ThetaOpts {
  int d = 1;
  std::vector<double> beta, L;
  std::vector<std::string> r;
  std::string q = "inf";
  double Q = 2.0;

  void register_options(OptionBag& bag, const std::string& suffix) {
    if (suffix.empty()) bag.add("d", d, "dimension");
    bag.add("beta" + suffix, beta, "directional smoothness (1 or d values)");
    bag.add("r" + suffix, r, "norm indices, 'inf' allowed (1 or d values)");
    bag.add("q" + suffix, q, "boundedness index, 'inf' allowed");
    bag.add("L" + suffix, L, "smoothness radii (1 or d values)");
    bag.add("Q" + suffix, Q, "sup/L_q radius");
  }

  ClassParams build(const std::string& what) const {
    ClassParams p;
    p.d = d;
    if (beta.empty()) throw UsageError("missing required --beta" + what);
    if (r.empty()) throw UsageError("missing required --r" + what);
    const auto du = static_cast<std::size_t>(d);
    auto bcast = [&](std::vector<double> v, const char* nm) {
      if (v.size() == 1 && du > 1) v.assign(du, v[0]);
      if (v.size() != du)
        throw UsageError(std::string(nm) + what + ": need 1 or d values");
      return v;
    };
    p.beta = bcast(beta, "--beta");
    std::vector<double> rv;
    for (const auto& s : r) rv.push_back(parse_real_str(s));
    p.r = bcast(rv, "--r");
    p.L = L.empty() ? std::vector<double>(du, 1.0) : bcast(L, "--L");
    p.q = parse_real_str(q);
    p.Q = Q;
    try {
      p.validate();
    } catch (const std::exception& e) {
      throw UsageError(std::string(e.what()) + what);
    }
    return p;
  }
};

struct Emitter {
  std::string out_dir;
  std::string command;
  json config;

  std::string stem() const {
    return command + "-" + hash_hex(fnv1a(canonical_dump(config)));
  }

  void emit(const json& report,
            const std::vector<std::pair<std::string, std::string>>&
                extra_files = {}) const {
    json doc;
    doc["config"] = config;
    doc["report"] = report;
    const std::string text = canonical_dump(doc);
    std::cout << text;
    if (out_dir.empty()) return;
    write_text_file(out_dir + "/" + stem() + ".json", text);
    for (const auto& [suffix, content] : extra_files)
      write_text_file(out_dir + "/" + stem() + suffix, content);
  }
};

PerturbationFamily build_pair_family(const ClassParams& theta,
                                     const ClassParams& theta_prime, long n,
                                     double kappa, double delta) {
  const bool sparse =
      rate_exponent(theta).regime == Regime::ThetaPrime &&
      rate_exponent(theta_prime).regime == Regime::ThetaPrime;
  return sparse ? build_family_I(theta, theta_prime, n, kappa)
                : build_family_II(theta, theta_prime, n, kappa, delta);
}

std::string csv_config_header(const json& config) {
  return "# config " + json(config).dump() + "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"density L2-norm lower-bound workbench"};
  app.require_subcommand(1);
  std::string out_dir;
  if (const char* env = std::getenv("L2LB_OUT_DIR")) out_dir = env;
  app.add_option("--out-dir", out_dir,
                 "directory for report files (default $L2LB_OUT_DIR; "
                 "stdout only when empty)");

  // --- rate -----------------------------------------------------------
  auto* rate_cmd = app.add_subcommand("rate", "rate exponent and regime");
  OptionBag rate_bag(rate_cmd);
  ThetaOpts rate_theta;
  rate_theta.register_options(rate_bag, "");
  long rate_n = 0;
  rate_bag.add("n", rate_n, "sample size for psi_n/phi_n (optional)");

  // --- regimes --------------------------------------------------------
  auto* reg_cmd = app.add_subcommand("regimes", "grid classification");
  OptionBag reg_bag(reg_cmd);
  int reg_d = 1;
  std::vector<double> reg_betas;
  std::vector<std::string> reg_rs;
  std::string reg_q = "inf";
  reg_bag.add("d", reg_d, "dimension");
  reg_bag.add("beta-grid", reg_betas, "smoothness grid values");
  reg_bag.add("r-grid", reg_rs, "norm-index grid values, 'inf' allowed");
  reg_bag.add("q", reg_q, "boundedness index");

  // --- construct ------------------------------------------------------
  auto* con_cmd = app.add_subcommand("construct", "two-class family");
  OptionBag con_bag(con_cmd);
  ThetaOpts con_theta, con_theta_p;
  con_theta.register_options(con_bag, "");
  con_theta_p.d = -1;  // shared --d
  con_theta_p.register_options(con_bag, "2");
  long con_n = 10000;
  double con_kappa = 0.0, con_delta = 1.0;
  con_bag.add("n", con_n, "sample size");
  con_bag.add("kappa", con_kappa, "mass budget (<= 0: automatic)");
  con_bag.add("delta", con_delta, "dense-regime slack");

  // --- verify ---------------------------------------------------------
  auto* ver_cmd = app.add_subcommand("verify", "assumption checklist");
  OptionBag ver_bag(ver_cmd);
  ThetaOpts ver_theta, ver_theta_p;
  ver_theta.register_options(ver_bag, "");
  ver_theta_p.register_options(ver_bag, "2");
  long ver_n = 10000, ver_ymc = 200;
  double ver_kappa = 0.0, ver_delta = 1.0;
  std::uint64_t ver_seed = 0;
  ver_bag.add("n", ver_n, "sample size");
  ver_bag.add("kappa", ver_kappa, "mass budget (<= 0: automatic)");
  ver_bag.add("delta", ver_delta, "dense-regime slack");
  ver_bag.add("y-mc", ver_ymc, "sign draws for the mass checks");
  ver_bag.add("seed", ver_seed, "RNG seed (required)");

  // --- certify --------------------------------------------------------
  auto* cert_cmd = app.add_subcommand("certify", "lower-bound certificate");
  OptionBag cert_bag(cert_cmd);
  ThetaOpts cert_theta, cert_theta_p;
  cert_theta.register_options(cert_bag, "");
  cert_theta_p.register_options(cert_bag, "2");
  long cert_n = 10000;
  double cert_kappa = 0.0, cert_delta = 1.0, cert_c = 0.0;
  std::uint64_t cert_seed = 0;
  std::vector<long> cert_ngrid;
  cert_bag.add("n", cert_n, "sample size");
  cert_bag.add("kappa", cert_kappa, "mass budget (<= 0: automatic)");
  cert_bag.add("delta", cert_delta, "dense-regime slack");
  cert_bag.add("c", cert_c, "comparison exponent scale (<= 0: midpoint)");
  cert_bag.add("seed", cert_seed,
               "RNG seed (required for the general branch)");
  cert_bag.add("n-grid", cert_ngrid, "extra n values for the ratio curve");

  // --- simulate -------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "two-class risk tables");
  OptionBag sim_bag(sim_cmd);
  ThetaOpts sim_theta, sim_theta_p;
  sim_theta.register_options(sim_bag, "");
  sim_theta_p.register_options(sim_bag, "2");
  std::vector<long> sim_ngrid;
  std::vector<double> sim_h;
  long sim_reps = 100, sim_rows = 2;
  double sim_kappa = 0.0, sim_delta = 1.0;
  std::uint64_t sim_seed = 0;
  sim_bag.add("n-grid", sim_ngrid, "increasing sample sizes");
  sim_bag.add("bandwidths", sim_h, "estimator bandwidth grid");
  sim_bag.add("reps", sim_reps, "replications per density");
  sim_bag.add("rows", sim_rows, "family draws per n");
  sim_bag.add("kappa", sim_kappa, "mass budget (<= 0: automatic)");
  sim_bag.add("delta", sim_delta, "dense-regime slack");
  sim_bag.add("seed", sim_seed, "RNG seed (required)");

  // --- sweep ----------------------------------------------------------
  auto* sw_cmd = app.add_subcommand("sweep", "rate normalizations along n");
  OptionBag sw_bag(sw_cmd);
  ThetaOpts sw_theta;
  sw_theta.register_options(sw_bag, "");
  std::vector<long> sw_ngrid;
  sw_bag.add("n-grid", sw_ngrid, "sample sizes");

  // --- lemmas ---------------------------------------------------------
  auto* lem_cmd = app.add_subcommand("lemmas", "envelope and moment checks");
  OptionBag lem_bag(lem_cmd);
  long lem_reps = 100000, lem_ymc = 100, lem_grid = 10000, lem_random = 5;
  std::uint64_t lem_seed = 0;
  lem_bag.add("reps", lem_reps, "Monte-Carlo replications");
  lem_bag.add("y-mc", lem_ymc, "sign draws for the envelope check");
  lem_bag.add("grid", lem_grid, "envelope grid points");
  lem_bag.add("random", lem_random, "random moment-check configurations");
  lem_bag.add("seed", lem_seed, "RNG seed (required)");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  if (rate_cmd->parsed()) {
    Emitter em{out_dir, "rate", rate_bag.finalize("rate")};
    const auto theta = rate_theta.build("");
    const auto rep = rate_n > 0 ? rates_at_n(theta, rate_n)
                                : rate_exponent(theta);
    em.emit(rate_to_json(rep));
    return kExitPass;
  }

  if (reg_cmd->parsed()) {
    Emitter em{out_dir, "regimes", reg_bag.finalize("regimes")};
    if (reg_betas.empty()) throw UsageError("missing required --beta-grid");
    if (reg_rs.empty()) throw UsageError("missing required --r-grid");
    std::vector<ClassParams> grid;
    for (double b : reg_betas)
      for (const auto& rs : reg_rs)
        grid.push_back(ClassParams::isotropic(reg_d, b, parse_real_str(rs),
                                              parse_real_str(reg_q)));
    json points = json::array();
    for (const auto& p : grid) {
      const auto rr = rate_exponent(p);
      json e;
      e["beta"] = p.beta[0];
      e["r"] = real_to_json(p.r[0]);
      e["z"] = rr.z;
      e["regime"] = regime_name(rr.regime);
      points.push_back(e);
    }
    json rep;
    rep["points"] = points;
    rep["conditions"] = conditions_to_json(check_conditions_A(grid));
    em.emit(rep);
    return kExitPass;
  }

  if (con_cmd->parsed()) {
    Emitter em{out_dir, "construct", con_bag.finalize("construct")};
    con_theta_p.d = con_theta.d;
    const auto fam =
        build_pair_family(con_theta.build(""), con_theta_p.build("2"),
                          con_n, con_kappa, con_delta);
    em.emit(family_to_json(fam));
    return kExitPass;
  }

  if (ver_cmd->parsed()) {
    if (!ver_bag.was_set("seed"))
      throw UsageError("missing required --seed (stochastic command)");
    Emitter em{out_dir, "verify", ver_bag.finalize("verify")};
    ver_theta_p.d = ver_theta.d;
    const auto fam =
        build_pair_family(ver_theta.build(""), ver_theta_p.build("2"),
                          ver_n, ver_kappa, ver_delta);
    const auto rep = verify_assumptions(fam, ver_n, ver_ymc, ver_seed);
    json doc = checklist_to_json(rep);
    doc["family"] = family_to_json(fam);
    em.emit(doc);
    return rep.all_pass() ? kExitPass : kExitCheckFailed;
  }

  if (cert_cmd->parsed()) {
    Emitter em{out_dir, "certify", cert_bag.finalize("certify")};
    cert_theta_p.d = cert_theta.d;
    const auto theta = cert_theta.build("");
    const auto theta_p = cert_theta_p.build("2");
    const auto fam =
        build_pair_family(theta, theta_p, cert_n, cert_kappa, cert_delta);
    if (fam.lambda_value != 0.0 && !cert_bag.was_set("seed"))
      throw UsageError(
          "missing required --seed (general-branch budget is stochastic)");
    const auto cert = certificate(fam, cert_n, cert_c);
    json rep = certificate_to_json(cert);
    rep["family"] = family_to_json(fam);
    std::vector<std::pair<std::string, std::string>> extra;
    if (!cert_ngrid.empty()) {
      std::string csv = csv_config_header(em.config) +
                        "n,ez2,alpha_sq,ratio,final_bound\n";
      json curve = json::array();
      for (long nv : cert_ngrid) {
        const auto f = build_pair_family(theta, theta_p, nv, cert_kappa,
                                         cert_delta);
        const auto cv = certificate(f, nv, cert_c);
        const double ratio = cv.ez2 / cv.alpha_sq;
        char line[256];
        std::snprintf(line, sizeof line, "%ld,%.17g,%.17g,%.17g,%.17g\n",
                      nv, cv.ez2, cv.alpha_sq, ratio, cv.final_bound);
        csv += line;
        json e;
        e["n"] = nv;
        e["ez2"] = cv.ez2;
        e["alpha_sq"] = cv.alpha_sq;
        e["ratio"] = ratio;
        e["final_bound"] = cv.final_bound;
        curve.push_back(e);
      }
      rep["ratio_curve"] = curve;
      extra.emplace_back("-ratio.csv", csv);
    }
    em.emit(rep, extra);
    return cert.final_bound > 0.0 ? kExitPass : kExitCheckFailed;
  }

  if (sim_cmd->parsed()) {
    if (!sim_bag.was_set("seed"))
      throw UsageError("missing required --seed (stochastic command)");
    Emitter em{out_dir, "simulate", sim_bag.finalize("simulate")};
    if (sim_ngrid.empty()) throw UsageError("missing required --n-grid");
    if (sim_h.empty()) throw UsageError("missing required --bandwidths");
    sim_theta_p.d = sim_theta.d;
    std::vector<EstimatorSpec> specs;
    for (double h : sim_h) specs.push_back({{h}, true});
    const auto table = two_class_experiment(
        sim_theta.build(""), sim_theta_p.build("2"), sim_ngrid, sim_kappa,
        sim_reps, specs, sim_seed, sim_delta, sim_rows);
    bool ok = true;
    for (const auto& e : table.entries)
      ok = ok && e.above_certificate && !e.both_small;
    em.emit(risk_table_to_json(table),
            {{".csv", csv_config_header(em.config) +
                          risk_table_to_csv(table)}});
    return ok ? kExitPass : kExitCheckFailed;
  }

  if (sw_cmd->parsed()) {
    Emitter em{out_dir, "sweep", sw_bag.finalize("sweep")};
    if (sw_ngrid.empty()) throw UsageError("missing required --n-grid");
    const auto theta = sw_theta.build("");
    std::string csv =
        csv_config_header(em.config) + "n,z,psi_n,phi_n,price\n";
    json rows = json::array();
    for (long nv : sw_ngrid) {
      const auto r = rates_at_n(theta, nv);
      char line[256];
      std::snprintf(line, sizeof line, "%ld,%.17g,%.17g,%.17g,%.17g\n", nv,
                    r.z, r.psi_n, r.phi_n, r.price);
      csv += line;
      rows.push_back(rate_to_json(r));
    }
    json rep;
    rep["rows"] = rows;
    em.emit(rep, {{"-rate.csv", csv}});
    return kExitPass;
  }

  if (lem_cmd->parsed()) {
    if (!lem_bag.was_set("seed"))
      throw UsageError("missing required --seed (stochastic command)");
    Emitter em{out_dir, "lemmas", lem_bag.finalize("lemmas")};
    const auto sign_fam =
        build_family_I(ClassParams::isotropic(1, 0.4, 2.0, kInf),
                       ClassParams::isotropic(1, 0.45, 2.0, kInf), 1000);
    const auto sand_sign =
        check_lemma_sandwich(sign_fam, lem_ymc, lem_grid, lem_seed);
    const auto nn_fam = build_family_nonneg_unit(16, 64);
    const auto sand_nn =
        check_lemma_sandwich(nn_fam, lem_ymc, lem_grid, lem_seed + 1);
    const std::vector<double> a1 = {1.0};
    const auto wjk_exact = check_lemma_wjk(1, 1, 0.1, 1.0, a1, 1, lem_seed);
    json randoms = json::array();
    bool wjk_ok = wjk_exact.pass;
    Rng rng(lem_seed);
    for (long i = 0; i < lem_random; ++i) {
      const long J = 1 + static_cast<long>(rng.below(30));
      const long K = 1 + static_cast<long>(rng.below(60));
      const double T = rng.uniform(0.2, 1.5);
      std::vector<double> a(static_cast<std::size_t>(K));
      double sup = 0.0;
      for (auto& v : a) {
        v = rng.uniform(-1.0, 1.0);
        sup = std::max(sup, std::abs(v));
      }
      const double cap =
          1.0 / (2.0 * static_cast<double>(J) * 5.0 * T * T * sup * sup *
                 static_cast<double>(K));
      const double b = rng.uniform(0.0, cap);
      const auto w =
          check_lemma_wjk(J, K, b, T, a, lem_reps, lem_seed + 17 + i);
      wjk_ok = wjk_ok && w.pass;
      json e = wjk_to_json(w);
      e["J"] = J;
      e["K"] = K;
      e["b"] = b;
      randoms.push_back(e);
    }
    json rep;
    rep["envelope_sign_family"] = sandwich_to_json(sand_sign);
    rep["envelope_nonneg_family"] = sandwich_to_json(sand_nn);
    rep["moment_boundary"] = wjk_to_json(wjk_exact);
    rep["moment_random"] = randoms;
    const bool ok = sand_sign.pass && sand_nn.pass && wjk_ok;
    rep["all_pass"] = ok;
    em.emit(rep);
    return ok ? kExitPass : kExitCheckFailed;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
