// covertsense: batch front end for the covert sensing toolkit.
//
// Subcommands: check, exponent, simulate, unitary, geometry, expand.
// Reports: one '#' header line carrying the timestamp, then a deterministic
// body (text key/value + CSV tables, or a JSON document under --format
// machine). Exit codes: 0 ok, 1 parse/usage, 2 assumption violated,
// 3 scale exceeded.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <covertsense/covert_exponent.hpp>
#include <covertsense/discriminate.hpp>
#include <covertsense/geometry.hpp>
#include <covertsense/scenario_io.hpp>
#include <covertsense/unitary_strategy.hpp>

namespace cs = covertsense;
using ojson = nlohmann::ordered_json;

namespace {

struct OutputCtx {
  bool bits = false;
  bool machine = false;
  double log_scale() const { return bits ? 1.0 / std::log(2.0) : 1.0; }
  double rate_scale() const { return bits ? 1.0 / std::sqrt(std::log(2.0)) : 1.0; }
  std::string log_unit() const { return bits ? "bits" : "nats"; }
  std::string rate_unit() const { return bits ? "sqrt-bits" : "sqrt-nats"; }
  std::string slope_unit() const { return bits ? "bits/use" : "nats/use"; }
};

std::string unit_for(const std::string& key, const OutputCtx& ctx) {
  static const std::set<std::string> log_keys = {
      "kernel",     "d_cc",          "covertness_bound", "exact_covertness", "divergence",
      "quadratic",  "residual",      "eta",              "worst_eta",        "kernel1",
      "kernel2",    "min_pair_dcc",  "intercept",        "divergence_sum",   "delta_floor",
      "exact"};
  static const std::set<std::string> rate_keys = {"achievable_rate", "converse_rate"};
  static const std::set<std::string> slope_keys = {"slope", "slope_stderr"};
  static const std::set<std::string> prob_keys = {
      "error",   "ci_low",        "ci_high", "mass",     "mass_A", "alpha",
      "lambda_min", "union_bound", "p",      "epsilon"};
  static const std::set<std::string> ratio_keys = {
      "zeta",        "chi2_total",  "chi2_over_ell", "coarse_bound",   "block_chi2",
      "ratio_constant", "sup_ratio", "max_ratio",    "witness_ratio",  "input_distance",
      "input_distance_chain", "overlap", "s_star",   "sim_distance",   "support_residual",
      "phase_spread", "warden_support_defect", "spread"};
  static const std::set<std::string> count_keys = {"n",     "m",         "ell",    "trials",
                                                   "types", "sequences", "fit_points",
                                                   "kernel_dim", "intersection_dim", "restarts"};
  if (log_keys.count(key)) return ctx.log_unit();
  if (rate_keys.count(key)) return ctx.rate_unit();
  if (slope_keys.count(key)) return ctx.slope_unit();
  if (prob_keys.count(key)) return "probability";
  if (ratio_keys.count(key)) return "ratio";
  if (count_keys.count(key)) return "count";
  if (key == "phases") return "radians";
  if (key == "weights") return "probability";
  if (key == "per_param_error") return "probability";
  if (key == "alphas") return "probability";
  if (key == "seed") return "count";
  return "";
}

std::string fmt_num(const ojson& v) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  double x = v.get<double>();
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_cell(const ojson& v, const OutputCtx&) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return fmt_num(v);
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find(',') != std::string::npos) return "\"" + s + "\"";
    return s;
  }
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += " ";
      s += csv_cell(v[i], OutputCtx{});
    }
    return s + "]";
  }
  return v.dump();
}

void render_text(const ojson& j, std::ostream& os, const OutputCtx& ctx, int depth = 0) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& [key, val] : j.items()) {
    if (val.is_object()) {
      os << indent << "[" << key << "]\n";
      render_text(val, os, ctx, depth + 1);
    } else if (val.is_array() && !val.empty() && val[0].is_object()) {
      // uniform table: CSV with units in the header
      os << indent << "[" << key << "]\n";
      std::vector<std::string> cols;
      for (const auto& [c, cv] : val[0].items()) {
        (void)cv;
        cols.push_back(c);
      }
      os << indent;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) os << ",";
        std::string u = unit_for(cols[i], ctx);
        os << cols[i];
        if (!u.empty()) os << "[" << u << "]";
      }
      os << "\n";
      for (const auto& row : val) {
        os << indent;
        for (std::size_t i = 0; i < cols.size(); ++i) {
          if (i) os << ",";
          os << (row.contains(cols[i]) ? csv_cell(row[cols[i]], ctx) : "");
        }
        os << "\n";
      }
    } else if (val.is_array()) {
      os << indent << key << " =";
      for (const auto& x : val) os << " " << csv_cell(x, ctx);
      std::string u = unit_for(key, ctx);
      if (!u.empty()) os << "  [" << u << "]";
      os << "\n";
    } else if (val.is_number()) {
      std::string u = unit_for(key, ctx);
      os << indent << key << " = " << fmt_num(val);
      if (!u.empty()) os << "  [" << u << "]";
      os << "\n";
    } else if (val.is_boolean()) {
      os << indent << key << " = " << (val.get<bool>() ? "true" : "false") << "\n";
    } else if (val.is_null()) {
      os << indent << key << " = (not computed)\n";
    } else {
      os << indent << key << " = " << val.get<std::string>() << "\n";
    }
  }
}

void collect_units(const ojson& j, ojson& units, const OutputCtx& ctx) {
  for (const auto& [key, val] : j.items()) {
    if (val.is_object()) {
      collect_units(val, units, ctx);
    } else if (val.is_array() && !val.empty() && val[0].is_object()) {
      for (const auto& row : val) collect_units(row, units, ctx);
    } else if (val.is_number() || (val.is_array() && !val.empty() && val[0].is_number())) {
      std::string u = unit_for(key, ctx);
      if (!u.empty()) units[key] = u;
    }
  }
}

void emit(const ojson& body_in, const OutputCtx& ctx, const std::string& command) {
  char stamp[32];
  std::time_t now = std::time(nullptr);
  std::tm tmv{};
  gmtime_r(&now, &tmv);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tmv);
  std::cout << "# covertsense " << command << " | generated " << stamp << "\n";
  if (ctx.machine) {
    ojson body = body_in;
    ojson units = ojson::object();
    collect_units(body, units, ctx);
    body["units"] = units;
    std::cout << body.dump(2) << "\n";
  } else {
    std::ostringstream os;
    render_text(body_in, os, ctx);
    std::cout << os.str();
  }
}

std::string pair_name(const cs::CqScenario& s, int a, int b) {
  return s.params[a] + ":" + s.params[b];
}

// ---------------------------------------------------------------------------

int cmd_check(const cs::ScenarioFile& file, const OutputCtx& ctx, double tol, std::uint64_t seed) {
  ojson body;
  body["command"] = "check";
  if (file.cq) {
    const cs::CqScenario& s = *file.cq;
    cs::ScenarioAnalysis a = cs::check_assumptions(s, tol);
    body["kind"] = "cq";
    body["params"] = s.params;
    body["alphabet"] = s.alphabet;
    body["innocent_symbol"] = s.alphabet[s.innocent];
    ojson pairs = ojson::array();
    for (auto& pr : a.zero_equiv_pairs) pairs.push_back({{"pair", pair_name(s, pr.first, pr.second)}});
    body["zero_equivalent_pairs"] = pairs;
    body["nontrivial_zero_equivalence"] = a.nontrivial_zero_equivalence;
    body["innocent_unsimulable"] = a.innocent_unsimulable;
    body["willie_supports_nested"] = a.willie_supports_nested;
    body["all_pass"] = a.all_pass();
    ojson per = ojson::array();
    for (int t = 0; t < s.n_params(); ++t)
      per.push_back({{"param", s.params[t]},
                     {"sim_distance", a.sim_distance[t]},
                     {"lambda_min", a.lambda_min_innocent[t]}});
    body["per_param"] = per;
    body["support_residual"] = a.support_residual;
    if (!a.diagnostics.empty()) body["diagnostics"] = a.diagnostics;
  } else {
    const cs::UnitaryScenario& s = *file.unitary;
    s.check();
    body["kind"] = "unitary";
    body["params"] = s.params;
    cs::CMat sigma0 = s.willie.apply((s.innocent * s.innocent.adjoint()).eval());
    cs::CMat pi0 = cs::support_projector(sigma0);
    cs::CMat off = cs::CMat::Identity(s.willie.dim_out(), s.willie.dim_out()) - pi0;
    double defect = 0.0;
    for (const auto& k : s.willie.ops) defect = std::max(defect, cs::entrywise_max(off * k));
    body["warden_support_defect"] = defect;
    ojson pairs = ojson::array();
    bool all_distinct = true;
    for (int i = 0; i < s.n_params(); ++i)
      for (int j = i + 1; j < s.n_params(); ++j) {
        cs::CMat v = s.unitaries[i].adjoint() * s.unitaries[j];
        Eigen::ComplexSchur<cs::CMat> schur(v);
        std::vector<double> ph;
        for (int r = 0; r < v.rows(); ++r)
          ph.push_back(cs::detail::wrap_angle(std::arg(schur.matrixT()(r, r))));
        std::sort(ph.begin(), ph.end());
        double spread = cs::detail::kTwoPi - cs::detail::max_circular_gap(ph);
        bool distinct = spread > 1e-10;
        all_distinct = all_distinct && distinct;
        pairs.push_back({{"pair", s.params[i] + ":" + s.params[j]},
                         {"phase_spread", spread},
                         {"distinct", distinct}});
      }
    body["pairs"] = pairs;
    cs::BoundednessVerdict bv = cs::boundedness_verdict(s.willie, s.innocent, seed);
    body["bounded"] = bv.bounded;
    body["kernel_dim"] = bv.kernel_dim;
    body["intersection_dim"] = bv.intersection_dim;
    body["precondition_ok"] = bv.precondition_ok;
    body["all_pass"] = all_distinct && defect <= 1e-9;
  }
  emit(body, ctx, "check");
  return 0;
}

int cmd_exponent(const cs::ScenarioFile& file, const OutputCtx& ctx, cs::ExponentOptions opt) {
  if (!file.cq) throw cs::ParseError("exponent: requires a cq scenario");
  const cs::CqScenario& s = *file.cq;
  cs::ExponentReport rep = cs::optimize_exponent(s, opt);
  ojson body;
  body["command"] = "exponent";
  body["seed"] = opt.seed;
  body["achievable_rate"] = rep.achievable_rate * ctx.rate_scale();
  body["converse_rate"] = rep.converse_rate * ctx.rate_scale();
  ojson pstar = ojson::array();
  for (int u = 0; u < s.n_symbols(); ++u)
    pstar.push_back({{"symbol", s.alphabet[u]}, {"mass", rep.P_star[u]}});
  body["P_star"] = pstar;
  ojson dcc = ojson::array();
  for (const auto& pv : rep.per_pair_dcc)
    dcc.push_back({{"pair", pair_name(s, pv.a, pv.b)}, {"d_cc", pv.value * ctx.log_scale()}});
  body["per_pair_dcc"] = dcc;
  body["worst_eta"] = rep.worst_eta * ctx.log_scale();
  body["worst_eta_param"] = s.params[rep.worst_eta_param];
  body["slack"] = rep.slack_note;
  emit(body, ctx, "exponent");
  return 0;
}

int cmd_simulate(const cs::ScenarioFile& file, const OutputCtx& ctx, std::vector<int> n_list,
                 double alpha, double zeta, long trials, std::uint64_t seed,
                 std::vector<double> p_off_in, bool exact_error) {
  if (!file.cq) throw cs::ParseError("simulate: requires a cq scenario");
  const cs::CqScenario& s = *file.cq;
  const int k = s.n_symbols();

  std::vector<double> p_off(k, 0.0);
  if (p_off_in.empty()) {
    for (int u = 0; u < k; ++u)
      if (u != s.innocent) p_off[u] = 1.0 / (k - 1);
  } else {
    if (static_cast<int>(p_off_in.size()) != k - 1)
      throw cs::ParseError("simulate: --p needs one mass per non-innocent symbol (" +
                           std::to_string(k - 1) + " values, alphabet order)");
    double tot = 0.0;
    for (double x : p_off_in) {
      if (x < 0) throw cs::ParseError("simulate: --p entries must be nonnegative");
      tot += x;
    }
    if (tot <= 0) throw cs::ParseError("simulate: --p must have positive total mass");
    int idx = 0;
    for (int u = 0; u < k; ++u)
      if (u != s.innocent) p_off[u] = p_off_in[idx++] / tot;
  }

  ojson body;
  body["command"] = "simulate";
  body["alpha"] = alpha;
  body["zeta"] = zeta;
  body["trials"] = trials;
  body["seed"] = seed;
  ojson pmf = ojson::array();
  for (int u = 0; u < k; ++u) {
    double mass = (u == s.innocent) ? 1.0 - alpha : alpha * p_off[u];
    pmf.push_back({{"symbol", s.alphabet[u]}, {"mass", mass}});
  }
  body["law_pmf"] = pmf;

  std::sort(n_list.begin(), n_list.end());
  ojson exact_rows = ojson::array();
  int computed = 0;
  for (int n : n_list) {
    ojson row;
    row["n"] = n;
    if (n > 24) {
      row["skipped"] = "type enumeration beyond scale (n > 24)";
      exact_rows.push_back(row);
      continue;
    }
    std::vector<double> P(k);
    for (int u = 0; u < k; ++u) P[u] = (u == s.innocent) ? 1.0 - alpha : alpha * p_off[u];
    cs::ConstrainedInputLaw law = cs::build_input_law(P, s.innocent, alpha, zeta, n);
    row["types"] = static_cast<long>(law.types.size());
    row["mass_A"] = law.mass_A;
    auto kern = cs::achievability_kernel(s, law);
    double worst = -cs::kInf;
    for (const auto& pv : kern) worst = std::max(worst, pv.value);
    row["kernel"] = worst * ctx.log_scale();
    row["covertness_bound"] = cs::covertness_bound(s, law) * ctx.log_scale();
    try {
      row["exact_covertness"] = cs::exact_covertness(s, law) * ctx.log_scale();
    } catch (const cs::ScaleExceededError&) {
      row["exact_covertness"] = nullptr;
    }
    if (exact_error) {
      try {
        cs::StrategyErrorReport er = cs::exact_strategy_error(s, law);
        row["error"] = er.error;
        row["union_bound"] = er.union_bound;
      } catch (const cs::ScaleExceededError&) {
        row["error"] = nullptr;
        row["union_bound"] = nullptr;
      }
    }
    exact_rows.push_back(row);
    ++computed;
  }
  body["exact"] = exact_rows;
  body["slack"] = "achievability kernel omits the O(log n) additive slack of the one-shot bound";

  if (trials > 0) {
    cs::RegressionReport rep =
        cs::exponent_regression(s, p_off, {alpha}, n_list, trials, seed);
    ojson mc;
    ojson pts = ojson::array();
    for (const auto& p : rep.points) {
      ojson r;
      r["n"] = p.n;
      r["alpha"] = p.alpha;
      r["trials"] = p.trials;
      r["error"] = p.error;
      r["ci_low"] = p.ci_low;
      r["ci_high"] = p.ci_high;
      r["in_fit"] = p.in_fit;
      pts.push_back(r);
    }
    mc["points"] = pts;
    mc["fit_points"] = rep.fit_points;
    if (rep.fit_points >= 2) {
      mc["slope"] = rep.slope * ctx.log_scale();
      mc["slope_stderr"] = rep.slope_stderr * ctx.log_scale();
      mc["intercept"] = rep.intercept * ctx.log_scale();
    }
    if (!rep.note.empty()) mc["note"] = rep.note;
    body["monte_carlo"] = mc;
  } else if (computed == 0) {
    throw cs::ScaleExceededError(
        "simulate: no exact quantity computable at the requested n and trials = 0");
  }

  emit(body, ctx, "simulate");
  return 0;
}

int cmd_unitary(const cs::ScenarioFile& file, const OutputCtx& ctx, int n, int m_max) {
  if (!file.unitary) throw cs::ParseError("unitary: requires a unitary scenario");
  const cs::UnitaryScenario& s = *file.unitary;
  cs::BlockStrategy strat = cs::build_block_strategy(s, n, m_max);
  auto overlaps = cs::zero_error_overlaps(strat, s);
  cs::CovertnessCertificate cert = cs::covertness_certificate(strat, s);

  ojson body;
  body["command"] = "unitary";
  body["n"] = strat.n;
  body["m"] = strat.m;
  body["ell"] = strat.ell;
  ojson pairs = ojson::array();
  for (std::size_t i = 0; i < strat.pairs.size(); ++i) {
    const auto& blk = strat.blocks[i];
    ojson row;
    row["pair"] = s.params[strat.pairs[i][0]] + ":" + s.params[strat.pairs[i][1]];
    row["m"] = blk.m;
    row["weights"] = blk.weights;
    row["multi_indices"] = blk.multi_indices;
    std::vector<double> ph(blk.phases.data(), blk.phases.data() + blk.phases.size());
    row["phases"] = ph;
    pairs.push_back(row);
  }
  body["pairs"] = pairs;
  ojson ov = ojson::array();
  for (const auto& pv : overlaps)
    ov.push_back({{"pair", s.params[pv.a] + ":" + s.params[pv.b]}, {"overlap", pv.value}});
  body["overlaps"] = ov;
  ojson c;
  c["chi2_total"] = cert.chi2_total;
  c["chi2_over_ell"] = cert.chi2_over_ell;
  c["coarse_bound"] = cert.coarse_bound;
  if (cert.exact) c["exact"] = *cert.exact * ctx.log_scale();
  else c["exact"] = nullptr;
  c["lambda_min"] = cert.lambda_min;
  c["block_chi2"] = cert.block_chi2;
  if (!cert.note.empty()) c["note"] = cert.note;
  body["certificate"] = c;
  emit(body, ctx, "unitary");
  return 0;
}

int cmd_geometry(const cs::ScenarioFile& file, const OutputCtx& ctx, std::uint64_t seed) {
  if (!file.unitary) throw cs::ParseError("geometry: requires a unitary scenario");
  const cs::UnitaryScenario& s = *file.unitary;
  s.check();
  cs::BoundednessVerdict bv = cs::boundedness_verdict(s.willie, s.innocent, seed);
  cs::RatioProbeReport rp = cs::ratio_probe(s.willie, s.innocent, bv.witness, 200, seed);

  ojson body;
  body["command"] = "geometry";
  body["bounded"] = bv.bounded;
  body["kernel_dim"] = bv.kernel_dim;
  body["intersection_dim"] = bv.intersection_dim;
  if (bv.witness) {
    ojson w = ojson::array();
    for (int r = 0; r < bv.witness->rows(); ++r) {
      ojson rowj = ojson::array();
      for (int cidx = 0; cidx < bv.witness->cols(); ++cidx)
        rowj.push_back(ojson::array({(*bv.witness)(r, cidx).real(), (*bv.witness)(r, cidx).imag()}));
      w.push_back(rowj);
    }
    body["witness"] = w;
  } else {
    body["witness"] = nullptr;
  }
  body["precondition_ok"] = bv.precondition_ok;
  body["note"] = bv.note;
  ojson rows = ojson::array();
  for (const auto& r : rp.rows)
    rows.push_back({{"input_distance", r.input_distance},
                    {"max_ratio", r.max_ratio},
                    {"witness_ratio", r.witness_ratio}});
  body["ratio_table"] = rows;
  body["sup_ratio"] = rp.sup_ratio;
  emit(body, ctx, "geometry");
  return 0;
}

int cmd_expand(const cs::ScenarioFile& file, const OutputCtx& ctx, std::vector<double> alphas) {
  if (!file.cq) throw cs::ParseError("expand: requires a cq scenario");
  const cs::CqScenario& s = *file.cq;
  s.check();
  if (alphas.empty()) alphas = {0.1, 0.05, 0.02, 0.01};

  ojson body;
  body["command"] = "expand";
  body["alphas"] = alphas;
  ojson rows = ojson::array();
  for (int t = 0; t < s.n_params(); ++t)
    for (int u = 0; u < s.n_symbols(); ++u) {
      if (u == s.innocent) continue;
      double et = cs::eta(s.willie[t][u].mat(), s.willie[t][s.innocent].mat());
      auto table = cs::expansion_table(s.willie[t][u].mat(), s.willie[t][s.innocent].mat(), alphas);
      for (const auto& r : table) {
        ojson row;
        row["param"] = s.params[t];
        row["symbol"] = s.alphabet[u];
        row["eta"] = et * ctx.log_scale();
        row["alpha"] = r.alpha;
        row["divergence"] = r.divergence * ctx.log_scale();
        row["quadratic"] = r.quadratic * ctx.log_scale();
        row["residual"] = r.residual * ctx.log_scale();
        rows.push_back(row);
      }
    }
  body["rows"] = rows;
  emit(body, ctx, "expand");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"covert sensing analysis toolkit"};
  app.require_subcommand(1);

  OutputCtx ctx;
  std::string format = "text";
  double tol = 1e-9;
  std::uint64_t seed = 0xC0DE;
  int threads = 1;
  app.add_option("--format", format, "report format: text or machine")
      ->check(CLI::IsMember({"text", "machine"}));
  app.add_flag("--bits", ctx.bits, "report log-based quantities in base 2");
  app.add_option("--tol", tol, "assumption tolerance (default 1e-9)");
  app.add_option("--seed", seed, "base seed for all randomized work");
  app.add_option("--threads", threads, "thread budget for linear algebra");

  std::string path;
  auto* c_check = app.add_subcommand("check", "admissibility report for a scenario file");
  c_check->add_option("file", path, "scenario JSON file")->required();

  auto* c_exp = app.add_subcommand("exponent", "optimize the achievable exponent rate");
  int restarts = 20, nm_iters = 600;
  bool skip_check = false;
  c_exp->add_option("file", path, "scenario JSON file")->required();
  c_exp->add_option("--restarts", restarts, "optimizer restarts (default 20)");
  c_exp->add_option("--nm-iters", nm_iters, "Nelder-Mead iterations per restart (default 600)");
  c_exp->add_flag("--skip-assumption-check", skip_check, "run even if admissibility flags fail");

  auto* c_sim = app.add_subcommand("simulate", "exact covertness/error records and Monte-Carlo");
  std::vector<int> n_list;
  double alpha = 0.1, zeta = 1.0;
  long trials = 0;
  std::vector<double> p_off;
  bool exact_error = false;
  c_sim->add_option("file", path, "scenario JSON file")->required();
  c_sim->add_option("--n", n_list, "codeword lengths (repeatable)")->required();
  c_sim->add_option("--alpha", alpha, "non-innocent mass (default 0.1)");
  c_sim->add_option("--zeta", zeta, "type-ball half width in units of alpha (default 1.0)");
  c_sim->add_option("--trials", trials, "Monte-Carlo trials per point (0: exact only)");
  c_sim->add_option("--p", p_off, "off-innocent pmf, one value per non-innocent symbol");
  c_sim->add_flag("--exact-error", exact_error, "also compute the exact strategy error per n");

  auto* c_uni = app.add_subcommand("unitary", "block strategy and covertness certificate");
  int u_n = 8, m_max = 64;
  c_uni->add_option("file", path, "scenario JSON file")->required();
  c_uni->add_option("--n", u_n, "codeword length (default 8)");
  c_uni->add_option("--m-max", m_max, "orthogonalizer search cap (default 64)");

  auto* c_geo = app.add_subcommand("geometry", "tangent-space boundedness verdict + ratio probe");
  c_geo->add_option("file", path, "scenario JSON file")->required();

  auto* c_expand = app.add_subcommand("expand", "small-mixing expansion table of the divergence");
  std::vector<double> alphas;
  c_expand->add_option("file", path, "scenario JSON file")->required();
  c_expand->add_option("--alphas", alphas, "mixing weights (default 0.1 0.05 0.02 0.01)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  ctx.machine = format == "machine";
  Eigen::setNbThreads(threads);

  try {
    cs::ScenarioFile file = cs::load_scenario(path);
    if (c_check->parsed()) return cmd_check(file, ctx, tol, seed);
    if (c_exp->parsed()) {
      cs::ExponentOptions opt;
      opt.restarts = restarts;
      opt.nm_iterations = nm_iters;
      opt.seed = seed;
      opt.assumption_tol = tol;
      opt.skip_assumption_check = skip_check;
      return cmd_exponent(file, ctx, opt);
    }
    if (c_sim->parsed())
      return cmd_simulate(file, ctx, n_list, alpha, zeta, trials, seed, p_off, exact_error);
    if (c_uni->parsed()) return cmd_unitary(file, ctx, u_n, m_max);
    if (c_geo->parsed()) return cmd_geometry(file, ctx, seed);
    if (c_expand->parsed()) return cmd_expand(file, ctx, alphas);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const cs::ScaleExceededError& e) {
    std::cerr << "scale exceeded: " << e.what() << "\n";
    return 3;
  } catch (const cs::AssumptionViolatedError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::NoZeroEquivalentPairError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::NotClassicalError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::SupportViolationError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::BlockTooLongError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::DegenerateAlphaError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::IdentityUnitaryError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::OrthogonalizerNotFoundError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const cs::EmptyTypeBallError& e) {
    std::cerr << "assumption violated: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
