// Acceptance gate: one line per criterion, PASS/FAIL, nonzero exit count on
// failure. Tolerances and runtime budgets are pinned here and nowhere else.

#include <covertsense/covert_exponent.hpp>
#include <covertsense/discriminate.hpp>
#include <covertsense/geometry.hpp>
#include <covertsense/scenario_io.hpp>
#include <covertsense/unitary_strategy.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace covertsense;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void run_criterion(int idx, double budget_s, const std::string& title,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  auto t0 = Clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  bool in_budget = dt <= budget_s;
  if (!ok || !in_budget) ++failures;
  std::printf("%s criterion %d: %s [%.1fs of %.0fs]%s%s\n",
              ok && in_budget ? "PASS" : "FAIL", idx, title.c_str(), dt, budget_s,
              detail.empty() ? "" : (" -- " + detail).c_str(),
              ok && !in_budget ? " (over budget)" : "");
  std::fflush(stdout);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) { mx += x[i] / n; my += y[i] / n; }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

CqScenario load_cq(const std::string& name) {
  ScenarioFile f = load_scenario(std::string(FIXTURE_DIR) + "/" + name);
  return *f.cq;
}

UnitaryScenario load_unitary(const std::string& name) {
  ScenarioFile f = load_scenario(std::string(FIXTURE_DIR) + "/" + name);
  return *f.unitary;
}

// Two-symbol scenario whose probe states are nearly orthogonal, so the
// multi-state Chernoff bound drops below one at enumerable lengths.
CqScenario make_sharp() {
  CqScenario s;
  s.params = {"theta0", "theta1"};
  s.alphabet = {"idle", "probe"};
  s.innocent = 0;
  CMat idle(2, 2), w_idle(2, 2), p0(2, 2), p1(2, 2), w_probe(2, 2);
  idle << 0.5, 0, 0, 0.5;
  w_idle << 0.6, 0, 0, 0.4;
  p0 << 0.999, 0, 0, 0.001;
  p1 << 0.001, 0, 0, 0.999;
  w_probe << 0.55, 0, 0, 0.45;
  s.bob = {{DensityOperator(idle), DensityOperator(p0)},
           {DensityOperator(idle), DensityOperator(p1)}};
  s.willie = {{DensityOperator(w_idle), DensityOperator(w_probe)},
              {DensityOperator(w_idle), DensityOperator(w_probe)}};
  return s;
}

// ---------------------------------------------------------------------------
// 1. divergence expansion: the residual against the quadratic term is cubic
// ---------------------------------------------------------------------------
// The remainder of a single draw is c3*a^3 + c4*a^4 + ...; c3 is a signed sum
// and lands near zero for a few draws in every hundred, where the pinned
// alpha window is not yet asymptotic and the 4-point slope strays in either
// direction (it re-converges to 3 below a ~ 1e-3). The slope band therefore
// applies to the ensemble median; the per-draw decay check tolerates the same
// outliers.
bool crit1(std::string& detail) {
  auto g = task_engine(0xAC01, 0);
  const std::vector<double> alphas = {0.1, 0.05, 0.02, 0.01};
  std::vector<double> slopes;
  int decay_ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = (rep % 2 == 0) ? 2 : 3;
    CMat rho1 = random_density(d, g);
    CMat rho0 = random_density(d, g);
    rho0 = (0.7 * rho0 + (0.3 / d) * CMat::Identity(d, d)).eval();  // full rank
    auto rows = expansion_table(rho1, rho0, alphas);
    std::vector<double> lx, ly;
    bool degenerate = false;
    for (const auto& r : rows) {
      if (r.residual < 1e-13) degenerate = true;  // at rounding noise, slope meaningless
      lx.push_back(std::log(r.alpha));
      ly.push_back(std::log(std::max(r.residual, 1e-300)));
    }
    if (degenerate) continue;
    slopes.push_back(fit_slope(lx, ly));
    double head = rows.front().residual / (alphas.front() * alphas.front());
    double tail = rows.back().residual / (alphas.back() * alphas.back());
    if (tail < 0.25 * head) ++decay_ok;
  }
  if (slopes.size() < 90) {
    detail = "only " + std::to_string(slopes.size()) + " non-degenerate draws";
    return false;
  }
  std::sort(slopes.begin(), slopes.end());
  double median = slopes[slopes.size() / 2];
  if (std::abs(median - 3.0) > 0.15) {
    detail = "median log-log slope " + std::to_string(median);
    return false;
  }
  if (decay_ok < 90) {
    detail = "residual/alpha^2 vanishing on only " + std::to_string(decay_ok) + " draws";
    return false;
  }
  detail = std::to_string(slopes.size()) + " random pairs, median slope " +
           std::to_string(median) + ", decay on " + std::to_string(decay_ok);
  return true;
}

// ---------------------------------------------------------------------------
// 2. Monte-Carlo exponent of the classical fixture matches the conditional
//    Chernoff rate
// ---------------------------------------------------------------------------
bool crit2(std::string& detail) {
  CqScenario s = load_cq("classical_pair.json");
  const std::vector<double> p_off = {0.0, 1.0, 0.0};  // all off-innocent mass on "probe"
  double target = conditional_chernoff(s, 0, 1, p_off).value;
  RegressionReport rep = exponent_regression(s, p_off, {0.05, 0.1}, {64, 128, 256, 512},
                                             100000, 0xAC02);
  if (rep.fit_points < 6) {
    detail = "only " + std::to_string(rep.fit_points) + " nonzero-error points";
    return false;
  }
  double rel = std::abs(rep.slope - target) / target;
  detail = "slope " + std::to_string(rep.slope) + " vs rate " + std::to_string(target) +
           ", relative gap " + std::to_string(rel);
  return rel <= 0.15;
}

// ---------------------------------------------------------------------------
// 3. exact covertness of the conditioned input law stays below its certificate
//    and tracks the iid mixture divergence per letter
// ---------------------------------------------------------------------------
bool crit3(std::string& detail) {
  CqScenario s = load_cq("quantum_pair.json");
  const double alpha = 0.25, zeta = 1.5;
  const std::vector<double> P = {1.0 - alpha, alpha / 2.0, alpha / 2.0};
  double exact8 = 0.0;
  for (int n : {4, 6, 8}) {
    ConstrainedInputLaw law = build_input_law(P, s.innocent, alpha, zeta, n);
    double exact = exact_covertness(s, law);
    double bound = covertness_bound(s, law);
    if (!(exact <= bound)) {
      detail = "n=" + std::to_string(n) + ": exact " + std::to_string(exact) +
               " above bound " + std::to_string(bound);
      return false;
    }
    if (n == 8) exact8 = exact;
  }
  double iid = 0.0;
  for (int t = 0; t < s.n_params(); ++t)
    iid = std::max(iid, rel_entropy(s.willie_mixture(t, P), s.willie[t][s.innocent].mat()));
  double rel = std::abs(exact8 / 8.0 - iid) / iid;
  detail = "exact/n " + std::to_string(exact8 / 8.0) + " vs iid divergence " +
           std::to_string(iid) + ", relative gap " + std::to_string(rel);
  return rel <= 0.10;
}

// ---------------------------------------------------------------------------
// 4. Helstrom closed form on pure qubit pairs; pretty good measurement within
//    a factor two
// ---------------------------------------------------------------------------
bool crit4(std::string& detail) {
  auto g = task_engine(0xAC04, 0);
  double worst_gap = 0.0, worst_factor = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    CVec psi = random_pure(2, g), phi = random_pure(2, g);
    CMat r0 = projector(psi), r1 = projector(phi);
    double c2 = std::norm(psi.dot(phi));
    double closed = 0.5 * (1.0 - std::sqrt(1.0 - c2));
    DiscriminationResult h = helstrom(r0, r1);
    double h_avg = 0.5 * (h.per_param_error[0] + h.per_param_error[1]);
    worst_gap = std::max(worst_gap, std::abs(h_avg - closed));
    DiscriminationResult p = pgm({r0, r1});
    double p_avg = 0.5 * (p.per_param_error[0] + p.per_param_error[1]);
    if (h_avg > 1e-15) worst_factor = std::max(worst_factor, p_avg / h_avg);
    else if (p_avg > 1e-12) { detail = "pgm error without helstrom error"; return false; }
  }
  detail = "worst closed-form gap " + std::to_string(worst_gap) + ", worst pgm/helstrom " +
           std::to_string(worst_factor);
  return worst_gap <= 1e-10 && worst_factor <= 2.0 + 1e-9;
}

// ---------------------------------------------------------------------------
// 5. phase-gate pair: two-copy orthogonalizer, zero discrimination error, and
//    O(1/n) exact disturbance under the depolarizing warden tap
// ---------------------------------------------------------------------------
bool crit5(std::string& detail) {
  UnitaryScenario scen = load_unitary("unitary_pair.json");
  BlockStrategy strat6 = build_block_strategy(scen, 6);
  if (strat6.m != 2) {
    detail = "probe length " + std::to_string(strat6.m) + ", expected 2";
    return false;
  }
  for (const auto& pv : zero_error_overlaps(strat6, scen))
    if (pv.value > 1e-10) {
      detail = "pair overlap " + std::to_string(pv.value);
      return false;
    }
  std::vector<CMat> states = global_strategy_states(strat6, scen);
  DiscriminationResult r = pgm(states);
  if (r.error > 1e-9) {
    detail = "global-state pgm error " + std::to_string(r.error);
    return false;
  }

  std::vector<double> lx, ly;
  for (int n : {4, 6, 8, 10}) {
    BlockStrategy strat = build_block_strategy(scen, n);
    CovertnessCertificate cert = covertness_certificate(strat, scen);
    if (!cert.exact) {
      detail = "exact divergence unavailable at n=" + std::to_string(n);
      return false;
    }
    if (!(*cert.exact <= cert.chi2_over_ell * (1.0 + 1e-12) + 1e-15)) {
      detail = "n=" + std::to_string(n) + ": exact " + std::to_string(*cert.exact) +
               " above chi2/ell " + std::to_string(cert.chi2_over_ell);
      return false;
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(*cert.exact));
  }
  double slope = fit_slope(lx, ly);
  detail = "disturbance log-log slope " + std::to_string(slope) + " vs n";
  return slope >= -1.25 && slope <= -0.8;
}

// ---------------------------------------------------------------------------
// 6. the classical embedding of a qubit pair never beats quantum
//    discrimination by more than a factor two in success
// ---------------------------------------------------------------------------
bool crit6(std::string& detail) {
  auto g = task_engine(0xAC06, 0);
  double worst_margin = kInf;
  for (int rep = 0; rep < 1000; ++rep) {
    CMat rho = random_density(2, g, (rep % 3 == 0) ? 1 : -1);
    CMat sigma = random_density(2, g, (rep % 5 == 0) ? 1 : -1);
    double lhs = 1.0 - 0.5 * trace_norm((rho - sigma).eval());
    NsEmbedding ns = ns_embedding(rho, sigma);
    double rhs = 0.5 * (1.0 - 0.5 * l1_distance(ns.first, ns.second));
    if (lhs < rhs - 1e-12) {
      detail = "violated at draw " + std::to_string(rep) + ": " + std::to_string(lhs) +
               " < " + std::to_string(rhs);
      return false;
    }
    worst_margin = std::min(worst_margin, lhs - rhs);
  }
  detail = "1000 random pairs, smallest margin " + std::to_string(worst_margin);
  return true;
}

// ---------------------------------------------------------------------------
// 7. first-order boundedness verdicts with witness-driven ratio growth
// ---------------------------------------------------------------------------
bool crit7(std::string& detail) {
  CVec ket0(2);
  ket0 << 1, 0;

  KrausChannel hadamard;
  {
    CMat h(2, 2);
    h << 1, 1, 1, -1;
    hadamard.ops = {h / std::sqrt(2.0)};
  }
  KrausChannel dephasing;
  {
    CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
    k0(0, 0) = 1.0;
    k1(1, 1) = 1.0;
    dephasing.ops = {k0, k1};
  }
  KrausChannel damping;  // amplitude damping, gamma = 0.5
  {
    CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(0.5);
    k1(0, 1) = std::sqrt(0.5);
    damping.ops = {k0, k1};
  }

  BoundednessVerdict vu = boundedness_verdict(hadamard, ket0);
  if (!vu.bounded || vu.witness) { detail = "unitary conjugation not ruled bounded"; return false; }
  BoundednessVerdict vd = boundedness_verdict(dephasing, ket0);
  if (vd.bounded || !vd.witness) { detail = "dephasing not ruled unbounded with witness"; return false; }
  BoundednessVerdict va = boundedness_verdict(damping, ket0);
  if (!va.bounded) { detail = "amplitude damping gamma=0.5 not ruled bounded"; return false; }

  RatioProbeReport grow = ratio_probe(dephasing, ket0, vd.witness);
  for (size_t i = 1; i < grow.rows.size(); ++i) {
    double g = grow.rows[i].witness_ratio / grow.rows[i - 1].witness_ratio;
    if (!(g >= 9.9)) {
      detail = "witness growth per decade " + std::to_string(g);
      return false;
    }
  }

  for (const auto* ch : {&hadamard, &damping}) {
    RatioProbeReport flat = ratio_probe(*ch, ket0);
    double lo = kInf, hi = 0.0;
    for (const auto& row : flat.rows) {
      lo = std::min(lo, row.max_ratio);
      hi = std::max(hi, row.max_ratio);
    }
    if (!(hi <= 2.0 * lo)) {
      detail = "bounded-channel ratio spread " + std::to_string(hi / lo);
      return false;
    }
  }
  detail = "verdicts correct; witness ratio grows >= 9.9x per decade, plateaus within 2x";
  return true;
}

// ---------------------------------------------------------------------------
// 8. whenever the averaged multi-state Chernoff bound is informative, the
//    exact strategy error sits below it
// ---------------------------------------------------------------------------
bool crit8(std::string& detail) {
  std::vector<std::pair<std::string, CqScenario>> fixtures;
  fixtures.emplace_back("classical", load_cq("classical_pair.json"));
  fixtures.emplace_back("quantum", load_cq("quantum_pair.json"));
  fixtures.emplace_back("sharp", make_sharp());

  int informative = 0;
  for (const auto& [name, s] : fixtures) {
    const int k = s.n_symbols();
    std::vector<double> P(k, 0.0);
    const double alpha = 0.5;
    P[s.innocent] = 1.0 - alpha;
    for (int u = 0; u < k; ++u)
      if (u != s.innocent) P[u] = alpha / (k - 1);
    for (int n : {2, 4, 6}) {
      ConstrainedInputLaw law = build_input_law(P, s.innocent, alpha, 0.5, n);
      StrategyErrorReport rep = exact_strategy_error(s, law);
      if (rep.union_bound > 1.0) continue;
      ++informative;
      if (!(rep.error <= rep.union_bound)) {
        detail = name + " n=" + std::to_string(n) + ": error " + std::to_string(rep.error) +
                 " above bound " + std::to_string(rep.union_bound);
        return false;
      }
    }
  }
  if (informative == 0) {
    detail = "no instance with an informative bound";
    return false;
  }
  detail = std::to_string(informative) + " informative instances, all respected the bound";
  return true;
}

// ---------------------------------------------------------------------------
// 9. the achievable design reproduces the converse kernel, and the optimized
//    law dominates random off-innocent laws
// ---------------------------------------------------------------------------
bool crit9(std::string& detail) {
  for (const std::string& name : {std::string("classical_pair.json"), std::string("quantum_pair.json")}) {
    CqScenario s = load_cq(name);
    const int k = s.n_symbols();
    const int n = 8;
    const double delta = 0.01, lambda = 0.3;

    std::vector<double> p_tilde(k, 0.0);
    for (int u = 0; u < k; ++u)
      if (u != s.innocent) p_tilde[u] = 1.0 / (k - 1);
    double worst_eta = 0.0;
    for (int t = 0; t < s.n_params(); ++t)
      worst_eta = std::max(worst_eta, eta(s.willie_mixture(t, p_tilde),
                                          s.willie[t][s.innocent].mat()));
    double alpha = std::sqrt(2.0 * delta * (1.0 - lambda) / (n * worst_eta));
    if (!(alpha > 0.0 && alpha < 1.0)) {
      detail = "design alpha " + std::to_string(alpha) + " out of range";
      return false;
    }
    std::vector<double> marginal(k, 0.0);
    marginal[s.innocent] = 1.0 - alpha;
    for (int u = 0; u < k; ++u)
      if (u != s.innocent) marginal[u] = alpha * p_tilde[u];
    ConverseReport conv = converse_quantities(std::vector<std::vector<double>>(n, marginal), s);
    double gap = std::abs(n * conv.kernel2 - delta * (1.0 - lambda));
    if (gap > 1e-8) {
      detail = name + ": kernel identity gap " + std::to_string(gap);
      return false;
    }

    ExponentReport rep = optimize_exponent(s);
    auto pairs = zero_equivalent_pairs(s);
    auto rate_of = [&](const std::vector<double>& q) {
      double min_dcc = kInf;
      for (const auto& pr : pairs)
        min_dcc = std::min(min_dcc, conditional_chernoff(s, pr.first, pr.second, q).value);
      double we = 0.0;
      for (int t = 0; t < s.n_params(); ++t)
        we = std::max(we, eta(s.willie_mixture(t, q), s.willie[t][s.innocent].mat()));
      return we > 0.0 ? std::sqrt(2.0) * min_dcc / std::sqrt(we) : kInf;
    };
    auto g = task_engine(0xAC09, 0);
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
      std::vector<double> q(k, 0.0);
      double mass = 0.0;
      for (int u = 0; u < k; ++u)
        if (u != s.innocent) { q[u] = -std::log(draw_unit(g)); mass += q[u]; }
      for (int u = 0; u < k; ++u) q[u] /= mass;
      if (rate_of(q) > rep.achievable_rate * (1.0 + 1e-9)) {
        detail = name + ": random law beats the optimized rate";
        return false;
      }
    }
  }
  detail = "kernel identity within 1e-8 and 100-point dominance on both fixtures";
  return true;
}

}  // namespace

int main() {
  run_criterion(1, 10.0, "divergence expansion residual is cubic in the mixing weight", crit1);
  run_criterion(2, 300.0, "empirical discrimination exponent matches the conditional Chernoff rate", crit2);
  run_criterion(3, 60.0, "exact covertness respects its certificate and tracks the iid divergence", crit3);
  run_criterion(4, 5.0, "Helstrom closed form and pretty-good-measurement factor two", crit4);
  run_criterion(5, 120.0, "block orthogonalizer: zero error with O(1/n) warden disturbance", crit5);
  run_criterion(6, 5.0, "classical embedding lower-bounds quantum discrimination success", crit6);
  run_criterion(7, 30.0, "tangent-space boundedness verdicts and ratio trends", crit7);
  run_criterion(8, 60.0, "exact strategy error sits below the informative union bound", crit8);
  run_criterion(9, 120.0, "design weight reproduces the converse kernel; optimum dominates", crit9);
  std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "OK" : "FAILURES", failures);
  return failures;
}
