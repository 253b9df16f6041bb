#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace covertsense {

// ---------------------------------------------------------------------------
// Type-ball constrained input law.
//
// The sender draws an n-letter input from the iid law P^n conditioned on the
// set A of sequences whose type Q stays within alpha*zeta of P on every
// non-innocent symbol. Everything here is exact (method of types), which caps
// the scale at n <= 24 and |U| <= 4.
// ---------------------------------------------------------------------------

struct InputType {
  std::vector<int> counts;  // per symbol, sums to n
  double multiplicity;      // number of sequences of this type (exact integer value)
  double mass;              // P^n mass of the whole type class
};

struct ConstrainedInputLaw {
  std::vector<double> P;  // single-letter pmf over the alphabet
  int innocent = 0;
  double alpha = 0.0;     // 1 - P[innocent]
  double zeta = 0.0;      // type-ball half width, in units of alpha
  int n = 0;
  std::vector<InputType> types;  // types inside the ball
  double mass_A = 0.0;           // total conditioned mass, in (0, 1]
};

namespace detail {

inline double multinomial_coefficient(int n, const std::vector<int>& counts) {
  double coeff = 1.0;
  int rem = n;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      coeff = coeff * (rem - c + i) / i;  // running product of binomials stays integral
    }
    rem -= c;
  }
  return std::round(coeff);
}

inline void enumerate_compositions(int n, int k, std::vector<int>& cur,
                                   const std::function<void(const std::vector<int>&)>& emit) {
  if (k == 1) {
    cur.push_back(n);
    emit(cur);
    cur.pop_back();
    return;
  }
  for (int c = 0; c <= n; ++c) {
    cur.push_back(c);
    enumerate_compositions(n - c, k - 1, cur, emit);
    cur.pop_back();
  }
}

} // namespace detail

inline ConstrainedInputLaw build_input_law(const std::vector<double>& P, int innocent,
                                           double alpha, double zeta, int n) {
  const int k = static_cast<int>(P.size());
  if (k < 1 || innocent < 0 || innocent >= k)
    throw UnknownSymbolError("build_input_law: innocent index out of range");
  if (n < 1 || n > 24)
    throw ScaleExceededError("build_input_law: exact type enumeration supports 1 <= n <= 24, got " +
                             std::to_string(n));
  if (k > 4)
    throw ScaleExceededError("build_input_law: exact type enumeration supports alphabets up to 4 symbols");
  double mass = 0.0;
  for (double p : P) {
    if (p < -1e-12) throw DimensionMismatchError("build_input_law: negative pmf entry");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw DimensionMismatchError("build_input_law: pmf mass " + std::to_string(mass));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DimensionMismatchError("build_input_law: alpha must lie in (0,1)");
  if (std::abs((1.0 - P[innocent]) - alpha) > 1e-9)
    throw DimensionMismatchError("build_input_law: alpha must equal the off-innocent mass of P");
  if (!(zeta > 0.0)) throw DimensionMismatchError("build_input_law: zeta must be positive");

  ConstrainedInputLaw law;
  law.P = P;
  law.innocent = innocent;
  law.alpha = alpha;
  law.zeta = zeta;
  law.n = n;

  std::vector<int> cur;
  detail::enumerate_compositions(n, k, cur, [&](const std::vector<int>& counts) {
    for (int u = 0; u < k; ++u) {
      if (u == innocent) continue;
      if (std::abs(static_cast<double>(counts[u]) / n - P[u]) > alpha * zeta + 1e-15) return;
    }
    InputType t;
    t.counts = counts;
    t.multiplicity = detail::multinomial_coefficient(n, counts);
    double m = t.multiplicity;
    for (int u = 0; u < k; ++u) {
      if (counts[u] == 0) continue;
      if (P[u] <= 0.0) { m = 0.0; break; }
      m *= std::pow(P[u], counts[u]);
    }
    t.mass = m;
    if (t.mass > 0.0) law.types.push_back(std::move(t));
  });
  if (law.types.empty())
    throw EmptyTypeBallError("build_input_law: no type of length " + std::to_string(n) +
                             " falls inside the ball of half-width " + std::to_string(alpha * zeta));
  law.mass_A = 0.0;
  for (const auto& t : law.types) law.mass_A += t.mass;
  return law;
}

// Draw one sequence: pick a type with probability proportional to its class
// mass, then a uniformly random arrangement of that multiset.
inline std::vector<int> sample_input(const ConstrainedInputLaw& law, uint64_t seed) {
  std::mt19937_64 g = task_engine(seed, 0);
  double u = draw_unit(g) * law.mass_A;
  size_t pick = law.types.size() - 1;
  double acc = 0.0;
  for (size_t i = 0; i < law.types.size(); ++i) {
    acc += law.types[i].mass;
    if (u < acc) { pick = i; break; }
  }
  std::vector<int> seq;
  seq.reserve(law.n);
  const auto& counts = law.types[pick].counts;
  for (size_t s = 0; s < counts.size(); ++s)
    seq.insert(seq.end(), counts[s], static_cast<int>(s));
  for (int i = law.n - 1; i > 0; --i) {
    int j = static_cast<int>(draw_below(g, i + 1));
    std::swap(seq[i], seq[j]);
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Achievability kernel: per zero-equivalent pair,
//   log sum_Q P_U(T_Q) exp(-n Dcc(theta,theta'|Q)).
// This is the computable part of the error guarantee; the full guarantee adds
// an O(log n) term whose constant is scenario-dependent and is not invented
// here.
// ---------------------------------------------------------------------------

struct PairValue {
  int a = 0, b = 0;
  double value = 0.0;
};

inline std::vector<PairValue> achievability_kernel(const CqScenario& s, const ConstrainedInputLaw& law,
                                                   double pair_tol = 1e-9) {
  s.check();
  if (static_cast<int>(law.P.size()) != s.n_symbols() || law.innocent != s.innocent)
    throw UnknownSymbolError("achievability_kernel: law alphabet does not match scenario");
  auto pairs = zero_equivalent_pairs(s, pair_tol);
  if (pairs.empty()) throw NoZeroEquivalentPairError("achievability_kernel: no zero-equivalent pair");
  std::vector<PairValue> out;
  for (auto& pr : pairs) {
    double best = -kInf;  // running log-sum-exp maximum
    std::vector<double> terms;
    for (const auto& t : law.types) {
      std::vector<double> Q(s.n_symbols());
      for (int u = 0; u < s.n_symbols(); ++u) Q[u] = static_cast<double>(t.counts[u]) / law.n;
      ChernoffResult dcc = conditional_chernoff(s, pr.first, pr.second, Q);
      if (dcc.infinite()) continue;  // exp(-inf): the type contributes nothing
      double lt = std::log(t.mass / law.mass_A) - law.n * dcc.value;
      terms.push_back(lt);
      best = std::max(best, lt);
    }
    PairValue pv;
    pv.a = pr.first;
    pv.b = pr.second;
    if (terms.empty()) {
      pv.value = -kInf;
    } else {
      double acc = 0.0;
      for (double lt : terms) acc += std::exp(lt - best);
      pv.value = best + std::log(acc);
    }
    out.push_back(pv);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Covertness: computable upper bound and exact small-scale evaluation
// ---------------------------------------------------------------------------

// max over theta of
//   n D(sum_u P(u) W_u || W_0)
//   + dev * log(dimW / lambda_min(W_0)) * n + Hb(min(dev, 1/2)),
// where dev = 2|U| exp(-alpha n zeta^2 / 3) bounds the mass that conditioning
// on the type ball moves.
inline double covertness_bound(const CqScenario& s, const ConstrainedInputLaw& law) {
  s.check();
  if (static_cast<int>(law.P.size()) != s.n_symbols() || law.innocent != s.innocent)
    throw UnknownSymbolError("covertness_bound: law alphabet does not match scenario");
  const double dev = 2.0 * s.n_symbols() * std::exp(-law.alpha * law.n * law.zeta * law.zeta / 3.0);
  double worst = -kInf;
  for (int t = 0; t < s.n_params(); ++t) {
    Eigen::SelfAdjointEigenSolver<CMat> es(s.willie[t][s.innocent].mat(), Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin <= tol::support)
      throw SupportViolationError("covertness_bound: innocent warden state for parameter '" +
                                  s.params[t] + "' is singular");
    double d = rel_entropy(s.willie_mixture(t, law.P), s.willie[t][s.innocent].mat());
    double b = law.n * d +
               dev * std::log(s.dim_willie() / lmin) * law.n +
               binary_entropy(std::min(dev, 0.5));
    worst = std::max(worst, b);
  }
  return worst;
}

// Exact n-fold divergence of the conditioned input's warden marginal from the
// all-innocent one, maximized over theta. Dense construction: dimW^n capped.
inline double exact_covertness(const CqScenario& s, const ConstrainedInputLaw& law, long max_dim = 4096) {
  s.check();
  if (static_cast<int>(law.P.size()) != s.n_symbols() || law.innocent != s.innocent)
    throw UnknownSymbolError("exact_covertness: law alphabet does not match scenario");
  long dn = 1;
  for (int i = 0; i < law.n; ++i) {
    dn *= s.dim_willie();
    if (dn > max_dim)
      throw ScaleExceededError("exact_covertness: dimW^n exceeds " + std::to_string(max_dim));
  }
  const int nu = s.n_symbols();
  double worst = -kInf;
  for (int t = 0; t < s.n_params(); ++t) {
    // Prefix recursion: level k maps a count vector c (|c| = k) to the sum of
    // k-fold products over every sequence with those counts. One kron per
    // (state, symbol) instead of one kron chain per sequence.
    std::map<std::vector<int>, CMat> level;
    level[std::vector<int>(nu, 0)] = CMat::Identity(1, 1);
    CMat mix = CMat::Zero(dn, dn);
    for (int k = 1; k <= law.n; ++k) {
      const bool last = (k == law.n);
      std::map<std::vector<int>, CMat> next;
      for (const auto& [c, m] : level) {
        for (int u = 0; u < nu; ++u) {
          std::vector<int> c2 = c;
          ++c2[u];
          bool viable = false;  // some admissible final type must dominate c2
          for (const auto& ty : law.types) {
            bool dom = true;
            for (int v = 0; v < nu; ++v)
              if (c2[v] > ty.counts[v]) { dom = false; break; }
            if (dom) { viable = true; break; }
          }
          if (!viable) continue;
          if (last) {
            // fold the completed product into the mixture instead of storing
            // a dense matrix per final type
            for (const auto& ty : law.types)
              if (ty.counts == c2) {
                mix += ty.mass / (ty.multiplicity * law.mass_A) *
                       tensor(m, s.willie[t][u].mat());
                break;
              }
            continue;
          }
          CMat grown = tensor(m, s.willie[t][u].mat());
          auto it = next.find(c2);
          if (it == next.end()) next.emplace(std::move(c2), std::move(grown));
          else it->second += grown;
        }
      }
      level = std::move(next);
    }
    CMat innocent_n = tensor_power(s.willie[t][s.innocent].mat(), law.n);
    worst = std::max(worst, rel_entropy(mix, innocent_n));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Asymptotic exponent: maximize over off-innocent pmfs
//   rate(P) = sqrt(2) * min-pair Dcc(P) / sqrt(max_theta eta(mix_P || W_0)).
// ---------------------------------------------------------------------------

struct ExponentOptions {
  int restarts = 20;
  int nm_iterations = 600;
  uint64_t seed = 0xC0DE;
  double assumption_tol = 1e-9;
  bool skip_assumption_check = false;  // used by tests that build inadmissible toys on purpose
};

struct ExponentReport {
  double achievable_rate = 0.0;
  std::vector<double> P_star;          // full-alphabet pmf, innocent entry 0
  std::vector<PairValue> per_pair_dcc; // at P_star
  double worst_eta = 0.0;
  int worst_eta_param = 0;
  double converse_rate = 0.0;          // same ratio at P_star (the matching converse)
  std::string slack_note;
};

namespace detail {

struct RateParts {
  double rate, min_dcc, worst_eta;
  int worst_param;
  std::vector<PairValue> per_pair;
};

inline RateParts rate_at(const CqScenario& s, const std::vector<std::pair<int, int>>& pairs,
                         const std::vector<int>& off_symbols, const std::vector<double>& p_off) {
  std::vector<double> P(s.n_symbols(), 0.0);
  for (size_t i = 0; i < off_symbols.size(); ++i) P[off_symbols[i]] = p_off[i];
  RateParts out;
  out.min_dcc = kInf;
  out.per_pair.clear();
  for (auto& pr : pairs) {
    double v = conditional_chernoff(s, pr.first, pr.second, P).value;
    out.per_pair.push_back({pr.first, pr.second, v});
    out.min_dcc = std::min(out.min_dcc, v);
  }
  out.worst_eta = -kInf;
  out.worst_param = 0;
  for (int t = 0; t < s.n_params(); ++t) {
    double e = eta(s.willie_mixture(t, P), s.willie[t][s.innocent].mat());
    if (e > out.worst_eta) { out.worst_eta = e; out.worst_param = t; }
  }
  out.rate = out.worst_eta > 0.0 ? std::sqrt(2.0) * out.min_dcc / std::sqrt(out.worst_eta) : kInf;
  return out;
}

// Nelder-Mead on R^k, minimizing
inline std::vector<double> nelder_mead(std::function<double(const std::vector<double>&)> f,
                                       std::vector<double> x0, int iterations, double spread_tol = 1e-12) {
  const int k = static_cast<int>(x0.size());
  std::vector<std::vector<double>> xs(k + 1, x0);
  std::vector<double> fx(k + 1);
  for (int i = 1; i <= k; ++i) xs[i][i - 1] += 0.5;
  for (int i = 0; i <= k; ++i) fx[i] = f(xs[i]);
  auto order = [&]() {
    std::vector<int> idx(k + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> nxs(k + 1);
    std::vector<double> nfx(k + 1);
    for (int i = 0; i <= k; ++i) { nxs[i] = xs[idx[i]]; nfx[i] = fx[idx[i]]; }
    xs = nxs; fx = nfx;
  };
  for (int it = 0; it < iterations; ++it) {
    order();
    if (std::abs(fx[k] - fx[0]) < spread_tol) break;
    std::vector<double> centroid(k, 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) centroid[j] += xs[i][j] / k;
    auto blend = [&](double c) {
      std::vector<double> y(k);
      for (int j = 0; j < k; ++j) y[j] = centroid[j] + c * (centroid[j] - xs[k][j]);
      return y;
    };
    auto xr = blend(1.0);
    double fr = f(xr);
    if (fr < fx[0]) {
      auto xe = blend(2.0);
      double fe = f(xe);
      if (fe < fr) { xs[k] = xe; fx[k] = fe; } else { xs[k] = xr; fx[k] = fr; }
    } else if (fr < fx[k - 1]) {
      xs[k] = xr; fx[k] = fr;
    } else {
      auto xc = blend(-0.5);
      double fc = f(xc);
      if (fc < fx[k]) {
        xs[k] = xc; fx[k] = fc;
      } else {
        for (int i = 1; i <= k; ++i) {
          for (int j = 0; j < k; ++j) xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
          fx[i] = f(xs[i]);
        }
      }
    }
  }
  order();
  return xs[0];
}

inline std::vector<double> softmax(const std::vector<double>& x) {
  double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> p(x.size());
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) { p[i] = std::exp(x[i] - mx); s += p[i]; }
  for (double& v : p) v /= s;
  return p;
}

} // namespace detail

inline ExponentReport optimize_exponent(const CqScenario& s, const ExponentOptions& opt = {}) {
  s.check();
  auto pairs = zero_equivalent_pairs(s, opt.assumption_tol);
  if (pairs.empty())
    throw NoZeroEquivalentPairError("optimize_exponent: no pair of parameters shares the innocent output");
  if (!opt.skip_assumption_check) {
    auto a = check_assumptions(s, opt.assumption_tol);
    if (!a.innocent_unsimulable)
      throw AssumptionViolatedError("optimize_exponent: the innocent warden output is simulable; " +
                                    a.diagnostics);
    if (!a.willie_supports_nested)
      throw AssumptionViolatedError("optimize_exponent: warden supports are not nested; " + a.diagnostics);
  }
  std::vector<int> off;
  for (int u = 0; u < s.n_symbols(); ++u)
    if (u != s.innocent) off.push_back(u);
  const int k = static_cast<int>(off.size());
  if (k == 0) throw UnknownSymbolError("optimize_exponent: alphabet has no non-innocent symbol");

  auto parts = [&](const std::vector<double>& p_off) { return detail::rate_at(s, pairs, off, p_off); };
  auto rate = [&](const std::vector<double>& p_off) { return parts(p_off).rate; };

  std::vector<double> best_p(k, 1.0 / k);
  double best = rate(best_p);

  if (k == 2) {
    // one-dimensional: dense grid plus local ternary refinement
    const int grid = 2000;
    int best_i = -1;
    for (int i = 0; i <= grid; ++i) {
      double t = static_cast<double>(i) / grid;
      double v = rate({t, 1.0 - t});
      if (v > best) { best = v; best_p = {t, 1.0 - t}; best_i = i; }
    }
    if (best_i >= 0) {
      double lo = std::max(0.0, (best_i - 1.0) / grid), hi = std::min(1.0, (best_i + 1.0) / grid);
      for (int it = 0; it < 80; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (rate({m1, 1.0 - m1}) < rate({m2, 1.0 - m2})) lo = m1; else hi = m2;
      }
      double t = 0.5 * (lo + hi);
      double v = rate({t, 1.0 - t});
      if (v > best) { best = v; best_p = {t, 1.0 - t}; }
    }
  } else if (k > 2) {
    auto neg = [&](const std::vector<double>& x) { return -rate(detail::softmax(x)); };
    for (int r = 0; r < opt.restarts; ++r) {
      std::mt19937_64 g = task_engine(opt.seed, r);
      std::vector<double> x0(k, 0.0);
      if (r > 0)
        for (double& v : x0) v = 1.5 * draw_gauss(g);
      auto xb = detail::nelder_mead(neg, x0, opt.nm_iterations);
      auto p = detail::softmax(xb);
      double v = rate(p);
      if (v > best) { best = v; best_p = p; }
    }
    if (k == 3) {
      // coarse simplex grid, then shrink a local pattern around the incumbent
      const int g3 = 100;
      for (int i = 0; i <= g3; ++i)
        for (int j = 0; j <= g3 - i; ++j) {
          std::vector<double> p = {static_cast<double>(i) / g3, static_cast<double>(j) / g3,
                                   static_cast<double>(g3 - i - j) / g3};
          double v = rate(p);
          if (v > best) { best = v; best_p = p; }
        }
    }
    for (double step = 0.02; step > 1e-8; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            std::vector<double> p = best_p;
            double delta = std::min(step, p[j]);
            if (delta <= 0.0) continue;
            p[i] += delta;
            p[j] -= delta;
            double v = rate(p);
            if (v > best + 1e-15) { best = v; best_p = p; improved = true; }
          }
      }
    }
  }

  auto fin = parts(best_p);
  ExponentReport rep;
  rep.achievable_rate = fin.rate;
  rep.P_star.assign(s.n_symbols(), 0.0);
  for (int i = 0; i < k; ++i) rep.P_star[off[i]] = best_p[i];
  rep.per_pair_dcc = fin.per_pair;
  rep.worst_eta = fin.worst_eta;
  rep.worst_eta_param = fin.worst_param;
  rep.converse_rate = fin.rate;
  rep.slack_note = "rate = sqrt(2) * min-pair conditional divergence / sqrt(worst curvature); "
                   "finite-n corrections enter at relative order alpha and are not folded in";
  return rep;
}

// ---------------------------------------------------------------------------
// Converse-side quantities for a given strategy (its per-position marginals)
// ---------------------------------------------------------------------------

struct ConverseReport {
  std::vector<double> P_bar;    // average per-letter input pmf
  std::vector<double> P_tilde;  // off-innocent renormalization of P_bar
  double alpha_n = 0.0;         // off-innocent mass of P_bar
  double kernel1 = 0.0;         // n * alpha_n * min-pair Dcc(P_tilde)
  double kernel2 = 0.0;         // (alpha_n^2/2) * worst eta at P_tilde, per letter
  int min_pair_a = 0, min_pair_b = 0;
  int worst_eta_param = 0;
  std::string slack_note;
};

inline ConverseReport converse_quantities(const std::vector<std::vector<double>>& marginals,
                                          const CqScenario& s, double pair_tol = 1e-9) {
  s.check();
  if (marginals.empty()) throw DimensionMismatchError("converse_quantities: no marginals");
  const int n = static_cast<int>(marginals.size());
  const int k = s.n_symbols();
  ConverseReport rep;
  rep.P_bar.assign(k, 0.0);
  for (const auto& m : marginals) {
    if (static_cast<int>(m.size()) != k)
      throw UnknownSymbolError("converse_quantities: marginal length does not match alphabet");
    double mass = 0.0;
    for (double p : m) {
      if (p < -1e-12) throw DimensionMismatchError("converse_quantities: negative pmf entry");
      mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw DimensionMismatchError("converse_quantities: marginal mass " + std::to_string(mass));
    for (int u = 0; u < k; ++u) rep.P_bar[u] += m[u] / n;
  }
  rep.alpha_n = 1.0 - rep.P_bar[s.innocent];
  if (rep.alpha_n <= 0.0)
    throw DegenerateAlphaError("converse_quantities: strategy never leaves the innocent symbol");
  rep.P_tilde.assign(k, 0.0);
  for (int u = 0; u < k; ++u)
    if (u != s.innocent) rep.P_tilde[u] = rep.P_bar[u] / rep.alpha_n;

  auto pairs = zero_equivalent_pairs(s, pair_tol);
  if (pairs.empty()) throw NoZeroEquivalentPairError("converse_quantities: no zero-equivalent pair");
  double min_dcc = kInf;
  for (auto& pr : pairs) {
    double v = conditional_chernoff(s, pr.first, pr.second, rep.P_tilde).value;
    if (v < min_dcc) { min_dcc = v; rep.min_pair_a = pr.first; rep.min_pair_b = pr.second; }
  }
  rep.kernel1 = n * rep.alpha_n * min_dcc;

  double worst = -kInf;
  for (int t = 0; t < s.n_params(); ++t) {
    double e = eta(s.willie_mixture(t, rep.P_tilde), s.willie[t][s.innocent].mat());
    if (e > worst) { worst = e; rep.worst_eta_param = t; }
  }
  rep.kernel2 = 0.5 * rep.alpha_n * rep.alpha_n * worst;
  rep.slack_note = "kernel1 omits an additive O(log n) term; kernel2 is the per-letter "
                   "second-order covertness cost, n * kernel2 + O(n alpha^3) bounds the total budget";
  return rep;
}

} // namespace covertsense
