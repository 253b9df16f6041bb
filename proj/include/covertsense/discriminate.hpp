#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "covert_exponent.hpp"

namespace covertsense {

struct Povm {
  std::vector<CMat> elements;
};

inline void validate_povm(const Povm& povm) {
  if (povm.elements.empty()) throw DimensionMismatchError("povm: no elements");
  const int d = static_cast<int>(povm.elements[0].rows());
  CMat sum = CMat::Zero(d, d);
  for (const auto& e : povm.elements) {
    require_hermitian(e, "povm element", 1e-9);
    if (e.rows() != d) throw DimensionMismatchError("povm: element dimensions differ");
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (e + e.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::povm_psd)
      throw NotPsdError("povm: element eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    sum += e;
  }
  if (entrywise_max(sum - CMat::Identity(d, d)) > tol::completeness)
    throw DimensionMismatchError("povm: elements do not resolve the identity");
}

struct DiscriminationResult {
  enum class Method { helstrom, pgm };
  std::vector<double> per_param_error;
  double error = 0.0;  // max over parameter values
  Povm povm;
  Method method = Method::helstrom;
};

// Optimal two-state measurement: project onto the positive part of rho0 - rho1.
inline DiscriminationResult helstrom(const CMat& rho0, const CMat& rho1) {
  require_hermitian(rho0, "helstrom");
  require_hermitian(rho1, "helstrom");
  if (rho0.rows() != rho1.rows()) throw DimensionMismatchError("helstrom: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho0 + rho0.adjoint()) - 0.5 * (rho1 + rho1.adjoint()));
  const int d = static_cast<int>(rho0.rows());
  CMat g0 = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    if (es.eigenvalues()(i) > 0.0)
      g0 += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  DiscriminationResult r;
  r.method = DiscriminationResult::Method::helstrom;
  r.povm.elements = {g0, CMat::Identity(d, d) - g0};
  r.per_param_error = {1.0 - (rho0 * r.povm.elements[0]).trace().real(),
                       1.0 - (rho1 * r.povm.elements[1]).trace().real()};
  for (double& e : r.per_param_error) e = std::clamp(e, 0.0, 1.0);
  r.error = std::max(r.per_param_error[0], r.per_param_error[1]);
  return r;
}

// Pretty good measurement for any finite family. The inverse square root is
// taken on the support of the average (cutoff 1e-12 relative); the deficit
// from identity is split evenly so the POVM is complete.
inline DiscriminationResult pgm(const std::vector<CMat>& states) {
  if (states.size() < 2) throw DimensionMismatchError("pgm: need at least two states");
  const int d = static_cast<int>(states[0].rows());
  CMat s = CMat::Zero(d, d);
  for (const auto& st : states) {
    require_hermitian(st, "pgm");
    if (st.rows() != d) throw DimensionMismatchError("pgm: dimension mismatch");
    s += st;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (s + s.adjoint()));
  const double cutoff = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0);
  RVec inv_sqrt(d);
  CMat pi_s = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    if (es.eigenvalues()(i) > cutoff) {
      inv_sqrt(i) = 1.0 / std::sqrt(es.eigenvalues()(i));
      pi_s += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    } else {
      inv_sqrt(i) = 0.0;
    }
  }
  CMat root = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  CMat outside = (CMat::Identity(d, d) - pi_s) / static_cast<double>(states.size());
  DiscriminationResult r;
  r.method = DiscriminationResult::Method::pgm;
  for (const auto& st : states) r.povm.elements.push_back(root * st * root + outside);
  for (size_t t = 0; t < states.size(); ++t) {
    double e = 1.0 - (states[t] * r.povm.elements[t]).trace().real();
    r.per_param_error.push_back(std::clamp(e, 0.0, 1.0));
  }
  r.error = *std::max_element(r.per_param_error.begin(), r.per_param_error.end());
  return r;
}

// Existence bound for multi-state discrimination:
//   10 (m-1)^2 max_theta nu(rho_theta) sum_{theta != theta'} exp(-Chernoff),
// with nu the number of distinct eigenvalues and the sum over ordered pairs.
// The value may exceed 1, in which case it says nothing.
inline double multi_chernoff_bound(const std::vector<CMat>& states, double cluster_tol = tol::cluster) {
  if (states.size() < 2) throw DimensionMismatchError("multi_chernoff_bound: need at least two states");
  const double m = static_cast<double>(states.size());
  int max_nu = 1;
  for (const auto& st : states) max_nu = std::max(max_nu, distinct_eigenvalues(st, cluster_tol));
  double sum = 0.0;
  for (size_t a = 0; a < states.size(); ++a)
    for (size_t b = 0; b < states.size(); ++b) {
      if (a == b) continue;
      ChernoffResult c = chernoff(states[a], states[b]);
      if (!c.infinite()) sum += std::exp(-c.value);
    }
  return 10.0 * (m - 1.0) * (m - 1.0) * max_nu * sum;
}

// ---------------------------------------------------------------------------
// Exact error of the constrained-input strategy at small scale: for every
// sequence in the conditioned set, measure the per-sequence product states
// with the pretty good measurement and average per-sequence errors.
// ---------------------------------------------------------------------------

struct StrategyErrorReport {
  std::vector<double> per_param_error;
  double error = 0.0;           // max over parameter values
  double union_bound = 0.0;     // sequence-averaged multi-state Chernoff bound
  long sequences = 0;
};

inline StrategyErrorReport exact_strategy_error(const CqScenario& s, const ConstrainedInputLaw& law,
                                                long max_sequences = 100000, long max_dim = 4096) {
  s.check();
  if (static_cast<int>(law.P.size()) != s.n_symbols() || law.innocent != s.innocent)
    throw UnknownSymbolError("exact_strategy_error: law alphabet does not match scenario");
  double seq_count = std::pow(static_cast<double>(s.n_symbols()), law.n);
  if (seq_count > static_cast<double>(max_sequences))
    throw ScaleExceededError("exact_strategy_error: |U|^n exceeds " + std::to_string(max_sequences));
  long dn = 1;
  for (int i = 0; i < law.n; ++i) {
    dn *= s.dim_bob();
    if (dn > max_dim)
      throw ScaleExceededError("exact_strategy_error: dimB^n exceeds " + std::to_string(max_dim));
  }
  StrategyErrorReport rep;
  rep.per_param_error.assign(s.n_params(), 0.0);
  for (const auto& ty : law.types) {
    double per_seq = ty.mass / (ty.multiplicity * law.mass_A);
    std::vector<int> seq;
    for (size_t u = 0; u < ty.counts.size(); ++u)
      seq.insert(seq.end(), ty.counts[u], static_cast<int>(u));
    std::sort(seq.begin(), seq.end());
    do {
      std::vector<CMat> states;
      for (int t = 0; t < s.n_params(); ++t) {
        CMat prod = s.bob[t][seq[0]].mat();
        for (int i = 1; i < law.n; ++i) prod = tensor(prod, s.bob[t][seq[i]].mat());
        states.push_back(std::move(prod));
      }
      DiscriminationResult r = pgm(states);
      for (int t = 0; t < s.n_params(); ++t)
        rep.per_param_error[t] += per_seq * r.per_param_error[t];
      rep.union_bound += per_seq * multi_chernoff_bound(states);
      ++rep.sequences;
    } while (std::next_permutation(seq.begin(), seq.end()));
  }
  rep.error = *std::max_element(rep.per_param_error.begin(), rep.per_param_error.end());
  return rep;
}

// ---------------------------------------------------------------------------
// Monte-Carlo error exponent regression (classical scenarios only)
// ---------------------------------------------------------------------------

struct RegressionPoint {
  int n = 0;
  double alpha = 0.0;
  long trials = 0;
  double error = 0.0;        // empirical max-over-theta error
  double ci_low = 0.0, ci_high = 0.0;
  std::vector<double> per_param_error;
  bool in_fit = true;        // dropped when the empirical error is zero
};

struct RegressionReport {
  std::vector<RegressionPoint> points;
  double slope = 0.0;        // of -log(error) against n * alpha
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int fit_points = 0;
  std::string note;
};

namespace detail {

// Common eigenbasis for a family of pairwise commuting Hermitians; throws
// NotClassical when off-diagonal mass survives in every candidate basis.
inline CMat common_eigenbasis(const std::vector<CMat>& states, double eps = 1e-10) {
  const int d = static_cast<int>(states[0].rows());
  const double weight_sets[3][2] = {{1.0, 0.6180339887}, {1.0, 0.3141592653}, {0.7, 1.1}};
  for (int ws = 0; ws < 3; ++ws) {
    CMat h = CMat::Zero(d, d);
    double w = 1.0;
    for (const auto& st : states) {
      h += w * st;
      w *= weight_sets[ws][1];
      w += weight_sets[ws][0] * 1e-3;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
    CMat v = es.eigenvectors();
    bool ok = true;
    for (const auto& st : states) {
      CMat rot = v.adjoint() * st * v;
      CMat off = rot - CMat(rot.diagonal().asDiagonal());
      if (entrywise_max(off) > eps) { ok = false; break; }
    }
    if (ok) return v;
  }
  throw NotClassicalError("scenario states do not commute within 1e-10");
}

} // namespace detail

// Empirical exponent of the maximum-likelihood decision for a classical
// scenario with independent inputs: inputs are drawn iid from the alpha-tilted
// law (innocent mass 1-alpha, off mass alpha * P_off), outputs from the
// per-symbol channels, and errors are counted for the exact ML rule. Count
// statistics make a single trial O(|U| |Y|) regardless of n.
inline RegressionReport exponent_regression(const CqScenario& s, const std::vector<double>& P_off,
                                            const std::vector<double>& alphas,
                                            const std::vector<int>& n_list, long trials,
                                            uint64_t seed) {
  s.check();
  if (static_cast<int>(P_off.size()) != s.n_symbols())
    throw UnknownSymbolError("exponent_regression: pmf length does not match alphabet");
  if (std::abs(P_off[s.innocent]) > 1e-12)
    throw UnknownSymbolError("exponent_regression: off-innocent pmf must give the innocent symbol mass 0");
  double mass = 0.0;
  for (double p : P_off) mass += p;
  if (std::abs(mass - 1.0) > 1e-9)
    throw DimensionMismatchError("exponent_regression: pmf mass " + std::to_string(mass));
  if (trials < 1) throw DimensionMismatchError("exponent_regression: trials must be positive");

  std::vector<CMat> all;
  for (int t = 0; t < s.n_params(); ++t)
    for (int u = 0; u < s.n_symbols(); ++u) all.push_back(s.bob[t][u].mat());
  CMat basis = detail::common_eigenbasis(all);

  const int nt = s.n_params(), nu = s.n_symbols(), ny = s.dim_bob();
  // channels[t][u][y]
  std::vector<std::vector<std::vector<double>>> chan(nt, std::vector<std::vector<double>>(nu));
  for (int t = 0; t < nt; ++t)
    for (int u = 0; u < nu; ++u) {
      CMat rot = basis.adjoint() * s.bob[t][u].mat() * basis;
      std::vector<double> p(ny);
      double tot = 0.0;
      for (int y = 0; y < ny; ++y) { p[y] = std::max(rot(y, y).real(), 0.0); tot += p[y]; }
      for (double& v : p) v /= tot;
      chan[t][u] = p;
    }

  RegressionReport rep;
  long task = 0;
  for (int n : n_list) {
    for (double alpha : alphas) {
      std::vector<double> p_in(nu);
      for (int u = 0; u < nu; ++u)
        p_in[u] = (u == s.innocent) ? 1.0 - alpha : alpha * P_off[u];
      std::mt19937_64 g = task_engine(seed, task++);
      std::vector<long> errors(nt, 0);
      std::vector<std::vector<long>> counts(nu, std::vector<long>(ny));
      for (long tr = 0; tr < trials; ++tr) {
        for (int truth = 0; truth < nt; ++truth) {
          // N(u): multinomial over the input law, by chained binomials
          long rem = n;
          double rem_mass = 1.0;
          std::vector<long> nu_counts(nu, 0);
          for (int u = 0; u < nu && rem > 0; ++u) {
            if (u == nu - 1) { nu_counts[u] = rem; rem = 0; break; }
            double pr = rem_mass > 0.0 ? std::clamp(p_in[u] / rem_mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<long> bin(rem, pr);
            long c = bin(g);
            nu_counts[u] = c;
            rem -= c;
            rem_mass -= p_in[u];
          }
          // N(u,y): per-symbol output counts under the true channel
          for (int u = 0; u < nu; ++u) {
            std::fill(counts[u].begin(), counts[u].end(), 0L);
            long r2 = nu_counts[u];
            double m2 = 1.0;
            for (int y = 0; y < ny && r2 > 0; ++y) {
              if (y == ny - 1) { counts[u][y] = r2; break; }
              double pr = m2 > 0.0 ? std::clamp(chan[truth][u][y] / m2, 0.0, 1.0) : 0.0;
              std::binomial_distribution<long> bin(r2, pr);
              long c = bin(g);
              counts[u][y] = c;
              r2 -= c;
              m2 -= chan[truth][u][y];
            }
          }
          // exact ML over the parameter values
          int best_t = 0;
          double best_ll = -kInf;
          for (int t = 0; t < nt; ++t) {
            double ll = 0.0;
            for (int u = 0; u < nu; ++u)
              for (int y = 0; y < ny; ++y) {
                if (counts[u][y] == 0) continue;
                double p = chan[t][u][y];
                ll += p > 0.0 ? counts[u][y] * std::log(p) : -1e300;
              }
            if (ll > best_ll) { best_ll = ll; best_t = t; }
          }
          if (best_t != truth) ++errors[truth];
        }
      }
      RegressionPoint pt;
      pt.n = n;
      pt.alpha = alpha;
      pt.trials = trials;
      for (int t = 0; t < nt; ++t)
        pt.per_param_error.push_back(static_cast<double>(errors[t]) / trials);
      pt.error = *std::max_element(pt.per_param_error.begin(), pt.per_param_error.end());
      double se = std::sqrt(std::max(pt.error * (1.0 - pt.error), 0.0) / trials);
      pt.ci_low = std::max(pt.error - 1.96 * se, 0.0);
      pt.ci_high = std::min(pt.error + 1.96 * se, 1.0);
      pt.in_fit = pt.error > 0.0;
      rep.points.push_back(std::move(pt));
    }
  }

  double sx = 0.0, sy = 0.0;
  int m = 0;
  for (const auto& pt : rep.points)
    if (pt.in_fit) { sx += pt.n * pt.alpha; sy += -std::log(pt.error); ++m; }
  rep.fit_points = m;
  if (m >= 2) {
    double xb = sx / m, yb = sy / m, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : rep.points) {
      if (!pt.in_fit) continue;
      double x = pt.n * pt.alpha - xb, y = -std::log(pt.error) - yb;
      sxx += x * x;
      sxy += x * y;
    }
    rep.slope = sxy / sxx;
    rep.intercept = yb - rep.slope * xb;
    double sse = 0.0;
    for (const auto& pt : rep.points) {
      if (!pt.in_fit) continue;
      double r = -std::log(pt.error) - (rep.intercept + rep.slope * pt.n * pt.alpha);
      sse += r * r;
    }
    rep.slope_stderr = m > 2 ? std::sqrt(sse / (m - 2) / sxx) : 0.0;
    rep.note = "least squares of -log(empirical max error) against n * alpha";
  } else {
    rep.note = "too few nonzero-error points for a fit";
  }
  return rep;
}

} // namespace covertsense
