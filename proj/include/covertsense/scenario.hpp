#pragma once

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "divergence.hpp"
#include "rng.hpp"

namespace covertsense {

// Classical-quantum sensing scenario: for each parameter value theta and each
// input symbol u, Bob receives bob[theta][u] and the warden receives
// willie[theta][u]. One alphabet entry is the innocent (idle) symbol.
struct CqScenario {
  std::vector<std::string> params;
  std::vector<std::string> alphabet;
  int innocent = 0;
  std::vector<std::vector<DensityOperator>> bob;     // [param][symbol]
  std::vector<std::vector<DensityOperator>> willie;  // [param][symbol]

  int n_params() const { return static_cast<int>(params.size()); }
  int n_symbols() const { return static_cast<int>(alphabet.size()); }
  int dim_bob() const { return bob.at(0).at(0).dim(); }
  int dim_willie() const { return willie.at(0).at(0).dim(); }

  int param_index(const std::string& name) const {
    for (size_t i = 0; i < params.size(); ++i)
      if (params[i] == name) return static_cast<int>(i);
    throw UnknownParameterError("unknown parameter id '" + name + "'");
  }
  int symbol_index(const std::string& name) const {
    for (size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == name) return static_cast<int>(i);
    throw UnknownSymbolError("unknown symbol id '" + name + "'");
  }

  void check() const {
    if (params.size() < 2) throw DimensionMismatchError("scenario: need at least two parameter values");
    if (alphabet.empty()) throw DimensionMismatchError("scenario: empty alphabet");
    if (innocent < 0 || innocent >= n_symbols())
      throw UnknownSymbolError("scenario: innocent symbol index out of range");
    if (bob.size() != params.size() || willie.size() != params.size())
      throw DimensionMismatchError("scenario: state tables must have one row per parameter");
    for (int t = 0; t < n_params(); ++t) {
      if (bob[t].size() != alphabet.size() || willie[t].size() != alphabet.size())
        throw DimensionMismatchError("scenario: state tables must have one column per symbol");
      for (int u = 0; u < n_symbols(); ++u) {
        if (bob[t][u].dim() != dim_bob())
          throw DimensionMismatchError("scenario: inconsistent receiver dimension");
        if (willie[t][u].dim() != dim_willie())
          throw DimensionMismatchError("scenario: inconsistent warden dimension");
      }
    }
    for (size_t i = 0; i < params.size(); ++i)
      for (size_t j = i + 1; j < params.size(); ++j)
        if (params[i] == params[j]) throw UnknownParameterError("scenario: duplicate parameter id");
    for (size_t i = 0; i < alphabet.size(); ++i)
      for (size_t j = i + 1; j < alphabet.size(); ++j)
        if (alphabet[i] == alphabet[j]) throw UnknownSymbolError("scenario: duplicate symbol id");
  }

  // warden mixture under a pmf over the full alphabet
  CMat willie_mixture(int theta, const std::vector<double>& P) const {
    CMat m = CMat::Zero(dim_willie(), dim_willie());
    for (int u = 0; u < n_symbols(); ++u) m += P.at(u) * willie[theta][u].mat();
    return m;
  }
};

inline std::vector<std::pair<int, int>> zero_equivalent_pairs(const CqScenario& s, double tol = 1e-9) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < s.n_params(); ++a)
    for (int b = a + 1; b < s.n_params(); ++b)
      if (trace_norm(s.bob[a][s.innocent].mat() - s.bob[b][s.innocent].mat()) <= tol)
        out.emplace_back(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// Innocent-state simulability: min over pmfs P on U \ {0} of
// || sum_u P(u) A_u - B ||_F, solved by projected gradient on the simplex.
// The objective is convex quadratic; restarts only guard against stalls.
// ---------------------------------------------------------------------------

namespace detail {

inline void project_simplex(std::vector<double>& p) {
  const int k = static_cast<int>(p.size());
  std::vector<double> u = p;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < k; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) { rho = i; theta = t; }
  }
  for (int i = 0; i < k; ++i) p[i] = std::max(p[i] - theta, 0.0);
  (void)rho;
  double s = std::accumulate(p.begin(), p.end(), 0.0);
  if (s > 0) for (double& x : p) x /= s;
}

} // namespace detail

inline double min_simulation_distance(const std::vector<CMat>& states, const CMat& target,
                                      std::vector<double>* argmin = nullptr,
                                      int restarts = 10, int iterations = 10000,
                                      uint64_t seed = 0x5eed) {
  const int k = static_cast<int>(states.size());
  if (k == 0) throw DimensionMismatchError("min_simulation_distance: empty state list");
  RMat G(k, k);
  RVec c(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) G(i, j) = (states[i].adjoint() * states[j]).trace().real();
    c(i) = (states[i].adjoint() * target).trace().real();
  }
  Eigen::SelfAdjointEigenSolver<RMat> eg(G);
  const double L = std::max(2.0 * eg.eigenvalues().maxCoeff(), 1e-12);
  // evaluated from the residual matrix itself: the expanded quadratic form
  // cancels catastrophically near zero and cannot certify small distances
  auto value = [&](const RVec& p) {
    CMat acc = CMat::Zero(target.rows(), target.cols());
    for (int i = 0; i < k; ++i) acc += p(i) * states[i];
    return (acc - target).squaredNorm();
  };

  double best = kInf;
  RVec best_p = RVec::Zero(k);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 g = task_engine(seed, r);
    std::vector<double> p0 = r == 0 ? std::vector<double>(k, 1.0 / k) : random_pmf(k, g);
    RVec p = Eigen::Map<RVec>(p0.data(), k);
    for (int it = 0; it < iterations; ++it) {
      RVec step = p - 2.0 * (G * p - c) / L;
      std::vector<double> q(step.data(), step.data() + k);
      detail::project_simplex(q);
      RVec pn = Eigen::Map<RVec>(q.data(), k);
      if ((pn - p).norm() <= 1e-15) { p = pn; break; }
      p = pn;
    }
    double v = value(p);
    if (v < best) { best = v; best_p = p; }
  }
  if (argmin) argmin->assign(best_p.data(), best_p.data() + k);
  return std::sqrt(std::max(best, 0.0));
}

// ---------------------------------------------------------------------------
// Admissibility analysis
// ---------------------------------------------------------------------------

struct ScenarioAnalysis {
  std::vector<std::pair<int, int>> zero_equiv_pairs;  // unordered pairs, i < j
  std::vector<int> theta_tilde;                       // params with a zero-equivalent partner
  bool nontrivial_zero_equivalence = false;           // some pair shares the innocent output
  bool innocent_unsimulable = false;                  // some theta cannot be faked by off-innocent mixing
  bool willie_supports_nested = false;                // supp(willie[u]) inside supp(willie[0]) for all theta,u
  std::vector<double> sim_distance;                   // per param
  double support_residual = 0.0;                      // max_theta,u tr((I - Pi0) willie[theta][u])
  std::vector<double> lambda_min_innocent;            // per param
  std::string diagnostics;

  bool all_pass() const {
    return nontrivial_zero_equivalence && innocent_unsimulable && willie_supports_nested;
  }
};

inline ScenarioAnalysis check_assumptions(const CqScenario& s, double tol = 1e-9) {
  s.check();
  ScenarioAnalysis a;
  a.zero_equiv_pairs = zero_equivalent_pairs(s, tol);
  std::vector<bool> in_tilde(s.n_params(), false);
  for (auto& pr : a.zero_equiv_pairs) in_tilde[pr.first] = in_tilde[pr.second] = true;
  for (int t = 0; t < s.n_params(); ++t)
    if (in_tilde[t]) a.theta_tilde.push_back(t);
  a.nontrivial_zero_equivalence = !a.zero_equiv_pairs.empty();

  for (int t = 0; t < s.n_params(); ++t) {
    std::vector<CMat> off;
    for (int u = 0; u < s.n_symbols(); ++u)
      if (u != s.innocent) off.push_back(s.willie[t][u].mat());
    double dist = off.empty() ? kInf : min_simulation_distance(off, s.willie[t][s.innocent].mat());
    a.sim_distance.push_back(dist);
    if (dist > tol) a.innocent_unsimulable = true;
  }

  double worst = 0.0;
  for (int t = 0; t < s.n_params(); ++t) {
    CMat pi0 = support_projector(s.willie[t][s.innocent].mat());
    CMat rest = CMat::Identity(s.dim_willie(), s.dim_willie()) - pi0;
    for (int u = 0; u < s.n_symbols(); ++u)
      worst = std::max(worst, (rest * s.willie[t][u].mat()).trace().real());
    Eigen::SelfAdjointEigenSolver<CMat> es(s.willie[t][s.innocent].mat(), Eigen::EigenvaluesOnly);
    a.lambda_min_innocent.push_back(std::max(es.eigenvalues().minCoeff(), 0.0));
  }
  a.support_residual = worst;
  a.willie_supports_nested = worst <= tol;

  std::ostringstream d;
  d << "zero-equivalent pairs: " << a.zero_equiv_pairs.size();
  for (auto& pr : a.zero_equiv_pairs)
    d << " (" << s.params[pr.first] << "," << s.params[pr.second] << ")";
  d << "; simulation distances:";
  for (int t = 0; t < s.n_params(); ++t) d << " " << s.params[t] << "=" << a.sim_distance[t];
  d << "; support residual: " << a.support_residual;
  a.diagnostics = d.str();
  return a;
}

// Conditional Chernoff divergence between two parameter values, weighting the
// per-symbol terms by a pmf over the full alphabet and optimizing one common s.
inline ChernoffResult conditional_chernoff(const CqScenario& s, int theta_a, int theta_b,
                                           const std::vector<double>& P, int curve_samples = 0) {
  if (theta_a < 0 || theta_a >= s.n_params() || theta_b < 0 || theta_b >= s.n_params())
    throw UnknownParameterError("conditional_chernoff: parameter index out of range");
  if (static_cast<int>(P.size()) != s.n_symbols())
    throw UnknownSymbolError("conditional_chernoff: pmf length does not match alphabet");
  std::vector<CMat> ra, rb;
  for (int u = 0; u < s.n_symbols(); ++u) {
    ra.push_back(s.bob[theta_a][u].mat());
    rb.push_back(s.bob[theta_b][u].mat());
  }
  return conditional_chernoff(ra, rb, P, curve_samples);
}

inline ChernoffResult conditional_chernoff(const CqScenario& s, const std::string& theta_a,
                                           const std::string& theta_b, const std::vector<double>& P,
                                           int curve_samples = 0) {
  return conditional_chernoff(s, s.param_index(theta_a), s.param_index(theta_b), P, curve_samples);
}

} // namespace covertsense
