#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "qmat.hpp"

namespace covertsense {

// All divergences are in nats. +infinity is returned deliberately (detected
// support condition), never produced by overflow.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Relative entropy and friends
// ---------------------------------------------------------------------------

namespace detail {

struct StatePair {
  RVec p, q;     // eigenvalues (ascending) of rho and sigma
  RMat overlap;  // overlap(i,j) = |<v_i|w_j>|^2
};

inline StatePair state_pair(const CMat& rho, const CMat& sigma) {
  require_hermitian(rho, "divergence");
  require_hermitian(sigma, "divergence");
  if (rho.rows() != sigma.rows())
    throw DimensionMismatchError("divergence: operands have different dimensions");
  Eigen::SelfAdjointEigenSolver<CMat> er(0.5 * (rho + rho.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (sigma + sigma.adjoint()));
  StatePair sp;
  sp.p = er.eigenvalues();
  sp.q = es.eigenvalues();
  sp.overlap = (er.eigenvectors().adjoint() * es.eigenvectors()).cwiseAbs2();
  return sp;
}

// squared overlap of rho's supported eigenvectors with sigma's kernel
inline double kernel_leak(const StatePair& sp) {
  double worst = 0.0;
  for (int i = 0; i < sp.p.size(); ++i) {
    if (sp.p(i) <= tol::support) continue;
    double leak = 0.0;
    for (int j = 0; j < sp.q.size(); ++j)
      if (sp.q(j) <= tol::support) leak += sp.overlap(i, j);
    worst = std::max(worst, leak);
  }
  return worst;
}

} // namespace detail

// D(rho||sigma) = tr rho (log rho - log sigma); +inf when supp(rho) is not
// contained in supp(sigma).
inline double rel_entropy(const CMat& rho, const CMat& sigma) {
  auto sp = detail::state_pair(rho, sigma);
  if (detail::kernel_leak(sp) > tol::kernel_overlap) return kInf;
  double d = 0.0;
  for (int i = 0; i < sp.p.size(); ++i) {
    double pi = sp.p(i);
    if (pi <= tol::support) continue;
    d += pi * std::log(pi);
    for (int j = 0; j < sp.q.size(); ++j) {
      if (sp.q(j) <= tol::support) continue;
      d -= pi * sp.overlap(i, j) * std::log(sp.q(j));
    }
  }
  return d;
}

// chi^2(rho||sigma) = tr(rho^2 sigma^-1) - 1 on the support of sigma
inline double chi2(const CMat& rho, const CMat& sigma) {
  auto sp = detail::state_pair(rho, sigma);
  double leak = detail::kernel_leak(sp);
  if (leak > tol::kernel_overlap)
    throw SupportViolationError("chi2: support of first argument leaks " + std::to_string(leak) +
                                " outside support of second");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (sigma + sigma.adjoint()));
  const CMat r = 0.5 * (rho + rho.adjoint());
  double t = 0.0;
  for (int j = 0; j < es.eigenvalues().size(); ++j) {
    double qj = es.eigenvalues()(j);
    if (qj <= tol::support) continue;
    t += (r * es.eigenvectors().col(j)).squaredNorm() / qj;
  }
  return t - 1.0;
}

// Second-order coefficient of D(a*rho+(1-a)*sigma || sigma) around a=0:
//   eta = sum_{i!=j} (log li - log lj)/(li - lj) tr(D P_i D P_j)
//       + sum_i (1/li) tr(D P_i D P_i),   D = rho - sigma,
// with i,j running over eigenvalue clusters of sigma. sigma must be full rank.
inline double eta(const CMat& rho, const CMat& sigma, double cluster_tol = tol::cluster) {
  require_hermitian(rho, "eta");
  auto sys = eig_hermitian(sigma, cluster_tol);
  if (rho.rows() != sigma.rows())
    throw DimensionMismatchError("eta: operands have different dimensions");
  const int nc = sys.distinct();
  if (sys.clusters.front().value <= tol::support)
    throw SupportViolationError("eta: second argument is singular (smallest eigenvalue " +
                                std::to_string(sys.clusters.front().value) + ")");
  CMat delta = sys.vectors.adjoint() * (0.5 * (rho + rho.adjoint()) - 0.5 * (sigma + sigma.adjoint())) * sys.vectors;
  // cluster-block sums of |delta_ab|^2
  RMat blocks = RMat::Zero(nc, nc);
  for (int ci = 0; ci < nc; ++ci)
    for (int cj = 0; cj < nc; ++cj) {
      const auto& a = sys.clusters[ci];
      const auto& b = sys.clusters[cj];
      blocks(ci, cj) = delta.block(a.begin, b.begin, a.size(), b.size()).cwiseAbs2().sum();
    }
  double acc = 0.0;
  for (int ci = 0; ci < nc; ++ci) {
    for (int cj = 0; cj < nc; ++cj) {
      double li = sys.clusters[ci].value, lj = sys.clusters[cj].value;
      double coeff = (ci == cj) ? 1.0 / li : (std::log(li) - std::log(lj)) / (li - lj);
      acc += coeff * blocks(ci, cj);
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Chernoff information
// ---------------------------------------------------------------------------

struct ChernoffResult {
  double value = 0.0;   // nats; kInf when supports are orthogonal
  double s_star = 0.0;  // maximizer in [0,1]
  std::vector<std::pair<double, double>> curve;  // optional (s, objective) samples
  bool infinite() const { return std::isinf(value); }
};

namespace detail {

// tr(rho^s sigma^(1-s)) through the eigen-overlap table. Endpoints use the
// support-projector convention rho^0 = Pi_rho.
inline double power_trace(const StatePair& sp, double s) {
  double acc = 0.0;
  for (int i = 0; i < sp.p.size(); ++i) {
    double pi = sp.p(i);
    double ps;
    if (s == 0.0)
      ps = pi > tol::support ? 1.0 : 0.0;
    else
      ps = pi > 0.0 ? std::pow(pi, s) : 0.0;
    if (ps == 0.0) continue;
    for (int j = 0; j < sp.q.size(); ++j) {
      double qj = sp.q(j);
      double qs;
      if (s == 1.0)
        qs = qj > tol::support ? 1.0 : 0.0;
      else
        qs = qj > 0.0 ? std::pow(qj, 1.0 - s) : 0.0;
      if (qs == 0.0) continue;
      acc += ps * qs * sp.overlap(i, j);
    }
  }
  return acc;
}

inline bool orthogonal_supports(const StatePair& sp) {
  double acc = 0.0;
  for (int i = 0; i < sp.p.size(); ++i) {
    if (sp.p(i) <= tol::support) continue;
    for (int j = 0; j < sp.q.size(); ++j)
      if (sp.q(j) > tol::support) acc += sp.overlap(i, j);
  }
  return acc <= 1e-12;
}

// Maximize a concave objective on [0,1] by golden-section to width 1e-10,
// then one parabolic refinement step.
template <typename F>
inline std::pair<double, double> maximize_concave(F&& g) {
  const double gr = 0.6180339887498948482;
  double a = 0.0, b = 1.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = g(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = g(x1);
    }
  }
  double xm = 0.5 * (a + b), fm = g(xm);
  // parabolic step through (a, x_m, b)
  double fa = g(a), fb = g(b);
  double den = (xm - a) * (fm - fb) - (xm - b) * (fm - fa);
  if (std::abs(den) > 1e-300) {
    double xp = xm - 0.5 * ((xm - a) * (xm - a) * (fm - fb) - (xm - b) * (xm - b) * (fm - fa)) / den;
    if (xp >= 0.0 && xp <= 1.0) {
      double fp = g(xp);
      if (fp > fm) { xm = xp; fm = fp; }
    }
  }
  // endpoints are feasible maximizers too
  double f0 = g(0.0), fone = g(1.0);
  if (f0 >= fm && f0 >= fone) return {0.0, f0};
  if (fone >= fm) return {1.0, fone};
  return {xm, fm};
}

} // namespace detail

// sup_{s in [0,1]} -log tr(rho^s sigma^(1-s))
inline ChernoffResult chernoff(const CMat& rho, const CMat& sigma, int curve_samples = 0) {
  auto sp = detail::state_pair(rho, sigma);
  ChernoffResult out;
  if (detail::orthogonal_supports(sp)) {
    out.value = kInf;
    out.s_star = 0.5;
    return out;
  }
  auto g = [&sp](double s) { return -std::log(detail::power_trace(sp, s)); };
  auto [s, v] = detail::maximize_concave(g);
  out.s_star = s;
  out.value = std::max(v, 0.0);
  for (int k = 0; k < curve_samples; ++k) {
    double sk = curve_samples == 1 ? 0.5 : static_cast<double>(k) / (curve_samples - 1);
    out.curve.emplace_back(sk, g(sk));
  }
  return out;
}

// Conditional version: sup over a single common s of
//   -sum_u P(u) log tr(rho_u^s sigma_u^(1-s)).
// The lists run over the conditioning alphabet; P must be a pmf on it.
inline ChernoffResult conditional_chernoff(const std::vector<CMat>& rho_u,
                                           const std::vector<CMat>& sigma_u,
                                           const std::vector<double>& P,
                                           int curve_samples = 0) {
  if (rho_u.size() != sigma_u.size() || rho_u.size() != P.size() || P.empty())
    throw DimensionMismatchError("conditional_chernoff: mismatched list lengths");
  double mass = 0.0;
  for (double w : P) {
    if (w < -1e-12) throw DimensionMismatchError("conditional_chernoff: negative pmf entry");
    mass += w;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw DimensionMismatchError("conditional_chernoff: pmf mass " + std::to_string(mass));
  std::vector<detail::StatePair> pairs;
  std::vector<double> w;
  ChernoffResult out;
  for (size_t u = 0; u < P.size(); ++u) {
    if (P[u] <= 0.0) continue;
    auto sp = detail::state_pair(rho_u[u], sigma_u[u]);
    if (detail::orthogonal_supports(sp)) {
      out.value = kInf;
      out.s_star = 0.5;
      return out;
    }
    pairs.push_back(std::move(sp));
    w.push_back(P[u]);
  }
  auto g = [&](double s) {
    double acc = 0.0;
    for (size_t k = 0; k < pairs.size(); ++k)
      acc -= w[k] * std::log(detail::power_trace(pairs[k], s));
    return acc;
  };
  auto [s, v] = detail::maximize_concave(g);
  out.s_star = s;
  out.value = std::max(v, 0.0);
  for (int k = 0; k < curve_samples; ++k) {
    double sk = curve_samples == 1 ? 0.5 : static_cast<double>(k) / (curve_samples - 1);
    out.curve.emplace_back(sk, g(sk));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Small helpers used by the covertness bounds
// ---------------------------------------------------------------------------

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
}

// eps * log(dim / lmin^2) * n + Hb(eps): relative-entropy cost of an
// eps-sized deviation on an n-fold block with innocent spectrum floor lmin.
inline double continuity_bound(double eps, long n, int dim, double lambda_min) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw DimensionMismatchError("continuity_bound: eps must lie in [0, 1]");
  if (lambda_min <= 0.0)
    throw SupportViolationError("continuity_bound: lambda_min must be positive");
  return eps * std::log(static_cast<double>(dim) / (lambda_min * lambda_min)) * static_cast<double>(n) +
         binary_entropy(eps);
}

// ---------------------------------------------------------------------------
// Quadratic expansion check
// ---------------------------------------------------------------------------

struct ExpansionRow {
  double alpha;
  double divergence;  // D(a rho1 + (1-a) rho0 || rho0)
  double quadratic;   // a^2 eta(rho1||rho0) / 2
  double residual;    // |divergence - quadratic|
};

inline std::vector<ExpansionRow> expansion_table(const CMat& rho1, const CMat& rho0,
                                                 const std::vector<double>& alphas) {
  double e = eta(rho1, rho0);  // throws if rho0 is singular
  std::vector<ExpansionRow> rows;
  for (double a : alphas) {
    if (a < 0.0 || a > 0.5)
      throw DimensionMismatchError("expansion_table: alpha " + std::to_string(a) +
                                   " outside [0, 0.5]");
    ExpansionRow r;
    r.alpha = a;
    if (a == 0.0) {
      r.divergence = 0.0;
    } else {
      CMat mix = a * rho1 + (1.0 - a) * rho0;
      r.divergence = rel_entropy(mix, rho0);
    }
    r.quadratic = 0.5 * a * a * e;
    r.residual = std::abs(r.divergence - r.quadratic);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Nussbaum-Szkola embedding
// ---------------------------------------------------------------------------

// Two classical tables on the common index pair (y, y'), where y labels the
// first state's eigenbasis and y' the second's:
//   first(y,y')  = p(y)  |<v_y|w_y'>|^2
//   second(y,y') = q(y') |<v_y|w_y'>|^2
// `second` is the swapped-role distribution expressed on the same index pair,
// so classical one-norms between the tables feed the discrimination bounds.
struct NsEmbedding {
  RMat first, second;
};

inline NsEmbedding ns_embedding(const CMat& rho, const CMat& sigma) {
  auto sp = detail::state_pair(rho, sigma);
  const int d1 = static_cast<int>(sp.p.size());
  const int d2 = static_cast<int>(sp.q.size());
  NsEmbedding out;
  out.first = RMat::Zero(d1, d2);
  out.second = RMat::Zero(d1, d2);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) {
      out.first(i, j) = std::max(sp.p(i), 0.0) * sp.overlap(i, j);
      out.second(i, j) = std::max(sp.q(j), 0.0) * sp.overlap(i, j);
    }
  return out;
}

inline double l1_distance(const RMat& a, const RMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatchError("l1_distance: shape mismatch");
  return (a - b).cwiseAbs().sum();
}

} // namespace covertsense
