#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "covert_exponent.hpp"
#include "divergence.hpp"
#include "geometry.hpp"

namespace covertsense {

struct UnitaryScenario {
  std::vector<std::string> params;
  std::vector<CMat> unitaries; // d x d, aligned with params
  CVec innocent;               // unit probe vector on the input space
  KrausChannel willie;         // input space -> warden space

  int n_params() const { return static_cast<int>(params.size()); }
  int dim() const { return static_cast<int>(innocent.size()); }

  void check() const {
    if (params.size() < 2) throw DimensionMismatchError("unitary scenario: need >= 2 parameters");
    if (params.size() != unitaries.size())
      throw DimensionMismatchError("unitary scenario: params/unitaries length mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].empty()) throw DimensionMismatchError("unitary scenario: empty parameter id");
      for (std::size_t j = i + 1; j < params.size(); ++j)
        if (params[i] == params[j])
          throw DimensionMismatchError("unitary scenario: duplicate parameter id " + params[i]);
    }
    const int d = dim();
    if (d < 2) throw DimensionMismatchError("unitary scenario: input dimension must be >= 2");
    if (std::abs(innocent.norm() - 1.0) > 1e-9)
      throw DimensionMismatchError("unitary scenario: innocent vector not normalized");
    for (const auto& u : unitaries) {
      require_square(u, "unitary scenario");
      if (u.rows() != d) throw DimensionMismatchError("unitary scenario: unitary dim mismatch");
      double dev = entrywise_max(u.adjoint() * u - CMat::Identity(d, d));
      if (dev > tol::unitary)
        throw DimensionMismatchError("unitary scenario: non-unitary matrix, defect " +
                                     std::to_string(dev));
    }
    willie.check();
    if (willie.dim_in() != d)
      throw DimensionMismatchError("unitary scenario: warden channel input dim mismatch");
  }

  int param_index(const std::string& id) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == id) return static_cast<int>(i);
    throw UnknownParameterError("unknown parameter id: " + id);
  }
};

// Entangled probe on m copies that a relative unitary maps to an orthogonal
// state: |nu> = sum_k sqrt(w_k) |v_{k_1}> ... |v_{k_m}> over a few eigenvector
// multi-indices, chosen so the corresponding eigenphase sums carry weights
// summing to zero on the unit circle.
struct Orthogonalizer {
  int m = 0;
  std::vector<double> weights;
  std::vector<std::vector<int>> multi_indices; // nondecreasing eigenvector indices, length m
  CMat eigvecs; // columns: orthonormal eigenvectors of the relative unitary
  RVec phases;  // eigenphases in [0, 2pi)

  // <nu| w^{tensor m} |nu> for any single-site operator w, via products of
  // single-site brackets; no d^m objects are formed.
  complexd bracket(const CMat& w) const {
    CMat b = eigvecs.adjoint() * w * eigvecs;
    complexd acc = 0.0;
    for (std::size_t k = 0; k < multi_indices.size(); ++k)
      for (std::size_t l = 0; l < multi_indices.size(); ++l) {
        complexd prod = std::sqrt(weights[k] * weights[l]);
        for (int i = 0; i < m; ++i) prod *= b(multi_indices[k][i], multi_indices[l][i]);
        acc += prod;
      }
    return acc;
  }

  CVec dense(long max_dim = 4096) const {
    const int d = static_cast<int>(eigvecs.rows());
    double dims = std::pow(static_cast<double>(d), m);
    if (dims > static_cast<double>(max_dim))
      throw ScaleExceededError("orthogonalizer: dense probe dimension exceeds " +
                               std::to_string(max_dim));
    CVec out = CVec::Zero(static_cast<long>(dims));
    for (std::size_t k = 0; k < multi_indices.size(); ++k) {
      CVec comp = eigvecs.col(multi_indices[k][0]);
      for (int i = 1; i < m; ++i) comp = tensor(comp, eigvecs.col(multi_indices[k][i])).eval();
      out += std::sqrt(weights[k]) * comp;
    }
    return out;
  }
};

namespace detail {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double wrap_angle(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

struct PhaseSumState {
  double sum = 0.0;
  std::vector<int> idx; // nondecreasing
};

// Largest circular gap of a sorted angle list in [0, 2pi).
inline double max_circular_gap(const std::vector<double>& sorted) {
  if (sorted.empty()) return kTwoPi;
  if (sorted.size() == 1) return kTwoPi;
  double best = kTwoPi - (sorted.back() - sorted.front());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    best = std::max(best, sorted[i + 1] - sorted[i]);
  return best;
}

} // namespace detail

// Finds the smallest m such that some probe on m copies is mapped to an
// orthogonal state by v^{tensor m}. Works on the eigenphase sums of the m-fold
// products: an orthogonalizer exists at m exactly when the achievable sums do
// not all fit in an open half circle (largest circular gap <= pi). The probe
// uses an antipodal pair of sums when one exists and three sums otherwise.
inline Orthogonalizer find_orthogonalizer(const CMat& v, int m_max = 64,
                                          std::size_t state_cap = 200000) {
  require_square(v, "find_orthogonalizer");
  const int d = static_cast<int>(v.rows());
  if (entrywise_max(v.adjoint() * v - CMat::Identity(d, d)) > tol::unitary)
    throw DimensionMismatchError("find_orthogonalizer: matrix is not unitary");

  Eigen::ComplexSchur<CMat> schur(v);
  const CMat& t = schur.matrixT();
  double offdiag = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) offdiag = std::max(offdiag, std::abs(t(i, j)));
  if (offdiag > 1e-7)
    throw DimensionMismatchError("find_orthogonalizer: Schur form not diagonal (input not normal?)");
  CMat vecs = schur.matrixU();
  RVec phases(d);
  for (int i = 0; i < d; ++i) {
    phases(i) = detail::wrap_angle(std::arg(t(i, i)));
  }

  {
    std::vector<double> ph(phases.data(), phases.data() + d);
    std::sort(ph.begin(), ph.end());
    double spread = detail::kTwoPi - detail::max_circular_gap(ph);
    if (spread <= 1e-10)
      throw IdentityUnitaryError("find_orthogonalizer: unitary is a global phase");
  }

  std::vector<detail::PhaseSumState> states;
  for (int i = 0; i < d; ++i) states.push_back({phases(i), {i}});

  auto dedupe = [&](std::vector<detail::PhaseSumState>& in) {
    std::sort(in.begin(), in.end(), [](const auto& a, const auto& b) {
      if (a.sum != b.sum) return a.sum < b.sum;
      return a.idx < b.idx;
    });
    std::vector<detail::PhaseSumState> kept;
    for (auto& s : in) {
      if (!kept.empty() && s.sum - kept.back().sum <= 1e-9) continue;
      kept.push_back(std::move(s));
    }
    return kept;
  };

  for (int m = 1; m <= m_max; ++m) {
    if (m > 1) {
      std::vector<detail::PhaseSumState> next;
      next.reserve(states.size() * d);
      for (const auto& s : states)
        for (int j = s.idx.back(); j < d; ++j) {
          detail::PhaseSumState ns;
          ns.sum = detail::wrap_angle(s.sum + phases(j));
          ns.idx = s.idx;
          ns.idx.push_back(j);
          next.push_back(std::move(ns));
        }
      states = dedupe(next);
      if (states.size() > state_cap)
        throw ScaleExceededError("find_orthogonalizer: phase-sum state count exceeds cap");
    } else {
      states = dedupe(states);
    }

    std::vector<double> sums;
    sums.reserve(states.size());
    for (const auto& s : states) sums.push_back(s.sum);
    if (detail::max_circular_gap(sums) > 3.141592653589793 + 1e-9) continue;

    Orthogonalizer orth;
    orth.m = m;
    orth.eigvecs = vecs;
    orth.phases = phases;

    // Antipodal pair first.
    for (std::size_t a = 0; a < states.size() && orth.weights.empty(); ++a)
      for (std::size_t b = a + 1; b < states.size(); ++b) {
        double gap = std::abs(states[b].sum - states[a].sum);
        double circ = std::min(gap, detail::kTwoPi - gap);
        if (std::abs(circ - 3.141592653589793) <= 1e-9) {
          orth.weights = {0.5, 0.5};
          orth.multi_indices = {states[a].idx, states[b].idx};
          break;
        }
      }

    if (orth.weights.empty()) {
      // Three sums whose circular gaps are all <= pi: start right after the
      // largest gap, take the farthest point within a half turn, then the
      // farthest point within a half turn of that one.
      std::size_t k = states.size();
      std::size_t start = 0;
      double best_gap = detail::kTwoPi - (states.back().sum - states.front().sum);
      for (std::size_t i = 0; i + 1 < k; ++i) {
        double g = states[i + 1].sum - states[i].sum;
        if (g > best_gap) {
          best_gap = g;
          start = i + 1;
        }
      }
      auto offset = [&](std::size_t j) {
        return detail::wrap_angle(states[j].sum - states[start].sum);
      };
      std::size_t i2 = start, i3 = start;
      double d2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        double o = offset(j);
        if (o <= 3.141592653589793 + 1e-12 && o > d2) {
          d2 = o;
          i2 = j;
        }
      }
      double d3 = d2;
      for (std::size_t j = 0; j < k; ++j) {
        double o = offset(j);
        double eff = o > d2 ? o : o + detail::kTwoPi;
        if (eff <= d2 + 3.141592653589793 + 1e-12 && eff > d3) {
          d3 = eff;
          i3 = j;
        }
      }
      double p1 = states[start].sum, p2 = states[i2].sum, p3 = states[i3].sum;
      Eigen::Matrix2d mat;
      mat << std::cos(p1) - std::cos(p3), std::cos(p2) - std::cos(p3),
          std::sin(p1) - std::sin(p3), std::sin(p2) - std::sin(p3);
      Eigen::Vector2d rhs(-std::cos(p3), -std::sin(p3));
      Eigen::Vector2d w12 = mat.fullPivLu().solve(rhs);
      std::array<double, 3> w = {w12(0), w12(1), 1.0 - w12(0) - w12(1)};
      bool ok = true;
      for (auto& x : w) {
        if (x < -1e-9 || x > 1.0 + 1e-9) ok = false;
        x = std::clamp(x, 0.0, 1.0);
      }
      double tot = w[0] + w[1] + w[2];
      if (ok && tot > 1e-12) {
        complexd resultant = 0.0;
        for (int j = 0; j < 3; ++j) resultant += (w[j] / tot) * std::exp(complexd(0, j == 0 ? p1 : (j == 1 ? p2 : p3)));
        if (std::abs(resultant) <= 1e-9) {
          orth.weights = {w[0] / tot, w[1] / tot, w[2] / tot};
          orth.multi_indices = {states[start].idx, states[i2].idx, states[i3].idx};
        }
      }
      if (orth.weights.empty())
        throw OrthogonalizerNotFoundError(
            "find_orthogonalizer: half-circle test passed but probe construction failed at m=" +
            std::to_string(m));
    }

    // Drop zero-weight components.
    std::vector<double> wkeep;
    std::vector<std::vector<int>> ikeep;
    for (std::size_t j = 0; j < orth.weights.size(); ++j)
      if (orth.weights[j] > 1e-12) {
        wkeep.push_back(orth.weights[j]);
        ikeep.push_back(orth.multi_indices[j]);
      }
    double tot = 0.0;
    for (double x : wkeep) tot += x;
    for (double& x : wkeep) x /= tot;
    orth.weights = std::move(wkeep);
    orth.multi_indices = std::move(ikeep);
    return orth;
  }
  throw OrthogonalizerNotFoundError("find_orthogonalizer: no orthogonalizer up to m_max=" +
                                    std::to_string(m_max));
}

struct BlockStrategy {
  std::vector<std::array<int, 2>> pairs; // param index pairs, lexicographic by id
  std::vector<Orthogonalizer> blocks;    // aligned with pairs
  int m = 0;    // total probe length (sum of block lengths)
  int n = 0;    // codeword length
  long ell = 0; // number of disjoint probe positions, floor(n/m)
};

// One orthogonalizer block per parameter pair, concatenated. The innocent
// letter fills the rest of the codeword; the probe block is placed uniformly
// at one of ell disjoint positions.
inline BlockStrategy build_block_strategy(const UnitaryScenario& scen, int n, int m_max = 64) {
  scen.check();
  const int d = scen.dim();

  // The warden must not be able to see support outside the innocent output's
  // support, else the covertness divergences diverge.
  CMat sigma0 = scen.willie.apply((scen.innocent * scen.innocent.adjoint()).eval());
  CMat pi0 = support_projector(sigma0);
  CMat off = CMat::Identity(scen.willie.dim_out(), scen.willie.dim_out()) - pi0;
  for (const auto& k : scen.willie.ops) {
    double dev = entrywise_max(off * k);
    if (dev > 1e-9)
      throw AssumptionViolatedError(
          "unitary strategy: warden outputs escape the innocent output support, defect " +
          std::to_string(dev));
  }

  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i < scen.n_params(); ++i)
    for (int j = i + 1; j < scen.n_params(); ++j) {
      if (scen.params[i] < scen.params[j]) pairs.push_back({i, j});
      else pairs.push_back({j, i});
    }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    if (scen.params[a[0]] != scen.params[b[0]]) return scen.params[a[0]] < scen.params[b[0]];
    return scen.params[a[1]] < scen.params[b[1]];
  });

  BlockStrategy strat;
  strat.n = n;
  strat.pairs = pairs;
  for (const auto& pr : pairs) {
    CMat v = scen.unitaries[pr[0]].adjoint() * scen.unitaries[pr[1]];
    try {
      strat.blocks.push_back(find_orthogonalizer(v, m_max));
    } catch (const IdentityUnitaryError&) {
      throw AssumptionViolatedError("unitary strategy: parameters " + scen.params[pr[0]] + " and " +
                                    scen.params[pr[1]] + " differ only by a global phase");
    }
    strat.m += strat.blocks.back().m;
    (void)d;
  }
  if (strat.m > n)
    throw BlockTooLongError("unitary strategy: probe length " + std::to_string(strat.m) +
                            " exceeds codeword length " + std::to_string(n));
  strat.ell = n / strat.m;
  return strat;
}

// |<probe under theta_a | probe under theta_b>| for every pair; the pair's own
// block forces the product to zero, so exact discrimination is possible.
inline std::vector<PairValue> zero_error_overlaps(const BlockStrategy& strat,
                                                  const UnitaryScenario& scen) {
  std::vector<PairValue> out;
  for (const auto& pr : strat.pairs) {
    CMat w = scen.unitaries[pr[0]].adjoint() * scen.unitaries[pr[1]];
    complexd acc = 1.0;
    for (const auto& blk : strat.blocks) acc *= blk.bracket(w);
    out.push_back({pr[0], pr[1], std::abs(acc)});
  }
  return out;
}

namespace detail {

// E^{tensor m} applied to a density matrix by site-by-site application.
inline CMat apply_channel_power(const KrausChannel& e, const CMat& rho, int m, long max_dim) {
  const int d = e.dim_in(), dw = e.dim_out();
  double peak = std::pow(static_cast<double>(std::max(d, dw)), m);
  if (peak > static_cast<double>(max_dim))
    throw ScaleExceededError("apply_channel_power: dimension exceeds " + std::to_string(max_dim));
  CMat cur = rho;
  for (int site = 0; site < m; ++site) {
    long dim_left = 1;
    for (int i = 0; i < site; ++i) dim_left *= dw;
    long dim_right = 1;
    for (int i = site + 1; i < m; ++i) dim_right *= d;
    CMat il = CMat::Identity(dim_left, dim_left);
    CMat ir = CMat::Identity(dim_right, dim_right);
    CMat next = CMat::Zero(dim_left * dw * dim_right, dim_left * dw * dim_right);
    for (const auto& k : e.ops) {
      CMat op = tensor(tensor(il, k), ir);
      next += op * cur * op.adjoint();
    }
    cur = std::move(next);
  }
  return cur;
}

} // namespace detail

struct CovertnessCertificate {
  double chi2_total = 0.0;   // chi^2 of the block output against all-innocent, product form
  double chi2_over_ell = 0.0; // divergence bound for the position-averaged strategy
  double coarse_bound = 0.0;  // m / ((n-m) lambda_min^m); infinite when n == m
  std::optional<double> exact; // exact divergence of the n-letter mixture when dims allow
  double lambda_min = 0.0;     // smallest innocent-output eigenvalue (on its support)
  std::vector<double> block_chi2;
  std::string note;
};

// Certifies the warden-side disturbance of the block strategy. The strategy's
// n-letter output mixture has chi^2 divergence (prod_b (1 + chi2_b) - 1)/ell
// against the all-innocent output, which upper-bounds the relative entropy;
// the coarse bound substitutes chi2_b <= lambda_min^{-m_b} - 1 and
// ell >= (n-m)/m. Exact divergence is evaluated densely when it fits.
inline CovertnessCertificate covertness_certificate(const BlockStrategy& strat,
                                                    const UnitaryScenario& scen,
                                                    long max_dim = 4096) {
  scen.check();
  const int dw = scen.willie.dim_out();
  CMat sigma0 = scen.willie.apply((scen.innocent * scen.innocent.adjoint()).eval());
  HermitianEigensystem es = eig_hermitian((sigma0 + sigma0.adjoint()).eval() / 2.0);

  CovertnessCertificate cert;
  cert.lambda_min = kInf;
  for (int i = 0; i < es.values.size(); ++i)
    if (es.values(i) > tol::support) cert.lambda_min = std::min(cert.lambda_min, es.values(i));
  int rank0 = 0;
  for (int i = 0; i < es.values.size(); ++i)
    if (es.values(i) > tol::support) ++rank0;
  if (rank0 < dw) cert.note += "innocent output is rank-deficient; ";

  std::vector<CMat> block_out;
  double prod = 1.0;
  for (const auto& blk : strat.blocks) {
    CVec nu = blk.dense(max_dim);
    CMat rho = detail::apply_channel_power(scen.willie, (nu * nu.adjoint()).eval(), blk.m, max_dim);
    CMat ref = sigma0;
    for (int i = 1; i < blk.m; ++i) ref = tensor(ref, sigma0).eval();
    double c2 = chi2(rho, ref);
    cert.block_chi2.push_back(c2);
    prod *= 1.0 + c2;
    block_out.push_back(std::move(rho));
  }
  cert.chi2_total = prod - 1.0;
  cert.chi2_over_ell = cert.chi2_total / static_cast<double>(strat.ell);

  if (strat.n > strat.m) {
    cert.coarse_bound = static_cast<double>(strat.m) /
                        (static_cast<double>(strat.n - strat.m) *
                         std::pow(cert.lambda_min, strat.m));
  } else {
    cert.coarse_bound = kInf;
    cert.note += "n equals probe length, coarse bound degenerates; ";
  }

  double full_dim = std::pow(static_cast<double>(dw), strat.n);
  if (full_dim <= static_cast<double>(max_dim)) {
    CMat blk_all = block_out[0];
    for (std::size_t b = 1; b < block_out.size(); ++b) blk_all = tensor(blk_all, block_out[b]).eval();
    long ell = strat.ell;
    long dim_n = static_cast<long>(full_dim);
    CMat mix = CMat::Zero(dim_n, dim_n);
    for (long i = 0; i < ell; ++i) {
      CMat term = CMat::Identity(1, 1);
      for (long s = 0; s < i * strat.m; ++s) term = tensor(term, sigma0).eval();
      term = tensor(term, blk_all).eval();
      long rest = strat.n - (i + 1) * strat.m;
      for (long s = 0; s < rest; ++s) term = tensor(term, sigma0).eval();
      mix += term;
    }
    mix /= static_cast<double>(ell);
    CMat ref = tensor_power(sigma0, strat.n);
    cert.exact = rel_entropy(mix, ref);
  } else {
    cert.note += "exact divergence skipped, warden dimension " + std::to_string(dw) + "^" +
                 std::to_string(strat.n) + " exceeds " + std::to_string(max_dim) + "; ";
  }
  return cert;
}

// The states Alice must discriminate at codeword length n, one per parameter.
// Her uniformly random block position is a register she keeps, so the state
// for theta is the direct sum over positions i of the pure codeword state with
// the probe at block i (weight 1/ell each); distinct parameters give
// orthogonal states by the orthogonalizer construction.
inline std::vector<CMat> global_strategy_states(const BlockStrategy& strat,
                                                const UnitaryScenario& scen,
                                                long max_dim = 4096) {
  scen.check();
  const int d = scen.dim();
  double dn = std::pow(static_cast<double>(d), strat.n);
  double total = dn * static_cast<double>(strat.ell);
  if (total > static_cast<double>(max_dim))
    throw ScaleExceededError("global_strategy_states: dimension " + std::to_string(total) +
                             " exceeds " + std::to_string(max_dim));
  const long dim_n = static_cast<long>(dn);
  const long ell = strat.ell;

  CVec probe = strat.blocks[0].dense(max_dim);
  for (std::size_t b = 1; b < strat.blocks.size(); ++b)
    probe = tensor(probe, strat.blocks[b].dense(max_dim)).eval();

  CVec innocent_letter = scen.innocent;

  std::vector<CMat> out;
  for (int t = 0; t < scen.n_params(); ++t) {
    CMat u_letter = scen.unitaries[t];
    CVec probe_t = probe;
    {
      CMat u_m = u_letter;
      for (int i = 1; i < strat.m; ++i) u_m = tensor(u_m, u_letter).eval();
      probe_t = u_m * probe;
    }
    CVec idle_t = u_letter * innocent_letter;
    CMat rho = CMat::Zero(ell * dim_n, ell * dim_n);
    for (long i = 0; i < ell; ++i) {
      CVec psi = CVec::Ones(1);
      for (long s = 0; s < i * strat.m; ++s) psi = tensor(psi, idle_t).eval();
      psi = tensor(psi, probe_t).eval();
      long rest = strat.n - (i + 1) * strat.m;
      for (long s = 0; s < rest; ++s) psi = tensor(psi, idle_t).eval();
      rho.block(i * dim_n, i * dim_n, dim_n, dim_n) = psi * psi.adjoint();
    }
    rho /= static_cast<double>(ell);
    out.push_back(std::move(rho));
  }
  return out;
}

struct ConverseProbeReport {
  double divergence_sum = 0.0;       // sum over positions of D(output || innocent output)
  double input_distance_chain = 0.0; // sqrt(sum_i ||phi_i - innocent||_1), bounds (1-eps)/2
  double ratio_constant = 0.0;       // empirical sup of input/output trace-distance ratios
  double delta_floor = 0.0;          // (1-eps)^4 / (32 B^2 n)
  bool chain_ok = true;              // per-position ratio inequality held on the data
  bool consistent = true;            // divergence_sum >= delta_floor within tolerance
  std::string note;
};

// Numeric probe of the converse chain: any strategy whose per-position input
// marginals are phi_i and whose estimation error is at most eps must satisfy
//   1 - eps <= 2 sqrt(sum_i ||phi_i - innocent||_1)
//           <= 2 sqrt(B sum_i ||E(phi_i) - E(innocent)||_1)
//           <= 2 sqrt(B sqrt(2 n sum_i D_i)),
// the middle steps using the trace-distance ratio constant B of the warden
// channel at the innocent state and Pinsker's inequality, hence
// sum_i D_i >= (1-eps)^4 / (32 B^2 n).
inline ConverseProbeReport converse_probes(const UnitaryScenario& scen,
                                           const std::vector<CMat>& marginals,
                                           double epsilon_claim, std::uint64_t seed = 0xC043) {
  scen.check();
  if (marginals.empty()) throw DimensionMismatchError("converse_probes: no marginals");
  if (epsilon_claim < 0.0 || epsilon_claim >= 1.0)
    throw DimensionMismatchError("converse_probes: epsilon must lie in [0, 1)");
  const int d = scen.dim();
  const std::size_t n = marginals.size();

  CMat rho0 = (scen.innocent * scen.innocent.adjoint()).eval();
  CMat sigma0 = scen.willie.apply(rho0);

  BoundednessVerdict bv = boundedness_verdict(scen.willie, scen.innocent, seed);
  RatioProbeReport rp = ratio_probe(scen.willie, scen.innocent, bv.witness, 200, seed);

  ConverseProbeReport rep;
  rep.ratio_constant = rp.sup_ratio;
  if (!bv.bounded) rep.note += "warden channel looks first-order non-injective at the innocent state; ";

  double dist_sum = 0.0;
  for (const auto& phi : marginals) {
    DensityOperator rho(phi);
    if (rho.mat().rows() != d) throw DimensionMismatchError("converse_probes: marginal dim mismatch");
    double din = trace_norm((rho.mat() - rho0).eval());
    double dout = trace_norm((scen.willie.apply(rho.mat()) - sigma0).eval());
    dist_sum += din;
    rep.divergence_sum += rel_entropy(scen.willie.apply(rho.mat()), sigma0);
    if (din > rep.ratio_constant * dout * (1.0 + 1e-6) + 1e-9) rep.chain_ok = false;
  }
  rep.input_distance_chain = std::sqrt(dist_sum);

  double b = rep.ratio_constant;
  double one_minus = 1.0 - epsilon_claim;
  rep.delta_floor = (b > 0.0)
                        ? std::pow(one_minus, 4) / (32.0 * b * b * static_cast<double>(n))
                        : kInf;
  rep.consistent = rep.divergence_sum >= rep.delta_floor * (1.0 - 1e-9) - 1e-15;
  if (!rep.chain_ok)
    rep.note += "empirical ratio constant too small for these marginals (increase probe samples); ";
  return rep;
}

} // namespace covertsense
