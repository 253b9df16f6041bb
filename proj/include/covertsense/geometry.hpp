#pragma once

#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "divergence.hpp"
#include "rng.hpp"

namespace covertsense {

// Real embedding of complex d x d matrices: entry (i,j) occupies components
// 2(i*d+j) (real part) and 2(i*d+j)+1 (imaginary part). Isometric up to the
// global factor 1 (plain Frobenius correspondence).
inline RVec embed_real(const CMat& x) {
  const int r = static_cast<int>(x.rows()), c = static_cast<int>(x.cols());
  RVec v(2 * r * c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      v(2 * (i * c + j)) = x(i, j).real();
      v(2 * (i * c + j) + 1) = x(i, j).imag();
    }
  return v;
}

inline CMat unembed_real(const RVec& v, int rows, int cols) {
  if (v.size() != 2 * rows * cols)
    throw DimensionMismatchError("unembed_real: vector length does not match shape");
  CMat x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      x(i, j) = complexd(v(2 * (i * cols + j)), v(2 * (i * cols + j) + 1));
  return x;
}

// Basis of the tangent space to pure states at |e_0><e_0|, embedded in R^{2d^2}.
// Column 2t-2 (1-based t = 1..d-1) embeds |e_t><e_0| + |e_0><e_t|, column 2t-1
// embeds i(|e_t><e_0| - |e_0><e_t|); these span the directions reachable by
// first-order rotations of |e_0>.
inline RMat tangent_basis(int d) {
  if (d < 2) throw DimensionMismatchError("tangent_basis: need dimension >= 2");
  RMat a(2 * d * d, 2 * (d - 1));
  for (int t = 1; t < d; ++t) {
    CMat m1 = CMat::Zero(d, d), m2 = CMat::Zero(d, d);
    m1(t, 0) = 1.0;
    m1(0, t) = 1.0;
    m2(t, 0) = complexd(0, 1);
    m2(0, t) = complexd(0, -1);
    a.col(2 * (t - 1)) = embed_real(m1);
    a.col(2 * (t - 1) + 1) = embed_real(m2);
  }
  return a;
}

// The channel as a real-linear map R^{2d^2} -> R^{2dW^2}, columns given by the
// images of the real/imaginary parts of the matrix units.
inline RMat channel_real_matrix(const KrausChannel& e) {
  const int d = e.dim_in(), dw = e.dim_out();
  RMat m(2 * dw * dw, 2 * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMat unit = CMat::Zero(d, d);
      unit(i, j) = 1.0;
      m.col(2 * (i * d + j)) = embed_real(e.apply(unit));
      unit(i, j) = complexd(0, 1);
      m.col(2 * (i * d + j) + 1) = embed_real(e.apply(unit));
    }
  return m;
}

// Orthonormal basis of the null space, via SVD with relative cutoff.
inline RMat kernel_basis(const RMat& m, double rel_tol = 1e-10) {
  Eigen::BDCSVD<RMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * rel_tol;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  const int cols = static_cast<int>(m.cols());
  RMat null(m.cols(), cols - rank);
  for (int i = rank; i < cols; ++i) null.col(i - rank) = svd.matrixV().col(i);
  return null;
}

inline int matrix_rank(const RMat& m, double rel_tol = 1e-10) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::BDCSVD<RMat> svd(m);
  const auto& sv = svd.singularValues();
  double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * rel_tol;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

struct BoundednessVerdict {
  bool bounded = false;
  int kernel_dim = 0;       // dim ker(channel map), rotated coordinates
  int intersection_dim = 0; // dim (ker intersect tangent space)
  std::optional<CMat> witness; // Hermitian direction in the original coordinates
  bool precondition_ok = true; // local injectivity spot check at the innocent state
  std::string note;
};

namespace detail {

// Unitary whose first column is the given unit vector (Gram-Schmidt completion).
inline CMat completion_unitary(const CVec& first) {
  const int d = static_cast<int>(first.size());
  CMat w = CMat::Zero(d, d);
  w.col(0) = first / first.norm();
  int filled = 1;
  for (int j = 0; j < d && filled < d; ++j) {
    CVec cand = CVec::Zero(d);
    cand(j) = 1.0;
    for (int k = 0; k < filled; ++k) cand -= w.col(k).dot(cand) * w.col(k);
    if (cand.norm() > 1e-8) {
      w.col(filled) = cand / cand.norm();
      ++filled;
    }
  }
  if (filled != d) throw DimensionMismatchError("completion_unitary: basis completion failed");
  return w;
}

} // namespace detail

// Tests whether the channel's restriction to the pure-state manifold is
// first-order injective at the innocent state: the kernel of the real-linear
// channel map must meet the tangent space of pure states at the innocent point
// only in zero. The channel is conjugated so the innocent vector becomes e_0,
// then the intersection dimension is read off from ranks.
inline BoundednessVerdict boundedness_verdict(const KrausChannel& e, const CVec& innocent,
                                              std::uint64_t seed = 0x6e0, int spot_samples = 10000) {
  e.check();
  const int d = e.dim_in();
  if (innocent.size() != d) throw DimensionMismatchError("boundedness_verdict: innocent vector dim");
  if (std::abs(innocent.norm() - 1.0) > 1e-9)
    throw DimensionMismatchError("boundedness_verdict: innocent vector not normalized");

  CMat w = detail::completion_unitary(innocent);
  KrausChannel rot;
  rot.ops.reserve(e.ops.size());
  for (const auto& k : e.ops) rot.ops.push_back(k * w);

  BoundednessVerdict v;
  RMat m = channel_real_matrix(rot);
  RMat kb = kernel_basis(m);
  v.kernel_dim = static_cast<int>(kb.cols());
  RMat a = tangent_basis(d);
  if (v.kernel_dim == 0) {
    v.intersection_dim = 0;
  } else {
    RMat joint(m.cols(), kb.cols() + a.cols());
    joint << kb, a;
    int r = matrix_rank(joint);
    v.intersection_dim = static_cast<int>(kb.cols() + a.cols()) - r;
  }
  v.bounded = v.intersection_dim == 0;

  if (!v.bounded) {
    // Null vector of [Kb A] splits as (c, b) with Kb c = -A b; Kb c is a
    // tangent direction killed by the channel map.
    RMat joint(m.cols(), kb.cols() + a.cols());
    joint << kb, a;
    RMat null = kernel_basis(joint);
    CMat best;
    double best_norm = -1.0;
    for (int i = 0; i < null.cols(); ++i) {
      RVec x = kb * null.col(i).head(kb.cols());
      if (x.norm() > best_norm) {
        best_norm = x.norm();
        best = unembed_real(x, d, d);
      }
    }
    if (best_norm > 1e-10) {
      best = (best + best.adjoint()).eval() / 2.0; // tangent directions are Hermitian
      best /= std::sqrt(std::abs((best * best).trace().real()));
      v.witness = (w * best * w.adjoint()).eval();
    }
  }

  // Spot check against a collapse of the premise: a state far from innocent
  // mapping onto (nearly) the innocent output would break the argument that a
  // vanishing output distance forces a vanishing input distance.
  auto g = task_engine(seed, 0);
  CMat rho0 = e.apply((innocent * innocent.adjoint()).eval());
  double min_far_out = kInf;
  bool collision = false;
  for (int i = 0; i < spot_samples; ++i) {
    CMat rho = (i % 3 == 0) ? projector(random_pure(d, g)) : random_density(d, g);
    double din = trace_norm((rho - innocent * innocent.adjoint()).eval());
    if (din < 0.3) continue;
    double dout = trace_norm((e.apply(rho) - rho0).eval());
    min_far_out = std::min(min_far_out, dout);
    if (dout <= 1e-9) collision = true;
  }
  // Greedy descent from the best sample; stays in the far region.
  if (min_far_out < kInf && !collision) {
    CMat cur = CMat::Zero(d, d);
    auto g2 = task_engine(seed, 1);
    double cur_out = kInf;
    for (int i = 0; i < 50; ++i) {
      CMat cand = random_density(d, g2);
      double din = trace_norm((cand - innocent * innocent.adjoint()).eval());
      if (din < 0.3) continue;
      double dout = trace_norm((e.apply(cand) - rho0).eval());
      if (dout < cur_out) {
        cur_out = dout;
        cur = cand;
      }
    }
    for (int step = 0; step < 400 && cur_out > 1e-9 && cur.size() > 0; ++step) {
      double scale = 0.3 * std::pow(0.99, step);
      CMat pert = cur + scale * random_hermitian(d, g2);
      HermitianEigensystem es = eig_hermitian((pert + pert.adjoint()).eval() / 2.0);
      RVec lam = es.values.cwiseMax(0.0);
      double tr = lam.sum();
      if (tr <= 1e-12) continue;
      CMat cand = es.vectors * (lam / tr).asDiagonal() * es.vectors.adjoint();
      double din = trace_norm((cand - innocent * innocent.adjoint()).eval());
      if (din < 0.3) continue;
      double dout = trace_norm((e.apply(cand) - rho0).eval());
      if (dout < cur_out) {
        cur_out = dout;
        cur = cand;
      }
    }
    min_far_out = std::min(min_far_out, cur_out);
    if (cur_out <= 1e-9) collision = true;
  }
  v.precondition_ok = !collision;
  v.note = "min output distance at input distance >= 0.3: " +
           std::to_string(min_far_out == kInf ? -1.0 : min_far_out);
  return v;
}

struct RatioRow {
  double input_distance = 0.0;   // trace distance of the probe pair
  double max_ratio = 0.0;        // max over sampled directions of d_in/d_out
  double witness_ratio = 0.0;    // ratio along the witness direction (0 if none)
};

struct RatioProbeReport {
  std::vector<RatioRow> rows;
  double sup_ratio = 0.0;
};

// Empirical input/output trace-distance ratios for pure probes near the
// innocent state, at geometrically shrinking input distances. A bounded
// channel shows a plateau; an intersection witness drives the ratio up
// roughly like one over the distance.
inline RatioProbeReport ratio_probe(const KrausChannel& e, const CVec& innocent,
                                    const std::optional<CMat>& witness = std::nullopt,
                                    int samples_per_scale = 200, std::uint64_t seed = 0x6e1) {
  e.check();
  const int d = e.dim_in();
  if (innocent.size() != d) throw DimensionMismatchError("ratio_probe: innocent vector dim");
  CMat rho0 = e.apply((innocent * innocent.adjoint()).eval());
  auto g = task_engine(seed, 2);

  CVec wdir;
  if (witness) {
    CVec cand = (*witness) * innocent;
    cand -= innocent.dot(cand) * innocent;
    if (cand.norm() > 1e-12) wdir = cand / cand.norm();
  }

  RatioProbeReport rep;
  for (int k = 1; k <= 6; ++k) {
    double target = std::pow(10.0, -k);
    double s = target / 2.0; // pure-state trace distance 2 sin(angle)
    double c = std::sqrt(1.0 - s * s);
    RatioRow row;
    row.input_distance = target;
    auto eval_dir = [&](const CVec& v) {
      CVec phi = c * innocent + s * v;
      CMat diff = (projector(phi) - innocent * innocent.adjoint()).eval();
      double din = trace_norm(diff);
      double dout = trace_norm((e.apply(projector(phi)) - rho0).eval());
      return dout > 1e-300 ? din / dout : kInf;
    };
    for (int i = 0; i < samples_per_scale; ++i) {
      CVec v = random_pure(d, g);
      v -= innocent.dot(v) * innocent;
      if (v.norm() < 1e-9) continue;
      v /= v.norm();
      row.max_ratio = std::max(row.max_ratio, eval_dir(v));
    }
    if (wdir.size() == d) {
      row.witness_ratio = eval_dir(wdir);
      row.max_ratio = std::max(row.max_ratio, row.witness_ratio);
    }
    rep.sup_ratio = std::max(rep.sup_ratio, row.max_ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

} // namespace covertsense
