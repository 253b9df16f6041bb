#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace covertsense {

using complexd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian = 1e-10;     // max |X - X'| entry
inline constexpr double psd = 1e-10;           // eigenvalues below -psd are rejected
inline constexpr double trace_one = 1e-10;
inline constexpr double cluster = 1e-8;        // relative eigenvalue clustering
inline constexpr double support = 1e-12;       // eigenvalues <= support count as kernel
inline constexpr double kernel_overlap = 1e-10;
inline constexpr double povm_psd = 1e-9;
inline constexpr double completeness = 1e-8;
inline constexpr double unitary = 1e-10;
inline constexpr double kraus_complete = 1e-9;
}

inline double entrywise_max(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_square(const CMat& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionMismatchError(std::string(who) + ": expected a nonempty square matrix, got " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_finite(const CMat& m, const char* who) {
  if (!m.allFinite())
    throw NonFiniteError(std::string(who) + ": matrix has a non-finite entry");
}

inline bool is_hermitian(const CMat& m, double eps = tol::hermitian) {
  return entrywise_max(m - m.adjoint()) <= eps;
}

inline void require_hermitian(const CMat& m, const char* who, double eps = tol::hermitian) {
  require_square(m, who);
  require_finite(m, who);
  double dev = entrywise_max(m - m.adjoint());
  if (dev > eps)
    throw NonHermitianError(std::string(who) + ": |X - X'| = " + std::to_string(dev) +
                            " exceeds " + std::to_string(eps));
}

// ---------------------------------------------------------------------------
// Hermitian eigensystems with eigenvalue clustering
// ---------------------------------------------------------------------------

struct EigenCluster {
  double value;     // representative (mean of member eigenvalues)
  int begin, end;   // half-open range into the ascending eigenvalue list
  CMat projector;
  int size() const { return end - begin; }
};

struct HermitianEigensystem {
  RVec values;   // ascending
  CMat vectors;  // orthonormal columns, phases fixed
  std::vector<EigenCluster> clusters;
  int distinct() const { return static_cast<int>(clusters.size()); }
};

// Eigenvector phase convention: first component of modulus above 1e-9 is made
// real positive, so repeated runs and platforms agree on nondegenerate vectors.
inline void fix_phases(CMat& vecs) {
  for (int c = 0; c < vecs.cols(); ++c) {
    for (int r = 0; r < vecs.rows(); ++r) {
      complexd x = vecs(r, c);
      if (std::abs(x) > 1e-9) {
        vecs.col(c) *= std::conj(x) / std::abs(x);
        break;
      }
    }
  }
}

inline HermitianEigensystem eig_hermitian(const CMat& m, double cluster_tol = tol::cluster) {
  require_hermitian(m, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success)
    throw NonFiniteError("eig_hermitian: eigensolver did not converge");
  HermitianEigensystem sys;
  sys.values = es.eigenvalues();
  sys.vectors = es.eigenvectors();
  fix_phases(sys.vectors);
  const int d = static_cast<int>(sys.values.size());
  const double scale = std::max(1.0, sys.values.cwiseAbs().maxCoeff());
  int begin = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || sys.values(i) - sys.values(i - 1) > cluster_tol * scale) {
      EigenCluster cl;
      cl.begin = begin;
      cl.end = i;
      cl.value = sys.values.segment(begin, i - begin).mean();
      cl.projector = sys.vectors.middleCols(begin, i - begin) *
                     sys.vectors.middleCols(begin, i - begin).adjoint();
      sys.clusters.push_back(std::move(cl));
      begin = i;
    }
  }
  return sys;
}

// number of distinct eigenvalues under the default clustering
inline int distinct_eigenvalues(const CMat& m, double cluster_tol = tol::cluster) {
  return eig_hermitian(m, cluster_tol).distinct();
}

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

class DensityOperator {
 public:
  explicit DensityOperator(CMat m) {
    require_hermitian(m, "DensityOperator");
    m = 0.5 * (m + m.adjoint());
    double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::trace_one)
      throw TraceMismatchError("DensityOperator: trace " + std::to_string(tr) +
                               " deviates from 1 by more than " + std::to_string(tol::trace_one));
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    double lo = es.eigenvalues().minCoeff();
    if (lo < -tol::psd)
      throw NotPsdError("DensityOperator: eigenvalue " + std::to_string(lo) +
                        " below -" + std::to_string(tol::psd));
    if (lo < 0.0) {
      // clamp roundoff-negative eigenvalues and renormalize the trace
      RVec vals = es.eigenvalues().cwiseMax(0.0);
      m = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
      m = 0.5 * (m + m.adjoint());
      m /= m.trace().real();
    }
    m_ = std::move(m);
  }

  const CMat& mat() const { return m_; }
  operator const CMat&() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  CMat m_;
};

// ---------------------------------------------------------------------------
// Matrix powers, trace norm, tensor structure
// ---------------------------------------------------------------------------

// rho^s for PSD rho and s in [0,1]; 0^s = 0 for s > 0, rho^0 is the support
// projector (eigenvalues above tol::support).
inline CMat mat_power(const CMat& rho, double s) {
  require_hermitian(rho, "mat_power");
  if (!(s >= 0.0 && s <= 1.0))
    throw DimensionMismatchError("mat_power: exponent " + std::to_string(s) + " outside [0,1]");
  if (s == 1.0) return 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()));
  RVec vals = es.eigenvalues();
  double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  if (vals.minCoeff() < -tol::psd * scale)
    throw NotPsdError("mat_power: input eigenvalue " + std::to_string(vals.minCoeff()) +
                      " is negative beyond tolerance");
  RVec powed(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    double v = std::max(vals(i), 0.0);
    if (s == 0.0)
      powed(i) = v > tol::support ? 1.0 : 0.0;
    else
      powed(i) = v > 0.0 ? std::pow(v, s) : 0.0;
  }
  return es.eigenvectors() * powed.asDiagonal() * es.eigenvectors().adjoint();
}

inline CMat support_projector(const CMat& rho) { return mat_power(rho, 0.0); }

inline double trace_norm(const CMat& m) {
  require_square(m, "trace_norm");
  require_finite(m, "trace_norm");
  if (is_hermitian(m, 1e-12 * std::max(1.0, entrywise_max(m)))) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<CMat> svd(m);
  return svd.singularValues().sum();
}

inline CMat tensor(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMat tensor_power(const CMat& a, int k) {
  if (k < 1) throw DimensionMismatchError("tensor_power: k must be >= 1");
  CMat out = a;
  for (int i = 1; i < k; ++i) out = tensor(out, a);
  return out;
}

inline CVec tensor(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (int i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Trace out the factors not listed in `keep`; `dims` are the factor dimensions
// in tensor order, `keep` is a strictly increasing list of factor positions.
inline CMat partial_trace(const CMat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  require_square(m, "partial_trace");
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionMismatchError("partial_trace: factor dimension must be positive");
    total *= d;
  }
  if (total != m.rows())
    throw DimensionMismatchError("partial_trace: factor dimensions multiply to " +
                                 std::to_string(total) + ", matrix has " +
                                 std::to_string(m.rows()) + " rows");
  const int f = static_cast<int>(dims.size());
  std::vector<bool> kept(f, false);
  for (size_t i = 0; i < keep.size(); ++i) {
    int k = keep[i];
    if (k < 0 || k >= f || (i > 0 && k <= keep[i - 1]))
      throw DimensionMismatchError("partial_trace: keep list must be strictly increasing factor positions");
    kept[k] = true;
  }
  long dk = 1, dt = 1;
  for (int i = 0; i < f; ++i) (kept[i] ? dk : dt) *= dims[i];

  // strides of each factor inside the full index
  std::vector<long> stride(f, 1);
  for (int i = f - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  std::vector<int> keep_list, tr_list;
  for (int i = 0; i < f; ++i) (kept[i] ? keep_list : tr_list).push_back(i);

  auto unpack = [&](long idx, const std::vector<int>& which, std::vector<int>& digits) {
    for (int pos = static_cast<int>(which.size()) - 1; pos >= 0; --pos) {
      int fct = which[pos];
      digits[pos] = static_cast<int>(idx % dims[fct]);
      idx /= dims[fct];
    }
  };

  CMat out = CMat::Zero(dk, dk);
  std::vector<int> kd(keep_list.size()), kd2(keep_list.size()), td(tr_list.size());
  for (long r = 0; r < dk; ++r) {
    unpack(r, keep_list, kd);
    for (long c = 0; c < dk; ++c) {
      unpack(c, keep_list, kd2);
      complexd acc = 0.0;
      for (long t = 0; t < dt; ++t) {
        unpack(t, tr_list, td);
        long row = 0, col = 0;
        for (size_t i = 0; i < keep_list.size(); ++i) {
          row += static_cast<long>(kd[i]) * stride[keep_list[i]];
          col += static_cast<long>(kd2[i]) * stride[keep_list[i]];
        }
        for (size_t i = 0; i < tr_list.size(); ++i) {
          row += static_cast<long>(td[i]) * stride[tr_list[i]];
          col += static_cast<long>(td[i]) * stride[tr_list[i]];
        }
        acc += m(row, col);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

inline CVec basis_ket(int d, int i) {
  CVec v = CVec::Zero(d);
  v(i) = 1.0;
  return v;
}

inline CMat projector(const CVec& v) { return v * v.adjoint(); }

} // namespace covertsense
