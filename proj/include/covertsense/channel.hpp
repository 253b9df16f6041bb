#pragma once

#include <vector>

#include "qmat.hpp"

namespace covertsense {

struct KrausChannel {
  std::vector<CMat> ops;  // each dim_out x dim_in

  int dim_in() const { return ops.empty() ? 0 : static_cast<int>(ops[0].cols()); }
  int dim_out() const { return ops.empty() ? 0 : static_cast<int>(ops[0].rows()); }

  void check() const {
    if (ops.empty()) throw DimensionMismatchError("channel: no Kraus operators");
    const int din = dim_in(), dout = dim_out();
    CMat acc = CMat::Zero(din, din);
    for (const auto& k : ops) {
      require_finite(k, "channel");
      if (k.cols() != din || k.rows() != dout)
        throw DimensionMismatchError("channel: Kraus operator shapes differ");
      acc += k.adjoint() * k;
    }
    double dev = entrywise_max(acc - CMat::Identity(din, din));
    if (dev > tol::kraus_complete)
      throw DimensionMismatchError("channel: completeness defect " + std::to_string(dev) +
                                   " exceeds " + std::to_string(tol::kraus_complete));
  }

  CMat apply(const CMat& x) const {
    CMat out = CMat::Zero(dim_out(), dim_out());
    for (const auto& k : ops) out += k * x * k.adjoint();
    return out;
  }
};

// m-fold tensor power as an explicit Kraus family (|ops|^m operators)
inline KrausChannel kraus_power(const KrausChannel& e, int m, long max_ops = 100000) {
  if (m < 1) throw DimensionMismatchError("kraus_power: m must be >= 1");
  double cnt = std::pow(static_cast<double>(e.ops.size()), m);
  if (cnt > static_cast<double>(max_ops))
    throw ScaleExceededError("kraus_power: operator count exceeds " + std::to_string(max_ops));
  KrausChannel out;
  out.ops = e.ops;
  for (int i = 1; i < m; ++i) {
    std::vector<CMat> next;
    next.reserve(out.ops.size() * e.ops.size());
    for (const auto& a : out.ops)
      for (const auto& b : e.ops) next.push_back(tensor(a, b));
    out.ops = std::move(next);
  }
  return out;
}

inline KrausChannel depolarizing_channel(double p) {
  if (p < 0.0 || p > 1.0) throw DimensionMismatchError("depolarizing_channel: p outside [0,1]");
  CMat id = CMat::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  z << 1, 0, 0, -1;
  KrausChannel e;
  e.ops = {std::sqrt(1.0 - 0.75 * p) * id, std::sqrt(0.25 * p) * x,
           std::sqrt(0.25 * p) * y, std::sqrt(0.25 * p) * z};
  return e;
}

} // namespace covertsense
