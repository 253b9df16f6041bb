#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace covertsense {

// All randomness in the toolkit flows from one explicit 64-bit seed.
// Independent tasks (restarts, Monte-Carlo chunks, samples) derive their own
// engine from (seed, task counter) so results do not depend on thread count
// or evaluation order.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 task_engine(uint64_t seed, uint64_t task) {
  uint64_t s = seed + 0x9E3779B97F4A7C15ull * (task + 1);
  uint64_t a = splitmix64(s);
  uint64_t b = splitmix64(s);
  uint64_t c = splitmix64(s);
  std::seed_seq seq{static_cast<uint32_t>(a >> 32), static_cast<uint32_t>(a),
                    static_cast<uint32_t>(b >> 32), static_cast<uint32_t>(b),
                    static_cast<uint32_t>(c >> 32), static_cast<uint32_t>(c)};
  return std::mt19937_64(seq);
}

// uniform in [0,1); 53-bit resolution
inline double draw_unit(std::mt19937_64& g) {
  return (g() >> 11) * 0x1.0p-53;
}

// unbiased draw from {0, ..., n-1} by rejection on the top bits
inline uint64_t draw_below(std::mt19937_64& g, uint64_t n) {
  if (n <= 1) return 0;
  uint64_t mask = ~0ull >> __builtin_clzll(n - 1 | 1);
  uint64_t v;
  do { v = g() & mask; } while (v >= n);
  return v;
}

inline double draw_gauss(std::mt19937_64& g) {
  double u1 = draw_unit(g);
  while (u1 <= 0.0) u1 = draw_unit(g);
  double u2 = draw_unit(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

inline std::complex<double> draw_cgauss(std::mt19937_64& g) {
  double re = draw_gauss(g);
  double im = draw_gauss(g);
  return {re, im};
}

inline Eigen::VectorXcd random_pure(int d, std::mt19937_64& g) {
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = draw_cgauss(g);
  v /= v.norm();
  return v;
}

// Ginibre-induced state; rank defaults to full
inline Eigen::MatrixXcd random_density(int d, std::mt19937_64& g, int rank = -1) {
  if (rank <= 0 || rank > d) rank = d;
  Eigen::MatrixXcd a(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = draw_cgauss(g);
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return rho;
}

inline Eigen::MatrixXcd random_hermitian(int d, std::mt19937_64& g) {
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = draw_cgauss(g);
  return Eigen::MatrixXcd(0.5 * (a + a.adjoint()));
}

// flat (Dirichlet(1,...,1)) random pmf
inline std::vector<double> random_pmf(int k, std::mt19937_64& g) {
  std::vector<double> p(k);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    double u = draw_unit(g);
    while (u <= 0.0) u = draw_unit(g);
    p[i] = -std::log(u);
    s += p[i];
  }
  for (double& x : p) x /= s;
  return p;
}

} // namespace covertsense
