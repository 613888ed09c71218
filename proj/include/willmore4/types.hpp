#pragma once

// Common scalar types, small-matrix aliases and deterministic reductions
// shared by all modules.

#include <Eigen/Core>
#include <Eigen/Dense>
#include <quadmath.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace w4 {

using f128 = __float128;

// Ambient dimension n is small (n <= 12, codimension m = n-4 <= 8), so all
// ambient-sized objects live on the stack.
constexpr int max_ambient = 12;
constexpr int max_codim = 8;

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
using VecA = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, max_ambient, 1>;
using VecC = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, max_codim, 1>;
using MatA4 = Eigen::Matrix<double, Eigen::Dynamic, 4, 0, max_ambient, 4>;
using MatAA = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, max_ambient, max_ambient>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Overload set used by scalar-templated numerics (double / f128).
inline double sqrt(double x) { return std::sqrt(x); }
inline double log(double x) { return std::log(x); }
inline double exp(double x) { return std::exp(x); }
inline double fabs(double x) { return std::fabs(x); }
inline f128 sqrt(f128 x) { return sqrtq(x); }
inline f128 log(f128 x) { return logq(x); }
inline f128 exp(f128 x) { return expq(x); }
inline f128 fabs(f128 x) { return fabsq(x); }

template <class R> R pi();
template <> inline double pi<double>() { return M_PI; }
template <> inline f128 pi<f128>() { return M_PIq; }

// Vol(S^3) = 2 pi^2; Vol(S^4) = (8/3) pi^2.
template <class R> R vol_s3() { return R(2) * pi<R>() * pi<R>(); }
inline double vol_s3d() { return vol_s3<double>(); }
inline double vol_s4d() { return 8.0 / 3.0 * M_PI * M_PI; }

inline double to_double(double x) { return x; }
inline double to_double(f128 x) { return static_cast<double>(x); }

// Integer power by squaring; exponent may be negative.
template <class R> R ipow(R x, long long k) {
  if (k < 0) return R(1) / ipow(x, -k);
  R acc = R(1);
  while (k) {
    if (k & 1) acc *= x;
    x *= x;
    k >>= 1;
  }
  return acc;
}

// Pairwise (cascade) summation: deterministic for a fixed element order and
// accurate to O(log n) rounding growth.
template <class R> R pairwise_sum(const R* data, std::size_t n) {
  if (n <= 8) {
    R s = R(0);
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <class R> R pairwise_sum(const std::vector<R>& v) {
  return v.empty() ? R(0) : pairwise_sum(v.data(), v.size());
}

// Accumulator that keeps every term and reduces pairwise on demand.
template <class R> class PairwiseAcc {
public:
  void add(R x) { terms_.push_back(x); }
  R total() const { return pairwise_sum(terms_); }
  void reserve(std::size_t n) { terms_.reserve(n); }

private:
  std::vector<R> terms_;
};

// Symmetric index maps for derivative tensors D2 (10 slots) and D3 (20 slots).
constexpr int sym2_count = 10;
constexpr int sym3_count = 20;

inline int sym2_index(int a, int b) {
  if (a > b) std::swap(a, b);
  // (0,0)(0,1)(0,2)(0,3)(1,1)(1,2)(1,3)(2,2)(2,3)(3,3)
  static constexpr int base[4] = {0, 4, 7, 9};
  return base[a] + (b - a);
}

inline int sym3_index(int a, int b, int c) {
  static const auto table = [] {
    std::array<int, 64> t{};
    int idx = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        for (int k = j; k < 4; ++k) {
          t[(i * 4 + j) * 4 + k] = idx;
          ++idx;
        }
    return t;
  }();
  int lo = std::min({a, b, c}), hi = std::max({a, b, c});
  int mid = a + b + c - lo - hi;
  return table[(lo * 4 + mid) * 4 + hi];
}

[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

} // namespace w4
