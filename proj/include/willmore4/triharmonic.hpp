#pragma once

// Triharmonic interpolation on the annulus gamma <= |z| <= 1 in R^4.
//
// The interpolant
//   w(z) = e(r) + sum_i f_i(r) X_i(zhat) + sum_i g_i(r) Y_i(zhat) + sum_i h_i(r) W_i(zhat)
// is assembled from four six-member radial families, one per spherical-harmonic
// degree 0..3.  Every member is annihilated by the cube of the flat Laplacian,
// so w is exactly triharmonic by construction.  The boundary data (value, d_r,
// d^2_r at r = gamma and r = 1) produce one 6x6 linear system per harmonic
// channel; the systems are graded in gamma (entries span gamma^-7 .. gamma^7),
// so the solves run in 128-bit floats with one refinement pass.

#include "willmore4/harmonics.hpp"
#include "willmore4/immersion.hpp"
#include "willmore4/types.hpp"

#include <array>
#include <sstream>
#include <string>
#include <utility>

namespace w4 {

enum class Family { E, F, G, H }; // harmonic degree 0, 1, 2, 3

template <typename R> using Mat6 = std::array<std::array<R, 6>, 6>;

// One radial family: six members r^k (times ln r where flagged), all with the
// same harmonic degree.  laplacian_action N satisfies
//   Delta0 (member_j . Y) = sum_i N(i,j) member_i . Y,  N^3 = 0.
struct RadialFamily {
  Family tag = Family::E;
  int harmonic_degree = 0;
  std::array<int, 6> exponent{};
  std::array<bool, 6> has_log{};
  Eigen::Matrix<double, 6, 6> laplacian_action; // integer entries
};

const RadialFamily& radial_family(Family tag);

// d-th radial derivative (0 <= d <= 3) of basis member `index` at r > 0.
double radial_eval(Family tag, int index, double r, int deriv_order);

// d-th derivative of r^k (times ln r when haslog).  Falling-factorial
// recurrence: each derivative maps (a, c) -> (a (k - i), c (k - i) + a) in
//   a r^{k-i} ln r + c r^{k-i}.
template <typename R> R radial_term(int k, bool haslog, R r, int d) {
  long long a = 1, c = 0;
  for (int i = 0; i < d; ++i) {
    long long kk = k - i;
    c = c * kk + a;
    a *= kk;
  }
  R rp = ipow(r, (long long)(k - d));
  if (!haslog) return R(a) * rp;
  return (R(a) * log(r) + R(c)) * rp;
}

// Rows: (value, d_r, d^2_r) at r = gamma, then the same three at r = 1.
// Columns: the six family members.  gamma = 1 is allowed (the matrix is
// singular there; useful as a degeneracy check) but solves require gamma < 1.
template <typename R> Mat6<R> boundary_matrix(Family tag, R gamma) {
  require(gamma > R(0) && gamma <= R(1), "boundary_matrix: need 0 < gamma <= 1");
  const RadialFamily& fam = radial_family(tag);
  Mat6<R> m{};
  for (int j = 0; j < 6; ++j)
    for (int d = 0; d < 3; ++d) {
      m[d][j] = radial_term(fam.exponent[j], fam.has_log[j], gamma, d);
      m[3 + d][j] = radial_term(fam.exponent[j], fam.has_log[j], R(1), d);
    }
  return m;
}

// Partial-pivoted LU over any scalar with w4::fabs (double or f128).
// Eliminates in place; solve() applies the stored permutation.
template <typename R> class PivotLU6 {
 public:
  explicit PivotLU6(const Mat6<R>& m) : a_(m) {
    R entry_max = R(0);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (fabs(a_[i][j]) > entry_max) entry_max = fabs(a_[i][j]);
    for (int i = 0; i < 6; ++i) piv_[i] = i;
    for (int col = 0; col < 6; ++col) {
      int best = col;
      R bv = fabs(a_[col][col]);
      for (int row = col + 1; row < 6; ++row) {
        R v = fabs(a_[row][col]);
        if (v > bv) {
          bv = v;
          best = row;
        }
      }
      if (best != col) {
        std::swap(a_[best], a_[col]);
        std::swap(piv_[best], piv_[col]);
        sign_ = -sign_;
      }
      if (!(bv > entry_max * R(1e-30))) {
        std::ostringstream os;
        os << "boundary system singular at pivot " << col
           << " (condition estimate >= " << to_double(entry_max / (bv + R(1e-300)))
           << ")";
        fail(os.str());
      }
      if (min_pivot_ < R(0) || bv < min_pivot_) min_pivot_ = bv;
      for (int row = col + 1; row < 6; ++row) {
        R f = a_[row][col] / a_[col][col];
        a_[row][col] = f;
        for (int cc = col + 1; cc < 6; ++cc) a_[row][cc] -= f * a_[col][cc];
      }
    }
  }

  std::array<R, 6> solve(const std::array<R, 6>& rhs) const {
    std::array<R, 6> y{};
    for (int i = 0; i < 6; ++i) {
      R s = rhs[piv_[i]];
      for (int j = 0; j < i; ++j) s -= a_[i][j] * y[j];
      y[i] = s;
    }
    for (int i = 5; i >= 0; --i) {
      R s = y[i];
      for (int j = i + 1; j < 6; ++j) s -= a_[i][j] * y[j];
      y[i] = s / a_[i][i];
    }
    return y;
  }

  R det() const {
    R d = R(sign_);
    for (int i = 0; i < 6; ++i) d *= a_[i][i];
    return d;
  }

  R min_pivot() const { return min_pivot_; }

 private:
  Mat6<R> a_;
  std::array<int, 6> piv_{};
  int sign_ = 1;
  R min_pivot_ = R(-1);
};

template <typename R> R det6(const Mat6<R>& m) { return PivotLU6<R>(m).det(); }

// Solve followed by one residual-correction pass against the unfactored
// matrix; on graded systems this recovers the digits elimination loses.
template <typename R>
std::array<R, 6> lu_solve_refined(const PivotLU6<R>& lu, const Mat6<R>& m,
                                  const std::array<R, 6>& rhs) {
  std::array<R, 6> sol = lu.solve(rhs);
  std::array<R, 6> res{};
  for (int i = 0; i < 6; ++i) {
    R s = rhs[i];
    for (int j = 0; j < 6; ++j) s -= m[i][j] * sol[j];
    res[i] = s;
  }
  std::array<R, 6> corr = lu.solve(res);
  for (int i = 0; i < 6; ++i) sol[i] += corr[i];
  return sol;
}

// Right-hand side of one harmonic channel.  The boundary data are
//   at gamma: w = (alpha/2) P + (alpha^2/6gamma) Q,  d_r w = -(alpha^2/6gamma^2) Q,
//             d^2_r w = (alpha^2/3gamma^3) Q
//   at 1:     w = (beta/2) R + (beta^2/6) S,  d_r w = beta R + (beta^2/2) S,
//             d^2_r w = beta R + beta^2 S
// so x carries the channel's inner datum and y the outer one:
//   E: x = r0 (trace of R), y unused     F: x = q1, y = s1
//   G: x = p,  y = r                     H: x = q3, y = s3
template <typename R>
std::array<R, 6> channel_rhs(Family tag, R gamma, R alpha, R beta, R x, R y) {
  std::array<R, 6> rhs{};
  switch (tag) {
    case Family::E:
      rhs[3] = beta * x / R(2);
      rhs[4] = beta * x;
      rhs[5] = beta * x;
      break;
    case Family::F:
    case Family::H: {
      R a2 = alpha * alpha, b2 = beta * beta;
      rhs[0] = a2 * x / (R(6) * gamma);
      rhs[1] = -a2 * x / (R(6) * gamma * gamma);
      rhs[2] = a2 * x / (R(3) * gamma * gamma * gamma);
      rhs[3] = b2 * y / R(6);
      rhs[4] = b2 * y / R(2);
      rhs[5] = b2 * y;
      break;
    }
    case Family::G:
      rhs[0] = alpha * x / R(2);
      rhs[3] = beta * y / R(2);
      rhs[4] = beta * y;
      rhs[5] = beta * y;
      break;
  }
  return rhs;
}

template <typename R>
std::array<R, 6> solve_channel(Family tag, R gamma, R alpha, R beta, R x, R y) {
  Mat6<R> m = boundary_matrix(tag, gamma);
  PivotLU6<R> lu(m);
  return lu_solve_refined(lu, m, channel_rhs(tag, gamma, alpha, beta, x, y));
}

// Leading-order coefficient formulas for the same channel.  These are the
// small-gamma asymptotics of solve_channel; the dropped terms are
//   E: O(gamma^4 ln^4 gamma) relative to the leading beta x scale
//   F: relative corrections of order 1/ln gamma as annotated per entry
//   G, H: O(gamma^4) resp. O(gamma^6) beyond the kept powers.
template <typename R>
std::array<R, 6> asymptotic_channel(Family tag, R gamma, R alpha, R beta, R x, R y) {
  R L = log(gamma);
  R g2 = gamma * gamma, g4 = g2 * g2;
  std::array<R, 6> out{};
  switch (tag) {
    case Family::E: {
      R bx = beta * x;
      out[0] = -g4 / R(2) * bx;
      out[1] = R(2) * g2 * L * bx;
      out[2] = -R(2) * g2 * (R(1) + R(16) * g2 * L * L) * bx;
      out[3] = (R(1) + R(4) * g2) / R(2) * bx;
      out[4] = R(2) * g2 * (R(4) * L + R(3)) * bx;
      out[5] = -R(2) * g2 * (L + R(1)) * bx;
      break;
    }
    case Family::F: {
      R ax = alpha * alpha * x, by = beta * beta * y;
      out[1] = (R(1) / R(6) - R(3) / (R(8) * L * L)) * ax;
      out[2] = -ax / R(2);
      out[3] = (R(1) / (R(2) * L)) * (R(1) - R(3) / (R(2) * L)) * ax;
      out[4] = (R(1) / R(2)) * (R(1) - R(1) / L) * ax + by / R(6);
      out[5] = -(R(1) / R(6)) * (R(1) + R(3) / (R(4) * L)) * ax;
      break;
    }
    case Family::G: {
      R ax = alpha * x, by = beta * y;
      out[1] = (R(3) / R(2)) * g4 * (-R(3) * ax + by);
      out[2] = (ax * (R(1) + R(9) * g2) - R(3) * by * g2) / R(2);
      out[3] = (-R(3) * ax + by * (R(1) + R(9) * g2)) / R(2);
      out[4] = R(3) * out[2];
      out[5] = -out[2];
      break;
    }
    case Family::H: {
      R ax = alpha * alpha * x, by = beta * beta * y;
      R g6 = g4 * g2, g8 = g4 * g4;
      R k = R(1) + R(36) * g4;
      out[0] = (R(3) * ax - by / R(2)) * g8;
      out[1] = (-R(8) * ax + R(4) / R(3) * by) * g6;
      out[2] = (ax / R(6)) * k - by * g4;
      out[3] = (-ax + by / R(6)) * k;
      out[4] = (R(4) / R(3)) * ax * k - R(8) * by * g4;
      out[5] = -(ax / R(2)) * k + R(3) * by * g4;
      break;
    }
  }
  return out;
}

// Solved coefficients for every harmonic channel.  a: degree-0 channel;
// b/c/d: one row of six per degree-1/2/3 harmonic.  Each coefficient is a
// codomain vector (the boundary data are vector-valued).
struct AnnulusInterpolant {
  int m = 0;
  double gamma = 1, alpha = 0, beta = 0;
  std::array<VecC, 6> a;
  std::array<std::array<VecC, 6>, 4> b;
  std::array<std::array<VecC, 6>, 9> c;
  std::array<std::array<VecC, 6>, 16> d;
};

// Thirty 6x6 solves (1 + 4 + 9 + 16 channels), each in f128 with residual
// certified <= 1e-10 ||rhs||.
AnnulusInterpolant solve_interpolant(const FormCoefficients& fc, double gamma,
                                     double alpha, double beta);

// Same shape, coefficients from the printed leading-order formulas.
AnnulusInterpolant asymptotic_interpolant(const FormCoefficients& fc, double gamma,
                                          double alpha, double beta);

// Value of w at a point of the annulus.
VecC eval_w(const AnnulusInterpolant& w, const Vec4& z);

// Full jet (value, first, second, third derivatives) of w at z.
void eval_w_jets(const AnnulusInterpolant& w, const Vec4& z, PatchJet& out);

// Delta0^power w at z, computed by pushing the coefficient vectors through
// the family Laplacian-action matrices.  power = 3 must give zero.
VecC eval_w_laplacian(const AnnulusInterpolant& w, const Vec4& z, int power);

// Smooth ramp: 0 for s <= sqrt(alpha)/4, 1 for s >= 3 sqrt(alpha)/4, built
// from the exp(-1/s) mollifier.  Derivatives scale like alpha^{-order/2}.
class CutoffEta {
 public:
  explicit CutoffEta(double alpha);
  double operator()(double s) const;
  double deriv(double s, int order) const; // order 0..3
  double ramp_start() const { return lo_; }
  double ramp_end() const { return lo_ + width_; }

 private:
  double lo_ = 0, width_ = 1;
};

} // namespace w4
