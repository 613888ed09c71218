#pragma once

// Orthogonal bases of spherical harmonics on S^3 of degree 1, 2, 3, realized
// as homogeneous harmonic polynomials on R^4, plus the projections of
// symmetric 2- and 3-forms onto them.
//
// Normalization: every basis member Y satisfies int_{S^3} Y^2 dA = Vol(S^3).
// Construction: graded-lex monomial order, harmonic projection (subtract the
// |x|^2 multiple), exact rational Gram-Schmidt, then one scalar normalization.

#include "willmore4/quadrature.hpp"
#include "willmore4/rational.hpp"
#include "willmore4/types.hpp"

namespace w4 {

// Homogeneous polynomial with exact rational coefficients.
struct PolyQ {
  std::vector<std::array<int, 4>> exps;
  std::vector<Rational> coef;

  bool empty() const {
    for (const auto& c : coef)
      if (!c.is_zero()) return false;
    return true;
  }
};

PolyQ laplacian(const PolyQ& p); // exact

struct HarmonicMember {
  PolyQ exact;   // integer-primitive, exactly harmonic
  double scale;  // Y = scale * exact, so that int_{S^3} Y^2 = Vol(S^3)
  std::vector<std::array<int, 4>> exps;
  std::vector<double> coef; // scale folded in

  double eval(double x1, double x2, double x3, double x4) const {
    double acc = 0;
    for (std::size_t t = 0; t < exps.size(); ++t) {
      double m = coef[t];
      const auto& e = exps[t];
      for (int k = 0; k < e[0]; ++k) m *= x1;
      for (int k = 0; k < e[1]; ++k) m *= x2;
      for (int k = 0; k < e[2]; ++k) m *= x3;
      for (int k = 0; k < e[3]; ++k) m *= x4;
      acc += m;
    }
    return acc;
  }
  double eval(const Vec4& x) const { return eval(x[0], x[1], x[2], x[3]); }
};

struct HarmonicBasis {
  int degree = 0;
  std::vector<HarmonicMember> members;
  int size() const { return (int)members.size(); }
};

// Cached bases; degree 1 -> 4 members, degree 2 -> 9, degree 3 -> 16.
const HarmonicBasis& harmonic_basis(int degree);

// Symmetric vector-valued forms on R^4 (one slot per codomain component).
struct QuadForm {
  std::vector<Mat4> comp;
  int codim() const { return (int)comp.size(); }
  VecC trace() const {
    VecC t(codim());
    for (int c = 0; c < codim(); ++c) t[c] = comp[c].trace();
    return t;
  }
  VecC eval(const Vec4& u, const Vec4& v) const {
    VecC r(codim());
    for (int c = 0; c < codim(); ++c) r[c] = u.dot(comp[c] * v);
    return r;
  }
  bool symmetric(double tol = 1e-12) const {
    for (const auto& m : comp)
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    return true;
  }
};

struct CubicForm {
  // comp[c][sym3_index(a,b,g)] = T^c_{abg} (fully symmetric tensor entries)
  std::vector<std::array<double, sym3_count>> comp;
  int codim() const { return (int)comp.size(); }
  VecC eval(const Vec4& u, const Vec4& v, const Vec4& w) const {
    VecC r = VecC::Zero(codim());
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int g = 0; g < 4; ++g) {
          double m = u[a] * v[b] * w[g];
          for (int c = 0; c < codim(); ++c) r[c] += comp[c][sym3_index(a, b, g)] * m;
        }
    return r;
  }
};

struct QuadProjection {
  VecC trace;                // tr B per component; B(u,u)|_{S^3} = trace/4 + sum coeffs_i Y_i
  std::vector<VecC> coeffs;  // 9 degree-2 coefficients
};

struct CubicProjection {
  std::vector<VecC> deg1; // 4 coefficients on the degree-1 basis
  std::vector<VecC> deg3; // 16 coefficients on the degree-3 basis
};

// Quadrature-based projections (exactness >= 2*deg + 2).
QuadProjection project_quadratic(const QuadForm& B);
CubicProjection project_cubic(const CubicForm& C);

// Coefficient data (p, r0, r, q, s) feeding the triharmonic interpolation:
// germ1 contributes P-ring (traceless quadratic) and Q (cubic); germ2
// contributes R (full quadratic) and S (cubic).
struct FormCoefficients {
  int m = 0; // codomain dimension
  VecC r0;
  std::vector<VecC> p, r;   // 9 each
  std::vector<VecC> q1, s1; // 4 each (degree-1 part of the cubics)
  std::vector<VecC> q3, s3; // 16 each (degree-3 part)

  double sum_p_sq() const;
  double sum_r_sq() const;
  double sum_pr() const;
  double sum_q1_sq() const;
  double sum_q3_sq() const;
  double sum_s1_sq() const;
  double sum_s3_sq() const;
  double sum_q1s1() const;
  double sum_q3s3() const;
};

FormCoefficients make_form_coefficients(const QuadForm& P_ring, const CubicForm& Q,
                                        const QuadForm& R, const CubicForm& S);

} // namespace w4
