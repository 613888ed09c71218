#include "willmore4/harmonics.hpp"

#include <algorithm>
#include <numeric>

namespace w4 {

namespace {

// Monomials of total degree d in graded-lex order (descending in exponents).
std::vector<std::array<int, 4>> monomials(int d) {
  std::vector<std::array<int, 4>> out;
  for (int a = d; a >= 0; --a)
    for (int b = d - a; b >= 0; --b)
      for (int c = d - a - b; c >= 0; --c) out.push_back({a, b, c, d - a - b - c});
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x > y; });
  return out;
}

PolyQ make_poly(const std::vector<std::array<int, 4>>& exps) {
  PolyQ p;
  p.exps = exps;
  p.coef.assign(exps.size(), Rational(0));
  return p;
}

int find_exp(const PolyQ& p, const std::array<int, 4>& e) {
  for (std::size_t i = 0; i < p.exps.size(); ++i)
    if (p.exps[i] == e) return (int)i;
  return -1;
}

// p - |x|^2 * lap(p) / (4h): harmonic for homogeneous degree h <= 3.
PolyQ harmonic_projection(const PolyQ& p, int h) {
  PolyQ lap = laplacian(p);
  PolyQ out = p;
  Rational lam(1, 4LL * h);
  for (std::size_t t = 0; t < lap.exps.size(); ++t) {
    if (lap.coef[t].is_zero()) continue;
    for (int i = 0; i < 4; ++i) {
      auto e = lap.exps[t];
      e[i] += 2;
      int j = find_exp(out, e);
      out.coef[j] = out.coef[j] - lam * lap.coef[t];
    }
  }
  return out;
}

Rational inner_over_vol(const PolyQ& u, const PolyQ& v) {
  Rational acc(0);
  for (std::size_t i = 0; i < u.exps.size(); ++i) {
    if (u.coef[i].is_zero()) continue;
    for (std::size_t j = 0; j < v.exps.size(); ++j) {
      if (v.coef[j].is_zero()) continue;
      std::array<int, 4> e;
      for (int k = 0; k < 4; ++k) e[k] = u.exps[i][k] + v.exps[j][k];
      Rational m = sphere_monomial_integral_over_vol(e);
      if (!m.is_zero()) acc = acc + u.coef[i] * v.coef[j] * m;
    }
  }
  return acc;
}

// Scale so coefficients are coprime integers with positive leading entry.
void make_primitive(PolyQ& p) {
  long long l = 1;
  for (const auto& c : p.coef) l = std::lcm(l, c.den);
  long long g = 0;
  for (auto& c : p.coef) {
    c = c * Rational(l);
    g = std::gcd(g, c.num < 0 ? -c.num : c.num);
  }
  if (g > 1)
    for (auto& c : p.coef) c = c / Rational(g);
  for (const auto& c : p.coef) {
    if (c.is_zero()) continue;
    if (c.num < 0)
      for (auto& cc : p.coef) cc = -cc;
    break;
  }
}

HarmonicBasis build_basis(int h) {
  HarmonicBasis basis;
  basis.degree = h;
  const auto exps = monomials(h);
  std::vector<PolyQ> kept;
  for (const auto& mono : exps) {
    PolyQ v = make_poly(exps);
    v.coef[find_exp(v, mono)] = Rational(1);
    v = harmonic_projection(v, h);
    // exact Gram-Schmidt against the kept members
    for (const auto& u : kept) {
      Rational c = inner_over_vol(v, u) / inner_over_vol(u, u);
      if (c.is_zero()) continue;
      for (std::size_t t = 0; t < v.coef.size(); ++t)
        v.coef[t] = v.coef[t] - c * u.coef[t];
    }
    if (v.empty()) continue;
    make_primitive(v);
    kept.push_back(v);
  }
  for (const auto& u : kept) {
    HarmonicMember m;
    m.exact = u;
    Rational n2 = inner_over_vol(u, u);
    m.scale = 1.0 / std::sqrt(n2.to_double());
    for (std::size_t t = 0; t < u.exps.size(); ++t) {
      if (u.coef[t].is_zero()) continue;
      m.exps.push_back(u.exps[t]);
      m.coef.push_back(u.coef[t].to_double() * m.scale);
    }
    basis.members.push_back(std::move(m));
  }
  return basis;
}

} // namespace

PolyQ laplacian(const PolyQ& p) {
  PolyQ out;
  for (std::size_t t = 0; t < p.exps.size(); ++t) {
    if (p.coef[t].is_zero()) continue;
    for (int i = 0; i < 4; ++i) {
      if (p.exps[t][i] < 2) continue;
      auto e = p.exps[t];
      long long f = (long long)e[i] * (e[i] - 1);
      e[i] -= 2;
      int j = -1;
      for (std::size_t s = 0; s < out.exps.size(); ++s)
        if (out.exps[s] == e) {
          j = (int)s;
          break;
        }
      if (j < 0) {
        out.exps.push_back(e);
        out.coef.push_back(Rational(0));
        j = (int)out.exps.size() - 1;
      }
      out.coef[j] = out.coef[j] + Rational(f) * p.coef[t];
    }
  }
  return out;
}

const HarmonicBasis& harmonic_basis(int degree) {
  require(degree >= 1 && degree <= 3, "harmonic_basis: degree must be 1, 2 or 3");
  static const HarmonicBasis b1 = build_basis(1);
  static const HarmonicBasis b2 = build_basis(2);
  static const HarmonicBasis b3 = build_basis(3);
  switch (degree) {
    case 1: return b1;
    case 2: return b2;
    default: return b3;
  }
}

QuadProjection project_quadratic(const QuadForm& B) {
  require(B.codim() >= 1, "project_quadratic: empty form");
  require(B.symmetric(), "project_quadratic: form must be symmetric");
  const int m = B.codim();
  QuadProjection out;
  out.trace = B.trace();
  const HarmonicBasis& basis = harmonic_basis(2);
  const SphereRule rule = sphere_rule_for_exactness(6);
  out.coeffs.assign(basis.size(), VecC::Zero(m));
  std::vector<Mat4> ring(m);
  for (int c = 0; c < m; ++c)
    ring[c] = B.comp[c] - out.trace[c] / 4.0 * Mat4::Identity();
  for (int i = 0; i < basis.size(); ++i) {
    std::vector<std::vector<double>> acc(m, std::vector<double>());
    for (int c = 0; c < m; ++c) acc[c].reserve(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) {
      Vec4 u(rule.x1[k], rule.x2[k], rule.x3[k], rule.x4[k]);
      double y = basis.members[i].eval(u);
      for (int c = 0; c < m; ++c) acc[c].push_back(rule.w[k] * y * u.dot(ring[c] * u));
    }
    for (int c = 0; c < m; ++c) out.coeffs[i][c] = pairwise_sum(acc[c]) / vol_s3d();
  }
  return out;
}

CubicProjection project_cubic(const CubicForm& C) {
  require(C.codim() >= 1, "project_cubic: empty form");
  const int m = C.codim();
  CubicProjection out;
  const HarmonicBasis& b1 = harmonic_basis(1);
  const HarmonicBasis& b3 = harmonic_basis(3);
  const SphereRule rule = sphere_rule_for_exactness(8);
  out.deg1.assign(b1.size(), VecC::Zero(m));
  out.deg3.assign(b3.size(), VecC::Zero(m));
  // cache C(u,u,u) at the nodes
  std::vector<VecC> cval(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    Vec4 u(rule.x1[k], rule.x2[k], rule.x3[k], rule.x4[k]);
    cval[k] = C.eval(u, u, u);
  }
  auto project = [&](const HarmonicBasis& basis, std::vector<VecC>& dst) {
    for (int i = 0; i < basis.size(); ++i) {
      std::vector<std::vector<double>> acc(m);
      for (int c = 0; c < m; ++c) acc[c].reserve(rule.size());
      for (std::size_t k = 0; k < rule.size(); ++k) {
        Vec4 u(rule.x1[k], rule.x2[k], rule.x3[k], rule.x4[k]);
        double y = basis.members[i].eval(u);
        for (int c = 0; c < m; ++c) acc[c].push_back(rule.w[k] * y * cval[k][c]);
      }
      for (int c = 0; c < m; ++c) dst[i][c] = pairwise_sum(acc[c]) / vol_s3d();
    }
  };
  project(b1, out.deg1);
  project(b3, out.deg3);
  return out;
}

namespace {
double dotsum(const std::vector<VecC>& a, const std::vector<VecC>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s;
}
} // namespace

double FormCoefficients::sum_p_sq() const { return dotsum(p, p); }
double FormCoefficients::sum_r_sq() const { return dotsum(r, r); }
double FormCoefficients::sum_pr() const { return dotsum(p, r); }
double FormCoefficients::sum_q1_sq() const { return dotsum(q1, q1); }
double FormCoefficients::sum_q3_sq() const { return dotsum(q3, q3); }
double FormCoefficients::sum_s1_sq() const { return dotsum(s1, s1); }
double FormCoefficients::sum_s3_sq() const { return dotsum(s3, s3); }
double FormCoefficients::sum_q1s1() const { return dotsum(q1, s1); }
double FormCoefficients::sum_q3s3() const { return dotsum(q3, s3); }

FormCoefficients make_form_coefficients(const QuadForm& P_ring, const CubicForm& Q,
                                        const QuadForm& R, const CubicForm& S) {
  const int m = P_ring.codim();
  require(Q.codim() == m && R.codim() == m && S.codim() == m,
          "make_form_coefficients: codomain dimensions differ");
  QuadProjection pp = project_quadratic(P_ring);
  require(pp.trace.cwiseAbs().maxCoeff() < 1e-10,
          "make_form_coefficients: P must be trace-free");
  QuadProjection rr = project_quadratic(R);
  CubicProjection qq = project_cubic(Q);
  CubicProjection ss = project_cubic(S);
  FormCoefficients fc;
  fc.m = m;
  fc.p = pp.coeffs;
  fc.r = rr.coeffs;
  fc.r0 = rr.trace / 4.0;
  fc.q1 = qq.deg1;
  fc.q3 = qq.deg3;
  fc.s1 = ss.deg1;
  fc.s3 = ss.deg3;
  return fc;
}

} // namespace w4
