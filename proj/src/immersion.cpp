#include "willmore4/immersion.hpp"

#include <cmath>

namespace w4 {

void PatchJet::resize(int ambient) {
  m = ambient;
  value.setZero(m);
  d1.setZero(m, 4);
  for (auto& v : d2) v.setZero(m);
  for (auto& v : d3) v.setZero(m);
}

PolynomialImmersion::PolynomialImmersion(int ambient, std::vector<PolyTerm> terms)
    : m_(ambient), terms_(std::move(terms)) {
  require(m_ >= 5 && m_ <= max_ambient, "ambient dimension out of range");
  for (const auto& t : terms_) {
    require(t.coeff.size() == m_, "term coefficient dimension mismatch");
    for (int e : t.exps) require(e >= 0, "negative exponent");
  }
}

namespace {

// falling factorial e (e-1) ... (e-d+1); zero when d > e
inline double ff(int e, int d) {
  double r = 1;
  for (int k = 0; k < d; ++k) r *= (e - k);
  return (d > e) ? 0.0 : r;
}

} // namespace

void PolynomialImmersion::eval(const Vec4& z, PatchJet& out) const {
  out.resize(m_);
  for (const auto& t : terms_) {
    // powers of each variable up to its exponent
    double pw[4][8];
    for (int i = 0; i < 4; ++i) {
      require(t.exps[i] < 8, "monomial degree too large");
      pw[i][0] = 1;
      for (int k = 1; k <= t.exps[i]; ++k) pw[i][k] = pw[i][k - 1] * z[i];
    }
    auto monom = [&](const std::array<int, 4>& d) -> double {
      double r = 1;
      for (int i = 0; i < 4; ++i) {
        int rem = t.exps[i] - d[i];
        if (rem < 0) return 0.0;
        r *= ff(t.exps[i], d[i]) * pw[i][rem];
      }
      return r;
    };
    out.value += monom({0, 0, 0, 0}) * t.coeff;
    for (int a = 0; a < 4; ++a) {
      std::array<int, 4> d{0, 0, 0, 0};
      d[a] = 1;
      out.d1.col(a) += monom(d) * t.coeff;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) {
        std::array<int, 4> d{0, 0, 0, 0};
        d[a] += 1;
        d[b] += 1;
        out.d2[sym2_index(a, b)] += monom(d) * t.coeff;
      }
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int c = b; c < 4; ++c) {
          std::array<int, 4> d{0, 0, 0, 0};
          d[a] += 1;
          d[b] += 1;
          d[c] += 1;
          out.d3[sym3_index(a, b, c)] += monom(d) * t.coeff;
        }
  }
}

PolynomialImmersion graph_immersion(int codim, const std::vector<PolyTerm>& phi_terms) {
  require(codim >= 1 && codim <= max_codim, "codimension out of range");
  int m = 4 + codim;
  std::vector<PolyTerm> terms;
  for (int i = 0; i < 4; ++i) {
    PolyTerm t;
    t.exps = {0, 0, 0, 0};
    t.exps[i] = 1;
    t.coeff.setZero(m);
    t.coeff[i] = 1;
    terms.push_back(t);
  }
  for (const auto& p : phi_terms) {
    require(p.coeff.size() == codim, "graph term must live in the normal factor");
    PolyTerm t;
    t.exps = p.exps;
    t.coeff.setZero(m);
    t.coeff.tail(codim) = p.coeff;
    terms.push_back(t);
  }
  return PolynomialImmersion(m, std::move(terms));
}

void patch_from_jets(const Jet* comp, int m, PatchJet& out) {
  out.resize(m);
  const JetTables& tab = jet_tables(3);
  for (int c = 0; c < m; ++c) {
    const Jet& j = comp[c];
    out.value[c] = j.c[0];
    for (int a = 0; a < 4; ++a) out.d1(c, a) = j.c[1 + a];
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) {
        std::array<int, 4> e{0, 0, 0, 0};
        e[a] += 1;
        e[b] += 1;
        int s = tab.index(e);
        out.d2[sym2_index(a, b)][c] = j.c[s] * tab.fact[s];
      }
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int d = b; d < 4; ++d) {
          std::array<int, 4> e{0, 0, 0, 0};
          e[a] += 1;
          e[b] += 1;
          e[d] += 1;
          int s = tab.index(e);
          out.d3[sym3_index(a, b, d)][c] = j.c[s] * tab.fact[s];
        }
  }
}

void StereographicSphere::eval(const Vec4& z, PatchJet& out) const {
  // Phi = (2z, s - 1) d with s = |z|^2, d = 1/(1+s); the last component is
  // 1 - 2d, so every derivative reduces to derivatives of d:
  //   d_a d   = -2 z_a d^2
  //   d_ab d  = -2 delta_ab d^2 + 8 z_a z_b d^3
  //   d_abc d = 8 (delta_ab z_c + delta_ac z_b + delta_bc z_a) d^3
  //             - 48 z_a z_b z_c d^4
  out.resize(5);
  double s = z.squaredNorm();
  double d = 1.0 / (1.0 + s);
  double d2 = d * d, d3 = d2 * d, d4 = d3 * d;

  double dd[4], ddd[sym2_count], dddd[sym3_count];
  for (int a = 0; a < 4; ++a) dd[a] = -2.0 * z[a] * d2;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      ddd[sym2_index(a, b)] = (a == b ? -2.0 * d2 : 0.0) + 8.0 * z[a] * z[b] * d3;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        double t = 0;
        if (a == b) t += z[c];
        if (a == c) t += z[b];
        if (b == c) t += z[a];
        dddd[sym3_index(a, b, c)] = 8.0 * t * d3 - 48.0 * z[a] * z[b] * z[c] * d4;
      }

  for (int i = 0; i < 4; ++i) out.value[i] = 2.0 * z[i] * d;
  out.value[4] = sign_ * (1.0 - 2.0 * d);
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 4; ++a)
      out.d1(i, a) = 2.0 * ((i == a ? d : 0.0) + z[i] * dd[a]);
  for (int a = 0; a < 4; ++a) out.d1(4, a) = sign_ * (-2.0) * dd[a];
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      int s2 = sym2_index(a, b);
      for (int i = 0; i < 4; ++i) {
        double v = 2.0 * z[i] * ddd[s2];
        if (i == a) v += 2.0 * dd[b];
        if (i == b) v += 2.0 * dd[a];
        out.d2[s2][i] = v;
      }
      out.d2[s2][4] = sign_ * (-2.0) * ddd[s2];
    }
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        int s3 = sym3_index(a, b, c);
        for (int i = 0; i < 4; ++i) {
          double v = 2.0 * z[i] * dddd[s3];
          if (i == a) v += 2.0 * ddd[sym2_index(b, c)];
          if (i == b) v += 2.0 * ddd[sym2_index(a, c)];
          if (i == c) v += 2.0 * ddd[sym2_index(a, b)];
          out.d3[s3][i] = v;
        }
        out.d3[s3][4] = sign_ * (-2.0) * dddd[s3];
      }
}

void SphereGraphCap::eval(const Vec4& z, PatchJet& out) const {
  Jet x[4];
  for (int i = 0; i < 4; ++i) x[i] = Jet::variable(3, i, z[i]);
  Jet s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  require(s.value() < 1.0, "sphere cap graph needs |z| < 1");
  Jet comp[5];
  for (int i = 0; i < 4; ++i) comp[i] = x[i];
  comp[4] = 1.0 + (-1.0 * jet_sqrt(1.0 + (-1.0 * s)));
  patch_from_jets(comp, 5, out);
}

void ScaledPatch::eval(const Vec4& z, PatchJet& out) const {
  base_->eval(z, out);
  out.value *= lambda_;
  out.d1 *= lambda_;
  for (auto& v : out.d2) v *= lambda_;
  for (auto& v : out.d3) v *= lambda_;
}

void TranslatedPatch::eval(const Vec4& z, PatchJet& out) const {
  base_->eval(z, out);
  out.value += shift_;
}

void RotatedPatch::eval(const Vec4& z, PatchJet& out) const {
  base_->eval(z, out);
  out.value = (q_ * out.value).eval();
  out.d1 = (q_ * out.d1).eval();
  for (auto& v : out.d2) v = (q_ * v).eval();
  for (auto& v : out.d3) v = (q_ * v).eval();
}

void ReparametrizedPatch::eval(const Vec4& z, PatchJet& out) const {
  PatchJet inner;
  base_->eval(a_ * z, inner);
  out.resize(inner.m);
  out.value = inner.value;
  out.d1 = inner.d1 * a_;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      VecA acc = VecA::Zero(inner.m);
      for (int g = 0; g < 4; ++g)
        for (int d = 0; d < 4; ++d)
          acc += a_(g, a) * a_(d, b) * inner.d2[sym2_index(g, d)];
      out.d2[sym2_index(a, b)] = acc;
    }
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        VecA acc = VecA::Zero(inner.m);
        for (int g = 0; g < 4; ++g)
          for (int d = 0; d < 4; ++d)
            for (int e = 0; e < 4; ++e)
              acc += a_(g, a) * a_(d, b) * a_(e, c) * inner.d3[sym3_index(g, d, e)];
        out.d3[sym3_index(a, b, c)] = acc;
      }
}

Jet patch_component_jet(const PatchJet& p, int component, int order) {
  require(component >= 0 && component < p.m, "component out of range");
  double grad[4];
  for (int a = 0; a < 4; ++a) grad[a] = p.d1(component, a);
  double d2[sym2_count], d3[sym3_count];
  for (int s = 0; s < sym2_count; ++s) d2[s] = p.d2[s][component];
  for (int s = 0; s < sym3_count; ++s) d3[s] = p.d3[s][component];
  return jet_from_derivatives(order, p.value[component], grad, d2, d3);
}

} // namespace w4
