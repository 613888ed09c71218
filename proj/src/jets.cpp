#include "willmore4/jets.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace w4 {

namespace {

std::vector<std::array<int, 4>> monomials_upto(int order) {
  std::vector<std::array<int, 4>> out;
  for (int d = 0; d <= order; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b)
        for (int c = d - a - b; c >= 0; --c)
          out.push_back({a, b, c, d - a - b - c});
  return out;
}

JetTables build_tables(int order) {
  JetTables t;
  t.order = order;
  t.exps = monomials_upto(order);
  t.index_of.fill(-1);
  for (int s = 0; s < (int)t.exps.size(); ++s) {
    const auto& e = t.exps[s];
    t.deg.push_back(e[0] + e[1] + e[2] + e[3]);
    double f = 1;
    for (int v : e)
      for (int k = 2; k <= v; ++k) f *= k;
    t.fact.push_back(f);
    t.index_of[((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]] = s;
  }
  for (int i = 0; i < t.size(); ++i)
    for (int j = 0; j < t.size(); ++j) {
      if (t.deg[i] + t.deg[j] > order) continue;
      std::array<int, 4> e;
      for (int v = 0; v < 4; ++v) e[v] = t.exps[i][v] + t.exps[j][v];
      t.prod.push_back(i);
      t.prod.push_back(j);
      t.prod.push_back(t.index(e));
    }
  return t;
}

} // namespace

const JetTables& jet_tables(int order) {
  require(order >= 0 && order <= 4, "jet order must be in [0,4]");
  static const JetTables t0 = build_tables(0);
  static const JetTables t1 = build_tables(1);
  static const JetTables t2 = build_tables(2);
  static const JetTables t3 = build_tables(3);
  static const JetTables t4 = build_tables(4);
  switch (order) {
  case 0: return t0;
  case 1: return t1;
  case 2: return t2;
  case 3: return t3;
  default: return t4;
  }
}

Jet Jet::constant(int order, double v) {
  Jet j;
  j.order = order;
  j.n = jet_tables(order).size();
  j.c[0] = v;
  return j;
}

Jet Jet::variable(int order, int i, double base) {
  require(order >= 1, "variable jet needs order >= 1");
  Jet j = constant(order, base);
  j.c[1 + i] = 1; // slots 1..4 are the degree-1 monomials x1..x4
  return j;
}

Jet operator+(const Jet& a, const Jet& b) {
  require(a.order == b.order, "jet order mismatch");
  Jet r = a;
  for (int i = 0; i < a.n; ++i) r.c[i] += b.c[i];
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  require(a.order == b.order, "jet order mismatch");
  Jet r = a;
  for (int i = 0; i < a.n; ++i) r.c[i] -= b.c[i];
  return r;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  for (int i = 0; i < a.n; ++i) r.c[i] = -r.c[i];
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  require(a.order == b.order, "jet order mismatch");
  const JetTables& t = jet_tables(a.order);
  Jet r;
  r.order = a.order;
  r.n = a.n;
  const int* p = t.prod.data();
  const int* end = p + t.prod.size();
  for (; p != end; p += 3) r.c[p[2]] += a.c[p[0]] * b.c[p[1]];
  return r;
}

Jet operator*(double s, const Jet& a) {
  Jet r = a;
  for (int i = 0; i < a.n; ++i) r.c[i] *= s;
  return r;
}

Jet operator*(const Jet& a, double s) { return s * a; }

Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.c[0] += s;
  return r;
}

Jet operator+(double s, const Jet& a) { return a + s; }

Jet operator-(const Jet& a, double s) { return a + (-s); }

namespace {

// sum_k coef[k] * t^k for nilpotent t (zero constant term), k <= order
Jet nilpotent_series(const Jet& t, const double* coef) {
  Jet r = Jet::constant(t.order, coef[0]);
  Jet p = Jet::constant(t.order, 1.0);
  for (int k = 1; k <= t.order; ++k) {
    p = p * t;
    for (int i = 0; i < r.n; ++i) r.c[i] += coef[k] * p.c[i];
  }
  return r;
}

Jet nilpotent_part(const Jet& a, double scale) {
  Jet t = scale * a;
  t.c[0] = 0;
  return t;
}

} // namespace

Jet jet_recip(const Jet& a) {
  double c = a.value();
  require(c != 0, "jet_recip at zero");
  Jet t = nilpotent_part(a, 1.0 / c); // a = c (1 + t)
  double coef[5] = {1, -1, 1, -1, 1};
  return (1.0 / c) * nilpotent_series(t, coef);
}

Jet jet_sqrt(const Jet& a) {
  double c = a.value();
  require(c > 0, "jet_sqrt needs positive base value");
  Jet t = nilpotent_part(a, 1.0 / c);
  // binom(1/2, k): 1, 1/2, -1/8, 1/16, -5/128
  double coef[5] = {1, 0.5, -0.125, 0.0625, -0.0390625};
  return std::sqrt(c) * nilpotent_series(t, coef);
}

Jet jet_exp(const Jet& a) {
  Jet t = nilpotent_part(a, 1.0);
  double coef[5] = {1, 1, 0.5, 1.0 / 6.0, 1.0 / 24.0};
  return std::exp(a.value()) * nilpotent_series(t, coef);
}

Jet jet_log(const Jet& a) {
  double c = a.value();
  require(c > 0, "jet_log needs positive base value");
  Jet t = nilpotent_part(a, 1.0 / c);
  double coef[5] = {0, 1, -0.5, 1.0 / 3.0, -0.25};
  Jet r = nilpotent_series(t, coef);
  r.c[0] = std::log(c);
  return r;
}

Jet jet_substitute(const Jet& g, const std::array<Jet, 4>& t) {
  const int order = g.order;
  for (const Jet& ti : t) {
    require(ti.order == order, "jet order mismatch in substitution");
    require(ti.value() == 0, "substitution arguments must vanish at 0");
  }
  const JetTables& tab = jet_tables(order);
  // powers of each argument up to the order
  std::array<std::array<Jet, 5>, 4> pw;
  for (int i = 0; i < 4; ++i) {
    pw[i][0] = Jet::constant(order, 1.0);
    for (int k = 1; k <= order; ++k) pw[i][k] = pw[i][k - 1] * t[i];
  }
  Jet r = Jet::constant(order, 0.0);
  for (int s = 0; s < g.n; ++s) {
    if (g.c[s] == 0) continue;
    const auto& e = tab.exps[s];
    Jet term = Jet::constant(order, g.c[s]);
    for (int i = 0; i < 4; ++i)
      if (e[i] > 0) term = term * pw[i][e[i]];
    r = r + term;
  }
  return r;
}

std::array<Jet, 4> jet_invert(const std::array<Jet, 4>& f) {
  const int order = f[0].order;
  Eigen::Matrix4d A;
  for (int i = 0; i < 4; ++i) {
    require(f[i].value() == 0, "jet_invert needs F(0) = 0");
    for (int j = 0; j < 4; ++j) A(i, j) = f[i].c[1 + j];
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
  require(lu.isInvertible(), "jet_invert: singular linear part");
  Eigen::Matrix4d Ainv = lu.inverse();

  // F = A x + Ftilde, so G solves G = Ainv (x - Ftilde(G)); each pass gains
  // one order because Ftilde has valuation 2.
  std::array<Jet, 4> ftilde = f;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ftilde[i].c[1 + j] = 0;

  std::array<Jet, 4> g;
  for (int i = 0; i < 4; ++i) {
    g[i] = Jet::constant(order, 0.0);
    for (int j = 0; j < 4; ++j) g[i].c[1 + j] = Ainv(i, j);
  }
  for (int pass = 1; pass < order; ++pass) {
    std::array<Jet, 4> rhs;
    for (int i = 0; i < 4; ++i) {
      rhs[i] = -jet_substitute(ftilde[i], g);
      rhs[i].c[1 + i] += 1.0; // identity component x_i
    }
    for (int i = 0; i < 4; ++i) {
      Jet acc = Jet::constant(order, 0.0);
      for (int j = 0; j < 4; ++j) acc = acc + Ainv(i, j) * rhs[j];
      g[i] = acc;
    }
  }

  // composition residual must cancel to roundoff
  double fs = 1, gs = 1;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < f[i].n; ++k) {
      fs = std::max(fs, std::fabs(f[i].c[k]));
      gs = std::max(gs, std::fabs(g[i].c[k]));
    }
  double tol = 1e-12 * fs * gs * gs * gs * gs;
  for (int i = 0; i < 4; ++i) {
    Jet r = jet_substitute(f[i], g);
    r.c[1 + i] -= 1.0;
    for (int k = 0; k < r.n; ++k)
      require(std::fabs(r.c[k]) <= tol, "jet_invert: residual did not cancel");
  }
  return g;
}

Jet jet_derivative(const Jet& a, int dir) {
  require(a.order >= 1, "derivative needs order >= 1");
  const JetTables& in = jet_tables(a.order);
  Jet r = Jet::constant(a.order - 1, 0.0);
  const JetTables& out = jet_tables(r.order);
  for (int s = 0; s < r.n; ++s) {
    std::array<int, 4> e = out.exps[s];
    e[dir] += 1;
    r.c[s] = a.c[in.index(e)] * (e[dir]);
  }
  return r;
}

Jet jet_truncate(const Jet& a, int order) {
  require(order <= a.order, "jet_truncate cannot raise the order");
  Jet r = Jet::constant(order, 0.0);
  for (int s = 0; s < r.n; ++s) r.c[s] = a.c[s];
  return r;
}

Vec4 jet_gradient(const Jet& a) {
  require(a.order >= 1, "gradient needs order >= 1");
  return Vec4(a.c[1], a.c[2], a.c[3], a.c[4]);
}

std::array<double, sym2_count> jet_d2(const Jet& a) {
  require(a.order >= 2, "d2 needs order >= 2");
  const JetTables& t = jet_tables(a.order);
  std::array<double, sym2_count> out{};
  for (int p = 0; p <= 3; ++p)
    for (int q = p; q <= 3; ++q) {
      std::array<int, 4> e{0, 0, 0, 0};
      e[p] += 1;
      e[q] += 1;
      int s = t.index(e);
      out[sym2_index(p, q)] = a.c[s] * t.fact[s];
    }
  return out;
}

std::array<double, sym3_count> jet_d3(const Jet& a) {
  require(a.order >= 3, "d3 needs order >= 3");
  const JetTables& t = jet_tables(a.order);
  std::array<double, sym3_count> out{};
  for (int p = 0; p <= 3; ++p)
    for (int q = p; q <= 3; ++q)
      for (int r = q; r <= 3; ++r) {
        std::array<int, 4> e{0, 0, 0, 0};
        e[p] += 1;
        e[q] += 1;
        e[r] += 1;
        int s = t.index(e);
        out[sym3_index(p, q, r)] = a.c[s] * t.fact[s];
      }
  return out;
}

Jet jet_from_derivatives(int order, double v, const double* grad,
                         const double* d2, const double* d3) {
  Jet j = Jet::constant(order, v);
  const JetTables& t = jet_tables(order);
  if (order >= 1 && grad)
    for (int i = 0; i < 4; ++i) j.c[1 + i] = grad[i];
  if (order >= 2 && d2)
    for (int p = 0; p <= 3; ++p)
      for (int q = p; q <= 3; ++q) {
        std::array<int, 4> e{0, 0, 0, 0};
        e[p] += 1;
        e[q] += 1;
        int s = t.index(e);
        j.c[s] = d2[sym2_index(p, q)] / t.fact[s];
      }
  if (order >= 3 && d3)
    for (int p = 0; p <= 3; ++p)
      for (int q = p; q <= 3; ++q)
        for (int r = q; r <= 3; ++r) {
          std::array<int, 4> e{0, 0, 0, 0};
          e[p] += 1;
          e[q] += 1;
          e[r] += 1;
          int s = t.index(e);
          j.c[s] = d3[sym3_index(p, q, r)] / t.fact[s];
        }
  return j;
}

} // namespace w4
