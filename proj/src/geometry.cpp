#include "willmore4/geometry.hpp"

#include <cmath>

namespace w4 {

namespace {

// trace of (ginv a ginv b) for symmetric 4x4 a, b
inline double trace_pair(const Mat4& ginv, const Mat4& a, const Mat4& b) {
  return (ginv * a * ginv * b).trace();
}

} // namespace

FundamentalData fundamental_data(const PatchJet& p) {
  FundamentalData f;
  f.m = p.m;
  const MatA4& w = p.d1;

  f.g = w.transpose() * w;
  f.detg = f.g.determinant();
  require(f.detg > 0, "degenerate induced metric");
  f.ginv = f.g.inverse();
  f.sqrtg = std::sqrt(f.detg);

  // hat H = (1/4) g^{ab} S_ab, then project to the normal bundle
  VecA hhat = VecA::Zero(p.m);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) hhat += f.ginv(a, b) * p.d2[sym2_index(a, b)];
  hhat *= 0.25;

  auto project = [&](const VecA& v) -> VecA {
    return v - w * (f.ginv * (w.transpose() * v));
  };

  f.hvec = project(hhat);
  for (int s = 0; s < sym2_count; ++s) f.l[s] = project(p.d2[s]);

  // d_a of the inverse metric, via d_a g_bc = S_ab . W_c + W_b . S_ac
  Mat4 dginv[4];
  for (int a = 0; a < 4; ++a) {
    Mat4 dg;
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        dg(b, c) = p.d2[sym2_index(a, b)].dot(w.col(c)) +
                   w.col(b).dot(p.d2[sym2_index(a, c)]);
    dginv[a] = -f.ginv * dg * f.ginv;
  }

  // grad^perp_a H = P[ d_a hat H + (d_a P) hat H ] with
  // (d_a P) v = -S_a (ginv W^T v) - W (d_a ginv) (W^T v) - W ginv (S_a^T v)
  const VecA wt_h = w.transpose().lazyProduct(hhat).eval();
  for (int a = 0; a < 4; ++a) {
    VecA dh = VecA::Zero(p.m);
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        dh += dginv[a](b, c) * p.d2[sym2_index(b, c)];
        dh += f.ginv(b, c) * p.d3[sym3_index(a, b, c)];
      }
    dh *= 0.25;

    // columns of S_a are S_{a b}, b = 0..3
    VecA sa_gwh = VecA::Zero(p.m);
    Vec4 gwh = f.ginv * Vec4(wt_h[0], wt_h[1], wt_h[2], wt_h[3]);
    Vec4 sath;
    for (int b = 0; b < 4; ++b) {
      sa_gwh += gwh[b] * p.d2[sym2_index(a, b)];
      sath[b] = p.d2[sym2_index(a, b)].dot(hhat);
    }
    VecA dp_h = -sa_gwh -
                w * (dginv[a] * Vec4(wt_h[0], wt_h[1], wt_h[2], wt_h[3])) -
                w * (f.ginv * sath);
    f.dh_perp[a] = project(dh + dp_h);
  }

  f.h_sq = f.hvec.squaredNorm();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      f.dh_perp_sq += f.ginv(a, b) * f.dh_perp[a].dot(f.dh_perp[b]);

  Mat4 hl;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      double v = f.hvec.dot(f.l[sym2_index(a, b)]);
      hl(a, b) = v;
      hl(b, a) = v;
    }
  f.hl_sq = trace_pair(f.ginv, hl, hl);
  Mat4 hl0 = hl - 0.5 * f.h_sq * f.g;
  f.hl_traceless_sq = trace_pair(f.ginv, hl0, hl0);

  // per ambient component c: Lring_c = L_c - H_c g as a 4x4 matrix
  Mat4 k2 = Mat4::Zero();
  for (int c = 0; c < p.m; ++c) {
    Mat4 lr;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) {
        double v = f.l[sym2_index(a, b)][c] - f.hvec[c] * f.g(a, b);
        lr(a, b) = v;
        lr(b, a) = v;
      }
    Mat4 x = f.ginv * lr;
    f.lring_sq += (x * x).trace();
    k2 += lr * x; // Lring_c ginv Lring_c accumulates the composed tensor
  }
  f.lring2_sq = trace_pair(f.ginv, k2, k2);
  return f;
}

EnergyDensity energy_density(const FundamentalData& f) {
  EnergyDensity d;
  d.gr = (f.dh_perp_sq - f.hl_sq + 7.0 * f.h_sq * f.h_sq) * f.sqrtg;
  d.mu = f.lring_sq * f.lring_sq * f.sqrtg;
  d.nu = f.lring2_sq * f.sqrtg;
  d.q4 = (-2.0 * f.hl_traceless_sq + 2.0 * f.dh_perp_sq +
          8.0 * f.h_sq * f.h_sq) *
         f.sqrtg;
  d.area = f.sqrtg;
  return d;
}

EnergyBreakdown integrate_energy(const ImmersionPatch& patch, double r0,
                                 double r1, int n) {
  require(r1 > r0 && r0 >= 0, "bad radial bounds");
  Quad1D rad = gauss_legendre(n, r0, r1);
  const SphereRule& sph = sphere_rule(n);
  const std::size_t ns = sph.size();

  PairwiseAcc<double> agr, amu, anu, aq4, aarea;
  agr.reserve(n * ns);
  amu.reserve(n * ns);
  anu.reserve(n * ns);
  aq4.reserve(n * ns);
  aarea.reserve(n * ns);

  PatchJet pj;
  for (int i = 0; i < n; ++i) {
    double r = rad.x[i];
    double wr = rad.w[i] * r * r * r;
    for (std::size_t k = 0; k < ns; ++k) {
      Vec4 z(r * sph.x1[k], r * sph.x2[k], r * sph.x3[k], r * sph.x4[k]);
      patch.eval(z, pj);
      EnergyDensity d = energy_density(fundamental_data(pj));
      double wt = wr * sph.w[k];
      agr.add(wt * d.gr);
      amu.add(wt * d.mu);
      anu.add(wt * d.nu);
      aq4.add(wt * d.q4);
      aarea.add(wt * d.area);
    }
  }
  EnergyBreakdown e;
  e.gr = agr.total();
  e.mu = amu.total();
  e.nu = anu.total();
  e.q4 = aq4.total();
  e.area = aarea.total();
  return e;
}

EnergyBreakdown round_sphere_energy(int n) {
  EnergyBreakdown e;
  for (int chart = 0; chart < 2; ++chart) {
    StereographicSphere s(chart);
    e += integrate_energy(s, 0.0, 1.0, n);
  }
  return e;
}

double q4_identity_mismatch(const ImmersionPatch& patch, double r0, double r1,
                            int n) {
  Quad1D rad = gauss_legendre(n, r0, r1);
  const SphereRule& sph = sphere_rule(n);
  double worst = 0;
  PatchJet pj;
  for (int i = 0; i < n; ++i) {
    double r = rad.x[i];
    for (std::size_t k = 0; k < sph.size(); ++k) {
      Vec4 z(r * sph.x1[k], r * sph.x2[k], r * sph.x3[k], r * sph.x4[k]);
      patch.eval(z, pj);
      EnergyDensity d = energy_density(fundamental_data(pj));
      worst = std::max(worst, std::fabs(d.q4 - 2.0 * d.gr));
    }
  }
  return worst;
}

namespace {

// 3x3 determinant of jet entries
Jet jdet3(const Jet& a, const Jet& b, const Jet& c, const Jet& d, const Jet& e,
          const Jet& f, const Jet& g, const Jet& h, const Jet& i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

} // namespace

Jet laplace_beltrami_jet(const PatchJet& p, const Jet& u3) {
  require(u3.order == 3, "laplace_beltrami_jet needs an order-3 scalar");
  // metric entries as order-2 jets from the component tables
  Jet w[max_ambient][4];
  for (int c = 0; c < p.m; ++c) {
    Jet comp = patch_component_jet(p, c, 3);
    for (int a = 0; a < 4; ++a) w[c][a] = jet_derivative(comp, a);
  }
  Jet g[4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      Jet s = Jet::constant(2, 0.0);
      for (int c = 0; c < p.m; ++c) s = s + w[c][a] * w[c][b];
      g[a][b] = s;
      if (a != b) g[b][a] = s;
    }

  // adjugate and determinant by cofactor expansion
  Jet adj[4][4];
  int rows[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int* r = rows[j];
      const int* c = rows[i];
      Jet m = jdet3(g[r[0]][c[0]], g[r[0]][c[1]], g[r[0]][c[2]],
                    g[r[1]][c[0]], g[r[1]][c[1]], g[r[1]][c[2]],
                    g[r[2]][c[0]], g[r[2]][c[1]], g[r[2]][c[2]]);
      adj[i][j] = ((i + j) % 2 == 0) ? m : -m;
    }
  Jet det = Jet::constant(2, 0.0);
  for (int j = 0; j < 4; ++j) det = det + g[0][j] * adj[j][0];

  Jet sq = jet_sqrt(det);
  Jet rdet = jet_recip(det);

  // F_a = sqrt(g) g^{ab} d_b u, then (1/sqrt g) div F
  Jet du[4];
  for (int b = 0; b < 4; ++b) du[b] = jet_derivative(u3, b);
  Jet div = Jet::constant(1, 0.0);
  for (int a = 0; a < 4; ++a) {
    Jet fa = Jet::constant(2, 0.0);
    for (int b = 0; b < 4; ++b) fa = fa + adj[a][b] * du[b];
    fa = sq * rdet * fa;
    div = div + jet_derivative(fa, a);
  }
  return jet_recip(jet_truncate(sq, 1)) * div;
}

DiscrepancyReport approximation_discrepancy(const PatchJet& p) {
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      require(std::fabs(p.d1(a, b) - (a == b ? 1.0 : 0.0)) < 1e-14,
              "approximation_discrepancy expects a graph patch");
  FundamentalData f = fundamental_data(p);
  DiscrepancyReport rep;
  rep.lhs = f.dh_perp_sq * f.sqrtg;

  int k = p.m - 4;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < k; ++c) {
      double v = 0;
      for (int a = 0; a < 4; ++a) v += p.d3[sym3_index(b, a, a)][4 + c];
      rep.rhs += v * v;
    }
  rep.rhs /= 16.0;

  double dphi2 = 0, d2phi2 = 0, d3phi2 = 0;
  for (int c = 4; c < p.m; ++c) {
    for (int a = 0; a < 4; ++a) dphi2 += p.d1(c, a) * p.d1(c, a);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = p.d2[sym2_index(a, b)][c];
        d2phi2 += v * v;
      }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
          double v = p.d3[sym3_index(a, b, d)][c];
          d3phi2 += v * v;
        }
  }
  rep.bound = dphi2 * d3phi2 + d2phi2 * d2phi2;
  return rep;
}

} // namespace w4
