#include "willmore4/inversion.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace w4 {

void InvertedPatch::eval(const Vec4& z, PatchJet& out) const {
  PatchJet base;
  base_->eval(z, base);
  const int m = base.m;
  Jet comp[max_ambient];
  for (int c = 0; c < m; ++c) comp[c] = patch_component_jet(base, c, 3);
  Jet q = Jet::constant(3, 0.0);
  for (int c = 0; c < m; ++c) q = q + comp[c] * comp[c];
  require(q.value() > 0, "inversion at a zero of Phi");
  Jet rq = jet_recip(q);
  for (int c = 0; c < m; ++c) comp[c] = comp[c] * rq;
  patch_from_jets(comp, m, out);
}

namespace {

struct BoundaryFrame {
  Vec4 eta;      // outward unit conormal, index raised
  double area_w; // sqrt(det g) * sqrt(w' ginv w) * r^3, times the S^3 weight
};

BoundaryFrame boundary_frame(const FundamentalData& f, const Vec4& omega,
                             double r, double w_sphere) {
  BoundaryFrame b;
  Vec4 gw = f.ginv * omega;
  double nrm = std::sqrt(omega.dot(gw));
  b.eta = gw / nrm;
  b.area_w = f.sqrtg * nrm * r * r * r * w_sphere;
  return b;
}

} // namespace

double residue_integral(const ImmersionPatch& patch, double r, int n) {
  const SphereRule& sph = sphere_rule(n);
  PairwiseAcc<double> acc;
  acc.reserve(sph.size());
  PatchJet pj;
  for (std::size_t k = 0; k < sph.size(); ++k) {
    Vec4 omega(sph.x1[k], sph.x2[k], sph.x3[k], sph.x4[k]);
    Vec4 z = r * omega;
    patch.eval(z, pj);
    FundamentalData f = fundamental_data(pj);

    Jet q = Jet::constant(3, 0.0);
    for (int c = 0; c < pj.m; ++c) {
      Jet comp = patch_component_jet(pj, c, 3);
      q = q + comp * comp;
    }
    Jet u = jet_log(q);
    Jet lap = laplace_beltrami_jet(pj, u);

    BoundaryFrame b = boundary_frame(f, omega, r, sph.w[k]);

    double term1 = 0;
    for (int a = 0; a < 4; ++a) term1 += b.eta[a] * lap.c[1 + a];

    // T(grad u, eta) with grad u = ginv du
    Vec4 du(u.c[1], u.c[2], u.c[3], u.c[4]);
    Vec4 gradu = f.ginv * du;
    Mat4 t;
    for (int a = 0; a < 4; ++a)
      for (int c = a; c < 4; ++c) {
        double v = 4.0 * f.hvec.dot(f.l[sym2_index(a, c)]) -
                   6.0 * f.h_sq * f.g(a, c);
        t(a, c) = v;
        t(c, a) = v;
      }
    double term2 = gradu.dot(t * b.eta);

    acc.add((term1 + term2) * b.area_w);
  }
  return acc.total();
}

ResidueLimit residue_limit(const ImmersionPatch& patch, double r0, int n) {
  // error model I(r) = A + c2 r^2 + c4 r^4 + ...
  double i0 = residue_integral(patch, r0, n);
  double i1 = residue_integral(patch, 0.5 * r0, n);
  double i2 = residue_integral(patch, 0.25 * r0, n);
  double t0 = (4.0 * i1 - i0) / 3.0;
  double t1 = (4.0 * i2 - i1) / 3.0;
  double t2 = (16.0 * t1 - t0) / 15.0;
  return ResidueLimit{t2, std::fabs(t2 - t1)};
}

EnergyIdentityReport verify_energy_identity(const ImmersionPatch& patch,
                                            double mu, double nu,
                                            const std::vector<double>& radii,
                                            double r1, int n) {
  // wrap without owning: caller keeps the patch alive for the call
  struct NoOpDeleter {
    void operator()(const ImmersionPatch*) const {}
  };
  std::shared_ptr<const ImmersionPatch> alias(&patch, NoOpDeleter{});
  InvertedPatch inv(alias);

  EnergyIdentityReport rep;
  rep.radii = radii;
  for (std::size_t i = 1; i < radii.size(); ++i)
    require(radii[i] < radii[i - 1], "radii must decrease");
  for (double r : radii) {
    require(r > 0 && r < r1, "identity radius outside the annulus");
    EnergyBreakdown e = integrate_energy(patch, r, r1, n);
    EnergyBreakdown ehat = integrate_energy(inv, r, r1, n);
    double flux = residue_integral(patch, r, n);

    // inverted-side flux of |Hhat|^2 through |z| = r
    const SphereRule& sph = sphere_rule(n);
    PairwiseAcc<double> acc;
    acc.reserve(sph.size());
    PatchJet pj;
    for (std::size_t k = 0; k < sph.size(); ++k) {
      Vec4 omega(sph.x1[k], sph.x2[k], sph.x3[k], sph.x4[k]);
      inv.eval(r * omega, pj);
      FundamentalData f = fundamental_data(pj);
      Vec4 dv;
      for (int a = 0; a < 4; ++a) dv[a] = 2.0 * f.hvec.dot(f.dh_perp[a]);
      BoundaryFrame b = boundary_frame(f, omega, r, sph.w[k]);
      acc.add(b.eta.dot(dv) * b.area_w);
    }
    double hatflux = acc.total();

    rep.diff.push_back(ehat.gr - e.gr);
    rep.total_diff.push_back(ehat.total(mu, nu) - e.total(mu, nu));
    rep.flux.push_back(flux);
    rep.hatflux.push_back(hatflux);
    rep.k.push_back((ehat.gr - e.gr) - 0.5 * flux + hatflux);
    rep.mu_diff.push_back(ehat.mu - e.mu);
    rep.nu_diff.push_back(ehat.nu - e.nu);
  }
  return rep;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    num += dx * (std::log(y[i]) - my);
    den += dx * dx;
  }
  return num / den;
}

} // namespace

ExpansionReport expansion_at_infinity(const PolynomialImmersion& germ,
                                      const std::vector<double>& radii,
                                      int directions) {
  const int m = germ.ambient_dim();
  const int codim = m - 4;
  {
    PatchJet origin;
    germ.eval(Vec4::Zero(), origin);
    require(origin.value.norm() == 0, "germ must pass through the origin");
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        require(origin.d1(a, b) == (a == b ? 1.0 : 0.0),
                "germ must be a graph over the tangent plane");
    for (int c = 4; c < m; ++c)
      for (int b = 0; b < 4; ++b)
        require(origin.d1(c, b) == 0.0, "germ graph must have flat first order");
  }
  for (const PolyTerm& t : germ.terms()) {
    int deg = t.exps[0] + t.exps[1] + t.exps[2] + t.exps[3];
    if (deg < 2) continue;
    require(t.coeff.head<4>().norm() == 0,
            "germ tangential part must be the identity");
  }

  auto owned = std::make_shared<PolynomialImmersion>(germ);
  InvertedPatch inv(owned);

  // sample directions: coordinate axes plus a reproducible random set
  std::vector<Vec4> dirs = {Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0),
                            Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1)};
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < directions; ++i) {
    Vec4 v(u(rng), u(rng), u(rng), u(rng));
    dirs.push_back(v.normalized());
  }

  ExpansionReport rep;
  rep.radii = radii;
  for (auto& v : rep.rem) v.assign(radii.size(), 0.0);

  PatchJet pj;
  for (std::size_t ir = 0; ir < radii.size(); ++ir) {
    double bigr = radii[ir];
    for (const Vec4& v : dirs) {
      Vec4 xhat = bigr * v;

      // Newton solve for the parameter whose inverted tangential image is xhat
      Vec4 z = xhat / xhat.squaredNorm();
      for (int it = 0; it < 40; ++it) {
        inv.eval(z, pj);
        Vec4 res = pj.value.head<4>() - xhat;
        Eigen::Matrix4d jac = pj.d1.topRows<4>();
        Vec4 step = jac.partialPivLu().solve(res);
        z -= step;
        if (step.norm() < 1e-15 * z.norm() + 1e-300) break;
      }
      inv.eval(z, pj);
      require((pj.value.head<4>() - xhat).norm() < 1e-9 * bigr,
              "far-field parameter solve did not converge");

      // graph jets of the inverted surface over the tangent plane at xhat
      std::array<Jet, 4> tang;
      for (int i = 0; i < 4; ++i) {
        tang[i] = patch_component_jet(pj, i, 3);
        tang[i].c[0] = 0; // displacement from xhat
      }
      std::array<Jet, 4> zinv = jet_invert(tang);

      // leading behaviour P(x)/|x|^2 + Q(x)/|x|^4 as jets at xhat
      Jet xs[4];
      for (int i = 0; i < 4; ++i) xs[i] = Jet::variable(3, i, xhat[i]);
      Jet s = xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + xs[3] * xs[3];
      Jet rs = jet_recip(s);
      Jet rs2 = rs * rs;

      for (int c = 0; c < codim; ++c) {
        Jet normal = patch_component_jet(pj, 4 + c, 3);
        Jet phihat = jet_substitute(normal, zinv);
        Jet lead = Jet::constant(3, 0.0);
        for (const PolyTerm& t : owned->terms()) {
          double coef = t.coeff[4 + c];
          if (coef == 0) continue;
          int deg = t.exps[0] + t.exps[1] + t.exps[2] + t.exps[3];
          if (deg != 2 && deg != 3) continue;
          Jet mono = Jet::constant(3, coef);
          for (int i = 0; i < 4; ++i)
            for (int k = 0; k < t.exps[i]; ++k) mono = mono * xs[i];
          lead = lead + mono * (deg == 2 ? rs : rs2);
        }
        Jet rem = phihat - lead;

        double v0 = std::fabs(rem.value());
        Vec4 g1 = jet_gradient(rem);
        double v1 = g1.norm();
        auto d2 = jet_d2(rem);
        double v2 = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            double w = d2[sym2_index(a, b)];
            v2 += w * w;
          }
        v2 = std::sqrt(v2);
        auto d3 = jet_d3(rem);
        double v3 = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int e = 0; e < 4; ++e) {
              double w = d3[sym3_index(a, b, e)];
              v3 += w * w;
            }
        v3 = std::sqrt(v3);

        rep.rem[0][ir] = std::max(rep.rem[0][ir], v0);
        rep.rem[1][ir] = std::max(rep.rem[1][ir], v1);
        rep.rem[2][ir] = std::max(rep.rem[2][ir], v2);
        rep.rem[3][ir] = std::max(rep.rem[3][ir], v3);
      }
    }
  }
  for (int i = 0; i < 4; ++i) rep.slopes[i] = fit_slope(rep.radii, rep.rem[i]);
  return rep;
}

} // namespace w4
