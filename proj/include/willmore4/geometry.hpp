#pragma once

#include "willmore4/immersion.hpp"
#include "willmore4/quadrature.hpp"

namespace w4 {

// Curvature data of an immersion patch at one point.  All norms are taken
// with the induced metric; vectors live in ambient coordinates.
struct FundamentalData {
  int m = 0;
  Mat4 g, ginv;
  double detg = 0, sqrtg = 0;
  VecA hvec;                       // mean curvature vector
  std::array<VecA, sym2_count> l;  // second fundamental form, normal valued
  std::array<VecA, 4> dh_perp;     // normal covariant derivative of hvec

  double h_sq = 0;           // |H|^2
  double dh_perp_sq = 0;     // |grad^perp H|^2
  double hl_sq = 0;          // |H.L|^2
  double hl_traceless_sq = 0; // |H.L - (|H|^2/2) g|^2
  double lring_sq = 0;       // |Lring|^2
  double lring2_sq = 0;      // |Lring^2|^2, Lring^2 the g-composition of Lring
};

FundamentalData fundamental_data(const PatchJet& p);

// Pointwise densities, already multiplied by sqrt(det g).
struct EnergyDensity {
  double gr;   // |grad^perp H|^2 - |H.L|^2 + 7|H|^4
  double mu;   // |Lring|^4
  double nu;   // |Lring^2|^2
  double q4;   // -2|H.L - (|H|^2/2)g|^2 + 2|grad^perp H|^2 + 8|H|^4
  double area; // 1
};
EnergyDensity energy_density(const FundamentalData& f);

struct EnergyBreakdown {
  double gr = 0, mu = 0, nu = 0, q4 = 0, area = 0;
  EnergyBreakdown& operator+=(const EnergyBreakdown& o) {
    gr += o.gr;
    mu += o.mu;
    nu += o.nu;
    q4 += o.q4;
    area += o.area;
    return *this;
  }
  double total(double mu_coef, double nu_coef) const {
    return gr + mu_coef * mu + nu_coef * nu;
  }
};

// Integrate the densities over the annulus r0 <= |z| <= r1 (ball when r0 = 0)
// with n Gauss-Legendre points in radius and n points per angle on S^3.
EnergyBreakdown integrate_energy(const ImmersionPatch& patch, double r0,
                                 double r1, int n);

// Round unit sphere via its two stereographic charts over |z| <= 1.
EnergyBreakdown round_sphere_energy(int n);

// Worst pointwise mismatch of the q4 density against twice the gr density
// over the integration nodes; checks the quartic curvature contraction
// conventions against each other.
double q4_identity_mismatch(const ImmersionPatch& patch, double r0, double r1,
                            int n);

// Laplace-Beltrami of a scalar on the surface, from the patch data and the
// scalar's order-3 Taylor table at the same point.  Returns the order-1 jet
// (value and coordinate first derivatives) computed in divergence form.
Jet laplace_beltrami_jet(const PatchJet& p, const Jet& u3);

// Small-slope comparison for graphs (d1 must carry the identity block):
// lhs = |grad^perp H|^2 sqrt G against rhs = |grad lap_0 phi|^2 / 16, with the
// quartic bound controlling their difference.
struct DiscrepancyReport {
  double lhs = 0;
  double rhs = 0;
  double bound = 0; // |Dphi|^2 |D^3 phi|^2 + |D^2 phi|^4
};
DiscrepancyReport approximation_discrepancy(const PatchJet& p);

} // namespace w4
