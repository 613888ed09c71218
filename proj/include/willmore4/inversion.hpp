#pragma once

#include "willmore4/geometry.hpp"

#include <memory>
#include <vector>

namespace w4 {

// Phihat = Phi / |Phi|^2.  Requires |Phi| > 0 wherever evaluated.
class InvertedPatch : public ImmersionPatch {
public:
  explicit InvertedPatch(std::shared_ptr<const ImmersionPatch> base)
      : base_(std::move(base)) {}
  int ambient_dim() const override { return base_->ambient_dim(); }
  void eval(const Vec4& z, PatchJet& out) const override;

private:
  std::shared_ptr<const ImmersionPatch> base_;
};

// Boundary residue over the coordinate sphere |z| = r for a patch with
// Phi(0) = 0:
//   I(r) = ∮ ( <eta, grad lap ln|Phi|^2> + T(grad ln|Phi|^2, eta) ) dA
// with T_ab = 4 H.L_ab - 6 |H|^2 g_ab, eta the outward unit conormal of the
// level set, lap the surface Laplacian, dA the induced area element.  The
// flat germ gives exactly -16 pi^2 at every r.  For curved graph germs the
// deviation is an even series c2 r^2 + c4 r^4 + ...: the odd-order boundary
// corrections are odd polynomials on the sphere and average to zero.
double residue_integral(const ImmersionPatch& patch, double r, int n);

// Richardson limit of I(r) over the radii {r0, r0/2, r0/4} under the even
// error model; error_estimate is the last extrapolation-table increment.
struct ResidueLimit {
  double value;
  double error_estimate;
};
ResidueLimit residue_limit(const ImmersionPatch& patch, double r0, int n);

// Energy ledger for the inversion identity over annuli A_r = {r <= |z| <= r1}:
//   k(r) = [Ehat(A_r) - E(A_r)] - I(r)/2 + Ihat(r)
// where Ihat is the inverted-side flux of |Hhat|^2.  k converges as r -> 0
// (the per-radius values differ by the O(r^2) tail of the boundary terms),
// with I -> -16 pi^2 and Ihat -> 0, so the limit is the full exterior energy
// difference plus 8 pi^2 per sheet through the origin.  The mu and nu
// densities are pointwise conformally invariant, so total_diff differs from
// the gr part only by quadrature noise.
struct EnergyIdentityReport {
  std::vector<double> radii;     // strictly decreasing
  std::vector<double> diff;      // Ehat - E, gr part
  std::vector<double> total_diff;// Ehat - E for the requested (mu, nu)
  std::vector<double> flux;      // I(r)
  std::vector<double> hatflux;   // Ihat(r)
  std::vector<double> k;
  std::vector<double> mu_diff;
  std::vector<double> nu_diff;
};
EnergyIdentityReport verify_energy_identity(const ImmersionPatch& patch,
                                            double mu, double nu,
                                            const std::vector<double>& radii,
                                            double r1, int n);

// Far-field expansion of an inverted graph germ (z, phi(z)) with phi starting
// at second order: over the tangent plane the inverted surface is the graph of
//   phihat(x) = P(x,x)/|x|^2 + Q(x,x,x)/|x|^4 + rem(x),
// where P and Q are the quadratic and cubic germ coefficients and the
// remainder decays like |x|^{-2} with each derivative gaining one power.
struct ExpansionReport {
  std::vector<double> radii;
  std::array<std::vector<double>, 4> rem; // sup_i |D^i rem| over directions
  std::array<double, 4> slopes;           // fitted, expected -(i+2)
};
ExpansionReport expansion_at_infinity(const PolynomialImmersion& germ,
                                      const std::vector<double>& radii,
                                      int directions);

} // namespace w4
