#pragma once

// The bilinear form B_{sigma,tau}(u,v) = int_{tau<|z|<sigma} <grad D0 u, grad D0 v> dz
// (D0 = flat Laplacian) on fields built from the radial families, with two
// independent evaluation paths:
//   - closed-form antiderivative brackets per member pair (gram_matrix), and
//   - tensor quadrature on order-3 jets (bilinear_quadrature).
// On top of the brackets sits the connected-sum energy ledger: end and disk
// savings, interpolation energy, collar values, and the gamma^16 leading
// difference.

#include "willmore4/harmonics.hpp"
#include "willmore4/quadrature.hpp"
#include "willmore4/triharmonic.hpp"

#include <array>
#include <functional>

namespace w4 {

// Radial antiderivative of the member-pair integrand: for members i, j of one
// family (0-indexed) and any unit harmonic Y of the family's degree,
//   B_{sigma,tau}(member_i Y, member_j Y)
//     = gram_prefactor * Vol(S^3) * [primitive(r)]_{r=tau}^{r=sigma}.
// The raw variant keeps the integration-by-parts pieces (one bulk and one
// boundary matrix) including the boundary-generated constants, so it is not
// symmetric in (i, j); the plain variant is the symmetric form with those
// constants dropped.  Constants cancel in every bracket difference, so the
// two variants agree on all annuli.
double gram_primitive(Family tag, int i, int j, double r);
double gram_primitive_raw(Family tag, int i, int j, double r);
double gram_prefactor(Family tag); // 16, 16, 128, 48

// Bracket matrix on (tau, sigma): M(i,j) = prefactor * Vol(S^3) *
// (primitive(sigma) - primitive(tau)).  sigma may be infinite and tau zero;
// an entry whose primitive has no limit at the endpoint is flagged invalid
// (entry() then fails with "non-integrable pairing").  Decaying entries
// contribute 0 from the infinite endpoint.
struct GramMatrix {
  Family family = Family::E;
  double tau = 0, sigma = 1;
  Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
  std::array<std::array<bool, 6>, 6> valid{};

  double entry(int i, int j) const;
  // sum_{ij} <cu_i, cv_j> M(i,j); invalid slots must carry zero coefficients
  double contract(const std::array<VecC, 6>& cu, const std::array<VecC, 6>& cv) const;
};

GramMatrix gram_matrix(Family tag, double sigma, double tau);

// A field on an annulus given by its order-3 jets (value through third
// derivatives, any codomain dimension).
using JetField = std::function<void(const Vec4&, PatchJet&)>;

// member * Y: one radial member times one unit harmonic of the family's
// degree (harmonic_index ignored for family E, whose harmonic is 1).
JetField member_field(Family tag, int member, int harmonic_index);
JetField interpolant_field(const AnnulusInterpolant& w);

// Direct quadrature of B on tau < |z| < sigma: Gauss-Legendre in r times the
// S^3 product rule, run at n and n+8 radial points; mismatch beyond 1e-9
// relative is an error, with an absolute floor of 1e-12 times the integrand's
// L1 mass so exact cancellations pass.  sphere_degree is the polynomial
// exactness requested of the sphere rule.
double bilinear_quadrature(const JetField& u, const JetField& v, double sigma,
                           double tau, int n = 24, int sphere_degree = 6);

// All 36 member pairs of one family in a single sweep (shared node jets);
// same two-resolution agreement gate as bilinear_quadrature.
Eigen::Matrix<double, 6, 6> family_quadrature_matrix(Family tag, int harmonic_index,
                                                     double sigma, double tau,
                                                     int n = 24);

// Energies removed by cutting the two germ corrections, assembled from Gram
// brackets.  end = B_{inf,gamma} of the end germ (harmonic-part field
// (alpha/2) sum p_i Y_i + (alpha^2/6) r^{-1} (sum q1_i X_i + sum q3_i W_i)),
// disk = B_{1,0} of the disk germ ((beta/2)(r0 r^2 + r^2 sum r_i Y_i) +
// (beta^2/6) r^3 (sum s1_i X_i + sum s3_i W_i)).  The collar values are the
// same germs integrated over (gamma - sqrt(alpha), gamma) and
// (1, 1 + sqrt(alpha)).
struct SavingsReport {
  double end = 0;
  double disk = 0;
  double collar_end = 0;
  double collar_disk = 0;
};

SavingsReport energy_savings(const FormCoefficients& fc, double alpha, double beta,
                             double gamma);

// B_{1,gamma}(w,w): thirty Gram blocks contracted against the channel
// coefficients (blocks across different harmonics are orthogonal).
double interpolation_energy(const AnnulusInterpolant& w);

// Everything the connected-sum energy comparison needs at alpha = gamma^8,
// beta = t alpha.  exact_combination = (interp - savings_end - savings_disk)/16;
// leading is its gamma^16 expansion.  collar_end / collar_disk are the
// interpolant's own energies on the two collars (predicted O(alpha^{5/2}/gamma^3)
// jointly).
struct EnergyLedger {
  double savings_end = 0, savings_disk = 0, interp = 0;
  double collar_end = 0, collar_disk = 0;
  double exact_combination = 0;
  double leading = 0;
};

EnergyLedger energy_difference(const FormCoefficients& fc, double gamma, double t);

} // namespace w4
