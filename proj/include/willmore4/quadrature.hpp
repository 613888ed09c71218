#pragma once

// Gauss-Legendre rules and the product quadrature on S^3.
//
// The sphere rule uses hyperspherical angles
//   x = (cos t1, sin t1 cos t2, sin t1 sin t2 cos p, sin t1 sin t2 sin p)
// with Gauss-Legendre nodes in each angle and the measure factor
// sin^2 t1 * sin t2 folded into the weights.  Nodes/weights are deterministic
// for a given size.

#include "willmore4/rational.hpp"
#include "willmore4/types.hpp"

namespace w4 {

struct Quad1D {
  std::vector<double> x, w;
  std::size_t size() const { return x.size(); }
};

// n-point Gauss-Legendre rule on [-1,1] (cached) or mapped to [a,b].
const Quad1D& gauss_legendre(int n);
Quad1D gauss_legendre(int n, double a, double b);

// Nodes in r with weights absorbing a log substitution: integrates
// f |-> int_a^b f(r) dr exactly like GL in u = log r.  Requires 0 < a < b.
Quad1D log_radial_rule(int n, double a, double b);

struct SphereRule {
  // SoA node coordinates on S^3 and weights (sum of weights = Vol(S^3)).
  std::vector<double> x1, x2, x3, x4, w;
  int points_per_angle = 0;
  int exactness = 0; // certified polynomial exactness degree (rel err <= 1e-12)
  std::size_t size() const { return w.size(); }
};

// Product rule with n Gauss-Legendre points per angle.
SphereRule sphere_rule(int points_per_angle);

// Smallest calibrated rule that integrates all polynomials of total degree
// <= degree with relative error <= 1e-12.
SphereRule sphere_rule_for_exactness(int degree);
int sphere_points_for_exactness(int degree);

// Exact value of the monomial integral  int_{S^3} x^a dA  (zero unless all
// exponents are even).  Used as the quadrature oracle and by the harmonic
// basis construction.
double sphere_monomial_integral(const std::array<int, 4>& a);
Rational sphere_monomial_integral_over_vol(const std::array<int, 4>& a); // divided by 2 pi^2

} // namespace w4
