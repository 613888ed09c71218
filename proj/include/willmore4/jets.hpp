#pragma once

#include "willmore4/types.hpp"

#include <array>
#include <vector>

namespace w4 {

// Truncated Taylor expansions ("jets") in 4 variables, order <= 4.
//
// A jet stores the coefficients c_e of sum_e c_e x^e over all monomials of
// total degree <= order, in graded lexicographic order.  Note c_e is the
// Taylor COEFFICIENT, i.e. D^e f / e!, not the derivative itself.  All
// arithmetic truncates at the jet order.

struct JetTables {
  int order = 0;
  std::vector<std::array<int, 4>> exps; // monomials, graded lex
  std::vector<int> deg;                 // total degree per slot
  std::vector<double> fact;             // e! per slot
  // flattened triples (i, j, k): x^{e_i} * x^{e_j} = x^{e_k}, deg_i+deg_j <= order
  std::vector<int> prod;
  std::array<int, 625> index_of; // base-5 encoded exponent -> slot, -1 if absent

  int index(const std::array<int, 4>& e) const {
    return index_of[((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]];
  }
  int size() const { return (int)exps.size(); }
};

const JetTables& jet_tables(int order);

struct Jet {
  int order = 0;
  int n = 1;
  std::array<double, 70> c{};

  static Jet constant(int order, double v);
  // base + x_i as a jet (the base point enters through the constant term)
  static Jet variable(int order, int i, double base);

  double value() const { return c[0]; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);
Jet operator*(const Jet& a, double s);
Jet operator+(const Jet& a, double s);
Jet operator+(double s, const Jet& a);
Jet operator-(const Jet& a, double s);

// Scalar composites via the nilpotent-part series.  recip and log require a
// nonzero (resp. positive) constant term, sqrt a positive one.
Jet jet_recip(const Jet& a);
Jet jet_sqrt(const Jet& a);
Jet jet_log(const Jet& a);
Jet jet_exp(const Jet& a);

// Substitute t into the polynomial with coefficients g: returns
// sum_e g_e t^e truncated.  Every t[i] must have zero constant term, so g's
// coefficients are read as a Taylor table at the substitution base point.
Jet jet_substitute(const Jet& g, const std::array<Jet, 4>& t);

// Invert a jet map F with F(0) = 0 and invertible linear part: returns G with
// F(G(x)) = x + O(order+1).  Throws if the linear part is singular or the
// composition residual fails to cancel.
std::array<Jet, 4> jet_invert(const std::array<Jet, 4>& f);

// d/dx_dir as a jet one order lower.
Jet jet_derivative(const Jet& a, int dir);

// Drop coefficients above the given order (graded order makes this a prefix).
Jet jet_truncate(const Jet& a, int order);

// Derivative extraction (multiplies coefficients back by e!).
Vec4 jet_gradient(const Jet& a);
std::array<double, sym2_count> jet_d2(const Jet& a); // sym2 slot order
std::array<double, sym3_count> jet_d3(const Jet& a); // sym3 slot order

// Build a jet from derivative tables (inverse of the extraction above).
Jet jet_from_derivatives(int order, double v, const double* grad,
                         const double* d2, const double* d3);

} // namespace w4
