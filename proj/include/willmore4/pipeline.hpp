#pragma once

#include "willmore4/harmonics.hpp"
#include "willmore4/immersion.hpp"
#include "willmore4/rotation.hpp"

#include <cstdint>
#include <vector>

namespace w4 {

// Second and third derivative tables of a graph germ at the origin.  The
// quadratic trace is not gluing data (it shifts the osculating sphere), so
// the traceless part is what feeds the alignment and the interpolation.
struct GermData {
  QuadForm P;          // D^2 phi(0)
  CubicForm Q;         // D^3 phi(0)
  bool trace_removed;  // whether P carried a nonzero trace part

  QuadForm traceless() const;
};

// Reads the germ tables from a graph patch (z, phi(z)).  Requires
// phi(0) = 0 and D phi(0) = 0; quartic and higher terms are ignored.
GermData extract_germ_data(const ImmersionPatch& patch);

// Applies the alignment returned by the rotation search to a germ:
// phi'(z) = T phi(S^T z), so P'_i = sum_j T_ij S P_j S^T and Q' transforms
// with three copies of S.  Energies are invariant under this change.
GermData rotate_germ(const GermData& g, const Mat4& S,
                     const Eigen::MatrixXd& T);

// t = 3 sum|p|^2 / sum<p,r>, twice the break-even value, so the gamma^16
// coefficient 18V sum|p|^2 - 12tV sum<p,r> lands at -18V sum|p|^2.
double choose_t(const FormCoefficients& fc);

struct ConnectedSumSpec {
  GermData germ1;  // contributes (P, Q)
  GermData germ2;  // contributes (R, S)
  std::vector<double> gamma_grid = {0.2, 0.1, 0.05};  // strictly decreasing
  bool auto_t = true;
  double t = 0;  // used when auto_t is false
  double mu = 0, nu = 0;
  int restarts = 16;       // rotation search restarts
  std::uint64_t seed = 1;  // rotation search seed
};

struct MarginRow {
  double gamma, alpha, beta;
  double exact_combination;
  double leading;
  double ratio;  // exact / leading, 0 when leading vanishes
  int sign;      // sign of exact_combination
};

struct MarginReport {
  std::vector<MarginRow> rows;  // grid order
  double t;
  bool rotated;             // germ2 was re-aligned before interpolation
  RotationResult rotation;  // meaningful when rotated
  double mu, nu;
  bool reduction_achieved;  // leading < 0 and exact < 0 at the smallest gamma
};

// Per gamma (alpha = gamma^8, beta = t alpha): project the germ tables onto
// the sphere harmonics, align germ2 by the rotation search when the traceless
// pairing is nonpositive, solve the interpolant, and assemble the energy
// ledger.  The quartic curvature densities weighted by mu and nu enter at
// order gamma^28 and cannot affect the gamma^16 verdict; they are echoed in
// the report.  Grid values below 0.02 are rejected: alpha = gamma^8 falls
// below extended-precision resolution of the ledger.
MarginReport run_connected_sum(const ConnectedSumSpec& spec);

}  // namespace w4
