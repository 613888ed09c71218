#pragma once

#include "willmore4/types.hpp"

#include <cstdint>
#include <vector>

namespace w4 {

// A tuple of k traceless symmetric 4x4 forms, the vector-valued trace-free
// second fundamental data of a germ.  Conjugation S P S^T acts per component;
// an orthogonal T in O(k) mixes the components.
struct TracelessFormTuple {
  std::vector<Mat4> comp;
  int k() const { return static_cast<int>(comp.size()); }
  double norm() const;  // Frobenius norm over all components
};

// Validates symmetry and tracelessness to 1e-12 per component (relative to
// the component's largest entry).
TracelessFormTuple make_form_tuple(std::vector<Mat4> comp);

// A_ij = Tr(S P_j S^T R_i).  The pairing <P_{S,T}, R> of the S-conjugated,
// T-mixed tuple with R equals sum_ij T_ij A_ij = Tr(T^T A).
Eigen::MatrixXd build_A(const Mat4& S, const TracelessFormTuple& P,
                        const TracelessFormTuple& R);

// Maximizes Tr(T^T A) over orthogonal T.  The maximum is the trace norm
// (sum of singular values), attained at T = U V^T from the SVD A = U S V^T.
struct TraceNormResult {
  Eigen::MatrixXd T;
  double value;
};
TraceNormResult optimal_T(const Eigen::MatrixXd& A);

struct RotationResult {
  Mat4 S;
  Eigen::MatrixXd T;
  double pairing;     // sum_ij T_ij A_ij(S)
  double trace_norm;  // trace norm of A(S); equals pairing at the optimum
};

// Maximizes the trace norm of A(S) over O(4) by multi-start derivative-free
// refinement: starts are drawn as unit-quaternion pairs (isoclinic
// factorization of SO(4), the other component reached through a fixed
// reflection) and polished by Nelder-Mead on the 6-dimensional exp(skew)
// chart around the incumbent.  Deterministic for a fixed seed; restarts use
// independent substreams and run in parallel.  If either tuple vanishes
// (Frobenius norm <= 1e-12) the pairing is 0 with S = I, T = I; if both are
// nonzero the search must produce pairing > 1e-10 |P| |R| and fails loudly
// otherwise.
RotationResult search_S(const TracelessFormTuple& P,
                        const TracelessFormTuple& R, int restarts,
                        std::uint64_t seed);

}  // namespace w4
