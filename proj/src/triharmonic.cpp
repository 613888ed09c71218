#include "willmore4/triharmonic.hpp"

#include "willmore4/jets.hpp"

#include <cmath>
#include <vector>

namespace w4 {

namespace {

RadialFamily make_family(Family tag, int h, std::array<int, 6> exps,
                         std::array<bool, 6> logs) {
  RadialFamily fam;
  fam.tag = tag;
  fam.harmonic_degree = h;
  fam.exponent = exps;
  fam.has_log = logs;
  fam.laplacian_action.setZero();
  auto find = [&](int k, bool lg) {
    for (int i = 0; i < 6; ++i)
      if (exps[i] == k && logs[i] == lg) return i;
    return -1;
  };
  // Delta0 (r^k Y_h) = (k-h)(k+h+2) r^{k-2} Y_h; a log member adds
  // (2k+2) r^{k-2} Y_h on top of the same law applied to r^k ln r.
  for (int j = 0; j < 6; ++j) {
    int k = exps[j];
    int lead = (k - h) * (k + h + 2);
    if (lead != 0) {
      int i = find(k - 2, logs[j]);
      require(i >= 0, "radial family: Laplacian image escapes the basis");
      fam.laplacian_action(i, j) += lead;
    }
    if (logs[j]) {
      int i = find(k - 2, false);
      require(i >= 0, "radial family: Laplacian image escapes the basis");
      fam.laplacian_action(i, j) += 2 * k + 2;
    }
  }
  return fam;
}

constexpr std::array<bool, 6> kNoLogs{false, false, false, false, false, false};

} // namespace

const RadialFamily& radial_family(Family tag) {
  static const RadialFamily e =
      make_family(Family::E, 0, {-2, 0, 0, 2, 2, 4},
                  {false, false, true, false, true, false});
  static const RadialFamily f =
      make_family(Family::F, 1, {-3, -1, 1, 1, 3, 5},
                  {false, false, false, true, false, false});
  static const RadialFamily g =
      make_family(Family::G, 2, {-4, -2, 0, 2, 4, 6}, kNoLogs);
  static const RadialFamily h =
      make_family(Family::H, 3, {-5, -3, -1, 3, 5, 7}, kNoLogs);
  switch (tag) {
    case Family::E: return e;
    case Family::F: return f;
    case Family::G: return g;
    default: return h;
  }
}

double radial_eval(Family tag, int index, double r, int deriv_order) {
  require(r > 0.0, "radial_eval: need r > 0");
  require(index >= 0 && index < 6, "radial_eval: member index out of range");
  require(deriv_order >= 0 && deriv_order <= 3,
          "radial_eval: derivative order out of range");
  const RadialFamily& fam = radial_family(tag);
  return radial_term(fam.exponent[index], fam.has_log[index], r, deriv_order);
}

namespace {

// Solve the six boundary equations of one harmonic channel for every
// codomain component, certify the residual, and round to double.
std::array<VecC, 6> solve_one_channel(Family tag, const PivotLU6<f128>& lu,
                                      const Mat6<f128>& m, f128 gamma, f128 alpha,
                                      f128 beta, const VecC& x, const VecC& y) {
  const int dim = (int)x.size();
  std::array<VecC, 6> out;
  for (auto& v : out) v = VecC::Zero(dim);
  for (int c = 0; c < dim; ++c) {
    std::array<f128, 6> rhs =
        channel_rhs(tag, gamma, alpha, beta, f128(x[c]), f128(y[c]));
    std::array<f128, 6> sol = lu_solve_refined(lu, m, rhs);
    f128 rmax = 0, bmax = 0;
    for (int i = 0; i < 6; ++i) {
      f128 s = rhs[i];
      for (int j = 0; j < 6; ++j) s -= m[i][j] * sol[j];
      if (fabs(s) > rmax) rmax = fabs(s);
      if (fabs(rhs[i]) > bmax) bmax = fabs(rhs[i]);
    }
    require(rmax <= f128(1e-10) * bmax + f128(1e-300),
            "solve_interpolant: boundary-system residual too large");
    for (int l = 0; l < 6; ++l) out[l][c] = to_double(sol[l]);
  }
  return out;
}

void check_interpolant_args(const FormCoefficients& fc, double gamma, double alpha,
                            double beta) {
  require(fc.m > 0, "interpolant: empty codomain");
  require(gamma > 0.0 && gamma < 1.0, "interpolant: need gamma in (0,1)");
  require(alpha >= 0.0 && beta >= 0.0, "interpolant: need alpha, beta >= 0");
  require((int)fc.p.size() == 9 && (int)fc.r.size() == 9 &&
              (int)fc.q1.size() == 4 && (int)fc.s1.size() == 4 &&
              (int)fc.q3.size() == 16 && (int)fc.s3.size() == 16,
          "interpolant: malformed coefficient data");
}

} // namespace

AnnulusInterpolant solve_interpolant(const FormCoefficients& fc, double gamma,
                                     double alpha, double beta) {
  check_interpolant_args(fc, gamma, alpha, beta);
  AnnulusInterpolant w;
  w.m = fc.m;
  w.gamma = gamma;
  w.alpha = alpha;
  w.beta = beta;
  const f128 g = gamma, al = alpha, be = beta;
  {
    Mat6<f128> m = boundary_matrix(Family::E, g);
    PivotLU6<f128> lu(m);
    w.a = solve_one_channel(Family::E, lu, m, g, al, be, fc.r0,
                            VecC::Zero(fc.m));
  }
  {
    Mat6<f128> m = boundary_matrix(Family::F, g);
    PivotLU6<f128> lu(m);
    for (int i = 0; i < 4; ++i)
      w.b[i] = solve_one_channel(Family::F, lu, m, g, al, be, fc.q1[i], fc.s1[i]);
  }
  {
    Mat6<f128> m = boundary_matrix(Family::G, g);
    PivotLU6<f128> lu(m);
    for (int i = 0; i < 9; ++i)
      w.c[i] = solve_one_channel(Family::G, lu, m, g, al, be, fc.p[i], fc.r[i]);
  }
  {
    Mat6<f128> m = boundary_matrix(Family::H, g);
    PivotLU6<f128> lu(m);
    for (int i = 0; i < 16; ++i)
      w.d[i] = solve_one_channel(Family::H, lu, m, g, al, be, fc.q3[i], fc.s3[i]);
  }
  return w;
}

namespace {

std::array<VecC, 6> asymptotic_one_channel(Family tag, double gamma, double alpha,
                                           double beta, const VecC& x,
                                           const VecC& y) {
  const int dim = (int)x.size();
  std::array<VecC, 6> out;
  for (auto& v : out) v = VecC::Zero(dim);
  for (int c = 0; c < dim; ++c) {
    std::array<double, 6> sol =
        asymptotic_channel(tag, gamma, alpha, beta, x[c], y[c]);
    for (int l = 0; l < 6; ++l) out[l][c] = sol[l];
  }
  return out;
}

} // namespace

AnnulusInterpolant asymptotic_interpolant(const FormCoefficients& fc, double gamma,
                                          double alpha, double beta) {
  check_interpolant_args(fc, gamma, alpha, beta);
  AnnulusInterpolant w;
  w.m = fc.m;
  w.gamma = gamma;
  w.alpha = alpha;
  w.beta = beta;
  w.a = asymptotic_one_channel(Family::E, gamma, alpha, beta, fc.r0,
                               VecC::Zero(fc.m));
  for (int i = 0; i < 4; ++i)
    w.b[i] = asymptotic_one_channel(Family::F, gamma, alpha, beta, fc.q1[i],
                                    fc.s1[i]);
  for (int i = 0; i < 9; ++i)
    w.c[i] = asymptotic_one_channel(Family::G, gamma, alpha, beta, fc.p[i],
                                    fc.r[i]);
  for (int i = 0; i < 16; ++i)
    w.d[i] = asymptotic_one_channel(Family::H, gamma, alpha, beta, fc.q3[i],
                                    fc.s3[i]);
  return w;
}

namespace {

void check_annulus_point(const AnnulusInterpolant& w, double r) {
  require(r >= w.gamma * (1.0 - 1e-12) && r <= 1.0 + 1e-12,
          "eval_w: point outside the annulus");
}

// Channel coefficients after `power` applications of the family's
// Laplacian-action matrix.
std::array<VecC, 6> push_action(const RadialFamily& fam,
                                const std::array<VecC, 6>& coeff, int power) {
  std::array<VecC, 6> cur = coeff;
  for (int p = 0; p < power; ++p) {
    std::array<VecC, 6> next;
    for (int i = 0; i < 6; ++i) {
      next[i] = VecC::Zero(cur[0].size());
      for (int j = 0; j < 6; ++j) {
        double nij = fam.laplacian_action(i, j);
        if (nij != 0.0) next[i] += nij * cur[j];
      }
    }
    cur = next;
  }
  return cur;
}

VecC eval_w_action(const AnnulusInterpolant& w, const Vec4& z, int power) {
  double r = z.norm();
  check_annulus_point(w, r);
  Vec4 zh = z / r;
  VecC acc = VecC::Zero(w.m);
  auto add_channel = [&](Family tag, double harm,
                         const std::array<VecC, 6>& coeff) {
    const RadialFamily& fam = radial_family(tag);
    std::array<VecC, 6> cc =
        power == 0 ? coeff : push_action(fam, coeff, power);
    for (int l = 0; l < 6; ++l) {
      double rad = radial_term(fam.exponent[l], fam.has_log[l], r, 0);
      acc += (rad * harm) * cc[l];
    }
  };
  add_channel(Family::E, 1.0, w.a);
  const HarmonicBasis& b1 = harmonic_basis(1);
  for (int i = 0; i < 4; ++i) add_channel(Family::F, b1.members[i].eval(zh), w.b[i]);
  const HarmonicBasis& b2 = harmonic_basis(2);
  for (int i = 0; i < 9; ++i) add_channel(Family::G, b2.members[i].eval(zh), w.c[i]);
  const HarmonicBasis& b3 = harmonic_basis(3);
  for (int i = 0; i < 16; ++i)
    add_channel(Family::H, b3.members[i].eval(zh), w.d[i]);
  return acc;
}

// (r^2)^e as a jet; negative e through jet_recip.
Jet r2_power(const Jet& r2, const Jet& r2inv, int e) {
  Jet p = Jet::constant(3, 1.0);
  const Jet& base = e >= 0 ? r2 : r2inv;
  int n = e >= 0 ? e : -e;
  for (int i = 0; i < n; ++i) p = p * base;
  return p;
}

Jet harmonic_member_jet(const HarmonicMember& mem, const std::array<Jet, 4>& xs) {
  Jet acc = Jet::constant(3, 0.0);
  for (std::size_t t = 0; t < mem.exps.size(); ++t) {
    Jet term = Jet::constant(3, mem.coef[t]);
    const auto& e = mem.exps[t];
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < e[i]; ++k) term = term * xs[i];
    acc = acc + term;
  }
  return acc;
}

} // namespace

VecC eval_w(const AnnulusInterpolant& w, const Vec4& z) {
  return eval_w_action(w, z, 0);
}

VecC eval_w_laplacian(const AnnulusInterpolant& w, const Vec4& z, int power) {
  require(power >= 1 && power <= 3, "eval_w_laplacian: power must be 1..3");
  return eval_w_action(w, z, power);
}

void eval_w_jets(const AnnulusInterpolant& w, const Vec4& z, PatchJet& out) {
  check_annulus_point(w, z.norm());
  std::array<Jet, 4> xs;
  for (int i = 0; i < 4; ++i) xs[i] = Jet::variable(3, i, z[i]);
  Jet r2 = xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + xs[3] * xs[3];
  Jet r2inv = jet_recip(r2);
  Jet logr = 0.5 * jet_log(r2);

  std::vector<Jet> comp(w.m, Jet::constant(3, 0.0));
  auto add_channel = [&](Family tag, const Jet* harm,
                         const std::array<VecC, 6>& coeff) {
    const RadialFamily& fam = radial_family(tag);
    for (int l = 0; l < 6; ++l) {
      bool used = false;
      for (int c = 0; c < w.m; ++c) used = used || coeff[l][c] != 0.0;
      if (!used) continue;
      // r^k Y(zhat) = Y(z) r^{k-h} with k-h even for every member
      int e = (fam.exponent[l] - fam.harmonic_degree) / 2;
      Jet base = r2_power(r2, r2inv, e);
      if (harm) base = base * (*harm);
      if (fam.has_log[l]) base = base * logr;
      for (int c = 0; c < w.m; ++c)
        if (coeff[l][c] != 0.0) comp[c] = comp[c] + coeff[l][c] * base;
    }
  };
  add_channel(Family::E, nullptr, w.a);
  const HarmonicBasis& b1 = harmonic_basis(1);
  for (int i = 0; i < 4; ++i) {
    Jet hj = harmonic_member_jet(b1.members[i], xs);
    add_channel(Family::F, &hj, w.b[i]);
  }
  const HarmonicBasis& b2 = harmonic_basis(2);
  for (int i = 0; i < 9; ++i) {
    Jet hj = harmonic_member_jet(b2.members[i], xs);
    add_channel(Family::G, &hj, w.c[i]);
  }
  const HarmonicBasis& b3 = harmonic_basis(3);
  for (int i = 0; i < 16; ++i) {
    Jet hj = harmonic_member_jet(b3.members[i], xs);
    add_channel(Family::H, &hj, w.d[i]);
  }
  patch_from_jets(comp.data(), w.m, out);
}

CutoffEta::CutoffEta(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "cutoff: need alpha in (0,1)");
  double s = std::sqrt(alpha);
  lo_ = s / 4.0;
  width_ = s / 2.0;
}

namespace {
double mollifier(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
} // namespace

double CutoffEta::operator()(double s) const {
  double u = (s - lo_) / width_;
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double a = mollifier(u), b = mollifier(1.0 - u);
  return a / (a + b);
}

double CutoffEta::deriv(double s, int order) const {
  require(order >= 0 && order <= 3, "cutoff: derivative order out of range");
  if (order == 0) return (*this)(s);
  double u = (s - lo_) / width_;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  // 1-d jet in s through u = (s - lo)/width: slope 1/width, base value u
  Jet uj = (1.0 / width_) * Jet::variable(3, 0, 0.0);
  uj.c[0] = u;
  Jet fa = jet_exp(-jet_recip(uj));
  Jet fb = jet_exp(-jet_recip(Jet::constant(3, 1.0) - uj));
  Jet eta = fa * jet_recip(fa + fb);
  if (order == 1) return jet_gradient(eta)[0];
  if (order == 2) return jet_d2(eta)[sym2_index(0, 0)];
  return jet_d3(eta)[sym3_index(0, 0, 0)];
}

} // namespace w4
