#include "willmore4/bilinear.hpp"

#include "willmore4/jets.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace w4 {

namespace {

// One radial monomial c r^k (ln r when lg) of an antiderivative entry.
struct RTerm {
  double c = 0;
  int k = 0;
  bool lg = false;
};

using Tab = std::array<RTerm, 36>;

// Printed symmetric antiderivatives, 0-indexed members.  The H (5,5) entry is
// 160 r^12: the lemma's own bulk and boundary pieces sum to
// 240 r^12 - 16 * 5 r^12 = 160 r^12, and quadrature confirms it.
const Tab& printed_table(Family tag) {
  static const std::array<Tab, 4> tabs = [] {
    std::array<Tab, 4> all{};
    auto set = [](Tab& t, int i, int j, double c, int k, bool lg = false) {
      t[i * 6 + j] = {c, k, lg};
      t[j * 6 + i] = {c, k, lg};
    };
    Tab& e = all[0];
    set(e, 2, 2, -0.5, -2);
    set(e, 2, 4, -2, 0, true);
    set(e, 2, 5, -6, 2);
    set(e, 4, 4, 2, 2);
    set(e, 4, 5, 6, 4);
    set(e, 5, 5, 24, 6);
    Tab& f = all[1];
    set(f, 1, 1, -3, -4);
    set(f, 1, 3, 3, -2);
    set(f, 1, 5, 24, 2);
    set(f, 3, 3, 4, 0, true);
    set(f, 3, 4, 3, 2);
    set(f, 4, 4, 9, 4);
    set(f, 4, 5, 24, 6);
    set(f, 5, 5, 96, 8);
    Tab& g = all[2];
    set(g, 1, 1, -2, -6);
    set(g, 1, 2, -2, -4);
    set(g, 1, 5, 10, 2);
    set(g, 2, 2, -3, -2);
    set(g, 2, 4, -2, 2);
    set(g, 4, 4, 4, 6);
    set(g, 4, 5, 10, 8);
    set(g, 5, 5, 30, 10);
    Tab& h = all[3];
    set(h, 1, 1, -15, -8);
    set(h, 1, 2, -20, -6);
    set(h, 1, 5, 60, 2);
    set(h, 2, 2, -32, -4);
    set(h, 2, 4, -20, 2);
    set(h, 4, 4, 25, 8);
    set(h, 4, 5, 60, 10);
    set(h, 5, 5, 160, 12);
    return all;
  }();
  return tabs[(int)tag];
}

// Integration-by-parts pieces: B = weight_bulk * bulk + weight_bnd * bnd
// relative to the same prefactor * Vol(S^3) scale.  bulk comes from
// -int <D0 u, D0^2 v>, bnd from the <D0 u, d_r D0 v> flux, so neither matrix
// is symmetric and the flux generates pure constants.
struct RawPieces {
  Tab bulk{}, bnd{};
  double wbulk = 0, wbnd = 0;
};

const RawPieces& raw_pieces(Family tag) {
  static const std::array<RawPieces, 4> tabs = [] {
    std::array<RawPieces, 4> all{};
    auto set = [](Tab& t, int i, int j, double c, int k, bool lg = false) {
      t[i * 6 + j] = {c, k, lg};
    };
    // E is computed directly in one pass; reuse the symmetric form.
    all[0].bnd = printed_table(Family::E);
    all[0].wbulk = 0;
    all[0].wbnd = 1;
    RawPieces& f = all[1];
    f.wbulk = -4;
    f.wbnd = 1;
    set(f.bulk, 1, 3, -0.5, -2);
    set(f.bulk, 1, 5, -12, 2);
    set(f.bulk, 3, 3, -1, 0, true);
    set(f.bulk, 3, 5, 6, 4);
    set(f.bulk, 4, 3, -1.5, 2);
    set(f.bulk, 4, 5, 12, 6);
    set(f.bulk, 5, 3, -2, 4);
    set(f.bulk, 5, 5, 24, 8);
    set(f.bnd, 1, 1, -3, -4);
    set(f.bnd, 1, 3, 1, -2);
    set(f.bnd, 1, 4, -3, 0);
    set(f.bnd, 1, 5, -24, 2);
    set(f.bnd, 3, 1, 3, -2);
    set(f.bnd, 3, 3, -1, 0);
    set(f.bnd, 3, 4, 3, 2);
    set(f.bnd, 3, 5, 24, 4);
    set(f.bnd, 4, 1, 9, 0);
    set(f.bnd, 4, 3, -3, 2);
    set(f.bnd, 4, 4, 9, 4);
    set(f.bnd, 4, 5, 72, 6);
    set(f.bnd, 5, 1, 24, 2);
    set(f.bnd, 5, 3, -8, 4);
    set(f.bnd, 5, 4, 24, 6);
    set(f.bnd, 5, 5, 192, 8);
    RawPieces& g = all[2];
    g.wbulk = 4;
    g.wbnd = -1;
    set(g.bulk, 1, 2, -0.25, -4);
    set(g.bulk, 1, 5, 5, 2);
    set(g.bulk, 2, 2, -0.5, -2);
    set(g.bulk, 2, 5, 2.5, 4);
    set(g.bulk, 4, 2, -1, 2);
    set(g.bulk, 4, 5, -2.5, 8);
    set(g.bulk, 5, 2, -1.25, 4);
    set(g.bulk, 5, 5, -5, 10);
    set(g.bnd, 1, 1, 2, -6);
    set(g.bnd, 1, 2, 1, -4);
    set(g.bnd, 1, 4, 2, 0);
    set(g.bnd, 1, 5, 10, 2);
    set(g.bnd, 2, 1, 2, -4);
    set(g.bnd, 2, 2, 1, -2);
    set(g.bnd, 2, 4, 2, 2);
    set(g.bnd, 2, 5, 10, 4);
    set(g.bnd, 4, 1, -4, 0);
    set(g.bnd, 4, 2, -2, 2);
    set(g.bnd, 4, 4, -4, 6);
    set(g.bnd, 4, 5, -20, 8);
    set(g.bnd, 5, 1, -10, 2);
    set(g.bnd, 5, 2, -5, 4);
    set(g.bnd, 5, 4, -10, 8);
    set(g.bnd, 5, 5, -50, 10);
    RawPieces& h = all[3];
    h.wbulk = -16;
    h.wbnd = 1;
    set(h.bulk, 1, 2, 0.5, -6);
    set(h.bulk, 1, 5, -7.5, 2);
    set(h.bulk, 2, 2, 1, -4);
    set(h.bulk, 2, 5, -5, 4);
    set(h.bulk, 4, 2, 2.5, 2);
    set(h.bulk, 4, 5, 2.5, 10);
    set(h.bulk, 5, 2, 3, 4);
    set(h.bulk, 5, 5, 5, 12);
    set(h.bnd, 1, 1, -15, -8);
    set(h.bnd, 1, 2, -12, -6);
    set(h.bnd, 1, 4, -15, 0);
    set(h.bnd, 1, 5, -60, 2);
    set(h.bnd, 2, 1, -20, -6);
    set(h.bnd, 2, 2, -16, -4);
    set(h.bnd, 2, 4, -20, 2);
    set(h.bnd, 2, 5, -80, 4);
    set(h.bnd, 4, 1, 25, 0);
    set(h.bnd, 4, 2, 20, 2);
    set(h.bnd, 4, 4, 25, 8);
    set(h.bnd, 4, 5, 100, 10);
    set(h.bnd, 5, 1, 60, 2);
    set(h.bnd, 5, 2, 48, 4);
    set(h.bnd, 5, 4, 60, 10);
    set(h.bnd, 5, 5, 240, 12);
    return all;
  }();
  return tabs[(int)tag];
}

template <typename R> R term_value(const RTerm& t, R r) {
  if (t.c == 0) return R(0);
  R v = R(t.c) * ipow(r, (long long)t.k);
  if (t.lg) v *= log(r);
  return v;
}

// Limit of one term at an endpoint; false when the limit does not exist.
template <typename R>
bool term_endpoint(const RTerm& t, R r, bool at_inf, bool at_zero, R& out) {
  if (t.c == 0) {
    out = R(0);
    return true;
  }
  if (at_inf) {
    if (t.k < 0)
      out = R(0);
    else if (t.k == 0 && !t.lg)
      out = R(t.c);
    else
      return false;
    return true;
  }
  if (at_zero) {
    if (t.k > 0)
      out = R(0);
    else if (t.k == 0 && !t.lg)
      out = R(t.c);
    else
      return false;
    return true;
  }
  out = term_value(t, r);
  return true;
}

// [primitive]_{tau}^{sigma} of one entry (at most two terms in the raw path).
template <typename R>
bool bracket_entry(Family tag, int i, int j, R sigma, R tau, bool sigma_inf,
                   bool tau_zero, bool raw, R& out) {
  RTerm terms[2];
  double scale[2] = {1, 1};
  int n = 0;
  if (!raw) {
    terms[n++] = printed_table(tag)[i * 6 + j];
  } else {
    const RawPieces& rp = raw_pieces(tag);
    terms[0] = rp.bulk[i * 6 + j];
    scale[0] = rp.wbulk;
    terms[1] = rp.bnd[i * 6 + j];
    scale[1] = rp.wbnd;
    n = 2;
  }
  out = R(0);
  for (int m = 0; m < n; ++m) {
    if (terms[m].c == 0 || scale[m] == 0) continue;
    R hi, lo;
    if (!term_endpoint(terms[m], sigma, sigma_inf, false, hi)) return false;
    if (!term_endpoint(terms[m], tau, false, tau_zero, lo)) return false;
    out += R(scale[m]) * (hi - lo);
  }
  return true;
}

const char* family_name(Family tag) {
  switch (tag) {
    case Family::E: return "E";
    case Family::F: return "F";
    case Family::G: return "G";
    case Family::H: return "H";
  }
  return "?";
}

// Channel coefficient contraction against brackets on (tau, sigma) in any
// scalar; zero-coefficient pairs skip the entry so infinite endpoints only
// see the members actually present.
template <typename R>
R contract_channel(Family tag, const std::array<VecC, 6>& coef, R sigma, R tau,
                   bool sigma_inf, bool tau_zero) {
  R pref = R(gram_prefactor(tag)) * vol_s3<R>();
  R acc = R(0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      R dot = R(0);
      for (int c = 0; c < coef[i].size(); ++c)
        dot += R(coef[i][c]) * R(coef[j][c]);
      if (dot == R(0)) continue;
      R br;
      if (!bracket_entry(tag, i, j, sigma, tau, sigma_inf, tau_zero, false, br)) {
        std::ostringstream os;
        os << "non-integrable pairing: family " << family_name(tag) << " entry ("
           << i << "," << j << ")";
        fail(os.str());
      }
      acc += dot * pref * br;
    }
  return acc;
}

// Thirty-channel interpolation energy over (tau, sigma) in f128.
f128 interp_energy(const AnnulusInterpolant& w, f128 sigma, f128 tau) {
  f128 acc = contract_channel(Family::E, w.a, sigma, tau, false, false);
  for (int i = 0; i < 4; ++i)
    acc += contract_channel(Family::F, w.b[i], sigma, tau, false, false);
  for (int i = 0; i < 9; ++i)
    acc += contract_channel(Family::G, w.c[i], sigma, tau, false, false);
  for (int i = 0; i < 16; ++i)
    acc += contract_channel(Family::H, w.d[i], sigma, tau, false, false);
  return acc;
}

// Single-member germ block: coefficient^2 * sum of squared harmonic data
// times the member's diagonal bracket.
template <typename R>
R germ_block(Family tag, int member, R coef_sq, R sigma, R tau, bool sigma_inf,
             bool tau_zero) {
  R br;
  if (!bracket_entry(tag, member, member, sigma, tau, sigma_inf, tau_zero, false, br)) {
    std::ostringstream os;
    os << "non-integrable pairing: family " << family_name(tag) << " entry ("
       << member << "," << member << ")";
    fail(os.str());
  }
  return coef_sq * R(gram_prefactor(tag)) * vol_s3<R>() * br;
}

// B_{sigma,tau} of the end germ (alpha/2) sum p Y + (alpha^2/6) r^{-1}
// (sum q1 X + sum q3 W); members G_2, F_1, H_2 (0-indexed).
template <typename R>
R end_germ_energy(const FormCoefficients& fc, R alpha, R sigma, R tau,
                  bool sigma_inf) {
  R cp = alpha / R(2), cq = alpha * alpha / R(6);
  return germ_block(Family::G, 2, cp * cp * R(fc.sum_p_sq()), sigma, tau, sigma_inf, false) +
         germ_block(Family::F, 1, cq * cq * R(fc.sum_q1_sq()), sigma, tau, sigma_inf, false) +
         germ_block(Family::H, 2, cq * cq * R(fc.sum_q3_sq()), sigma, tau, sigma_inf, false);
}

// B_{sigma,tau} of the disk germ (beta/2)(r0 r^2 + r^2 sum r Y) +
// (beta^2/6) r^3 (sum s1 X + sum s3 W); members e_3, G_3, F_4, H_3.
template <typename R>
R disk_germ_energy(const FormCoefficients& fc, R beta, R sigma, R tau,
                   bool tau_zero) {
  R cr = beta / R(2), cs = beta * beta / R(6);
  R r0_sq = R(0);
  for (int c = 0; c < fc.r0.size(); ++c) r0_sq += R(fc.r0[c]) * R(fc.r0[c]);
  return germ_block(Family::E, 3, cr * cr * r0_sq, sigma, tau, false, tau_zero) +
         germ_block(Family::G, 3, cr * cr * R(fc.sum_r_sq()), sigma, tau, false, tau_zero) +
         germ_block(Family::F, 4, cs * cs * R(fc.sum_s1_sq()), sigma, tau, false, tau_zero) +
         germ_block(Family::H, 3, cs * cs * R(fc.sum_s3_sq()), sigma, tau, false, tau_zero);
}

// --- quadrature path ---------------------------------------------------

// Order-3 jet at base z of a degree <= 3 polynomial, by binomial shift of
// each monomial; no jet products involved.
Jet poly_jet(const HarmonicMember& mem, const Vec4& z) {
  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  const JetTables& tab = jet_tables(3);
  Jet out = Jet::constant(3, 0.0);
  for (std::size_t t = 0; t < mem.exps.size(); ++t) {
    const auto& e = mem.exps[t];
    std::array<int, 4> f{};
    // enumerate all sub-exponents f <= e componentwise
    while (true) {
      double c = mem.coef[t];
      for (int i = 0; i < 4; ++i)
        c *= binom[e[i]][f[i]] * ipow(z[i], (long long)(e[i] - f[i]));
      out.c[tab.index(f)] += c;
      int i = 0;
      while (i < 4 && f[i] == e[i]) f[i++] = 0;
      if (i == 4) break;
      ++f[i];
    }
  }
  return out;
}

// Jets of all six members of one family at z, sharing the radial powers and
// the harmonic factor.  Members with zero Laplacian image still get full
// jets; their third derivatives trace to zero exactly.
void family_jets(const RadialFamily& fam, const HarmonicMember* harm, const Vec4& z,
                 std::array<Jet, 6>& out) {
  std::array<Jet, 4> xs;
  for (int i = 0; i < 4; ++i) xs[i] = Jet::variable(3, i, z[i]);
  Jet r2 = xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + xs[3] * xs[3];
  int emin = 0, emax = 0;
  bool any_log = false;
  std::array<int, 6> epow{};
  for (int l = 0; l < 6; ++l) {
    epow[l] = (fam.exponent[l] - fam.harmonic_degree) / 2;
    emin = std::min(emin, epow[l]);
    emax = std::max(emax, epow[l]);
    any_log = any_log || fam.has_log[l];
  }
  // power ladder r2^e for e in [emin, emax]
  std::array<Jet, 16> pow{};
  int off = -emin;
  pow[off] = Jet::constant(3, 1.0);
  for (int e = 1; e <= emax; ++e) pow[off + e] = pow[off + e - 1] * r2;
  if (emin < 0) {
    Jet r2inv = jet_recip(r2);
    for (int e = -1; e >= emin; --e) pow[off + e] = pow[off + e + 1] * r2inv;
  }
  Jet logr;
  if (any_log) logr = 0.5 * jet_log(r2);
  Jet hj;
  if (harm) hj = poly_jet(*harm, z);
  for (int l = 0; l < 6; ++l) {
    Jet m = pow[off + epow[l]];
    if (harm) m = m * hj;
    if (fam.has_log[l]) m = m * logr;
    out[l] = m;
  }
}

// One member's jet alone, skipping the ladder work the full sweep shares.
Jet member_jet(const RadialFamily& fam, const HarmonicMember* harm, int member,
               const Vec4& z) {
  std::array<Jet, 4> xs;
  for (int i = 0; i < 4; ++i) xs[i] = Jet::variable(3, i, z[i]);
  Jet r2 = xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2] + xs[3] * xs[3];
  int e = (fam.exponent[member] - fam.harmonic_degree) / 2;
  Jet m = Jet::constant(3, 1.0);
  if (e > 0)
    for (int k = 0; k < e; ++k) m = m * r2;
  else if (e < 0) {
    Jet r2inv = jet_recip(r2);
    for (int k = 0; k < -e; ++k) m = m * r2inv;
  }
  if (harm) m = m * poly_jet(*harm, z);
  if (fam.has_log[member]) m = m * (0.5 * jet_log(r2));
  return m;
}

// (grad D0 u)_a = sum_b D^3 u(a, b, b), from a derivative table.
void grad_delta_from_d3(const std::array<double, sym3_count>& d3, double out[4]) {
  for (int a = 0; a < 4; ++a) {
    double s = 0;
    for (int b = 0; b < 4; ++b) s += d3[sym3_index(a, b, b)];
    out[a] = s;
  }
}

void check_annulus(double sigma, double tau) {
  require(tau >= 0 && sigma > tau && std::isfinite(sigma),
          "bilinear quadrature: need finite 0 <= tau < sigma");
}

struct QuadPass {
  double value = 0;
  double mass = 0; // integral of |<grad D0 u, grad D0 v>|, sets the zero scale
};

QuadPass quad_pass(const JetField& u, const JetField& v, double sigma, double tau,
                   int n, const SphereRule& sph) {
  Quad1D rad = gauss_legendre(n, tau, sigma);
  PatchJet ju, jv;
  std::vector<double> shells(rad.size());
  double mass = 0;
  for (std::size_t ir = 0; ir < rad.size(); ++ir) {
    double r = rad.x[ir];
    double shell = 0, shell_abs = 0;
    for (std::size_t s = 0; s < sph.size(); ++s) {
      Vec4 z(r * sph.x1[s], r * sph.x2[s], r * sph.x3[s], r * sph.x4[s]);
      u(z, ju);
      v(z, jv);
      require(ju.m == jv.m, "bilinear quadrature: codomain mismatch");
      double dot = 0;
      for (int c = 0; c < ju.m; ++c) {
        double gu[4], gv[4];
        std::array<double, sym3_count> du, dv;
        for (int k = 0; k < sym3_count; ++k) {
          du[k] = ju.d3[k][c];
          dv[k] = jv.d3[k][c];
        }
        grad_delta_from_d3(du, gu);
        grad_delta_from_d3(dv, gv);
        for (int a = 0; a < 4; ++a) dot += gu[a] * gv[a];
      }
      shell += sph.w[s] * dot;
      shell_abs += sph.w[s] * std::fabs(dot);
    }
    shells[ir] = rad.w[ir] * r * r * r * shell;
    mass += rad.w[ir] * r * r * r * shell_abs;
  }
  return {pairwise_sum(shells), mass};
}

void check_refinement(const QuadPass& coarse, const QuadPass& fine, const char* what) {
  double scale = std::max(std::fabs(coarse.value), std::fabs(fine.value));
  double floor = 1e-12 * (1 + std::max(coarse.mass, fine.mass));
  if (std::fabs(coarse.value - fine.value) <= 1e-9 * scale + floor) return;
  std::ostringstream os;
  os << what << ": refinement disagreement (" << coarse.value << " vs "
     << fine.value << ")";
  fail(os.str());
}

} // namespace

double gram_prefactor(Family tag) {
  switch (tag) {
    case Family::E:
    case Family::F: return 16;
    case Family::G: return 128;
    case Family::H: return 48;
  }
  return 0;
}

double gram_primitive(Family tag, int i, int j, double r) {
  require(i >= 0 && i < 6 && j >= 0 && j < 6, "gram_primitive: member index in 0..5");
  require(r > 0, "gram_primitive: need r > 0");
  return term_value(printed_table(tag)[i * 6 + j], r);
}

double gram_primitive_raw(Family tag, int i, int j, double r) {
  require(i >= 0 && i < 6 && j >= 0 && j < 6, "gram_primitive_raw: member index in 0..5");
  require(r > 0, "gram_primitive_raw: need r > 0");
  const RawPieces& rp = raw_pieces(tag);
  return rp.wbulk * term_value(rp.bulk[i * 6 + j], r) +
         rp.wbnd * term_value(rp.bnd[i * 6 + j], r);
}

double GramMatrix::entry(int i, int j) const {
  require(i >= 0 && i < 6 && j >= 0 && j < 6, "GramMatrix: member index in 0..5");
  if (!valid[i][j]) {
    std::ostringstream os;
    os << "non-integrable pairing: family " << family_name(family) << " entry ("
       << i << "," << j << ") on (" << tau << ", " << sigma << ")";
    fail(os.str());
  }
  return M(i, j);
}

double GramMatrix::contract(const std::array<VecC, 6>& cu,
                            const std::array<VecC, 6>& cv) const {
  double acc = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double dot = 0;
      for (int c = 0; c < cu[i].size(); ++c) dot += cu[i][c] * cv[j][c];
      if (dot == 0) continue;
      acc += dot * entry(i, j);
    }
  return acc;
}

GramMatrix gram_matrix(Family tag, double sigma, double tau) {
  require(tau >= 0 && sigma > tau, "gram_matrix: need 0 <= tau < sigma");
  require(std::isfinite(tau), "gram_matrix: tau must be finite");
  bool sigma_inf = std::isinf(sigma);
  bool tau_zero = tau == 0;
  GramMatrix gm;
  gm.family = tag;
  gm.sigma = sigma;
  gm.tau = tau;
  double pref = gram_prefactor(tag) * vol_s3d();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double br;
      gm.valid[i][j] = bracket_entry(tag, i, j, sigma, tau, sigma_inf, tau_zero,
                                     false, br);
      gm.M(i, j) = gm.valid[i][j] ? pref * br : 0;
    }
  return gm;
}

JetField member_field(Family tag, int member, int harmonic_index) {
  require(member >= 0 && member < 6, "member_field: member index in 0..5");
  const RadialFamily& fam = radial_family(tag);
  const HarmonicMember* harm = nullptr;
  if (fam.harmonic_degree > 0) {
    const HarmonicBasis& basis = harmonic_basis(fam.harmonic_degree);
    require(harmonic_index >= 0 && harmonic_index < basis.size(),
            "member_field: harmonic index out of range");
    harm = &basis.members[harmonic_index];
  }
  return [&fam, harm, member](const Vec4& z, PatchJet& out) {
    Jet jet = member_jet(fam, harm, member, z);
    patch_from_jets(&jet, 1, out);
  };
}

JetField interpolant_field(const AnnulusInterpolant& w) {
  return [w](const Vec4& z, PatchJet& out) { eval_w_jets(w, z, out); };
}

double bilinear_quadrature(const JetField& u, const JetField& v, double sigma,
                           double tau, int n, int sphere_degree) {
  check_annulus(sigma, tau);
  require(n >= 4, "bilinear quadrature: need at least 4 radial points");
  const SphereRule sph = sphere_rule_for_exactness(sphere_degree);
  QuadPass coarse = quad_pass(u, v, sigma, tau, n, sph);
  QuadPass fine = quad_pass(u, v, sigma, tau, n + 8, sph);
  check_refinement(coarse, fine, "bilinear quadrature");
  return fine.value;
}

Eigen::Matrix<double, 6, 6> family_quadrature_matrix(Family tag, int harmonic_index,
                                                     double sigma, double tau, int n) {
  check_annulus(sigma, tau);
  require(n >= 4, "bilinear quadrature: need at least 4 radial points");
  const RadialFamily& fam = radial_family(tag);
  const HarmonicMember* harm = nullptr;
  if (fam.harmonic_degree > 0) {
    const HarmonicBasis& basis = harmonic_basis(fam.harmonic_degree);
    require(harmonic_index >= 0 && harmonic_index < basis.size(),
            "family_quadrature_matrix: harmonic index out of range");
    harm = &basis.members[harmonic_index];
  }
  const SphereRule sph = sphere_rule_for_exactness(6);
  auto pass = [&](int nr) {
    Quad1D rad = gauss_legendre(nr, tau, sigma);
    Eigen::Matrix<double, 6, 6> acc = Eigen::Matrix<double, 6, 6>::Zero();
    std::array<Jet, 6> jets;
    for (std::size_t ir = 0; ir < rad.size(); ++ir) {
      double r = rad.x[ir];
      Eigen::Matrix<double, 6, 6> shell = Eigen::Matrix<double, 6, 6>::Zero();
      for (std::size_t s = 0; s < sph.size(); ++s) {
        Vec4 z(r * sph.x1[s], r * sph.x2[s], r * sph.x3[s], r * sph.x4[s]);
        family_jets(fam, harm, z, jets);
        double g[6][4];
        for (int l = 0; l < 6; ++l) grad_delta_from_d3(jet_d3(jets[l]), g[l]);
        for (int i = 0; i < 6; ++i)
          for (int j = i; j < 6; ++j) {
            double dot = 0;
            for (int a = 0; a < 4; ++a) dot += g[i][a] * g[j][a];
            shell(i, j) += sph.w[s] * dot;
          }
      }
      acc += (rad.w[ir] * r * r * r) * shell;
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < i; ++j) acc(i, j) = acc(j, i);
    return acc;
  };
  Eigen::Matrix<double, 6, 6> coarse = pass(n), fine = pass(n + 8);
  double scale = std::max(coarse.cwiseAbs().maxCoeff(), fine.cwiseAbs().maxCoeff());
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (std::fabs(coarse(i, j) - fine(i, j)) > 1e-9 * scale + 1e-12) {
        std::ostringstream os;
        os << "family quadrature: refinement disagreement at (" << i << "," << j
           << ")";
        fail(os.str());
      }
  return fine;
}

SavingsReport energy_savings(const FormCoefficients& fc, double alpha, double beta,
                             double gamma) {
  require(alpha >= 0 && beta >= 0, "energy_savings: need nonnegative scales");
  require(gamma > 0 && gamma < 1, "energy_savings: need gamma in (0,1)");
  double root = std::sqrt(alpha);
  require(root < gamma, "energy_savings: collar needs sqrt(alpha) < gamma");
  const double inf = std::numeric_limits<double>::infinity();
  // end and disk straight from Gram calls; the printed savings formulas are
  // these same three (resp. four) diagonal entries
  GramMatrix g_end = gram_matrix(Family::G, inf, gamma);
  GramMatrix f_end = gram_matrix(Family::F, inf, gamma);
  GramMatrix h_end = gram_matrix(Family::H, inf, gamma);
  double cp = alpha / 2, cq = alpha * alpha / 6;
  SavingsReport rep;
  rep.end = cp * cp * fc.sum_p_sq() * g_end.entry(2, 2) +
            cq * cq * (fc.sum_q1_sq() * f_end.entry(1, 1) +
                       fc.sum_q3_sq() * h_end.entry(2, 2));
  GramMatrix e_disk = gram_matrix(Family::E, 1, 0);
  GramMatrix g_disk = gram_matrix(Family::G, 1, 0);
  GramMatrix f_disk = gram_matrix(Family::F, 1, 0);
  GramMatrix h_disk = gram_matrix(Family::H, 1, 0);
  double cr = beta / 2, cs = beta * beta / 6;
  double r0_sq = fc.r0.squaredNorm();
  rep.disk = cr * cr * (r0_sq * e_disk.entry(3, 3) + fc.sum_r_sq() * g_disk.entry(3, 3)) +
             cs * cs * (fc.sum_s1_sq() * f_disk.entry(4, 4) +
                        fc.sum_s3_sq() * h_disk.entry(3, 3));
  if (alpha > 0) {
    rep.collar_end = to_double(end_germ_energy(fc, f128(alpha), f128(gamma),
                                               f128(gamma) - f128(root), false));
    rep.collar_disk = to_double(disk_germ_energy(fc, f128(beta), f128(1) + f128(root),
                                                 f128(1), false));
  }
  return rep;
}

double interpolation_energy(const AnnulusInterpolant& w) {
  require(w.gamma > 0 && w.gamma < 1, "interpolation_energy: need gamma in (0,1)");
  return to_double(interp_energy(w, f128(1), f128(w.gamma)));
}

EnergyLedger energy_difference(const FormCoefficients& fc, double gamma, double t) {
  require(gamma > 0 && gamma < 1, "energy_difference: need gamma in (0,1)");
  double alpha = ipow(gamma, 8);
  double beta = t * alpha;
  AnnulusInterpolant w = solve_interpolant(fc, gamma, alpha, beta);

  f128 ga = f128(gamma), al = f128(alpha);
  f128 interp = interp_energy(w, f128(1), ga);
  f128 end = end_germ_energy(fc, al, f128(0), ga, true);
  f128 disk = disk_germ_energy(fc, f128(beta), f128(1), f128(0), true);

  EnergyLedger led;
  led.interp = to_double(interp);
  led.savings_end = to_double(end);
  led.savings_disk = to_double(disk);
  led.exact_combination = to_double((interp - end - disk) / f128(16));

  f128 g16 = ipow(ga, 16);
  f128 lead = (f128(18) * f128(fc.sum_p_sq()) - f128(12) * f128(t) * f128(fc.sum_pr())) *
              vol_s3<f128>() * g16;
  led.leading = to_double(lead);

  f128 root = sqrt(al);
  f128 inner_lo = ga - root;
  require(to_double(inner_lo) > 0, "energy_difference: collar needs sqrt(alpha) < gamma");
  f128 ce = contract_channel(Family::E, w.a, ga, inner_lo, false, false);
  f128 cd = contract_channel(Family::E, w.a, f128(1) + root, f128(1), false, false);
  for (int i = 0; i < 4; ++i) {
    ce += contract_channel(Family::F, w.b[i], ga, inner_lo, false, false);
    cd += contract_channel(Family::F, w.b[i], f128(1) + root, f128(1), false, false);
  }
  for (int i = 0; i < 9; ++i) {
    ce += contract_channel(Family::G, w.c[i], ga, inner_lo, false, false);
    cd += contract_channel(Family::G, w.c[i], f128(1) + root, f128(1), false, false);
  }
  for (int i = 0; i < 16; ++i) {
    ce += contract_channel(Family::H, w.d[i], ga, inner_lo, false, false);
    cd += contract_channel(Family::H, w.d[i], f128(1) + root, f128(1), false, false);
  }
  led.collar_end = to_double(ce);
  led.collar_disk = to_double(cd);
  return led;
}

} // namespace w4
