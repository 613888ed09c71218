#include "willmore4/pipeline.hpp"

#include "willmore4/bilinear.hpp"

#include <cmath>
#include <thread>

namespace w4 {
namespace {

double tuple_scale(const QuadForm& q) {
  double s = 0;
  for (const Mat4& m : q.comp) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

TracelessFormTuple as_tuple(const QuadForm& q) {
  return make_form_tuple(std::vector<Mat4>(q.comp.begin(), q.comp.end()));
}

double frobenius_pairing(const QuadForm& a, const QuadForm& b) {
  double s = 0;
  for (int c = 0; c < a.codim(); ++c)
    s += (a.comp[c].array() * b.comp[c].array()).sum();
  return s;
}

}  // namespace

QuadForm GermData::traceless() const {
  QuadForm out = P;
  for (Mat4& m : out.comp) m -= (m.trace() / 4) * Mat4::Identity();
  return out;
}

GermData extract_germ_data(const ImmersionPatch& patch) {
  const int n = patch.ambient_dim();
  require(n > 4, "graph germ needs at least one graph component");
  const int m = n - 4;
  PatchJet jet;
  patch.eval(Vec4::Zero(), jet);

  require(jet.value.cwiseAbs().maxCoeff() <= 1e-12,
          "graph germ must pass through the origin");
  MatA4 d1 = jet.d1;
  for (int a = 0; a < 4; ++a) d1(a, a) -= 1;
  require(d1.topRows(4).cwiseAbs().maxCoeff() <= 1e-12,
          "graph germ must use the identity chart on the first four components");
  require(jet.d1.bottomRows(m).cwiseAbs().maxCoeff() <= 1e-12,
          "graph germ must have vanishing gradient at the origin");
  for (const VecA& v : jet.d2)
    require(v.head(4).cwiseAbs().maxCoeff() <= 1e-12,
            "graph germ must be flat in the chart components");
  for (const VecA& v : jet.d3)
    require(v.head(4).cwiseAbs().maxCoeff() <= 1e-12,
            "graph germ must be flat in the chart components");

  GermData g;
  g.P.comp.resize(m);
  g.Q.comp.resize(m);
  for (int c = 0; c < m; ++c) {
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        g.P.comp[c](a, b) = g.P.comp[c](b, a) = jet.d2[sym2_index(a, b)][4 + c];
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int d = b; d < 4; ++d)
          g.Q.comp[c][sym3_index(a, b, d)] = jet.d3[sym3_index(a, b, d)][4 + c];
  }
  g.trace_removed =
      g.P.trace().cwiseAbs().maxCoeff() > 1e-12 * (1 + tuple_scale(g.P));
  return g;
}

GermData rotate_germ(const GermData& g, const Mat4& S,
                     const Eigen::MatrixXd& T) {
  const int m = g.P.codim();
  require(T.rows() == m && T.cols() == m,
          "mixing matrix does not match the germ codimension");
  GermData out;
  out.P.comp.assign(m, Mat4::Zero());
  out.Q.comp.assign(m, {});
  for (int c = 0; c < m; ++c) {
    for (int j = 0; j < m; ++j)
      out.P.comp[c] += T(c, j) * (S * g.P.comp[j] * S.transpose());
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int d = b; d < 4; ++d) {
          double acc = 0;
          for (int a2 = 0; a2 < 4; ++a2)
            for (int b2 = 0; b2 < 4; ++b2)
              for (int d2 = 0; d2 < 4; ++d2) {
                double w = S(a, a2) * S(b, b2) * S(d, d2);
                if (w == 0) continue;
                for (int j = 0; j < m; ++j)
                  acc += T(c, j) * w * g.Q.comp[j][sym3_index(a2, b2, d2)];
              }
          out.Q.comp[c][sym3_index(a, b, d)] = acc;
        }
  }
  out.trace_removed = g.trace_removed;
  return out;
}

double choose_t(const FormCoefficients& fc) {
  double psq = fc.sum_p_sq();
  require(psq > 1e-24, "no traceless quadratic data to drive the reduction");
  double pr = fc.sum_pr();
  require(pr > 0, "nonpositive pairing: apply rotation module first");
  return 3 * psq / pr;
}

MarginReport run_connected_sum(const ConnectedSumSpec& spec) {
  require(!spec.gamma_grid.empty(), "gamma grid is empty");
  for (size_t i = 0; i < spec.gamma_grid.size(); ++i) {
    double g = spec.gamma_grid[i];
    require(g < 1, "gamma must lie below 1");
    require(g >= 0.02,
            "gamma below 0.02 drives alpha = gamma^8 below extended-precision "
            "resolution");
    if (i > 0)
      require(g < spec.gamma_grid[i - 1], "gamma grid must strictly decrease");
  }
  require(spec.germ1.P.codim() == spec.germ2.P.codim(),
          "germs have different codimension");

  MarginReport rep;
  rep.mu = spec.mu;
  rep.nu = spec.nu;
  rep.rotated = false;
  rep.rotation.S = Mat4::Identity();
  rep.rotation.T = Eigen::MatrixXd::Identity(spec.germ1.P.codim(),
                                             spec.germ1.P.codim());
  rep.rotation.pairing = 0;
  rep.rotation.trace_norm = 0;

  QuadForm p_ring = spec.germ1.traceless();
  GermData germ2 = spec.germ2;
  FormCoefficients fc =
      make_form_coefficients(p_ring, spec.germ1.Q, germ2.P, germ2.Q);

  // Align germ2 when the traceless pairing cannot drive the cross term.
  // The search pairs R against P, so conjugating germ2 by its (S, T) makes
  // <P_ring, R_ring> equal to the returned pairing, which is positive.
  QuadForm r_ring = germ2.traceless();
  bool nonzero_pair = tuple_scale(p_ring) > 1e-12 && tuple_scale(r_ring) > 1e-12;
  if (fc.sum_pr() <= 0 && nonzero_pair) {
    rep.rotation = search_S(as_tuple(r_ring), as_tuple(p_ring), spec.restarts,
                            spec.seed);
    germ2 = rotate_germ(germ2, rep.rotation.S, rep.rotation.T);
    fc = make_form_coefficients(p_ring, spec.germ1.Q, germ2.P, germ2.Q);
    rep.rotated = true;
  }

  rep.t = spec.auto_t ? choose_t(fc) : spec.t;

  rep.rows.resize(spec.gamma_grid.size());
  auto fill_row = [&](size_t i) {
    double gamma = spec.gamma_grid[i];
    EnergyLedger led = energy_difference(fc, gamma, rep.t);
    MarginRow& row = rep.rows[i];
    row.gamma = gamma;
    row.alpha = ipow(gamma, 8);
    row.beta = rep.t * row.alpha;
    row.exact_combination = led.exact_combination;
    row.leading = led.leading;
    row.ratio = led.leading != 0 ? led.exact_combination / led.leading : 0;
    row.sign = (led.exact_combination > 0) - (led.exact_combination < 0);
  };
  std::vector<std::thread> pool;
  for (size_t i = 0; i < rep.rows.size(); ++i) pool.emplace_back(fill_row, i);
  for (std::thread& th : pool) th.join();

  const MarginRow& last = rep.rows.back();
  rep.reduction_achieved = last.leading < 0 && last.exact_combination < 0;
  return rep;
}

}  // namespace w4
