#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "willmore4/bilinear.hpp"
#include "willmore4/pipeline.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace w4;

namespace {

double V() { return vol_s3d(); }

int multiplicity(int a, int b, int d) {
  if (a == b && b == d) return 1;
  if (a == b || b == d || a == d) return 3;
  return 6;
}

// graph patch for phi(z) = 1/2 P(z,z) + 1/6 Q(z,z,z) + extra terms
PolynomialImmersion germ_patch(const QuadForm& P, const CubicForm& Q,
                               std::vector<PolyTerm> extra = {}) {
  const int m = P.codim();
  std::vector<PolyTerm> terms = std::move(extra);
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      PolyTerm t;
      t.exps = {0, 0, 0, 0};
      t.exps[a] += 1;
      t.exps[b] += 1;
      t.coeff.setZero(m);
      for (int c = 0; c < m; ++c)
        t.coeff[c] = P.comp[c](a, b) * (a == b ? 0.5 : 1.0);
      terms.push_back(t);
    }
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      for (int d = b; d < 4; ++d) {
        PolyTerm t;
        t.exps = {0, 0, 0, 0};
        t.exps[a] += 1;
        t.exps[b] += 1;
        t.exps[d] += 1;
        t.coeff.setZero(m);
        for (int c = 0; c < m; ++c)
          t.coeff[c] =
              Q.comp[c][sym3_index(a, b, d)] * multiplicity(a, b, d) / 6.0;
        terms.push_back(t);
      }
  return graph_immersion(m, terms);
}

Mat4 random_traceless(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat4 m;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) m(a, b) = m(b, a) = gauss(rng);
  m -= (m.trace() / 4) * Mat4::Identity();
  return m;
}

GermData sample_germ(std::mt19937_64& rng, int m, double trace0 = 0) {
  std::normal_distribution<double> gauss;
  GermData g;
  g.P.comp.resize(m);
  g.Q.comp.assign(m, {});
  for (int c = 0; c < m; ++c) {
    g.P.comp[c] = random_traceless(rng);
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int d = b; d < 4; ++d)
          g.Q.comp[c][sym3_index(a, b, d)] = 0.3 * gauss(rng);
  }
  g.P.comp[0] += (trace0 / 4) * Mat4::Identity();
  g.trace_removed = trace0 != 0;
  return g;
}

double frob(const QuadForm& a, const QuadForm& b) {
  double s = 0;
  for (int c = 0; c < a.codim(); ++c)
    s += (a.comp[c].array() * b.comp[c].array()).sum();
  return s;
}

}  // namespace

TEST_CASE("germ extraction reads the derivative tables") {
  std::mt19937_64 rng(3);
  GermData src = sample_germ(rng, 2, 1.6);
  PolynomialImmersion patch = germ_patch(src.P, src.Q);
  GermData got = extract_germ_data(patch);

  for (int c = 0; c < 2; ++c) {
    CHECK((got.P.comp[c] - src.P.comp[c]).cwiseAbs().maxCoeff() <= 1e-13);
    for (int s = 0; s < sym3_count; ++s)
      CHECK(std::fabs(got.Q.comp[c][s] - src.Q.comp[c][s]) <= 1e-13);
  }
  CHECK(got.trace_removed);
  CHECK(std::fabs(got.traceless().comp[0].trace()) <= 1e-13);
  CHECK((got.traceless().comp[1] - src.P.comp[1]).cwiseAbs().maxCoeff() <=
        1e-13);

  // purely traceless germ: nothing split off
  GermData flat = sample_germ(rng, 2);
  GermData got2 = extract_germ_data(germ_patch(flat.P, flat.Q));
  CHECK(!got2.trace_removed);

  // quartic tails are invisible to the jets at the origin
  PolyTerm tail;
  tail.exps = {4, 0, 0, 0};
  tail.coeff.setZero(2);
  tail.coeff[0] = 7.0;
  GermData got3 = extract_germ_data(germ_patch(src.P, src.Q, {tail}));
  for (int c = 0; c < 2; ++c)
    CHECK((got3.P.comp[c] - src.P.comp[c]).cwiseAbs().maxCoeff() <= 1e-13);

  // precondition violations
  PolyTerm off;
  off.exps = {0, 0, 0, 0};
  off.coeff.setZero(2);
  off.coeff[0] = 0.1;
  CHECK_THROWS_WITH_AS(extract_germ_data(germ_patch(src.P, src.Q, {off})),
                       "graph germ must pass through the origin",
                       std::runtime_error);
  PolyTerm lin;
  lin.exps = {1, 0, 0, 0};
  lin.coeff.setZero(2);
  lin.coeff[1] = 0.1;
  CHECK_THROWS_WITH_AS(extract_germ_data(germ_patch(src.P, src.Q, {lin})),
                       "graph germ must have vanishing gradient at the origin",
                       std::runtime_error);
}

TEST_CASE("germ rotation matches evaluation of the transformed graph") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  GermData g = sample_germ(rng, 2, 0.8);

  // S from a quaternion pair times a reflection, T a rotation by an angle
  Vec4 q, p;
  for (int i = 0; i < 4; ++i) q[i] = gauss(rng);
  for (int i = 0; i < 4; ++i) p[i] = gauss(rng);
  q.normalize();
  p.normalize();
  Mat4 S;
  S << q[0], -q[1], -q[2], -q[3],
       q[1],  q[0], -q[3],  q[2],
       q[2],  q[3],  q[0], -q[1],
       q[3], -q[2],  q[1],  q[0];
  Mat4 right;
  right << p[0], -p[1], -p[2], -p[3],
           p[1],  p[0],  p[3], -p[2],
           p[2], -p[3],  p[0],  p[1],
           p[3],  p[2], -p[1],  p[0];
  S = S * right.transpose();
  S.col(2) = -S.col(2);
  REQUIRE((S * S.transpose() - Mat4::Identity()).cwiseAbs().maxCoeff() <=
          1e-12);
  double ang = 0.7;
  Eigen::MatrixXd T(2, 2);
  T << std::cos(ang), std::sin(ang), -std::sin(ang), std::cos(ang);

  GermData out = rotate_germ(g, S, T);
  for (int trial = 0; trial < 20; ++trial) {
    Vec4 u;
    for (int i = 0; i < 4; ++i) u[i] = gauss(rng);
    Vec4 v = S.transpose() * u;
    VecC want2 = T * g.P.eval(v, v);
    VecC want3 = T * g.Q.eval(v, v, v);
    CHECK((out.P.eval(u, u) - want2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((out.Q.eval(u, u, u) - want3).cwiseAbs().maxCoeff() <= 1e-12);
  }

  // the harmonic pairing coefficient is the Frobenius pairing over 12
  GermData g1 = sample_germ(rng, 2);
  FormCoefficients fc =
      make_form_coefficients(g1.traceless(), g1.Q, out.P, out.Q);
  double want = frob(g1.traceless(), out.traceless()) / 12.0;
  CHECK(std::fabs(fc.sum_pr() - want) <= 1e-10 * (1 + std::fabs(want)));
}

TEST_CASE("t selection doubles the break-even value") {
  std::mt19937_64 rng(9);
  GermData g = sample_germ(rng, 2);
  FormCoefficients fc = make_form_coefficients(g.traceless(), g.Q,
                                               g.traceless(), g.Q);
  double t = choose_t(fc);
  CHECK(t == doctest::Approx(3.0).epsilon(1e-12));

  // at the break-even t the gamma^16 coefficient cancels
  EnergyLedger led = energy_difference(fc, 0.1, 1.5);
  double scale = 18 * V() * ipow(0.1, 16) * fc.sum_p_sq();
  CHECK(std::fabs(led.leading) <= 1e-12 * scale);

  // anti-aligned pair: the cross term cannot be driven
  GermData neg = g;
  for (Mat4& m : neg.P.comp) m = -m;
  FormCoefficients bad = make_form_coefficients(g.traceless(), g.Q,
                                                neg.traceless(), neg.Q);
  CHECK_THROWS_WITH_AS(choose_t(bad),
                       "nonpositive pairing: apply rotation module first",
                       std::runtime_error);

  // no traceless quadratic data: nothing to reduce with
  GermData zero;
  zero.P.comp.assign(2, Mat4::Zero());
  zero.Q.comp.assign(2, {});
  zero.trace_removed = false;
  FormCoefficients none = make_form_coefficients(zero.traceless(), zero.Q,
                                                 g.traceless(), g.Q);
  CHECK_THROWS_WITH_AS(choose_t(none),
                       "no traceless quadratic data to drive the reduction",
                       std::runtime_error);
}

TEST_CASE("connected sum of aligned germs") {
  std::mt19937_64 rng(13);
  GermData g = sample_germ(rng, 2, 0.9);

  ConnectedSumSpec spec;
  spec.germ1 = g;
  spec.germ2 = g;
  MarginReport rep = run_connected_sum(spec);

  CHECK(!rep.rotated);
  CHECK(rep.t == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rep.rows.size() == 3);

  FormCoefficients fc =
      make_form_coefficients(g.traceless(), g.Q, g.P, g.Q);
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const MarginRow& row = rep.rows[i];
    CHECK(row.gamma == spec.gamma_grid[i]);
    CHECK(row.alpha == ipow(row.gamma, 8));
    CHECK(row.beta == rep.t * row.alpha);
    double lead = (18 - 12 * rep.t) * V() * ipow(row.gamma, 16) * fc.sum_p_sq();
    CHECK(std::fabs(row.leading / lead - 1) <= 1e-12);
    CHECK(row.leading < 0);
    CHECK(row.exact_combination < 0);
    CHECK(row.sign == -1);

    // from-scratch recomputation through the modules
    EnergyLedger led = energy_difference(fc, row.gamma, rep.t);
    CHECK(std::fabs(row.exact_combination - led.exact_combination) <=
          1e-12 * std::fabs(led.exact_combination));
    CHECK(std::fabs(row.ratio - led.exact_combination / led.leading) <= 1e-12);
  }

  // the ratio converges to 1 with the deviation shrinking by 1.5x per halving
  double d0 = std::fabs(rep.rows[0].ratio - 1);
  double d1 = std::fabs(rep.rows[1].ratio - 1);
  double d2 = std::fabs(rep.rows[2].ratio - 1);
  CAPTURE(d0);
  CAPTURE(d1);
  CAPTURE(d2);
  CHECK(d1 <= d0 / 1.5);
  CHECK(d2 <= d1 / 1.5);
  CHECK(d2 <= 0.2);
  CHECK(rep.reduction_achieved);

  // determinism: identical spec reproduces the report bit for bit
  MarginReport rep2 = run_connected_sum(spec);
  CHECK(rep2.t == rep.t);
  CHECK(rep2.reduction_achieved == rep.reduction_achieved);
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep2.rows[i].exact_combination == rep.rows[i].exact_combination);
    CHECK(rep2.rows[i].leading == rep.rows[i].leading);
    CHECK(rep2.rows[i].ratio == rep.rows[i].ratio);
  }

  // t = 0 keeps only the positive block: no reduction
  ConnectedSumSpec flat = spec;
  flat.auto_t = false;
  flat.t = 0;
  MarginReport rep0 = run_connected_sum(flat);
  for (const MarginRow& row : rep0.rows) {
    CHECK(row.leading > 0);
    CHECK(row.sign == 1);
  }
  CHECK(!rep0.reduction_achieved);
}

TEST_CASE("connected sum rotates an anti-aligned germ") {
  std::mt19937_64 rng(17);
  GermData g = sample_germ(rng, 2);
  GermData neg = g;
  for (Mat4& m : neg.P.comp) m = -m;

  ConnectedSumSpec spec;
  spec.germ1 = g;
  spec.germ2 = neg;
  spec.gamma_grid = {0.1, 0.05};
  spec.restarts = 16;
  spec.seed = 4;
  MarginReport rep = run_connected_sum(spec);

  CHECK(rep.rotated);
  CHECK(rep.rotation.pairing > 0);
  CHECK(rep.t > 0);

  // the rotation result reproduces the alignment the pipeline used
  GermData aligned = rotate_germ(neg, rep.rotation.S, rep.rotation.T);
  FormCoefficients fc =
      make_form_coefficients(g.traceless(), g.Q, aligned.P, aligned.Q);
  CHECK(fc.sum_pr() > 0);
  CHECK(std::fabs(fc.sum_pr() - rep.rotation.pairing / 12.0) <=
        1e-10 * (1 + rep.rotation.pairing));
  CHECK(rep.t == doctest::Approx(3 * fc.sum_p_sq() / fc.sum_pr()).epsilon(1e-12));

  for (const MarginRow& row : rep.rows) {
    EnergyLedger led = energy_difference(fc, row.gamma, rep.t);
    CHECK(std::fabs(row.exact_combination - led.exact_combination) <=
          1e-12 * std::fabs(led.exact_combination));
    CHECK(row.leading < 0);
  }
  CHECK(rep.rows.back().exact_combination < 0);
  CHECK(rep.reduction_achieved);
}

TEST_CASE("spec validation and degenerate inputs") {
  std::mt19937_64 rng(21);
  GermData g = sample_germ(rng, 2);

  ConnectedSumSpec spec;
  spec.germ1 = g;
  spec.germ2 = g;

  ConnectedSumSpec bad = spec;
  bad.gamma_grid = {};
  CHECK_THROWS_WITH_AS(run_connected_sum(bad), "gamma grid is empty",
                       std::runtime_error);
  bad.gamma_grid = {1.2};
  CHECK_THROWS_WITH_AS(run_connected_sum(bad), "gamma must lie below 1",
                       std::runtime_error);
  bad.gamma_grid = {0.01};
  CHECK_THROWS_WITH_AS(run_connected_sum(bad),
                       "gamma below 0.02 drives alpha = gamma^8 below "
                       "extended-precision resolution",
                       std::runtime_error);
  bad.gamma_grid = {0.05, 0.1};
  CHECK_THROWS_WITH_AS(run_connected_sum(bad),
                       "gamma grid must strictly decrease", std::runtime_error);

  ConnectedSumSpec mismatched = spec;
  mismatched.germ2 = sample_germ(rng, 3);
  CHECK_THROWS_WITH_AS(run_connected_sum(mismatched),
                       "germs have different codimension", std::runtime_error);

  // zero germs: every row vanishes, no reduction, and auto t has no driver
  GermData zero;
  zero.P.comp.assign(2, Mat4::Zero());
  zero.Q.comp.assign(2, {});
  zero.trace_removed = false;
  ConnectedSumSpec empty;
  empty.germ1 = zero;
  empty.germ2 = zero;
  empty.auto_t = false;
  empty.t = 2;
  empty.gamma_grid = {0.1};
  MarginReport rep = run_connected_sum(empty);
  CHECK(rep.rows[0].exact_combination == 0.0);
  CHECK(rep.rows[0].leading == 0.0);
  CHECK(rep.rows[0].ratio == 0.0);
  CHECK(rep.rows[0].sign == 0);
  CHECK(!rep.reduction_achieved);
  CHECK(!rep.rotated);

  ConnectedSumSpec degenerate = empty;
  degenerate.auto_t = true;
  CHECK_THROWS_WITH_AS(run_connected_sum(degenerate),
                       "no traceless quadratic data to drive the reduction",
                       std::runtime_error);
}
