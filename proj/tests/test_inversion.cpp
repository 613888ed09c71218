#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "willmore4/inversion.hpp"

#include <cmath>
#include <memory>

using namespace w4;

namespace {

// graph germ through the origin with curvature at 0 (trace part nonzero)
PolynomialImmersion curved_germ() {
  std::vector<PolyTerm> terms;
  auto add = [&](std::array<int, 4> e, double c1, double c2) {
    PolyTerm t;
    t.exps = e;
    t.coeff = Eigen::Vector2d(c1, c2);
    terms.push_back(t);
  };
  add({2, 0, 0, 0}, 0.30, 0.00);
  add({0, 2, 0, 0}, 0.10, 0.15);
  add({0, 0, 1, 1}, -0.20, 0.00);
  add({1, 0, 1, 0}, 0.00, 0.10);
  add({0, 3, 0, 0}, 0.05, 0.00);
  add({1, 0, 0, 2}, 0.00, -0.06);
  return graph_immersion(2, terms);
}

std::shared_ptr<TranslatedPatch> offset_graph() {
  std::vector<PolyTerm> terms;
  auto add = [&](std::array<int, 4> e, double c1, double c2) {
    PolyTerm t;
    t.exps = e;
    t.coeff = Eigen::Vector2d(c1, c2);
    terms.push_back(t);
  };
  add({2, 0, 0, 0}, 0.30, 0.00);
  add({0, 1, 1, 0}, -0.20, 0.00);
  add({0, 0, 2, 0}, 0.10, 0.15);
  add({1, 1, 0, 1}, 0.05, 0.00);
  add({1, 0, 0, 1}, 0.00, 0.25);
  add({0, 2, 0, 0}, 0.00, 0.15);
  add({0, 0, 0, 3}, -0.10, -0.10);
  auto graph = std::make_shared<PolynomialImmersion>(graph_immersion(2, terms));
  VecA shift(6);
  shift << 0.3, 0.1, -0.2, 0.5, 1.1, 0.7;
  return std::make_shared<TranslatedPatch>(graph, shift);
}

const Vec4 sample_pts[] = {Vec4(0.2, -0.1, 0.3, 0.1),
                           Vec4(-0.4, 0.2, 0.1, -0.3),
                           Vec4(0.05, 0.35, -0.2, 0.15)};

} // namespace

TEST_CASE("unit sphere is fixed pointwise by inversion") {
  auto base = std::make_shared<StereographicSphere>(0);
  InvertedPatch inv(base);
  PatchJet a, b;
  const Vec4 pts[] = {Vec4(0.1, -0.3, 0.2, 0.4), Vec4(0, 0, 0, 0),
                      Vec4(0.7, 0.1, -0.5, 0.3), Vec4(-0.2, -0.2, 0.9, 0.1)};
  for (const Vec4& z : pts) {
    base->eval(z, a);
    inv.eval(z, b);
    CHECK((a.value - b.value).norm() <= 1e-12);
    CHECK((a.d1 - b.d1).norm() <= 1e-12);
    for (int s = 0; s < sym2_count; ++s)
      CHECK((a.d2[s] - b.d2[s]).norm() <= 1e-11);
    for (int s = 0; s < sym3_count; ++s)
      CHECK((a.d3[s] - b.d3[s]).norm() <= 1e-10);
  }
}

TEST_CASE("inversion is an involution and scales the metric by |Phi|^-4") {
  auto moved = offset_graph();
  auto inv = std::make_shared<InvertedPatch>(moved);
  InvertedPatch twice(inv);
  PatchJet pa, pb;
  for (const Vec4& z : sample_pts) {
    moved->eval(z, pa);
    twice.eval(z, pb);
    CHECK((pa.value - pb.value).norm() <= 1e-9);
    CHECK((pa.d1 - pb.d1).norm() <= 1e-9);
    for (int s = 0; s < sym2_count; ++s)
      CHECK((pa.d2[s] - pb.d2[s]).norm() <= 1e-9);
    for (int s = 0; s < sym3_count; ++s)
      CHECK((pa.d3[s] - pb.d3[s]).norm() <= 1e-8);

    inv->eval(z, pb);
    FundamentalData fa = fundamental_data(pa);
    FundamentalData fb = fundamental_data(pb);
    double c = pa.value.squaredNorm();
    Mat4 scaled = fa.g / (c * c);
    CHECK((fb.g - scaled).norm() <= 1e-9 * scaled.norm());
  }
}

TEST_CASE("mu and nu densities are pointwise conformally invariant") {
  auto moved = offset_graph();
  InvertedPatch inv(moved);
  PatchJet pa, pb;
  for (const Vec4& z : sample_pts) {
    moved->eval(z, pa);
    inv.eval(z, pb);
    EnergyDensity ea = energy_density(fundamental_data(pa));
    EnergyDensity eb = energy_density(fundamental_data(pb));
    CHECK(std::fabs(ea.mu - eb.mu) <= 1e-10 * std::max(1.0, std::fabs(ea.mu)));
    CHECK(std::fabs(ea.nu - eb.nu) <= 1e-10 * std::max(1.0, std::fabs(ea.nu)));
  }
}

TEST_CASE("flat germ residue is exactly -16 pi^2") {
  PolynomialImmersion flat = graph_immersion(1, {});
  const double target = -16.0 * pi<double>() * pi<double>();
  for (double r : {0.5, 0.1}) {
    double got = residue_integral(flat, r, 12);
    CHECK(std::fabs(got - target) <= 1e-12 * std::fabs(target));
  }
}

TEST_CASE("curved germ residue deviates at second order and extrapolates") {
  PolynomialImmersion germ = curved_germ();
  const double target = -16.0 * pi<double>() * pi<double>();

  // log-log slope of the deviation: clean r^2
  double e1 = residue_integral(germ, 0.02, 14) - target;
  double e2 = residue_integral(germ, 0.04, 14) - target;
  double e3 = residue_integral(germ, 0.08, 14) - target;
  CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.02));
  double slope = std::log(std::fabs(e3 / e1)) / std::log(4.0);
  CHECK(std::fabs(slope - 2.0) <= 0.2);

  ResidueLimit lim = residue_limit(germ, 0.08, 14);
  CHECK(std::fabs(lim.value - target) <= 1e-6 * std::fabs(target));
  CHECK(lim.error_estimate <= 1e-4 * std::fabs(target));
}

TEST_CASE("inversion energy ledger converges as the inner radius shrinks") {
  PolynomialImmersion germ = curved_germ();
  EnergyIdentityReport rep =
      verify_energy_identity(germ, 0.3, 0.7, {0.3, 0.2, 0.1}, 0.4, 14);

  // residual of k is the O(r^2) tail of the boundary terms
  double d0 = std::fabs(rep.k[1] - rep.k[0]);
  double d1 = std::fabs(rep.k[2] - rep.k[1]);
  CHECK(d1 <= 0.5 * d0);

  const double target = -16.0 * pi<double>() * pi<double>();
  CHECK(std::fabs(rep.flux[2] - target) < std::fabs(rep.flux[0] - target));
  CHECK(std::fabs(rep.flux[2] - target) <= 0.05 * std::fabs(target));
  CHECK(std::fabs(rep.hatflux[2]) < std::fabs(rep.hatflux[0]));

  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    CHECK(std::fabs(rep.mu_diff[i]) <= 1e-8);
    CHECK(std::fabs(rep.nu_diff[i]) <= 1e-8);
    double total = rep.diff[i] + 0.3 * rep.mu_diff[i] + 0.7 * rep.nu_diff[i];
    CHECK(rep.total_diff[i] == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("hemisphere through the origin inverts to a flat plane") {
  auto cap = std::make_shared<SphereGraphCap>();
  InvertedPatch inv(cap);

  PatchJet pj;
  for (const Vec4& z : sample_pts) {
    inv.eval(z, pj);
    CHECK(std::fabs(pj.value[4] - 0.5) <= 1e-12);
    EnergyDensity e = energy_density(fundamental_data(pj));
    CHECK(std::fabs(e.gr) <= 1e-10);
  }

  // ledger limit: flat exterior leaves 8 pi^2 minus the full cap energy
  const int n = 12;
  const double r1 = 0.4;
  EnergyIdentityReport rep =
      verify_energy_identity(*cap, 0, 0, {0.2, 0.1, 0.05}, r1, n);
  double ball = integrate_energy(*cap, 0, r1, n).gr;
  double limit = 8.0 * pi<double>() * pi<double>() - ball;
  double incr = std::fabs(rep.k[2] - rep.k[1]);
  CHECK(std::fabs(rep.k[2] - limit) <= std::max(4.0 * incr, 1e-8));
  for (double h : rep.hatflux) CHECK(std::fabs(h) <= 1e-9);
}

TEST_CASE("far field expansion of an inverted graph germ") {
  auto run = [](const PolynomialImmersion& germ) {
    ExpansionReport rep =
        expansion_at_infinity(germ, {10.0, 100.0, 1000.0}, 8);
    for (int i = 0; i < 4; ++i) {
      CAPTURE(i);
      CAPTURE(rep.slopes[i]);
      CHECK(std::fabs(rep.slopes[i] + double(i + 2)) <= 0.1);
      CHECK(rep.rem[i].back() < 1e-3 * rep.rem[i].front());
    }
  };

  std::vector<PolyTerm> terms;
  auto add = [&](std::array<int, 4> e, double c1, double c2) {
    PolyTerm t;
    t.exps = e;
    t.coeff = Eigen::Vector2d(c1, c2);
    terms.push_back(t);
  };

  // trace-free second order, no third order
  add({2, 0, 0, 0}, 0.30, 0.00);
  add({0, 2, 0, 0}, -0.30, 0.00);
  add({0, 0, 2, 0}, 0.00, 0.20);
  add({0, 0, 0, 2}, 0.00, -0.20);
  run(graph_immersion(2, terms));

  // generic second and third order plus a quartic term in the remainder
  terms.clear();
  add({2, 0, 0, 0}, 0.30, 0.00);
  add({0, 1, 1, 0}, -0.20, 0.15);
  add({0, 0, 0, 2}, 0.10, 0.00);
  add({1, 1, 0, 0}, 0.00, 0.15);
  add({3, 0, 0, 0}, 0.05, 0.00);
  add({0, 1, 1, 1}, -0.08, 0.00);
  add({0, 3, 0, 0}, 0.00, 0.04);
  add({2, 2, 0, 0}, 0.03, 0.00);
  run(graph_immersion(2, terms));
}
