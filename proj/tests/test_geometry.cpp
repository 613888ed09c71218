#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "willmore4/geometry.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace w4;

namespace {

// codim-2 polynomial graph with quadratic and cubic structure
std::shared_ptr<PolynomialImmersion> sample_graph(double scale = 1.0) {
  auto term = [&](std::array<int, 4> e, double c0, double c1) {
    PolyTerm t;
    t.exps = e;
    t.coeff.resize(2);
    t.coeff << scale * c0, scale * c1;
    return t;
  };
  std::vector<PolyTerm> phi = {
      term({2, 0, 0, 0}, 0.30, 0.00), term({0, 1, 1, 0}, -0.20, 0.00),
      term({0, 0, 2, 0}, 0.10, 0.15), term({1, 1, 0, 1}, 0.05, 0.00),
      term({1, 0, 0, 1}, 0.00, 0.25), term({0, 2, 0, 0}, 0.00, 0.15),
      term({0, 0, 0, 3}, -0.10, -0.10)};
  return std::make_shared<PolynomialImmersion>(graph_immersion(2, phi));
}

} // namespace

TEST_CASE("unit sphere is umbilic with |H| = 1 and gr density 3 sqrt(g)") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int chart = 0; chart < 2; ++chart) {
    StereographicSphere s(chart);
    PatchJet pj;
    for (int trial = 0; trial < 10; ++trial) {
      Vec4 z(u(rng), u(rng), u(rng), u(rng));
      s.eval(z, pj);
      CHECK(std::fabs(pj.value.norm() - 1.0) < 1e-14);
      FundamentalData f = fundamental_data(pj);
      CHECK(f.h_sq == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::fabs(f.lring_sq) < 1e-12);
      CHECK(std::fabs(f.lring2_sq) < 1e-12);
      CHECK(std::fabs(f.dh_perp_sq) < 1e-10);
      CHECK(f.hl_sq == doctest::Approx(4.0).epsilon(1e-12));
      EnergyDensity d = energy_density(f);
      CHECK(d.gr == doctest::Approx(3.0 * f.sqrtg).epsilon(1e-10));
    }
  }

  SphereGraphCap cap;
  PatchJet pj;
  cap.eval(Vec4(0.2, -0.1, 0.3, 0.15), pj);
  FundamentalData f = fundamental_data(pj);
  CHECK(f.h_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(f.lring_sq) < 1e-12);
  CHECK(std::fabs(f.dh_perp_sq) < 1e-10);
}

TEST_CASE("round sphere energy, area, and q4 under the two-chart atlas") {
  EnergyBreakdown e = round_sphere_energy(16);
  double want = 8 * M_PI * M_PI;
  CHECK(e.gr == doctest::Approx(want).epsilon(1e-9));
  CHECK(e.area == doctest::Approx(want / 3.0).epsilon(1e-9));
  CHECK(e.q4 == doctest::Approx(2 * want).epsilon(1e-9));
  CHECK(std::fabs(e.mu) < 1e-10);
  CHECK(std::fabs(e.nu) < 1e-10);
}

TEST_CASE("q4 density is twice the gr density pointwise") {
  auto g = sample_graph();
  CHECK(q4_identity_mismatch(*g, 0.0, 1.0, 8) < 1e-11);
  StereographicSphere s(0);
  CHECK(q4_identity_mismatch(s, 0.0, 1.0, 8) < 1e-11);
}

TEST_CASE("energies are invariant under ambient scaling, rotation, shift") {
  auto base = sample_graph();
  EnergyBreakdown e0 = integrate_energy(*base, 0.0, 0.8, 10);

  EnergyBreakdown es = integrate_energy(ScaledPatch(base, 2.75), 0.0, 0.8, 10);
  CHECK(es.gr == doctest::Approx(e0.gr).epsilon(1e-12));
  CHECK(es.mu == doctest::Approx(e0.mu).epsilon(1e-12));
  CHECK(es.nu == doctest::Approx(e0.nu).epsilon(1e-12));

  // a rotation mixing tangent and normal directions
  MatAA q = MatAA::Identity(6, 6);
  double th = 0.7;
  q(0, 0) = std::cos(th);
  q(0, 4) = -std::sin(th);
  q(4, 0) = std::sin(th);
  q(4, 4) = std::cos(th);
  double ph = -0.4;
  q(2, 2) = std::cos(ph);
  q(2, 5) = -std::sin(ph);
  q(5, 2) = std::sin(ph);
  q(5, 5) = std::cos(ph);
  EnergyBreakdown er = integrate_energy(RotatedPatch(base, q), 0.0, 0.8, 10);
  CHECK(er.gr == doctest::Approx(e0.gr).epsilon(1e-12));
  CHECK(er.mu == doctest::Approx(e0.mu).epsilon(1e-12));
  CHECK(er.nu == doctest::Approx(e0.nu).epsilon(1e-12));

  VecA shift(6);
  shift << 1, -2, 3, 0.5, -0.25, 4;
  EnergyBreakdown et = integrate_energy(TranslatedPatch(base, shift), 0.0, 0.8, 10);
  CHECK(et.gr == doctest::Approx(e0.gr).epsilon(1e-13));
}

TEST_CASE("energy is invariant under orthogonal reparametrization") {
  auto base = sample_graph();
  // rotation in the (1,2) and (3,4) coordinate planes
  Mat4 a = Mat4::Identity();
  double th = 0.6;
  a(0, 0) = std::cos(th);
  a(0, 1) = -std::sin(th);
  a(1, 0) = std::sin(th);
  a(1, 1) = std::cos(th);
  double ph = 1.1;
  a(2, 2) = std::cos(ph);
  a(2, 3) = -std::sin(ph);
  a(3, 2) = std::sin(ph);
  a(3, 3) = std::cos(ph);

  EnergyBreakdown e0 = integrate_energy(*base, 0.0, 0.8, 26);
  EnergyBreakdown e1 = integrate_energy(ReparametrizedPatch(base, a), 0.0, 0.8, 26);
  CHECK(e1.gr == doctest::Approx(e0.gr).epsilon(1e-8));
  CHECK(e1.mu == doctest::Approx(e0.mu).epsilon(1e-8));
  CHECK(e1.nu == doctest::Approx(e0.nu).epsilon(1e-8));
  CHECK(e1.area == doctest::Approx(e0.area).epsilon(1e-8));
}

TEST_CASE("quadrature refinement agrees") {
  auto g = sample_graph();
  EnergyBreakdown c = integrate_energy(*g, 0.0, 0.6, 16);
  EnergyBreakdown f = integrate_energy(*g, 0.0, 0.6, 24);
  CHECK(c.gr == doctest::Approx(f.gr).epsilon(2e-6));
  CHECK(c.mu == doctest::Approx(f.mu).epsilon(2e-6));
  CHECK(c.nu == doctest::Approx(f.nu).epsilon(2e-6));
}

TEST_CASE("surface Laplacian reproduces sphere eigenfunctions") {
  // On the unit 4-sphere, a degree-h harmonic polynomial restricts to an
  // eigenfunction with lap u = -h(h+3) u, and the gradient relation follows
  // by differentiating: both live in the order-1 output jet.
  StereographicSphere s(0);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  PatchJet pj;
  for (int trial = 0; trial < 8; ++trial) {
    Vec4 z(u(rng), u(rng), u(rng), u(rng));
    s.eval(z, pj);

    // h = 1: ambient coordinate x5
    Jet u1 = patch_component_jet(pj, 4, 3);
    Jet l1 = laplace_beltrami_jet(pj, u1);
    for (int k = 0; k < 5; ++k)
      CHECK(l1.c[k] == doctest::Approx(-4.0 * u1.c[k]).epsilon(1e-9));

    // h = 2: x1 x2 is harmonic in R^5
    Jet u2 = patch_component_jet(pj, 0, 3) * patch_component_jet(pj, 1, 3);
    Jet l2 = laplace_beltrami_jet(pj, u2);
    for (int k = 0; k < 5; ++k)
      CHECK(l2.c[k] == doctest::Approx(-10.0 * u2.c[k]).epsilon(1e-9));
  }
}

TEST_CASE("small-slope discrepancy shrinks at fourth order") {
  PatchJet pj;
  Vec4 z(0.3, -0.2, 0.1, 0.25);
  double lam1 = 1e-1, lam2 = 1e-2;
  auto diff_at = [&](double lam) {
    auto g = sample_graph(lam);
    g->eval(z, pj);
    DiscrepancyReport rep = approximation_discrepancy(pj);
    CHECK(std::fabs(rep.lhs - rep.rhs) <= 20.0 * rep.bound);
    return std::fabs(rep.lhs - rep.rhs);
  };
  double slope = std::log10(diff_at(lam1) / diff_at(lam2));
  CHECK(slope > 3.8);
  CHECK(slope < 4.3);
}
