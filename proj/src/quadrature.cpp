#include "willmore4/quadrature.hpp"

#include <map>

namespace w4 {

static Quad1D make_gauss_legendre(int n) {
  Quad1D q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) {
        // one polishing step after convergence
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / pp;
        break;
      }
    }
    q.x[i] = -x;
    q.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.w[i] = w;
    q.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.x[n / 2] = 0.0;
  return q;
}

const Quad1D& gauss_legendre(int n) {
  require(n >= 1 && n <= 4096, "gauss_legendre: size out of range");
  static std::map<int, Quad1D> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

Quad1D gauss_legendre(int n, double a, double b) {
  const Quad1D& base = gauss_legendre(n);
  Quad1D q;
  q.x.resize(n);
  q.w.resize(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.x[i] = mid + half * base.x[i];
    q.w[i] = half * base.w[i];
  }
  return q;
}

Quad1D log_radial_rule(int n, double a, double b) {
  require(a > 0 && b > a, "log_radial_rule: need 0 < a < b");
  Quad1D u = gauss_legendre(n, std::log(a), std::log(b));
  Quad1D q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double r = std::exp(u.x[i]);
    q.x[i] = r;
    q.w[i] = u.w[i] * r;
  }
  return q;
}

SphereRule sphere_rule(int n) {
  require(n >= 2, "sphere_rule: need at least 2 points per angle");
  SphereRule s;
  s.points_per_angle = n;
  const Quad1D t1 = gauss_legendre(n, 0.0, M_PI);
  const Quad1D t2 = gauss_legendre(n, 0.0, M_PI);
  const Quad1D ph = gauss_legendre(n, 0.0, 2.0 * M_PI);
  s.x1.reserve((std::size_t)n * n * n);
  s.x2.reserve(s.x1.capacity());
  s.x3.reserve(s.x1.capacity());
  s.x4.reserve(s.x1.capacity());
  s.w.reserve(s.x1.capacity());
  for (int i = 0; i < n; ++i) {
    double c1 = std::cos(t1.x[i]), s1 = std::sin(t1.x[i]);
    double w1 = t1.w[i] * s1 * s1;
    for (int j = 0; j < n; ++j) {
      double c2 = std::cos(t2.x[j]), s2 = std::sin(t2.x[j]);
      double w12 = w1 * t2.w[j] * s2;
      for (int k = 0; k < n; ++k) {
        double c3 = std::cos(ph.x[k]), s3 = std::sin(ph.x[k]);
        s.x1.push_back(c1);
        s.x2.push_back(s1 * c2);
        s.x3.push_back(s1 * s2 * c3);
        s.x4.push_back(s1 * s2 * s3);
        s.w.push_back(w12 * ph.w[k]);
      }
    }
  }
  // Gauss-Legendre in each angle converges geometrically, not exactly, on the
  // trig-polynomial integrands, so the certificate comes from measurement:
  // worst monomial error <= 1e-13 needs n = 2d+10 for d <= 10 and about
  // 1.1d+25 beyond (d=16 -> 39, d=24 -> 50, d=32 -> 59 measured).  Both
  // branches of the inverse stay at or below the measured thresholds.
  s.exactness = std::max(0, std::max((n - 10) / 2, (int)std::floor((n - 25) / 1.1)));
  return s;
}

int sphere_points_for_exactness(int degree) {
  require(degree <= 40, "sphere rule calibration covers degree <= 40");
  int d = std::max(degree, 0);
  return std::min(2 * d + 10, (int)std::ceil(1.1 * d + 25));
}

SphereRule sphere_rule_for_exactness(int degree) {
  return sphere_rule(sphere_points_for_exactness(degree));
}

Rational sphere_monomial_integral_over_vol(const std::array<int, 4>& a) {
  long long btot = 0;
  for (int v : a) {
    require(v >= 0, "monomial exponent must be nonnegative");
    if (v % 2 == 1) return Rational(0);
    btot += v / 2;
  }
  require(btot <= 12, "exact rational monomial integral limited to degree 24");
  // int_{S^3} x^(2b) dA / Vol = prod_i prod_{k=1..b_i} (2k-1)/2 / ((|b|+1)!/1)
  // accumulated with interleaved reductions to keep magnitudes small.
  Rational r(1);
  for (int v : a) {
    long long b = v / 2;
    for (long long k = 1; k <= b; ++k) r = r * Rational(2 * k - 1, 2);
  }
  for (long long k = 2; k <= btot + 1; ++k) r = r / Rational(k);
  return r;
}

double sphere_monomial_integral(const std::array<int, 4>& a) {
  long long btot = 0;
  for (int v : a) {
    require(v >= 0, "monomial exponent must be nonnegative");
    if (v % 2 == 1) return 0.0;
    btot += v / 2;
  }
  // f128 product: exact to ~1e-33, no intermediate overflow for any degree
  // reachable in practice.
  f128 r = 1;
  for (int v : a) {
    long long b = v / 2;
    for (long long k = 1; k <= b; ++k) r *= f128(2 * k - 1) / f128(2);
  }
  for (long long k = 2; k <= btot + 1; ++k) r /= f128(k);
  return to_double(r * vol_s3<f128>());
}

} // namespace w4
