#include "willmore4/rotation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace w4 {
namespace {

// Left and right quaternion multiplication as matrices on R^4 = H.  For unit
// q, p the map x -> q x conj(p) is a rotation and every element of SO(4)
// arises this way (uniquely up to (q, p) -> (-q, -p)).
Mat4 quat_left(const Vec4& q) {
  Mat4 m;
  m << q[0], -q[1], -q[2], -q[3],
       q[1],  q[0], -q[3],  q[2],
       q[2],  q[3],  q[0], -q[1],
       q[3], -q[2],  q[1],  q[0];
  return m;
}

Mat4 quat_right(const Vec4& p) {
  Mat4 m;
  m << p[0], -p[1], -p[2], -p[3],
       p[1],  p[0],  p[3], -p[2],
       p[2], -p[3],  p[0],  p[1],
       p[3],  p[2], -p[1],  p[0];
  return m;
}

Mat4 rotation_from_quaternions(Vec4 q, Vec4 p) {
  q.normalize();
  p.normalize();
  Vec4 pc(p[0], -p[1], -p[2], -p[3]);
  return quat_left(q) * quat_right(pc);
}

// nearest orthogonal matrix, used to pin down drift after chart steps
Mat4 polar_orthogonal(const Mat4& m) {
  Eigen::JacobiSVD<Mat4> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Mat4 skew_from(const double* x) {
  Mat4 k = Mat4::Zero();
  int l = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      k(a, b) = x[l];
      k(b, a) = -x[l];
      ++l;
    }
  return k;
}

double trace_norm_at(const Mat4& S, const TracelessFormTuple& P,
                     const TracelessFormTuple& R) {
  Eigen::MatrixXd A = build_A(S, P, R);
  return A.jacobiSvd().singularValues().sum();
}

// Nelder-Mead on f over R^6, minimizing.  Returns the best vertex.  The
// simplex is considered converged when its diameter drops below 1e-9.
template <class F>
void nelder_mead(const F& f, double step, std::array<double, 6>& best,
                 double& fbest) {
  constexpr int n = 6;
  std::array<std::array<double, n>, n + 1> v;
  std::array<double, n + 1> fv;
  v[0] = best;
  fv[0] = fbest;
  for (int i = 0; i < n; ++i) {
    v[i + 1] = best;
    v[i + 1][i] += step;
    fv[i + 1] = f(v[i + 1].data());
  }
  std::array<int, n + 1> idx;
  for (int it = 0; it < 600; ++it) {
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    double diam = 0;
    for (int i = 1; i <= n; ++i) {
      double d = 0;
      for (int j = 0; j < n; ++j)
        d = std::max(d, std::fabs(v[idx[i]][j] - v[idx[0]][j]));
      diam = std::max(diam, d);
    }
    if (diam < 1e-9) break;

    std::array<double, n> centroid{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) centroid[j] += v[idx[i]][j] / n;
    int worst = idx[n];
    auto blend = [&](double t, std::array<double, n>& out) {
      for (int j = 0; j < n; ++j)
        out[j] = centroid[j] + t * (v[worst][j] - centroid[j]);
    };
    std::array<double, n> xr, xe, xc;
    blend(-1.0, xr);
    double fr = f(xr.data());
    if (fr < fv[idx[0]]) {
      blend(-2.0, xe);
      double fe = f(xe.data());
      if (fe < fr) {
        v[worst] = xe;
        fv[worst] = fe;
      } else {
        v[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[idx[n - 1]]) {
      v[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    blend(0.5, xc);
    double fc = f(xc.data());
    if (fc < fv[worst]) {
      v[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      for (int j = 0; j < n; ++j)
        v[idx[i]][j] = 0.5 * (v[idx[i]][j] + v[idx[0]][j]);
      fv[idx[i]] = f(v[idx[i]].data());
    }
  }
  int ib = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[ib]) ib = i;
  best = v[ib];
  fbest = fv[ib];
}

// Monotone ascent on the trace norm.  At the current S the mixer T from the
// SVD makes Tr(T^T A(S')) a smooth function of S' that minorizes the trace
// norm and touches it at S' = S, so a line-searched Riemannian gradient step
// on that minorant strictly increases the trace norm itself.
double mm_ascent(Mat4& S, const TracelessFormTuple& P,
                 const TracelessFormTuple& R) {
  int k = P.k();
  double val = trace_norm_at(S, P, R);
  for (int it = 0; it < 400; ++it) {
    Eigen::MatrixXd A = build_A(S, P, R);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd T = svd.matrixU() * svd.matrixV().transpose();
    Mat4 G = Mat4::Zero();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        G += (2 * T(i, j)) * (R.comp[i] * S * P.comp[j]);
    Mat4 W = 0.5 * (S.transpose() * G - G.transpose() * S);
    double wn = W.norm();
    if (wn < 1e-13 * (1 + val)) break;
    double eta = 1.0 / (1 + wn);
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      Mat4 cand = polar_orthogonal(S * (eta * W).exp());
      double nv = trace_norm_at(cand, P, R);
      if (nv > val) {
        S = cand;
        val = nv;
        moved = true;
        break;
      }
      eta /= 2;
    }
    if (!moved) break;
  }
  return val;
}

// one local polish: monotone ascent from the start, then a Nelder-Mead
// round on the exp(skew) chart to step over non-smooth stalls, repeated
// until neither makes progress
double refine_from(Mat4 S, const TracelessFormTuple& P,
                   const TracelessFormTuple& R, Mat4& out) {
  double val = mm_ascent(S, P, R);
  for (int outer = 0; outer < 6; ++outer) {
    auto f = [&](const double* x) {
      Mat4 k = skew_from(x);
      return -trace_norm_at(S * k.exp(), P, R);
    };
    std::array<double, 6> x{};
    double fx = -val;
    nelder_mead(f, 0.3, x, fx);
    double step = 0;
    for (double c : x) step = std::max(step, std::fabs(c));
    if (step < 1e-9 || -fx <= val * (1 + 1e-13)) break;
    S = polar_orthogonal(S * skew_from(x.data()).exp());
    val = mm_ascent(S, P, R);
  }
  out = S;
  return val;
}

// one multi-start branch: polish the start, then hop by random chart kicks
// from the incumbent, keeping improvements.  Hops stay in the start's
// component of O(4); component choice is the caller's.
double hopped_refine(const Mat4& start, const TracelessFormTuple& P,
                     const TracelessFormTuple& R, std::mt19937_64& rng,
                     Mat4& out) {
  Mat4 S;
  double val = refine_from(start, P, R, S);
  std::normal_distribution<double> gauss;
  for (int hop = 0; hop < 5; ++hop) {
    double x[6];
    for (double& c : x) c = 0.4 * gauss(rng);
    Mat4 S2;
    double v2 =
        refine_from(polar_orthogonal(S * skew_from(x).exp()), P, R, S2);
    if (v2 > val) {
      val = v2;
      S = S2;
    }
  }
  out = S;
  return val;
}

}  // namespace

double TracelessFormTuple::norm() const {
  double s = 0;
  for (const Mat4& m : comp) s += m.squaredNorm();
  return std::sqrt(s);
}

TracelessFormTuple make_form_tuple(std::vector<Mat4> comp) {
  require(!comp.empty(), "form tuple needs at least one component");
  for (size_t i = 0; i < comp.size(); ++i) {
    double scale = 1 + comp[i].cwiseAbs().maxCoeff();
    require((comp[i] - comp[i].transpose()).cwiseAbs().maxCoeff() <=
                1e-12 * scale,
            "form tuple component " + std::to_string(i) + " is not symmetric");
    require(std::fabs(comp[i].trace()) <= 1e-12 * scale,
            "form tuple component " + std::to_string(i) + " has a trace");
  }
  return TracelessFormTuple{std::move(comp)};
}

Eigen::MatrixXd build_A(const Mat4& S, const TracelessFormTuple& P,
                        const TracelessFormTuple& R) {
  require(P.k() == R.k(), "form tuples have different codimension");
  require((S * S.transpose() - Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-10,
          "conjugating matrix is not orthogonal");
  int k = P.k();
  Eigen::MatrixXd A(k, k);
  for (int j = 0; j < k; ++j) {
    Mat4 conj = S * P.comp[j] * S.transpose();
    for (int i = 0; i < k; ++i) A(i, j) = (conj * R.comp[i]).trace();
  }
  return A;
}

TraceNormResult optimal_T(const Eigen::MatrixXd& A) {
  require(A.rows() == A.cols(), "pairing matrix must be square");
  require(A.allFinite(), "pairing matrix has non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  TraceNormResult res;
  res.T = svd.matrixU() * svd.matrixV().transpose();
  res.value = svd.singularValues().sum();
  return res;
}

RotationResult search_S(const TracelessFormTuple& P,
                        const TracelessFormTuple& R, int restarts,
                        std::uint64_t seed) {
  require(restarts >= 1, "need at least one restart");
  require(P.k() == R.k(), "form tuples have different codimension");
  int k = P.k();
  double np = P.norm(), nr = R.norm();
  if (np <= 1e-12 || nr <= 1e-12) {
    RotationResult res;
    res.S = Mat4::Identity();
    res.T = Eigen::MatrixXd::Identity(k, k);
    res.pairing = 0;
    res.trace_norm = 0;
    return res;
  }

  // Restart 0 starts at the identity, restart 1 at the bare reflection, so
  // both components of O(4) are probed even with two restarts (ascent along
  // exp(skew) charts cannot change the component).  Later restarts draw
  // quaternion pairs and flip the component with substream probability 1/2.
  std::vector<Mat4> best_s(restarts);
  std::vector<double> best_v(restarts);
  auto run = [&](int r) {
    std::seed_seq sq{seed, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(sq);
    std::normal_distribution<double> gauss;
    Mat4 start = Mat4::Identity();
    if (r == 1) {
      start.col(3) = -start.col(3);
    } else if (r > 1) {
      Vec4 q, p;
      for (int i = 0; i < 4; ++i) q[i] = gauss(rng);
      for (int i = 0; i < 4; ++i) p[i] = gauss(rng);
      start = rotation_from_quaternions(q, p);
      if (rng() & 1) start.col(3) = -start.col(3);
    }
    best_v[r] = hopped_refine(start, P, R, rng, best_s[r]);
  };

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(restarts));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int r = static_cast<int>(w); r < restarts;
           r += static_cast<int>(workers))
        run(r);
    });
  for (std::thread& t : pool) t.join();

  int ib = 0;
  for (int r = 1; r < restarts; ++r)
    if (best_v[r] > best_v[ib]) ib = r;

  RotationResult res;
  res.S = best_s[ib];
  Eigen::MatrixXd A = build_A(res.S, P, R);
  TraceNormResult tn = optimal_T(A);
  res.T = tn.T;
  res.trace_norm = tn.value;
  res.pairing = (res.T.array() * A.array()).sum();
  require(res.pairing > 1e-10 * np * nr,
          "search failed to produce a positive pairing for nonzero tuples");
  return res;
}

}  // namespace w4
