#include "lcd/needles.hpp"

#include <algorithm>

#include "lcd/curvature.hpp"

namespace lcd {

namespace {

// S = g A - (Sigma L_vv - L_vx - L_vx^T)/2 realizes the covariant Hessian A of u at x.
HJSeed seed_from_operator(const LagrangianModel& m, const PhasePoint& q, const Jet& j,
                          const Mat& A) {
  const Mat SL = sigma_Lvv(m, q, m.steps.sigma_flow);
  HJSeed s;
  s.x = q.x;
  s.v = q.v;
  s.p = j.Lv;
  s.S = symmetrized(j.Lvv * A - 0.5 * (SL - j.Lvx - j.Lvx.transpose()));
  return s;
}

}  // namespace

HJSeed seed_with_c0(const LagrangianModel& m, const PhasePoint& q, double c0) {
  const int n = m.dim();
  const Jet j = m.jet(q.x, q.v);
  const Mat& g = j.Lvv;
  const Vec& v = q.v;
  const Deviation d = deviation(m, q);
  const double vv = v.dot(g * v);
  if (!(vv > 0.0)) throw DomainError("seed: velocity vanishes");
  const Vec perp = d.Lambda - d.par * v;
  const Vec gv = g * v;
  const Mat A = (perp * gv.transpose() + v * (g * perp).transpose()) / vv +
                d.par * v * gv.transpose() / vv +
                c0 * (Mat::Identity(n, n) - v * gv.transpose() / vv);
  HJSeed s = seed_from_operator(m, q, j, A);
  s.c0 = c0;
  return s;
}

HJSeed seed_construct(const LagrangianModel& m, const PhasePoint& q, SeedMode mode, double N) {
  if (mode == SeedMode::Equality) {
    double c0 = 0.0;
    const int n = m.dim();
    if (!std::isinf(N) && N != n) {
      check_N(n, N);
      const Deviation d = deviation(m, q);
      c0 = (d.par - sigma_psi(m, q).d1) / (N - n);
    }
    return seed_with_c0(m, q, c0);
  }
  const Jet j = m.jet(q.x, q.v);
  const Vec& b = q.v;  // H_p
  const Vec& a = j.Lx; // -H_x
  const double bb = b.squaredNorm();
  if (!(bb > 0.0)) throw DomainError("seed: H_p vanishes");
  HJSeed s;
  s.x = q.x;
  s.v = q.v;
  s.p = j.Lv;
  s.S = (a * b.transpose() + b * a.transpose()) / bb - (a.dot(b) / (bb * bb)) * b * b.transpose();
  return s;
}

double tangency_residual(const LagrangianModel& m, const HJSeed& seed) {
  const Jet j = m.jet(seed.x, seed.v);
  return (-j.Lx + seed.S * seed.v).cwiseAbs().maxCoeff();
}

double needle_laplacian(const LagrangianModel& m, const PhasePoint& q, const Mat& U) {
  const Jet j = m.jet(q.x, q.v);
  const Eigen::LLT<Mat> llt = tonelli_factor(j.Lvv);
  // tr(H_px + H_pp U) with H_pp = g^{-1}, H_px = -g^{-1} L_vx
  const double tr = llt.solve(U - j.Lvx).trace();
  return tr + m.grad_log_density(q.x).dot(q.v);
}

namespace {

Mat initial_jacobi(const HJSeed& seed) {
  const Eigen::Index n = seed.x.size();
  Mat J0(2 * n, n);
  J0.topRows(n) = Mat::Identity(n, n);
  J0.bottomRows(n) = seed.S;
  return J0;
}

Mat hessian_of(const Mat& J) {
  const Eigen::Index n = J.cols();
  const Mat X = J.topRows(n), P = J.bottomRows(n);
  return X.transpose().partialPivLu().solve(P.transpose()).transpose();
}

// X passes through a singular matrix between two nearby grid points. A sign change of det X
// only sees odd multiplicities; a focal point of multiplicity k instead shows up as k negative
// eigenvalues of Xprev^{-1} X.
bool singular_between(const Mat& Xprev, const Mat& X) {
  if (!(X.determinant() > 0.0)) return true;
  const Mat M = Xprev.partialPivLu().solve(X);
  const Eigen::VectorXcd ev = M.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (!(ev(k).real() > 0.0)) return true;
  return false;
}

}  // namespace

double jacobi_laplacian_at(const LagrangianModel& m, const HJSeed& seed, double t) {
  PhasePoint q{seed.x, seed.v};
  Mat J = initial_jacobi(seed);
  if (t != 0.0) {
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / 1e-3 - 1e-9)));
    for (int i = 0; i < steps; ++i) variational_step(m, q, J, t / steps);
  }
  return needle_laplacian(m, q, hessian_of(J));
}

Needle extract_needle(const LagrangianModel& m, const HJSeed& seed, double t0, double t1,
                      double h) {
  if (!(t0 <= 0.0 && t1 >= 0.0 && h > 0.0))
    throw DomainError("extract_needle: need t0 <= 0 <= t1 and h > 0");
  const int n = m.dim();
  const PhasePoint q0{seed.x, seed.v};
  const Mat J0 = initial_jacobi(seed);
  FlowOptions opt;
  opt.check_energy = false;

  struct Branch {
    std::vector<double> t;
    std::vector<PhasePoint> q;
    std::vector<Mat> J;
    bool cut = false;
    double conj = kInf;
  };
  auto run = [&](double T) {
    Branch b;
    if (T == 0.0) return b;
    const VariationalState vs = variational_flow(m, q0, T, h, J0, opt);
    const double dt = vs.base.h;
    b.cut = vs.base.left_chart;
    for (std::size_t i = 1; i < vs.base.size(); ++i) {
      const Mat Xprev = vs.J[i - 1].topRows(n);
      if (singular_between(Xprev, vs.J[i].topRows(n))) {
        // Bisect the first degeneration of X inside (t_{i-1}, t_i].
        double lo = 0.0, hi = 1.0;
        while ((hi - lo) * std::abs(dt) > 1e-8) {
          const double mid = 0.5 * (lo + hi);
          PhasePoint q = vs.base.state(i - 1);
          Mat J = vs.J[i - 1];
          variational_step(m, q, J, mid * dt);
          (singular_between(Xprev, J.topRows(n)) ? hi : lo) = mid;
        }
        b.cut = true;
        b.conj = vs.base.t[i - 1] + hi * dt;
        break;
      }
      b.t.push_back(vs.base.t[i]);
      b.q.push_back(vs.base.state(i));
      b.J.push_back(vs.J[i]);
    }
    return b;
  };
  const Branch back = run(t0), fwd = run(t1);

  Needle nd;
  nd.h = h;
  std::vector<double> ts;
  std::vector<PhasePoint> qs;
  std::vector<Mat> Js;
  for (std::size_t k = back.t.size(); k-- > 0;) {
    ts.push_back(back.t[k]);
    qs.push_back(back.q[k]);
    Js.push_back(back.J[k]);
  }
  nd.origin = ts.size();
  ts.push_back(0.0);
  qs.push_back(q0);
  Js.push_back(J0);
  for (std::size_t k = 0; k < fwd.t.size(); ++k) {
    ts.push_back(fwd.t[k]);
    qs.push_back(fwd.q[k]);
    Js.push_back(fwd.J[k]);
  }
  nd.truncated = back.cut || fwd.cut;
  nd.conjugate_time = std::abs(back.conj) < std::abs(fwd.conj) ? back.conj : fwd.conj;
  if (std::isinf(back.conj) && std::isinf(fwd.conj)) nd.conjugate_time = kInf;

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Mat X = Js[i].topRows(n);
    const Mat U = hessian_of(Js[i]);
    const double det = X.determinant();
    const Eigen::JacobiSVD<Mat> svd(X);
    const Vec sv = svd.singularValues();
    nd.max_condition = std::max(nd.max_condition, sv(0) / sv(n - 1));
    nd.t.push_back(ts[i]);
    nd.x.push_back(qs[i].x);
    nd.v.push_back(qs[i].v);
    nd.detX.push_back(det);
    nd.rho.push_back(m.density(qs[i].x) * det);
    nd.psi.push_back(-std::log(nd.rho.back()));
    nd.Lu.push_back(needle_laplacian(m, qs[i], U));
    nd.U.push_back(U);
  }
  return nd;
}

NeedleReport needle_cd_check(const Needle& nd, double K, double N, double tol) {
  const std::size_t m = nd.t.size();
  if (m < 5) throw DomainError("needle_cd_check: needle has fewer than 5 grid points");
  NeedleReport r;
  r.K = K;
  r.N = N;
  r.tolerance = tol;
  const double h = nd.h;
  const auto& p = nd.psi;
  double best_origin_dist = kInf;
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const double d1 = d1_5pt(p[i - 2], p[i - 1], p[i + 1], p[i + 2], h);
    const double d2 = d2_5pt(p[i - 2], p[i - 1], p[i], p[i + 1], p[i + 2], h);
    const double quad = std::isinf(N) ? 0.0 : d1 * d1 / (N - 1.0);
    const double res = -d2 + quad + K;
    r.t.push_back(nd.t[i]);
    r.residual.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
    if (std::abs(nd.t[i]) < best_origin_dist) {
      best_origin_dist = std::abs(nd.t[i]);
      r.residual_at_origin = res;
    }
  }
  r.pass = r.max_residual <= tol;
  return r;
}

}  // namespace lcd
